#include "blm/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blm/numerics.hpp"

namespace blm {

namespace {

constexpr double kTableTailCut = 1e-6;   // cumulative(k*) > 1 - 1e-6
constexpr std::uint64_t kTableCap = 1u << 22;

// exp(-w) - 1 + w, accurate for small w.
double expm1_minus(double w) {
    if (w < 1e-2) {
        // w^2/2 - w^3/6 + w^4/24 - w^5/120
        return w * w * (0.5 + w * (-1.0 / 6.0 + w * (1.0 / 24.0 - w / 120.0)));
    }
    return std::expm1(-w) + w;
}

}  // namespace

OffspringLaw OffspringLaw::make_canonical(double beta, double c) {
    if (!(beta > 1.0 && beta < 2.0)) {
        throw std::invalid_argument("make_canonical: beta must lie in (1,2)");
    }
    if (!(c > 0.0 && c <= 1.0 / beta)) {
        throw std::invalid_argument("make_canonical: c must lie in (0, 1/beta]");
    }
    OffspringLaw law;
    law.beta_ = beta;
    law.c_ = c;
    law.c_beta_ = c * (beta - 1.0) / std::tgamma(2.0 - beta);
    law.canonical_ = true;
    law.build_sampling_table();
    return law;
}

OffspringLaw OffspringLaw::from_table(std::vector<double> pmf, double beta, double c_beta) {
    if (!(beta > 1.0 && beta < 2.0)) {
        throw std::invalid_argument("from_table: beta must lie in (1,2)");
    }
    if (!(c_beta > 0.0)) throw std::invalid_argument("from_table: c_beta must be positive");
    if (pmf.size() < 16) throw std::invalid_argument("from_table: table too short");
    for (double p : pmf) {
        if (!(p >= 0.0)) throw std::invalid_argument("from_table: negative pmf entry");
    }
    OffspringLaw law;
    law.beta_ = beta;
    law.c_beta_ = c_beta;
    law.c_ = c_beta * std::tgamma(2.0 - beta) / (beta - 1.0);
    law.canonical_ = false;
    law.table_pmf_ = std::move(pmf);

    // Validate hyp2 near the end of the table and criticality of the whole law.
    const auto n_chk = static_cast<std::uint64_t>(law.table_pmf_.size() * 3 / 4);
    const double scaled = std::pow(static_cast<double>(n_chk), beta) * law.table_tail(n_chk);
    if (std::abs(scaled / c_beta - 1.0) > 0.05) {
        throw std::invalid_argument("from_table: tail does not match declared c_beta");
    }
    KahanSum mean;
    for (std::size_t k = 0; k < law.table_pmf_.size(); ++k) {
        mean.add(static_cast<double>(k) * law.table_pmf_[k]);
    }
    // First moment of the analytic continuation: sum_{k>=n} k c_beta k^{-beta-1} beta
    // ~ c_beta beta/(beta-1) n^{1-beta}.
    const auto n0 = static_cast<double>(law.table_pmf_.size());
    mean.add(c_beta * beta / (beta - 1.0) * std::pow(n0, 1.0 - beta));
    if (std::abs(mean.value() - 1.0) > 1e-4) {
        throw std::invalid_argument("from_table: law is not critical");
    }
    law.build_sampling_table();
    return law;
}

double OffspringLaw::pmf(std::uint64_t k) const {
    if (!canonical_) {
        if (k < table_pmf_.size()) return table_pmf_[k];
        return table_tail(k) - table_tail(k + 1);
    }
    if (k == 0) return c_;
    if (k == 1) return 1.0 - c_ * beta_;
    // p_k = c (-1)^k binom(beta,k) = c beta (beta-1) Gamma(k-beta) / (Gamma(k+1) Gamma(2-beta))
    const auto kd = static_cast<double>(k);
    return std::exp(std::log(c_ * beta_ * (beta_ - 1.0)) + std::lgamma(kd - beta_) -
                    std::lgamma(kd + 1.0) - std::lgamma(2.0 - beta_));
}

double OffspringLaw::table_tail(std::uint64_t n) const {
    if (n < table_pmf_.size()) {
        KahanSum s;
        for (std::size_t k = n; k < table_pmf_.size(); ++k) s.add(table_pmf_[k]);
        s.add(c_beta_ * std::pow(static_cast<double>(table_pmf_.size()), -beta_));
        return s.value();
    }
    return c_beta_ * std::pow(static_cast<double>(n), -beta_);
}

double OffspringLaw::tail_sum(std::uint64_t n) const {
    if (n == 0) return 1.0;
    if (!canonical_) return table_tail(n);
    if (n == 1) return 1.0 - c_;
    // The partial binomial sums telescope: sum_{k>=n} p_k = c (-1)^n binom(beta-1, n-1)
    // = c_beta Gamma(n-beta) / Gamma(n).
    const auto nd = static_cast<double>(n);
    return c_beta_ * std::exp(std::lgamma(nd - beta_) - std::lgamma(nd));
}

double OffspringLaw::F(double z) const {
    if (!(z >= 0.0 && z <= 1.0)) throw std::domain_error("F: z must lie in [0,1]");
    if (canonical_) return c_ * std::pow(z, beta_);
    if (z == 0.0) return 0.0;
    // Generic series in the cancellation-free form
    // F(z) = sum_k p_k ((1-z)^k - 1 + k z), every summand nonnegative.
    const double s = -std::log1p(-z);  // (1-z)^k = exp(-k s)
    const double s_minus_z = s - z;
    KahanSum acc;
    for (std::size_t k = 0; k < table_pmf_.size(); ++k) {
        const auto kd = static_cast<double>(k);
        acc.add(table_pmf_[k] * (expm1_minus(kd * s) - kd * s_minus_z));
    }
    // Continuation remainder: sum_{k>=k0} p_k ((1-z)^k - 1 + k z) with p_k
    // from the declared c_beta continuation. The first-moment piece
    // sum k p_k ~ beta c_beta/(beta-1) k0^{1-beta} dominates once k0 z >> 1.
    const auto k0 = static_cast<double>(table_pmf_.size());
    const double tail = table_tail(table_pmf_.size());
    const double tail_mean = beta_ * c_beta_ / (beta_ - 1.0) * std::pow(k0, 1.0 - beta_);
    acc.add(z * tail_mean - tail * (1.0 - std::exp(-k0 * s)));
    return acc.value();
}

void OffspringLaw::build_sampling_table() {
    std::uint64_t k_star = 8;
    while (k_star < kTableCap && tail_sum(k_star + 1) > kTableTailCut) k_star *= 2;
    // Cumulative values from the analytic tail keep the table and the tail
    // inversion branch mutually consistent.
    cum_.resize(k_star + 1);
    for (std::uint64_t k = 0; k <= k_star; ++k) cum_[k] = 1.0 - tail_sum(k + 1);
}

std::uint64_t OffspringLaw::sample(RngStream& rng) const {
    const double u = rng.uniform01();
    if (u <= cum_[0]) return 0;
    if (u <= cum_[1]) return 1;
    if (u <= cum_[2]) return 2;
    if (u <= cum_.back()) {
        const auto it = std::lower_bound(cum_.begin() + 2, cum_.end(), u);
        return static_cast<std::uint64_t>(it - cum_.begin());
    }
    // Tail inversion: smallest n with tail(n+1) <= 1-u.
    const double v = 1.0 - u;
    auto n = static_cast<std::uint64_t>(std::pow(c_beta_ / v, 1.0 / beta_));
    if (n < cum_.size()) n = cum_.size();
    while (tail_sum(n) <= v) --n;
    while (tail_sum(n + 1) > v) ++n;
    return n;
}

}  // namespace blm
