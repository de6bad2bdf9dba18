#include "blm/levy.hpp"

#include <cmath>
#include <stdexcept>

namespace blm {

LevyModel LevyModel::brownian(double mu, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("brownian: eta must be positive");
    LevyModel m;
    m.kind_ = Kind::BrownianWithDrift;
    m.mu_ = mu;
    m.eta_ = eta;
    return m;
}

LevyModel LevyModel::symmetric_stable(double alpha, double scale, double default_step) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw std::invalid_argument("symmetric_stable: alpha must lie in (0,2)");
    }
    if (!(scale > 0.0)) throw std::invalid_argument("symmetric_stable: scale must be positive");
    if (!(default_step > 0.0)) throw std::invalid_argument("symmetric_stable: step must be positive");
    LevyModel m;
    m.kind_ = Kind::SymmetricStable;
    m.alpha_ = alpha;
    m.scale_ = scale;
    m.step_ = default_step;
    return m;
}

double LevyModel::psi(double lambda) const {
    if (kind_ != Kind::BrownianWithDrift) {
        throw std::invalid_argument("psi: no finite exponential moments for the stable variant");
    }
    return mu_ * lambda + 0.5 * eta_ * eta_ * lambda * lambda;
}

std::optional<double> LevyModel::mean() const {
    if (kind_ == Kind::BrownianWithDrift) return mu_;
    if (alpha_ > 1.0) return 0.0;  // symmetric
    return std::nullopt;
}

double LevyModel::cramer_root() const {
    if (kind_ != Kind::BrownianWithDrift) {
        throw std::invalid_argument("cramer_root: unsupported variant");
    }
    if (!(mu_ < 0.0)) throw std::invalid_argument("cramer_root: requires E[L_1] < 0");
    return -2.0 * mu_ / (eta_ * eta_);
}

double LevyModel::wh_rate_pos() const {
    const double disc = std::sqrt(mu_ * mu_ + 2.0 * eta_ * eta_);
    return (-mu_ + disc) / (eta_ * eta_);
}

double LevyModel::wh_rate_neg() const {
    const double disc = std::sqrt(mu_ * mu_ + 2.0 * eta_ * eta_);
    return (mu_ + disc) / (eta_ * eta_);
}

double LevyModel::tail_constant() const {
    if (kind_ != Kind::SymmetricStable) {
        throw std::invalid_argument("tail_constant: Brownian variant has no power tail");
    }
    return std::tgamma(alpha_) * std::sin(0.5 * M_PI * alpha_) * std::pow(scale_, alpha_) / M_PI;
}

KilledPair LevyModel::sample_killed_pair(RngStream& rng, double step) const {
    if (!(step > 0.0)) throw std::invalid_argument("sample_killed_pair: step must be positive");
    if (kind_ == Kind::BrownianWithDrift) {
        const double s = rng.exponential(wh_rate_pos());
        const double d = rng.exponential(wh_rate_neg());
        return {s - d, s};
    }
    const LifetimePair p = sample_lifetime_pair(rng, step);
    return {p.l, p.s};
}

LifetimePair LevyModel::sample_lifetime_pair(RngStream& rng, double step) const {
    const double lifetime = rng.exponential();
    if (kind_ == Kind::BrownianWithDrift) {
        // The lifetime is independent of the pair here; only the marginal
        // joint law of (lifetime) and (l, s) separately is used downstream.
        const double s = rng.exponential(wh_rate_pos());
        const double d = rng.exponential(wh_rate_neg());
        return {lifetime, s - d, s};
    }
    const double inv_alpha = 1.0 / alpha_;
    const double sigma_full = scale_ * std::pow(step, inv_alpha);
    const auto n_full = static_cast<std::uint64_t>(lifetime / step);
    double x = 0.0;
    double sup = 0.0;
    if (alpha_ == 1.0) {
        for (std::uint64_t i = 0; i < n_full; ++i) {
            x += sigma_full * rng.cauchy();
            if (x > sup) sup = x;
        }
    } else {
        for (std::uint64_t i = 0; i < n_full; ++i) {
            x += sigma_full * rng.sym_stable(alpha_);
            if (x > sup) sup = x;
        }
    }
    const double rem = lifetime - static_cast<double>(n_full) * step;
    if (rem > 0.0) {
        x += scale_ * std::pow(rem, inv_alpha) * rng.sym_stable(alpha_);
        if (x > sup) sup = x;
    }
    return {lifetime, x, sup};
}

KilledPair LevyModel::sample_killed_pair_path(RngStream& rng, double step) const {
    if (!(step > 0.0)) throw std::invalid_argument("sample_killed_pair_path: step must be positive");
    if (kind_ != Kind::BrownianWithDrift) {
        const LifetimePair p = sample_lifetime_pair(rng, step);
        return {p.l, p.s};
    }
    const double lifetime = rng.exponential();
    const auto n_full = static_cast<std::uint64_t>(lifetime / step);
    const double var = eta_ * eta_;
    double x = 0.0;
    double sup = 0.0;
    const double sd_full = eta_ * std::sqrt(step);
    for (std::uint64_t i = 0; i < n_full; ++i) {
        const double a = x;
        x += mu_ * step + sd_full * rng.normal();
        // Exact supremum of the Brownian bridge over the cell; the drift
        // drops out once the endpoints are fixed.
        const double d = x - a;
        const double m = 0.5 * (a + x + std::sqrt(d * d - 2.0 * var * step * std::log(rng.uniform01())));
        if (m > sup) sup = m;
    }
    const double rem = lifetime - static_cast<double>(n_full) * step;
    if (rem > 0.0) {
        const double a = x;
        x += mu_ * rem + eta_ * std::sqrt(rem) * rng.normal();
        const double d = x - a;
        const double m = 0.5 * (a + x + std::sqrt(d * d - 2.0 * var * rem * std::log(rng.uniform01())));
        if (m > sup) sup = m;
    }
    return {x, sup};
}

double LevyModel::sample_value_at_exp(RngStream& rng) const {
    const double t = rng.exponential();
    if (kind_ == Kind::BrownianWithDrift) {
        return mu_ * t + eta_ * std::sqrt(t) * rng.normal();
    }
    return scale_ * std::pow(t, 1.0 / alpha_) * rng.sym_stable(alpha_);
}

std::pair<double, double> LevyModel::survival_sup(double x, std::uint64_t n_mc, RngStream& rng) const {
    if (!(x >= 0.0)) throw std::invalid_argument("survival_sup: x must be nonnegative");
    if (kind_ == Kind::BrownianWithDrift) {
        return {std::exp(-wh_rate_pos() * x), 0.0};
    }
    if (n_mc == 0) throw std::invalid_argument("survival_sup: n_mc must be positive");
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n_mc; ++i) {
        if (sample_killed_pair(rng, step_).s >= x) ++hits;
    }
    const double n = static_cast<double>(n_mc);
    const double p = static_cast<double>(hits) / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace blm
