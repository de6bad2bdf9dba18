#pragma once

#include <cstdint>
#include <vector>

#include "blm/rng.hpp"

namespace blm {

// Critical offspring distribution whose tail is regularly varying of index
// beta, i.e. n^beta * P(N >= n) -> c_beta with beta in (1,2). The built-in
// family has generating function g(s) = s + c (1-s)^beta, which is critical
// for every admissible (beta, c) and makes the nonlinear term
// F(z) = z - 1 + sum_k p_k (1-z)^k equal to c z^beta exactly.
//
// Immutable after construction; sampling touches only the caller's stream.
class OffspringLaw {
public:
    // Canonical family. Requires 1 < beta < 2 and 0 < c <= 1/beta
    // (the upper bound keeps p_1 = 1 - c*beta nonnegative).
    static OffspringLaw make_canonical(double beta, double c);

    // Extension point: explicit pmf table plus a declared tail constant.
    // The table must sum to at most 1, have mean 1 once the analytic
    // continuation c_beta n^{-beta} is attached, and match the declared
    // c_beta near its end. Checked numerically at construction.
    static OffspringLaw from_table(std::vector<double> pmf, double beta, double c_beta);

    double beta() const { return beta_; }
    // Canonical-family weight c; for table laws the equivalent
    // c_beta * Gamma(2-beta) / (beta-1).
    double family_weight() const { return c_; }
    bool is_canonical() const { return canonical_; }

    // P(N = k).
    double pmf(std::uint64_t k) const;

    // P(N >= n), analytic for the canonical family at every n:
    // tail(n) = c_beta * Gamma(n-beta) / Gamma(n) for n >= 2.
    double tail_sum(std::uint64_t n) const;

    // F(z) = z - 1 + sum_k p_k (1-z)^k on [0,1]; c z^beta for the
    // canonical family. Throws std::domain_error outside [0,1].
    double F(double z) const;

    // The constant c_beta of the tail hypothesis; satisfies
    // c_beta * Gamma(2-beta) / (beta-1) = lim_{z->0} F(z) / z^beta.
    double stable_constant() const { return c_beta_; }

    // Inverse-CDF draw: cached cumulative table up to the switch point,
    // analytic tail inversion beyond it.
    std::uint64_t sample(RngStream& rng) const;

private:
    OffspringLaw() = default;
    void build_sampling_table();
    double table_tail(std::uint64_t n) const;

    double beta_ = 0.0;
    double c_ = 0.0;       // canonical weight, = c_beta Gamma(2-beta)/(beta-1)
    double c_beta_ = 0.0;
    bool canonical_ = true;
    std::vector<double> table_pmf_;   // table laws only
    std::vector<double> cum_;         // P(N <= k) for k = 0..switch point
};

inline OffspringLaw make_canonical(double beta, double c) {
    return OffspringLaw::make_canonical(beta, c);
}
inline std::uint64_t sample_offspring(const OffspringLaw& law, RngStream& rng) {
    return law.sample(rng);
}

}  // namespace blm
