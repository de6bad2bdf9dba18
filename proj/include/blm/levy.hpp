#pragma once

#include <optional>
#include <utility>

#include "blm/rng.hpp"

namespace blm {

// One sample of (L_e, S_e): the displacement and running supremum of the
// Levy path at an independent rate-1 exponential killing time e.
struct KilledPair {
    double l;  // L_e
    double s;  // S_e >= max(l, 0)
};

// Killed pair together with the killing time, for the branching dynamics
// (child birth times need the parent lifetime).
struct LifetimePair {
    double lifetime;
    double l;
    double s;
};

// Parametric Levy process. Two variants:
//   BrownianWithDrift: L_t = mu t + eta B_t, Psi(lambda) = mu lambda + eta^2 lambda^2 / 2.
//     Covers the positive / negative / zero mean regimes with exact killed-pair
//     sampling through the Wiener-Hopf factorisation.
//   SymmetricStable: E[exp(i xi L_t)] = exp(-t |scale * xi|^alpha), alpha in (0,2).
//     Heavy-tailed regime; killed pairs by path discretisation.
class LevyModel {
public:
    enum class Kind { BrownianWithDrift, SymmetricStable };

    static LevyModel brownian(double mu, double eta);
    static LevyModel symmetric_stable(double alpha, double scale, double default_step = 1e-3);

    Kind kind() const { return kind_; }
    double mu() const { return mu_; }
    double eta() const { return eta_; }
    double alpha() const { return alpha_; }
    double scale() const { return scale_; }
    double default_step() const { return step_; }

    // Laplace exponent; Brownian variant only (the stable variant has no
    // finite exponential moments).
    double psi(double lambda) const;

    // E[L_1] = Psi'(0+) where it exists; nullopt for alpha <= 1.
    std::optional<double> mean() const;

    // The positive root of Psi(omega) = 0 (Cramer's condition); requires
    // the Brownian variant with mu < 0.
    double cramer_root() const;

    // Wiener-Hopf rates at killing rate 1: S_e ~ Exp(r+), S_e - L_e ~ Exp(r-)
    // independent, r_{+/-} = (-/+ mu + sqrt(mu^2 + 2 eta^2)) / eta^2.
    double wh_rate_pos() const;
    double wh_rate_neg() const;

    // Tail constant: x^alpha P(L_e >= x) -> ell_alpha
    // = Gamma(alpha) sin(pi alpha / 2) scale^alpha / pi. Stable variant only.
    double tail_constant() const;

    // Exact draw for the Brownian variant (step ignored); grid simulation at
    // mesh `step` for the stable variant (the sup is biased low by the mesh).
    KilledPair sample_killed_pair(RngStream& rng, double step) const;
    LifetimePair sample_lifetime_pair(RngStream& rng, double step) const;

    // Path-based sampler usable as an independent oracle for the Brownian
    // variant: grid increments plus the exact per-cell Brownian-bridge
    // supremum, so the sup carries no mesh bias.
    KilledPair sample_killed_pair_path(RngStream& rng, double step) const;

    // L_e alone (no supremum); exact for both variants.
    double sample_value_at_exp(RngStream& rng) const;

    // (P(S_e >= x), stderr): analytic exp(-r+ x) with stderr 0 for the
    // Brownian variant, Monte Carlo with binomial stderr for the stable one.
    std::pair<double, double> survival_sup(double x, std::uint64_t n_mc, RngStream& rng) const;

private:
    Kind kind_ = Kind::BrownianWithDrift;
    double mu_ = 0.0, eta_ = 1.0;            // Brownian variant
    double alpha_ = 0.0, scale_ = 0.0;       // stable variant
    double step_ = 1e-3;
};

}  // namespace blm
