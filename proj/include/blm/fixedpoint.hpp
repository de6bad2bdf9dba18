#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "blm/levy.hpp"
#include "blm/offspring.hpp"

namespace blm {

// Uniform grid {0, h, 2h, ..., x_max} for the survival function u(x) = P(M >= x).
// u is understood as 0 for arguments below 0 and clamped to 0 beyond x_max.
struct Grid {
    double x_max;
    double h;
    std::size_t n;  // number of nodes, (x_max / h) + 1

    double x(std::size_t i) const { return h * static_cast<double>(i); }
};

Grid make_grid(double x_max, double h);

// Joint law of the killed pair (L_e, S_e) as used by the operator
//   T(u)(x) = P(S_e >= x) + E[ 1{S_e < x} (u - F o u)(x - L_e) ].
// Either the exact product-exponential form (Brownian variant, Wiener-Hopf
// rates) or a frozen empirical sample of pairs.
class Kernel {
public:
    static Kernel analytic(const LevyModel& brownian_model);
    static Kernel empirical(std::vector<KilledPair> pairs);
    static Kernel from_model(const LevyModel& model, std::size_t pair_count, RngStream& rng,
                             double step);

    bool is_analytic() const { return analytic_; }
    std::size_t pair_count() const { return pairs_.size(); }
    double rate_pos() const { return r_pos_; }
    double rate_neg() const { return r_neg_; }
    const std::vector<KilledPair>& pairs() const { return pairs_; }

    // P(S_e >= x).
    double survival(double x) const;

    std::string describe() const;

private:
    bool analytic_ = false;
    double r_pos_ = 0.0, r_neg_ = 0.0;
    std::vector<KilledPair> pairs_;  // sorted by s ascending
};

struct SolverSolution {
    double x_max = 0.0;
    double h = 0.0;
    std::vector<double> u;        // on the grid, u[0] == 1
    double residual = 0.0;        // sup-norm of the last update
    std::uint64_t iterations = 0;
};

class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// One application of the monotone operator T to a grid function.
std::vector<double> apply_T(const std::vector<double>& u, const Kernel& kernel,
                            const OffspringLaw& law, const Grid& grid);

// Monotone fixed-point iteration from u_0 == 0; the iterates increase
// pointwise and the sup-norm updates are nonincreasing, so the first update
// below tol stops the solve. Throws SolveError when max_iter is exhausted.
SolverSolution solve(const Kernel& kernel, const OffspringLaw& law, const Grid& grid, double tol,
                     std::uint64_t max_iter);

// Remainder diagnostic of the shifted equation,
//   R(x) = P(S_e >= x) + E[(1{S_e < x} - 1{L_e < x}) (u - F o u)(x - L_e)],
// evaluated with the same kernel at every grid node.
std::vector<double> remainder_curve(const SolverSolution& solution, const Kernel& kernel,
                                    const OffspringLaw& law);

}  // namespace blm
