#include "blm/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blm/numerics.hpp"

namespace blm {

Grid make_grid(double x_max, double h) {
    if (!(x_max > 0.0) || !(h > 0.0) || h > x_max) {
        throw std::invalid_argument("make_grid: need 0 < h <= x_max");
    }
    const auto n = static_cast<std::size_t>(std::llround(x_max / h)) + 1;
    return Grid{h * static_cast<double>(n - 1), h, n};
}

Kernel Kernel::analytic(const LevyModel& m) {
    if (m.kind() != LevyModel::Kind::BrownianWithDrift) {
        throw std::invalid_argument("Kernel::analytic: product-exponential form requires the Brownian variant");
    }
    Kernel k;
    k.analytic_ = true;
    k.r_pos_ = m.wh_rate_pos();
    k.r_neg_ = m.wh_rate_neg();
    return k;
}

Kernel Kernel::empirical(std::vector<KilledPair> pairs) {
    if (pairs.empty()) throw std::invalid_argument("Kernel::empirical: no pairs");
    for (const auto& p : pairs) {
        if (!(p.s >= 0.0) || !(p.s >= p.l)) {
            throw std::invalid_argument("Kernel::empirical: pair violates s >= max(l, 0)");
        }
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const KilledPair& a, const KilledPair& b) { return a.s < b.s; });
    Kernel k;
    k.analytic_ = false;
    k.pairs_ = std::move(pairs);
    return k;
}

Kernel Kernel::from_model(const LevyModel& model, std::size_t pair_count, RngStream& rng,
                          double step) {
    std::vector<KilledPair> pairs;
    pairs.reserve(pair_count);
    for (std::size_t i = 0; i < pair_count; ++i) {
        pairs.push_back(model.sample_killed_pair(rng, step));
    }
    return empirical(std::move(pairs));
}

double Kernel::survival(double x) const {
    if (x <= 0.0) return 1.0;
    if (analytic_) return std::exp(-r_pos_ * x);
    const auto it = std::lower_bound(pairs_.begin(), pairs_.end(), x,
                                     [](const KilledPair& p, double v) { return p.s < v; });
    return static_cast<double>(pairs_.end() - it) / static_cast<double>(pairs_.size());
}

std::string Kernel::describe() const {
    std::ostringstream os;
    if (analytic_) {
        os << "product-exponential(r+=" << r_pos_ << ", r-=" << r_neg_ << ")";
    } else {
        os << "empirical(m=" << pairs_.size() << ")";
    }
    return os.str();
}

namespace {

std::vector<double> w_of(const std::vector<double>& u, const OffspringLaw& law) {
    std::vector<double> w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] - law.F(u[i]);
    return w;
}

// E[w(y + D)] for D ~ Exp(r-) at every grid node, exact for piecewise-linear w
// vanishing beyond x_max. Backward sweep.
std::vector<double> lift_against_descent(const std::vector<double>& w, const Grid& g, double r) {
    const std::size_t n = w.size();
    std::vector<double> phi(n, 0.0);
    const double e = std::exp(-r * g.h);
    for (std::size_t j = n - 1; j-- > 0;) {
        const double b = (w[j + 1] - w[j]) / g.h;
        const double a = w[j + 1] + b / r - phi[j + 1];
        phi[j] = w[j] + b / r - e * a;
    }
    return phi;
}

// Psi(x_i) = int_0^{x_i} r+ e^{-r+(x_i - y)} phi(y) dy where phi is the exact
// (exponential + linear) lift above; per-cell closed forms, forward sweep.
std::vector<double> fold_against_ascent(const std::vector<double>& w,
                                        const std::vector<double>& phi, const Grid& g,
                                        double r_pos, double r_neg) {
    const std::size_t n = w.size();
    std::vector<double> psi(n, 0.0);
    const double e_pos = std::exp(-r_pos * g.h);
    const double e_sum = std::exp(-(r_pos + r_neg) * g.h);
    const double one_m = 1.0 - e_pos;
    const double moment = one_m / r_pos - g.h * e_pos;  // int_0^h r+ e^{-r+ t} t dt
    const double cross = r_pos / (r_pos + r_neg) * (1.0 - e_sum);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double b = (w[i + 1] - w[i]) / g.h;
        const double a = w[i + 1] + b / r_neg - phi[i + 1];
        psi[i + 1] = e_pos * psi[i] + (w[i + 1] + b / r_neg) * one_m - b * moment - a * cross;
    }
    return psi;
}

// Straight evaluation against the frozen pair sample.
std::vector<double> apply_empirical(const std::vector<double>& w, const Kernel& k, const Grid& g) {
    const auto& pairs = k.pairs();
    const double m = static_cast<double>(pairs.size());
    const std::size_t n = g.n;
    std::vector<double> out(n, 0.0);
    std::size_t boundary = 0;  // pairs with s < x_i form a growing prefix
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.x(i);
        while (boundary < pairs.size() && pairs[boundary].s < x) ++boundary;
        KahanSum acc;
        for (std::size_t j = 0; j < boundary; ++j) {
            acc.add(lerp_grid(w, g.h, x - pairs[j].l));
        }
        out[i] = (static_cast<double>(pairs.size() - boundary) + acc.value()) / m;
    }
    return out;
}

}  // namespace

std::vector<double> apply_T(const std::vector<double>& u, const Kernel& kernel,
                            const OffspringLaw& law, const Grid& grid) {
    if (u.size() != grid.n) throw std::invalid_argument("apply_T: grid/function size mismatch");
    const std::vector<double> w = w_of(u, law);
    std::vector<double> out(grid.n);
    if (kernel.is_analytic()) {
        const std::vector<double> phi = lift_against_descent(w, grid, kernel.rate_neg());
        const std::vector<double> psi =
            fold_against_ascent(w, phi, grid, kernel.rate_pos(), kernel.rate_neg());
        for (std::size_t i = 0; i < grid.n; ++i) {
            out[i] = std::exp(-kernel.rate_pos() * grid.x(i)) + psi[i];
        }
    } else {
        out = apply_empirical(w, kernel, grid);
    }
    for (double& v : out) v = std::min(1.0, std::max(0.0, v));
    return out;
}

SolverSolution solve(const Kernel& kernel, const OffspringLaw& law, const Grid& grid, double tol,
                     std::uint64_t max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("solve: tol must be positive");
    std::vector<double> u(grid.n, 0.0);
    double residual = 1.0;
    std::uint64_t it = 0;
    while (it < max_iter) {
        std::vector<double> next = apply_T(u, kernel, law, grid);
        ++it;
        residual = 0.0;
        for (std::size_t i = 0; i < grid.n; ++i) {
            // Monotone from below: clip the vanishing negative wobble of the
            // closed-form sweeps so the iterates stay ordered.
            if (next[i] < u[i]) next[i] = u[i];
            residual = std::max(residual, next[i] - u[i]);
        }
        u.swap(next);
        if (residual < tol) {
            return SolverSolution{grid.x_max, grid.h, std::move(u), residual, it};
        }
    }
    std::ostringstream os;
    os << "solve: no convergence after " << max_iter << " iterations, residual " << residual
       << " > tol " << tol;
    throw SolveError(os.str(), residual);
}

std::vector<double> remainder_curve(const SolverSolution& solution, const Kernel& kernel,
                                    const OffspringLaw& law) {
    const Grid grid = make_grid(solution.x_max, solution.h);
    const std::vector<double> w = w_of(solution.u, law);
    std::vector<double> r(grid.n);
    if (kernel.is_analytic()) {
        const double rp = kernel.rate_pos();
        const double rn = kernel.rate_neg();
        const double k_mix = rp * rn / (rp + rn);
        const std::vector<double> phi = lift_against_descent(w, grid, rn);
        const std::vector<double> psi = fold_against_ascent(w, phi, grid, rp, rn);
        // E[1{L_e < x} w(x - L_e)] = K (G(x) + H(x)) with the two-sided
        // exponential density of L_e = S_e - D.
        const double e_pos = std::exp(-rp * grid.h);
        const double e_neg = std::exp(-rn * grid.h);
        std::vector<double> big_g(grid.n, 0.0), big_h(grid.n, 0.0);
        for (std::size_t i = 0; i + 1 < grid.n; ++i) {
            const double b = (w[i + 1] - w[i]) / grid.h;
            const double local = w[i + 1] * (1.0 - e_pos) / rp -
                                 b * ((1.0 - e_pos) / (rp * rp) - grid.h * e_pos / rp);
            big_g[i + 1] = e_pos * big_g[i] + local;
        }
        for (std::size_t j = grid.n - 1; j-- > 0;) {
            const double b = (w[j + 1] - w[j]) / grid.h;
            const double local = w[j] * (1.0 - e_neg) / rn +
                                 b * ((1.0 - e_neg) / (rn * rn) - grid.h * e_neg / rn);
            big_h[j] = local + e_neg * big_h[j + 1];
        }
        for (std::size_t i = 0; i < grid.n; ++i) {
            r[i] = std::exp(-rp * grid.x(i)) + psi[i] - k_mix * (big_g[i] + big_h[i]);
        }
    } else {
        const auto& pairs = kernel.pairs();
        const double m = static_cast<double>(pairs.size());
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double x = grid.x(i);
            KahanSum acc;
            std::size_t exceed = 0;
            for (const auto& p : pairs) {
                if (p.s >= x) {
                    ++exceed;
                    if (p.l < x) acc.add(-lerp_grid(w, grid.h, x - p.l));
                }
            }
            r[i] = (static_cast<double>(exceed) + acc.value()) / m;
        }
    }
    return r;
}

}  // namespace blm
