#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace blm {

// Compensated accumulator for long sums.
class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct Quadrature {
    std::vector<double> nodes;    // on (0,1)
    std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre rule mapped to (0,1), nodes by Newton iteration on P_n.
inline Quadrature gauss_legendre(std::size_t n) {
    if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        // Tricomi initial guess for the i-th root of P_n on (-1,1).
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.nodes[i] = 0.5 * (1.0 - x);
        q.weights[i] = 0.5 * w;
        q.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        q.weights[n - 1 - i] = 0.5 * w;
    }
    return q;
}

// Linear interpolation of samples on a uniform grid {0, h, ..., n*h},
// zero outside [0, n*h].
inline double lerp_grid(const std::vector<double>& v, double h, double x) {
    if (x < 0.0) return 0.0;
    const double t = x / h;
    const auto i = static_cast<std::size_t>(t);
    if (i + 1 >= v.size()) {
        return (t <= static_cast<double>(v.size() - 1)) ? v.back() : 0.0;
    }
    const double f = t - static_cast<double>(i);
    return v[i] + f * (v[i + 1] - v[i]);
}

}  // namespace blm
