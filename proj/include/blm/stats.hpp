#pragma once

#include <cstddef>
#include <vector>

namespace blm {

// Regularized upper incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a).
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with df degrees of freedom.
double chi_square_sf(double x, double df);

// Asymptotic Kolmogorov complementary CDF Q_KS(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

struct KsResult {
    double statistic;  // sup |F1 - F2|
    double p_value;    // asymptotic, with the Stephens small-sample correction
};

// Two-sample Kolmogorov-Smirnov test. Sorts copies of both samples.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
    double statistic;
    double df;
    double p_value;
};

// Goodness of fit of observed counts against expected counts (same length,
// expected from the model scaled to the sample size).
ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected);

}  // namespace blm
