#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blm/branching.hpp"
#include "blm/levy.hpp"
#include "blm/offspring.hpp"

namespace blm {

enum class Regime { PositiveMean, NegativeMean, Centered, HeavyTail };
enum class DecayFamily { Power, Exponential };

std::string to_string(Regime r);
std::string to_string(DecayFamily f);

// Closed-form tail prediction for P(M >= x):
//   positive mean:  x^{-1/(b-1)}  (E[L_1] / (c_b G(2-b)))^{1/(b-1)}
//   negative mean:  exp(-omega x) with Psi(omega) = 0; constant implicit
//   centered:       x^{-2/(b-1)}  ((b+1) s^2 / (c_b (b-1) G(2-b)))^{1/(b-1)}
//   heavy tail:     x^{-a/b}      ell_a^{1/b} ((b-1)/(c_b G(2-b)))^{1/b}
struct TheoryPrediction {
    Regime regime;
    DecayFamily decay;
    double exponent;                  // power exponent or exponential rate
    std::optional<double> constant;   // absent when no closed form exists
};

TheoryPrediction predict(const LevyModel& model, const OffspringLaw& law);

class FitError : public std::runtime_error {
public:
    enum class Reason { InsufficientPoints, SignalBelowNoise };
    FitError(Reason r, const std::string& what) : std::runtime_error(what), reason_(r) {}
    Reason reason() const { return reason_; }

private:
    Reason reason_;
};

struct PowerFit {
    double exponent;
    double constant;
    double exponent_stderr;
    double constant_stderr;
    std::size_t points;
    double x_lo, x_hi;
};

struct ExponentialFit {
    double rate;
    double rate_stderr;
    std::size_t points;
    double x_lo, x_hi;
};

// Weighted least squares of log(value) on log(x) (resp. on x), weights
// 1 / relative variance; points below 10x their stderr are dropped as noise.
// At least 5 usable points are required.
PowerFit fit_power_tail(const TailCurve& curve, double x_lo, double x_hi);
ExponentialFit fit_exponential_tail(const TailCurve& curve, double x_lo, double x_hi);

struct FitWindow {
    double x_lo, x_hi;
};

// Default window: from where the curve drops under `value_ceiling` (the top
// 0.5% of the tail) to where the signal-to-noise ratio falls under
// `snr_floor`. Noise-free curves (solver output) instead stop at
// `exact_floor` and stay clear of the grid truncation edge.
FitWindow auto_window(const TailCurve& curve, double value_ceiling = 0.005,
                      double snr_floor = 25.0, double exact_floor = 1e-5);

// Window bounded by value levels: x_lo where value first <= v_hi, x_hi where
// value last >= v_lo.
FitWindow window_by_value(const TailCurve& curve, double v_hi, double v_lo);

struct ComponentCheck {
    std::string component;  // "exponent" | "rate" | "constant"
    double predicted;
    double fitted;
    double tolerance;       // absolute for exponent/rate, relative for constant
    bool pass;
    bool skipped;
};

struct CompareTolerances {
    double exponent_abs = 0.15;
    double constant_rel = 0.25;
};

struct CompareReport {
    std::vector<ComponentCheck> checks;
    bool pass;
};

CompareReport compare(const TheoryPrediction& pred, const PowerFit& fit,
                      const CompareTolerances& tol);
CompareReport compare(const TheoryPrediction& pred, const ExponentialFit& fit,
                      const CompareTolerances& tol);

}  // namespace blm
