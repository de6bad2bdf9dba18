#include "blm/asymptotics.hpp"

#include <cmath>

namespace blm {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::PositiveMean: return "positive-mean";
        case Regime::NegativeMean: return "negative-mean";
        case Regime::Centered: return "centered";
        case Regime::HeavyTail: return "heavy-tail";
    }
    return "?";
}

std::string to_string(DecayFamily f) {
    return f == DecayFamily::Power ? "power" : "exponential";
}

TheoryPrediction predict(const LevyModel& model, const OffspringLaw& law) {
    const double beta = law.beta();
    const double cb_gamma = law.stable_constant() * std::tgamma(2.0 - beta);  // c_beta G(2-beta)
    if (model.kind() == LevyModel::Kind::SymmetricStable) {
        const double alpha = model.alpha();
        const double constant =
            std::pow(model.tail_constant(), 1.0 / beta) * std::pow((beta - 1.0) / cb_gamma, 1.0 / beta);
        return {Regime::HeavyTail, DecayFamily::Power, alpha / beta, constant};
    }
    const double mu = model.mu();
    if (mu > 0.0) {
        const double constant = std::pow(mu / cb_gamma, 1.0 / (beta - 1.0));
        return {Regime::PositiveMean, DecayFamily::Power, 1.0 / (beta - 1.0), constant};
    }
    if (mu < 0.0) {
        return {Regime::NegativeMean, DecayFamily::Exponential, model.cramer_root(), std::nullopt};
    }
    const double sigma2 = model.eta() * model.eta();
    const double constant =
        std::pow((beta + 1.0) * sigma2 / ((beta - 1.0) * cb_gamma), 1.0 / (beta - 1.0));
    return {Regime::Centered, DecayFamily::Power, 2.0 / (beta - 1.0), constant};
}

namespace {

struct WlsData {
    std::vector<double> t, y, w;
    double x_lo = 0.0, x_hi = 0.0;
    bool weighted = false;
};

// Select usable points and build the regression inputs; `log_abscissa`
// distinguishes the power fit (log x) from the exponential fit (x).
WlsData select_points(const TailCurve& curve, double x_lo, double x_hi, bool log_abscissa) {
    if (curve.x.size() != curve.value.size() || curve.x.size() != curve.stderr_.size()) {
        throw std::invalid_argument("fit: malformed tail curve");
    }
    std::size_t in_window = 0;
    WlsData d;
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        const double x = curve.x[i];
        if (x < x_lo || x > x_hi) continue;
        if (log_abscissa && !(x > 0.0)) continue;
        ++in_window;
        const double v = curve.value[i];
        const double se = curve.stderr_[i];
        if (!(v > 0.0) || v <= 10.0 * se) continue;  // noise floor
        d.t.push_back(log_abscissa ? std::log(x) : x);
        d.y.push_back(std::log(v));
        d.w.push_back(se > 0.0 ? (v / se) * (v / se) : 0.0);
        if (d.t.size() == 1) d.x_lo = x;
        d.x_hi = x;
    }
    if (in_window < 5) {
        throw FitError(FitError::Reason::InsufficientPoints,
                       "fit: fewer than 5 points inside the window");
    }
    if (d.t.size() < 5) {
        throw FitError(FitError::Reason::SignalBelowNoise,
                       "fit: fewer than 5 window points clear the 10x-stderr noise floor");
    }
    // A curve without any reported noise is fitted unweighted.
    d.weighted = false;
    for (double w : d.w) {
        if (w > 0.0) d.weighted = true;
    }
    if (d.weighted) {
        // Zero-stderr points inside a noisy curve get the largest seen weight.
        double wmax = 0.0;
        for (double w : d.w) wmax = std::max(wmax, w);
        for (double& w : d.w) {
            if (w == 0.0) w = wmax;
        }
    } else {
        for (double& w : d.w) w = 1.0;
    }
    return d;
}

struct WlsLine {
    double intercept, slope;
    double var_intercept, var_slope;  // meaningful only for weighted fits
};

WlsLine wls(const WlsData& d) {
    double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < d.t.size(); ++i) {
        sw += d.w[i];
        st += d.w[i] * d.t[i];
        sy += d.w[i] * d.y[i];
        stt += d.w[i] * d.t[i] * d.t[i];
        sty += d.w[i] * d.t[i] * d.y[i];
    }
    const double delta = sw * stt - st * st;
    WlsLine line;
    line.slope = (sw * sty - st * sy) / delta;
    line.intercept = (stt * sy - st * sty) / delta;
    line.var_slope = sw / delta;
    line.var_intercept = stt / delta;
    return line;
}

}  // namespace

PowerFit fit_power_tail(const TailCurve& curve, double x_lo, double x_hi) {
    const WlsData d = select_points(curve, x_lo, x_hi, true);
    const WlsLine line = wls(d);
    PowerFit f;
    f.exponent = -line.slope;
    f.constant = std::exp(line.intercept);
    f.exponent_stderr = d.weighted ? std::sqrt(line.var_slope) : 0.0;
    f.constant_stderr = d.weighted ? f.constant * std::sqrt(line.var_intercept) : 0.0;
    f.points = d.t.size();
    f.x_lo = d.x_lo;
    f.x_hi = d.x_hi;
    return f;
}

ExponentialFit fit_exponential_tail(const TailCurve& curve, double x_lo, double x_hi) {
    const WlsData d = select_points(curve, x_lo, x_hi, false);
    const WlsLine line = wls(d);
    ExponentialFit f;
    f.rate = -line.slope;
    f.rate_stderr = d.weighted ? std::sqrt(line.var_slope) : 0.0;
    f.points = d.t.size();
    f.x_lo = d.x_lo;
    f.x_hi = d.x_hi;
    return f;
}

FitWindow auto_window(const TailCurve& curve, double value_ceiling, double snr_floor,
                      double exact_floor) {
    double x_lo = curve.x.empty() ? 0.0 : curve.x.front();
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        if (curve.value[i] <= value_ceiling) {
            x_lo = curve.x[i];
            break;
        }
    }
    bool noisy = false;
    for (double se : curve.stderr_) {
        if (se > 0.0) noisy = true;
    }
    double x_hi = x_lo;
    if (noisy) {
        for (std::size_t i = 0; i < curve.x.size(); ++i) {
            if (curve.value[i] >= snr_floor * curve.stderr_[i] && curve.value[i] > 0.0) {
                x_hi = std::max(x_hi, curve.x[i]);
            }
        }
    } else {
        // Exact curves: stop at the value floor and clear of the truncated
        // right edge, where the clamp beyond x_max leaks in.
        const double edge = 0.975 * curve.x.back();
        for (std::size_t i = 0; i < curve.x.size(); ++i) {
            if (curve.value[i] >= exact_floor && curve.x[i] <= edge) x_hi = std::max(x_hi, curve.x[i]);
        }
    }
    return {x_lo, x_hi};
}

FitWindow window_by_value(const TailCurve& curve, double v_hi, double v_lo) {
    FitWindow w{curve.x.front(), curve.x.back()};
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        if (curve.value[i] <= v_hi) {
            w.x_lo = curve.x[i];
            break;
        }
    }
    for (std::size_t i = curve.x.size(); i-- > 0;) {
        if (curve.value[i] >= v_lo) {
            w.x_hi = curve.x[i];
            break;
        }
    }
    return w;
}

namespace {

CompareReport build_report(const std::string& shape_component, double predicted, double fitted,
                           double exp_tol, const std::optional<double>& pred_const,
                           const std::optional<double>& fit_const, double const_rel_tol) {
    CompareReport rep;
    const bool shape_pass = std::abs(fitted - predicted) <= exp_tol;
    rep.checks.push_back({shape_component, predicted, fitted, exp_tol, shape_pass, false});
    if (pred_const.has_value()) {
        const double rel = std::abs(*fit_const - *pred_const) / std::abs(*pred_const);
        rep.checks.push_back(
            {"constant", *pred_const, *fit_const, const_rel_tol, rel <= const_rel_tol, false});
    } else {
        rep.checks.push_back({"constant", 0.0, fit_const.value_or(0.0), const_rel_tol, true, true});
    }
    rep.pass = true;
    for (const auto& c : rep.checks) rep.pass = rep.pass && (c.pass || c.skipped);
    return rep;
}

}  // namespace

CompareReport compare(const TheoryPrediction& pred, const PowerFit& fit,
                      const CompareTolerances& tol) {
    if (pred.decay != DecayFamily::Power) {
        throw std::invalid_argument("compare: prediction is not a power law");
    }
    return build_report("exponent", pred.exponent, fit.exponent, tol.exponent_abs, pred.constant,
                        fit.constant, tol.constant_rel);
}

CompareReport compare(const TheoryPrediction& pred, const ExponentialFit& fit,
                      const CompareTolerances& tol) {
    if (pred.decay != DecayFamily::Exponential) {
        throw std::invalid_argument("compare: prediction is not an exponential law");
    }
    return build_report("rate", pred.exponent, fit.rate, tol.exponent_abs, pred.constant,
                        std::nullopt, tol.constant_rel);
}

}  // namespace blm
