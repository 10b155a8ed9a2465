#include "talenti/model_space.hpp"

#include "talenti/errors.hpp"
#include "talenti/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace talenti {

namespace {

constexpr double kClampTol = 1e-12;

// sin(x)^(N-1) through exp((N-1)*log(sin x)), with the vanishing endpoints
// forced to zero so non-integer N never sees log(0).
double sin_pow(double x, double nm1) {
    const double s = std::sin(x);
    if (s <= 0.0)
        return 0.0;
    return std::exp(nm1 * std::log(s));
}

double clamp_to(double t, double lo, double hi, const char* what) {
    if (t < lo - kClampTol || t > hi + kClampTol)
        throw std::invalid_argument(std::string(what) + " out of range [" + std::to_string(lo) +
                                    ", " + std::to_string(hi) + "]: " + std::to_string(t));
    return std::clamp(t, lo, hi);
}

// H restricted to [0, D/2]; the full CDF is assembled from this lower half
// using the symmetry h(D - t) = h(t).
double lower_half_cdf(const ModelParams& p, double t) {
    if (t <= 0.0)
        return 0.0;
    const double nm1 = p.dimension() - 1.0;
    const double rate = p.angular_rate();
    const double c = p.normalizing_constant();
    const double raw =
        integrate([&](double x) { return sin_pow(rate * x, nm1); }, 0.0, t, 1e-15);
    return raw / c;
}

} // namespace

ModelParams::ModelParams(double curvature, double dimension) : K_(curvature), N_(dimension) {
    if (!(K_ > 0.0))
        throw std::invalid_argument("curvature bound K must be positive");
    if (!(N_ > 1.0) || !std::isfinite(N_))
        throw std::invalid_argument("dimension bound N must lie in (1, inf)");
    rate_ = std::sqrt(K_ / (N_ - 1.0));
    D_ = std::numbers::pi / rate_;
    const double nm1 = N_ - 1.0;
    c_ = integrate([&](double x) { return sin_pow(rate_ * x, nm1); }, 0.0, D_, 1e-13);
    if (!(c_ > 0.0))
        throw numerical_error("normalizing constant came out non-positive");
}

double eval_h(const ModelParams& p, double t) {
    const double D = p.interval_length();
    t = clamp_to(t, 0.0, D, "model coordinate t");
    if (t <= 0.0 || t >= D)
        return 0.0; // the density vanishes at both endpoints
    return sin_pow(p.angular_rate() * t, p.dimension() - 1.0) / p.normalizing_constant();
}

double eval_H(const ModelParams& p, double t) {
    const double D = p.interval_length();
    t = clamp_to(t, 0.0, D, "model coordinate t");
    if (t <= 0.0)
        return 0.0;
    if (t >= D)
        return 1.0;
    if (t <= 0.5 * D)
        return lower_half_cdf(p, t);
    return 1.0 - lower_half_cdf(p, D - t);
}

namespace {

// Solve lower_half_cdf(r) = target on [0, D/2], target in [0, 1/2].
// Regula falsi with the Illinois modification, bisection fallback when the
// proposal leaves the bracket. No derivative steps: h vanishes at 0 and
// Newton from that end is hopeless.
double invert_lower_half(const ModelParams& p, double target) {
    const double Dhalf = 0.5 * p.interval_length();
    if (target <= 0.0)
        return 0.0;
    double lo = 0.0, flo = -target;
    double hi = Dhalf, fhi = lower_half_cdf(p, Dhalf) - target;
    if (fhi <= 0.0)
        return Dhalf;

    int side = 0;
    for (int it = 0; it < 200; ++it) {
        const double width = hi - lo;
        if (width <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi))
            break;
        double x = (lo * fhi - hi * flo) / (fhi - flo);
        if (!(x > lo && x < hi) || !std::isfinite(x))
            x = 0.5 * (lo + hi);
        const double fx = lower_half_cdf(p, x) - target;
        if (fx == 0.0)
            return x;
        if (fx < 0.0) {
            lo = x;
            flo = fx;
            if (side == -1)
                fhi *= 0.5; // deflate the stale endpoint
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if (side == 1)
                flo *= 0.5;
            side = 1;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

double inv_H(const ModelParams& p, double v) {
    v = clamp_to(v, 0.0, 1.0, "mass fraction v");
    const double D = p.interval_length();
    if (v <= 0.0)
        return 0.0;
    if (v >= 1.0)
        return D;
    double r;
    if (v <= 0.5)
        r = invert_lower_half(p, v);
    else
        r = D - invert_lower_half(p, 1.0 - v);
    if (std::abs(eval_H(p, r) - v) > 1e-12)
        throw numerical_error("inv_H residual exceeded 1e-12 at v = " + std::to_string(v));
    return r;
}

double iso_profile(const ModelParams& p, double v) {
    v = clamp_to(v, 0.0, 1.0, "mass fraction v");
    if (v <= 0.0 || v >= 1.0)
        return 0.0;
    return eval_h(p, inv_H(p, v));
}

ModelConstants asympt_constants(const ModelParams& p) {
    ModelConstants mc;
    const double nm1 = p.dimension() - 1.0;
    mc.gamma1 = std::pow(p.curvature() / nm1, 0.5 * nm1) / p.normalizing_constant();
    mc.gamma2 = mc.gamma1 / p.dimension();
    return mc;
}

AsymptCheckReport asympt_check(const ModelParams& p, int n_samples) {
    AsymptCheckReport rep;
    rep.constants = asympt_constants(p);
    const double D = p.interval_length();
    const double N = p.dimension();
    const double slack = 1e-12;
    for (int i = 1; i < n_samples; ++i) {
        const double t = D * static_cast<double>(i) / n_samples;
        const double env1 = rep.constants.gamma1 * std::pow(t, N - 1.0);
        if (eval_h(p, t) > env1 * (1.0 + slack) + slack) {
            rep.ok = false;
            rep.violation_point = t;
            rep.violated_bound = "h(t) <= gamma1*t^(N-1)";
            return rep;
        }
        const double env2 = rep.constants.gamma2 * std::pow(t, N);
        if (eval_H(p, t) > env2 * (1.0 + slack) + slack) {
            rep.ok = false;
            rep.violation_point = t;
            rep.violated_bound = "H(t) <= gamma2*t^N";
            return rep;
        }
    }
    for (int i = 1; i < n_samples; ++i) {
        const double s = static_cast<double>(i) / n_samples;
        const double env = std::pow(s / rep.constants.gamma2, 1.0 / N);
        if (inv_H(p, s) < env * (1.0 - slack) - slack) {
            rep.ok = false;
            rep.violation_point = s;
            rep.violated_bound = "H^{-1}(s) >= (s/gamma2)^(1/N)";
            return rep;
        }
    }
    return rep;
}

} // namespace talenti
