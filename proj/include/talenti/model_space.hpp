#pragma once

#include <optional>
#include <string>

namespace talenti {

// One-dimensional weighted model space for curvature bound K > 0 and
// dimension bound N in (1, inf): the interval [0, D] with D = pi*sqrt((N-1)/K)
// carrying the probability density
//
//     h(t) = sin(t*sqrt(K/(N-1)))^(N-1) / c,
//
// where c normalizes the total mass to one. For integer N this is the radial
// profile of the round N-sphere with Ricci curvature K.
class ModelParams {
public:
    ModelParams(double curvature, double dimension);

    double curvature() const { return K_; }
    double dimension() const { return N_; }

    // sqrt(K/(N-1)), the frequency inside the sine.
    double angular_rate() const { return rate_; }

    // D = pi*sqrt((N-1)/K), the interval length.
    double interval_length() const { return D_; }

    // Normalizing constant c, computed once by adaptive quadrature (abs tol
    // 1e-13) and cached.
    double normalizing_constant() const { return c_; }

private:
    double K_;
    double N_;
    double rate_;
    double D_;
    double c_;
};

struct ModelConstants {
    double gamma1 = 0.0; // (1/c) * (K/(N-1))^((N-1)/2)
    double gamma2 = 0.0; // gamma1 / N
};

// Density h(t). Arguments within 1e-12 of [0, D] are clamped; anything
// further out raises std::invalid_argument.
double eval_h(const ModelParams& p, double t);

// Cumulative distribution H(t) = integral of h over [0, t]. Exact 0/1 at the
// endpoints; evaluated through the symmetric tail for t > D/2 so that values
// near D keep full absolute accuracy.
double eval_H(const ModelParams& p, double t);

// Inverse of H on [0, 1], by a bracketed bisection/secant hybrid. The
// residual |H(r) - v| is driven below 1e-12 (usually to round-off).
double inv_H(const ModelParams& p, double v);

// Isoperimetric profile I(v) = h(H^{-1}(v)); symmetric about v = 1/2.
double iso_profile(const ModelParams& p, double v);

ModelConstants asympt_constants(const ModelParams& p);

struct AsymptCheckReport {
    ModelConstants constants;
    bool ok = true;
    // First sampled point violating one of the envelope bounds, if any.
    std::optional<double> violation_point;
    std::string violated_bound;
};

// Samples the envelope bounds h(t) <= gamma1*t^(N-1), H(t) <= gamma2*t^N and
// H^{-1}(s) >= (s/gamma2)^(1/N) on a grid. A violation indicates an
// implementation bug, not a property of the parameters.
AsymptCheckReport asympt_check(const ModelParams& p, int n_samples = 256);

} // namespace talenti
