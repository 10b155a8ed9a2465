#pragma once

#include <cstddef>
#include <functional>

namespace talenti {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;     // accumulated error estimate
    bool converged = true;  // false if some panel hit max depth above tolerance
    long evaluations = 0;
};

// Adaptive Gauss-Kronrod (G7,K15) quadrature with bisection refinement.
// Integrand is never evaluated at the interval endpoints, so integrable
// endpoint singularities are handled by depth alone.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, int max_depth = 52);

// Convenience wrapper: returns the value, throws talenti::numerical_error on
// non-convergence.
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 int max_depth = 52);

} // namespace talenti
