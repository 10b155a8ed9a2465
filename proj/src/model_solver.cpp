#include "talenti/model_solver.hpp"

#include "talenti/errors.hpp"
#include "talenti/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace talenti {

namespace {

// Numerical inverse of H with a warm start. Inside the interval a guarded
// Newton step (H' = h) converges in a couple of iterations when consecutive
// queries are close, which is the access pattern of the quadrature loops
// below. Near the endpoints, where h degenerates, it falls back to the
// bracketed solver in inv_H.
class WarmInverse {
public:
    explicit WarmInverse(const ModelParams& p)
        : p_(p), lo_guard_(0.02 * p.interval_length()),
          hi_guard_(0.98 * p.interval_length()), last_(0.5 * p.interval_length()) {}

    double operator()(double v) {
        double r = last_;
        if (r <= lo_guard_ || r >= hi_guard_)
            return fallback(v);
        for (int it = 0; it < 12; ++it) {
            const double res = eval_H(p_, r) - v;
            if (std::abs(res) <= 1e-13) {
                last_ = r;
                return r;
            }
            const double h = eval_h(p_, r);
            if (!(h > 0.0))
                return fallback(v);
            double next = r - res / h;
            if (next <= lo_guard_ || next >= hi_guard_)
                return fallback(v);
            r = next;
        }
        return fallback(v);
    }

private:
    double fallback(double v) {
        const double r = inv_H(p_, v);
        last_ = r;
        return r;
    }

    const ModelParams& p_;
    double lo_guard_, hi_guard_;
    double last_;
};

// Integrate f over [a, b] splitting at the interior points of `knots`
// (sorted). Used to keep panels clear of step-function kinks.
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       const std::vector<double>& knots, double tol) {
    double acc = 0.0;
    double left = a;
    for (double k : knots) {
        if (k <= a || k >= b)
            continue;
        acc += integrate(f, left, k, tol);
        left = k;
    }
    acc += integrate(f, left, b, tol);
    return acc;
}

std::vector<double> chebyshev_grid(double r_v, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] =
            r_v * 0.5 * (1.0 - std::cos(std::numbers::pi * i / (n - 1)));
    g.front() = 0.0;
    g.back() = r_v;
    return g;
}

} // namespace

double ModelSolution::eval(double rho) const {
    if (rho <= grid.front())
        return w.front();
    if (rho >= grid.back())
        return w.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), rho);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    const double t = (rho - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return (1.0 - t) * w[i - 1] + t * w[i];
}

double ModelSolution::eval_prime(double rho) const {
    if (rho <= grid.front())
        return w_prime.front();
    if (rho >= grid.back())
        return w_prime.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), rho);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    const double t = (rho - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return (1.0 - t) * w_prime[i - 1] + t * w_prime[i];
}

ModelSolution solve_model_poisson(const ModelParams& p, const StepFunction& f_sharp, double v,
                                  double alpha, int n_grid) {
    if (!(v > 0.0) || !(v < 1.0))
        throw std::invalid_argument("domain mass v must lie in (0, 1)");
    if (!(alpha > 0.0))
        throw std::invalid_argument("ellipticity constant alpha must be positive");
    if (n_grid < 2)
        throw std::invalid_argument("need at least two grid nodes");
    if (f_sharp.empty())
        throw std::invalid_argument("empty data");
    if (std::abs(f_sharp.total_mass() - v) > 1e-9 * std::max(1.0, v))
        throw std::invalid_argument("data is defined on [0, " +
                                    std::to_string(f_sharp.total_mass()) +
                                    "] but the domain has mass " + std::to_string(v));

    ModelSolution sol{p, v, inv_H(p, v), alpha, f_sharp, {}, {}, {}, {}};
    const int n = n_grid;
    sol.grid = chebyshev_grid(sol.r_v, n);
    sol.grid_H.resize(sol.grid.size());
    for (std::size_t i = 0; i < sol.grid.size(); ++i)
        sol.grid_H[i] = eval_H(p, sol.grid[i]);
    sol.grid_H.back() = v; // H(r_v) = v by construction of r_v

    // Kinks of F o H in the rho variable.
    std::vector<double> pushed;
    for (double s : f_sharp.breakpoints())
        if (s > 0.0 && s < v)
            pushed.push_back(inv_H(p, s));

    const auto integrand = [&](double r) {
        return f_sharp.integral(eval_H(p, r)) / eval_h(p, r);
    };

    sol.w.assign(sol.grid.size(), 0.0);
    const double seg_tol = 1e-13;
    double acc = 0.0;
    for (std::size_t i = sol.grid.size() - 1; i-- > 0;) {
        acc += integrate_split(integrand, sol.grid[i], sol.grid[i + 1], pushed, seg_tol);
        sol.w[i] = acc;
    }

    sol.w_prime.assign(sol.grid.size(), 0.0);
    for (std::size_t i = 1; i < sol.grid.size(); ++i)
        sol.w_prime[i] = -f_sharp.integral(sol.grid_H[i]) / eval_h(p, sol.grid[i]);
    // At rho = 0 the quotient F(H)/h tends to 0 for N > 1.

    if (alpha != 1.0) {
        for (auto& x : sol.w)
            x /= alpha;
        for (auto& x : sol.w_prime)
            x /= alpha;
    }
    return sol;
}

std::vector<double> eval_repr2_on_grid(const ModelSolution& sol) {
    const ModelParams& p = sol.params;
    WarmInverse inverse(p);
    const auto integrand = [&](double sigma) {
        const double iso = eval_h(p, inverse(sigma));
        return sol.f_sharp.integral(sigma) / (iso * iso);
    };
    const std::vector<double>& bp = sol.f_sharp.breakpoints();
    std::vector<double> knots(bp.begin(), bp.end());

    std::vector<double> out(sol.grid.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = sol.grid.size() - 1; i-- > 0;) {
        acc += integrate_split(integrand, sol.grid_H[i], sol.grid_H[i + 1], knots, 1e-13);
        out[i] = acc / sol.alpha;
    }
    return out;
}

namespace {

// C^infinity bump supported in [0, 0.95]: flat value 1 at 0, vanishing with
// all derivatives at the right edge.
double bump(double x) {
    const double y = x / 0.95;
    if (y >= 1.0)
        return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - y * y));
}

double bump_prime(double x) {
    const double y = x / 0.95;
    if (y >= 1.0)
        return 0.0;
    const double d = 1.0 - y * y;
    return bump(x) * (-2.0 * y / (d * d)) / 0.95;
}

} // namespace

double weak_form_residual(const ModelSolution& sol, int n_test) {
    const ModelParams& p = sol.params;
    const double r_v = sol.r_v;
    const double pi = std::numbers::pi;

    std::vector<double> pushed;
    for (double s : sol.f_sharp.breakpoints())
        if (s > 0.0 && s < sol.v)
            pushed.push_back(inv_H(p, s));

    double worst = 0.0;
    for (int j = 0; j < n_test; ++j) {
        const double k = j * pi / r_v;
        const auto phi = [&](double rho) { return std::cos(k * rho) * bump(rho / r_v); };
        const auto phi_prime = [&](double rho) {
            return -k * std::sin(k * rho) * bump(rho / r_v) +
                   std::cos(k * rho) * bump_prime(rho / r_v) / r_v;
        };
        // int w' phi' dm: the weight h cancels against the 1/h in w'.
        const auto lhs_integrand = [&](double rho) {
            return -sol.f_sharp.integral(eval_H(p, rho)) * phi_prime(rho) / sol.alpha;
        };
        const auto rhs_integrand = [&](double rho) {
            return sol.f_sharp(eval_H(p, rho)) * phi(rho) * eval_h(p, rho) / sol.alpha;
        };
        const double lhs = integrate_split(lhs_integrand, 0.0, r_v, pushed, 1e-12);
        const double rhs = integrate_split(rhs_integrand, 0.0, r_v, pushed, 1e-12);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double model_gradient_lq_norm(const ModelSolution& sol, double q) {
    if (!(q >= 1.0) || !(q <= 2.0))
        throw std::invalid_argument("gradient norm exponent q must lie in [1, 2]");
    const ModelParams& p = sol.params;
    WarmInverse inverse(p);
    const auto integrand = [&](double xi) {
        const double iso = eval_h(p, inverse(xi));
        return std::pow(sol.f_sharp.integral(xi) / (sol.alpha * iso), q);
    };
    const std::vector<double>& bp = sol.f_sharp.breakpoints();
    const std::vector<double> knots(bp.begin(), bp.end());
    return integrate_split(integrand, 0.0, sol.v, knots, 1e-11);
}

double model_gradient_lq_norm_rho(const ModelSolution& sol, double q) {
    if (!(q >= 1.0) || !(q <= 2.0))
        throw std::invalid_argument("gradient norm exponent q must lie in [1, 2]");
    const ModelParams& p = sol.params;
    std::vector<double> pushed;
    for (double s : sol.f_sharp.breakpoints())
        if (s > 0.0 && s < sol.v)
            pushed.push_back(inv_H(p, s));
    const auto integrand = [&](double rho) {
        const double h = eval_h(p, rho);
        const double wp = sol.f_sharp.integral(eval_H(p, rho)) / (sol.alpha * h);
        return std::pow(std::abs(wp), q) * h;
    };
    return integrate_split(integrand, 0.0, sol.r_v, pushed, 1e-11);
}

double torsional_rigidity_model(const ModelParams& p, double v) {
    if (!(v > 0.0) || !(v < 1.0))
        throw std::invalid_argument("domain mass v must lie in (0, 1)");
    const double r_v = inv_H(p, v);
    // Swapping the order of the double integral int w dm collapses it to a
    // single pass: T = int_0^{r_v} 2 H(r)^2 / h(r) dr.
    const auto integrand = [&](double r) {
        const double H = eval_H(p, r);
        return 2.0 * H * H / eval_h(p, r);
    };
    return integrate(integrand, 0.0, r_v, 1e-12);
}

double sobolev_c1(const ModelParams& p, double v, double p_exp) {
    if (!(v > 0.0) || !(v < 1.0))
        throw std::invalid_argument("domain mass v must lie in (0, 1)");
    const double threshold = 0.5 * p.dimension();
    if (!(p_exp > threshold))
        throw std::invalid_argument("sobolev_c1 needs p > N/2 = " + std::to_string(threshold));
    const double invp = std::isinf(p_exp) ? 0.0 : 1.0 / p_exp;
    // In the radial variable the integrand is H^(1-1/p)/h, with an integrable
    // endpoint at 0.
    const double r_v = inv_H(p, v);
    const auto integrand = [&](double r) {
        return std::pow(eval_H(p, r), 1.0 - invp) / eval_h(p, r);
    };
    return integrate(integrand, 0.0, r_v, 1e-13);
}

double sobolev_c2(const ModelParams& p, double v, double p_exp, double q_exp) {
    if (!(v > 0.0) || !(v < 1.0))
        throw std::invalid_argument("domain mass v must lie in (0, 1)");
    const double N = p.dimension();
    if (!(p_exp >= 2.0) || !(p_exp <= 0.5 * N))
        throw std::invalid_argument("sobolev_c2 needs 2 <= p <= N/2");
    if (!(q_exp >= 1.0))
        throw std::invalid_argument("sobolev_c2 needs q >= 1");
    if (!(q_exp * (1.0 / p_exp - 2.0 / N) < 1.0))
        throw std::invalid_argument("exponent condition q*(1/p - 2/N) < 1 violated");
    const double invp = 1.0 / p_exp;
    const double r_v = inv_H(p, v);

    const auto inner_integrand = [&](double r) {
        return std::pow(eval_H(p, r), 1.0 - invp) / eval_h(p, r);
    };
    WarmInverse inverse(p);
    const auto outer_integrand = [&](double s) {
        const double r_s = inverse(s);
        const double g = integrate(inner_integrand, r_s, r_v, 1e-12);
        return std::pow(g, q_exp);
    };
    const double val = integrate(outer_integrand, 0.0, v, 1e-11);
    return std::pow(val, 1.0 / q_exp);
}

namespace {

double eigenvalue_on_grid(const ModelParams& p, double r_v, int n) {
    // Nodes rho_i = i*delta, unknowns at i = 0..n-2, Dirichlet at rho = r_v.
    // Flux form: A_ij from h at midpoints, lumped mass from exact H
    // differences. No equation at the left end beyond the vanishing flux
    // (h(0) = 0).
    const double delta = r_v / (n - 1);
    const int m = n - 1;
    std::vector<double> diag(m), off(m - 1), mass(m);
    std::vector<double> hmid(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        hmid[i] = eval_h(p, (i + 0.5) * delta);
    for (int i = 0; i < m; ++i) {
        const double left = (i == 0) ? 0.0 : hmid[i - 1] / delta;
        const double right = hmid[i] / delta;
        diag[i] = left + right;
        if (i + 1 < m)
            off[i] = -right;
        const double lo = std::max(0.0, (i - 0.5) * delta);
        const double hi = (i + 0.5) * delta;
        mass[i] = eval_H(p, hi) - eval_H(p, lo);
    }

    // Inverse power iteration with a Thomas factorization of A.
    std::vector<double> c(m - 1), d(m); // factored bidiagonal
    d[0] = diag[0];
    for (int i = 1; i < m; ++i) {
        c[i - 1] = off[i - 1] / d[i - 1];
        d[i] = diag[i] - c[i - 1] * off[i - 1];
    }
    const auto solve = [&](std::vector<double>& b) {
        for (int i = 1; i < m; ++i)
            b[i] -= c[i - 1] * b[i - 1];
        b[m - 1] /= d[m - 1];
        for (int i = m - 2; i >= 0; --i)
            b[i] = (b[i] - off[i] * b[i + 1]) / d[i];
    };

    std::vector<double> x(m, 1.0), y(m);
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        for (int i = 0; i < m; ++i)
            y[i] = mass[i] * x[i];
        solve(y);
        double norm = 0.0;
        for (int i = 0; i < m; ++i)
            norm += y[i] * mass[i] * y[i];
        norm = std::sqrt(norm);
        for (int i = 0; i < m; ++i)
            y[i] /= norm;
        // Rayleigh quotient x^T A x / x^T M x.
        double num = 0.0, den = 0.0;
        for (int i = 0; i < m; ++i) {
            double Ax = diag[i] * y[i];
            if (i > 0)
                Ax += off[i - 1] * y[i - 1];
            if (i + 1 < m)
                Ax += off[i] * y[i + 1];
            num += y[i] * Ax;
            den += y[i] * mass[i] * y[i];
        }
        const double next = num / den;
        const bool done = it > 0 && std::abs(next - lambda) <= 1e-12 * std::abs(next);
        lambda = next;
        x.swap(y);
        if (done)
            return lambda;
    }
    throw numerical_error("inverse iteration for the model eigenvalue did not converge");
}

} // namespace

double model_first_eigenvalue(const ModelParams& p, double v, int n_grid) {
    if (!(v > 0.0) || !(v < 1.0))
        throw std::invalid_argument("domain mass v must lie in (0, 1)");
    if (n_grid < 8)
        throw std::invalid_argument("eigenvalue grid too coarse");
    const double r_v = inv_H(p, v);
    const double coarse = eigenvalue_on_grid(p, r_v, n_grid);
    const double fine = eigenvalue_on_grid(p, r_v, 2 * n_grid);
    return fine + (fine - coarse) / 3.0; // Richardson for the O(delta^2) scheme
}

} // namespace talenti
