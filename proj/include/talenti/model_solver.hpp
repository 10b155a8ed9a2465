#pragma once

#include "talenti/model_space.hpp"
#include "talenti/rearrangement.hpp"

#include <vector>

namespace talenti {

// Weak solution of the weighted Dirichlet problem
//
//     -(alpha) * (w'' + (h'/h) w') = f*   on [0, r_v),   w(r_v) = 0,
//
// sampled on a Chebyshev-clustered grid. w is produced from the first
// representation formula
//
//     w(rho) = (1/alpha) * int_rho^{r_v} F(H(r)) / h(r) dr,
//
// with F the exact running integral of the step function f# (so the inner
// integral carries no quadrature error at all).
struct ModelSolution {
    ModelParams params;
    double v = 0.0;     // mass of the domain
    double r_v = 0.0;   // H^{-1}(v)
    double alpha = 1.0; // ellipticity constant dividing the data
    StepFunction f_sharp;

    std::vector<double> grid;   // increasing, grid.front() = 0, grid.back() = r_v
    std::vector<double> grid_H; // H evaluated on the grid
    std::vector<double> w;
    std::vector<double> w_prime; // -F(H(rho))/(alpha h(rho)); 0 at rho = 0

    // Piecewise-linear evaluation between grid nodes.
    double eval(double rho) const;
    double eval_prime(double rho) const;
    double sup_norm() const { return w.empty() ? 0.0 : w.front(); }
};

ModelSolution solve_model_poisson(const ModelParams& p, const StepFunction& f_sharp, double v,
                                  double alpha, int n_grid = 2048);

// Second representation formula,
//     w(rho) = (1/alpha) * int_{H(rho)}^{v} F(sigma) / I(sigma)^2 dsigma,
// evaluated on the same grid by cumulative quadrature in the mass variable
// (I(sigma) obtained by inverting H numerically). Independent of the path
// used by solve_model_poisson; the two must agree to ~1e-10.
std::vector<double> eval_repr2_on_grid(const ModelSolution& sol);

// Max over a battery of smooth compactly supported test functions of
// |int w' phi' dm - int (f*/alpha) phi dm|.
double weak_form_residual(const ModelSolution& sol, int n_test = 20);

// int_0^{r_v} |w'|^q dm, computed in the mass variable as
// int_0^v (F(xi)/(alpha I(xi)))^q dxi.
double model_gradient_lq_norm(const ModelSolution& sol, double q);

// Same quantity integrated directly in rho; route-equivalence partner of
// model_gradient_lq_norm.
double model_gradient_lq_norm_rho(const ModelSolution& sol, double q);

// T = int_0^{r_v} u dm for the stress problem -lap u = 2, u(r_v) = 0.
double torsional_rigidity_model(const ModelParams& p, double v);

// c1 = int_0^v xi^{1-1/p} / I(xi)^2 dxi, finite for p > N/2 (p may be
// infinity, with the convention 1/p = 0).
double sobolev_c1(const ModelParams& p, double v, double p_exp);

// c2 = ( int_0^v ( int_s^v xi^{1-1/p}/I(xi)^2 dxi )^q ds )^{1/q},
// for 2 <= p <= N/2 and q >= 1 with q*(1/p - 2/N) < 1.
double sobolev_c2(const ModelParams& p, double v, double p_exp, double q_exp);

// Smallest eigenvalue of -(h w')'/h = lambda w on [0, r_v) with w(r_v) = 0
// and the natural condition at 0. Second-order finite differences on grids of
// n_grid and 2*n_grid nodes, Richardson-extrapolated.
double model_first_eigenvalue(const ModelParams& p, double v, int n_grid = 1024);

} // namespace talenti
