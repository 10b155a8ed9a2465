#include "talenti/model_solver.hpp"
#include "talenti/quadrature.hpp"
#include "talenti/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

using namespace talenti;
namespace n = std::numbers;

namespace {

StepFunction random_decreasing_step(SplitMix64& rng, double mass, int max_steps) {
    const int k = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_steps));
    std::vector<double> widths(static_cast<std::size_t>(k));
    double total = 0.0;
    for (auto& w : widths) {
        w = 0.05 + rng.uniform();
        total += w;
    }
    std::vector<double> bps{0.0};
    for (double w : widths)
        bps.push_back(bps.back() + w * mass / total);
    bps.back() = mass;
    std::vector<double> vals(static_cast<std::size_t>(k));
    double level = 5.0 * (0.2 + rng.uniform());
    for (auto& v : vals) {
        v = level;
        level *= 0.2 + 0.75 * rng.uniform();
    }
    return StepFunction(bps, vals);
}

} // namespace

TEST_CASE("hemisphere stress function") {
    const ModelParams p(1.0, 2.0);
    const auto sol = solve_model_poisson(p, StepFunction::constant(2.0, 0.5), 0.5, 1.0, 1024);
    CHECK(std::abs(sol.w.front() - 2.0 * std::log(2.0)) <= 1e-10);
    for (std::size_t i = 0; i < sol.grid.size(); i += 37)
        CHECK(std::abs(sol.w[i] - oracle::stress_12(sol.grid[i])) <= 1e-11);
    CHECK(sol.w.back() == 0.0);
    // w' = -2 tan(rho/2) for this data
    for (std::size_t i = 1; i < sol.grid.size(); i += 61)
        CHECK(sol.w_prime[i] ==
              doctest::Approx(-2.0 * std::tan(0.5 * sol.grid[i])).epsilon(1e-10));
}

TEST_CASE("zero data gives the zero solution") {
    const ModelParams p(1.0, 2.0);
    const auto sol = solve_model_poisson(p, StepFunction::constant(0.0, 0.4), 0.4, 1.0, 128);
    for (double w : sol.w)
        CHECK(w == 0.0);
    CHECK(model_gradient_lq_norm(sol, 1.5) == 0.0);
}

TEST_CASE("ellipticity constant scales the solution exactly") {
    const ModelParams p(1.0, 2.0);
    const auto f = StepFunction::constant(2.0, 0.5);
    const auto sol1 = solve_model_poisson(p, f, 0.5, 1.0, 256);
    const auto sol2 = solve_model_poisson(p, f, 0.5, 2.0, 256);
    CHECK(std::abs(sol2.w.front() - std::log(2.0)) <= 1e-10);
    for (std::size_t i = 0; i < sol1.w.size(); ++i)
        CHECK(sol2.w[i] == sol1.w[i] / 2.0);
}

TEST_CASE("representation formulas agree on random step data") {
    SplitMix64 rng(2024);
    for (const auto& [K, N] : {std::pair{1.0, 2.0}, {3.0, 4.0}, {0.9, 2.6}}) {
        const ModelParams p(K, N);
        for (int k = 0; k < 3; ++k) {
            const double v = 0.15 + 0.7 * rng.uniform();
            const auto f = random_decreasing_step(rng, v, 12);
            const auto sol = solve_model_poisson(p, f, v, 1.0, 512);
            const auto w2 = eval_repr2_on_grid(sol);
            double worst = 0.0;
            for (std::size_t i = 0; i < w2.size(); ++i)
                worst = std::max(worst, std::abs(w2[i] - sol.w[i]));
            CHECK(worst <= 1e-10);
        }
    }
}

TEST_CASE("weak form residual") {
    SplitMix64 rng(77);
    const ModelParams p(2.0, 3.0);
    const double v = 0.45;
    const auto f = random_decreasing_step(rng, v, 8);
    const auto sol = solve_model_poisson(p, f, v, 1.3, 512);
    CHECK(weak_form_residual(sol, 20) <= 1e-6);
}

TEST_CASE("linearity in the data") {
    const ModelParams p(1.0, 2.0);
    SplitMix64 rng(31);
    const double v = 0.5;
    const auto f = random_decreasing_step(rng, v, 6);
    const auto g = random_decreasing_step(rng, v, 6);
    // 2f + 3g on merged breakpoints (still non-increasing).
    std::vector<double> cuts;
    cuts.insert(cuts.end(), f.breakpoints().begin(), f.breakpoints().end());
    cuts.insert(cuts.end(), g.breakpoints().begin(), g.breakpoints().end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<double> vals;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        vals.push_back(2.0 * f(mid) + 3.0 * g(mid));
    }
    const StepFunction combo(cuts, vals);
    const auto sol_f = solve_model_poisson(p, f, v, 1.0, 256);
    const auto sol_g = solve_model_poisson(p, g, v, 1.0, 256);
    const auto sol_c = solve_model_poisson(p, combo, v, 1.0, 256);
    for (std::size_t i = 0; i < sol_c.w.size(); ++i)
        CHECK(sol_c.w[i] ==
              doctest::Approx(2.0 * sol_f.w[i] + 3.0 * sol_g.w[i]).epsilon(1e-9));
}

TEST_CASE("nonnegative data gives a nonnegative non-increasing solution") {
    SplitMix64 rng(8);
    const ModelParams p(1.2, 3.3);
    const double v = 0.6;
    const auto f = random_decreasing_step(rng, v, 10);
    const auto sol = solve_model_poisson(p, f, v, 1.0, 512);
    for (std::size_t i = 0; i < sol.w.size(); ++i) {
        CHECK(sol.w[i] >= 0.0);
        if (i > 0)
            CHECK(sol.w[i] <= sol.w[i - 1] + 1e-14);
    }
}

TEST_CASE("gradient norms, both routes") {
    const ModelParams p(1.0, 2.0);
    const auto sol = solve_model_poisson(p, StepFunction::constant(2.0, 0.5), 0.5, 1.0, 512);
    // Hand-integrated value for q = 1: 2 int_0^(1/2) sqrt(xi/(1-xi)) dxi = pi/2 - 1.
    CHECK(model_gradient_lq_norm(sol, 1.0) == doctest::Approx(n::pi / 2 - 1.0).epsilon(1e-10));
    for (double q : {1.0, 1.37, 2.0})
        CHECK(std::abs(model_gradient_lq_norm(sol, q) - model_gradient_lq_norm_rho(sol, q)) <=
              1e-8);

    SplitMix64 rng(404);
    const ModelParams p2(2.5, 3.5);
    const auto f = random_decreasing_step(rng, 0.35, 9);
    const auto sol2 = solve_model_poisson(p2, f, 0.35, 1.7, 512);
    for (double q : {1.0, 1.5, 2.0})
        CHECK(std::abs(model_gradient_lq_norm(sol2, q) - model_gradient_lq_norm_rho(sol2, q)) <=
              1e-8);
}

TEST_CASE("torsional rigidity") {
    const ModelParams p(1.0, 2.0);
    CHECK(std::abs(torsional_rigidity_model(p, 0.5) - (2.0 * std::log(2.0) - 1.0)) <= 1e-10);

    // Monotone in the mass.
    double prev = 0.0;
    for (double v : {0.05, 0.2, 0.4, 0.6, 0.8}) {
        const double T = torsional_rigidity_model(p, v);
        CHECK(T > prev);
        prev = T;
    }

    // Independent finite-difference route for a non-integer-dimension case.
    const ModelParams p13(1.0, 3.0);
    const double r_v = inv_H(p13, 0.5);
    const auto h = [&](double t) { return eval_h(p13, t); };
    const double T_fd = oracle::fd_weighted_poisson_integral(h, r_v, 2.0, 4000);
    const double T = torsional_rigidity_model(p13, 0.5);
    CHECK(std::abs(T - T_fd) / T <= 1e-4);
}

TEST_CASE("sobolev constant c1") {
    const ModelParams p(1.0, 2.0);
    for (double v : {0.25, 0.5, 0.9})
        CHECK(std::abs(sobolev_c1(p, v, kInfinityNorm) + std::log(1.0 - v)) <= 1e-10);
    // p = 2: integrand reduces to 1/(sqrt(xi)(1-xi)); antiderivative 2 artanh(sqrt xi).
    CHECK(sobolev_c1(p, 0.5, 2.0) ==
          doctest::Approx(2.0 * std::atanh(std::sqrt(0.5))).epsilon(1e-10));
    CHECK(sobolev_c1(p, 1e-4, kInfinityNorm) <= 2e-4);
    CHECK_THROWS_AS(sobolev_c1(ModelParams(1.0, 6.0), 0.5, 2.5), std::invalid_argument);
}

TEST_CASE("sobolev constant c2") {
    const ModelParams p(3.0, 4.0);
    const double c2 = sobolev_c2(p, 0.3, 2.0, 1.0);
    // Fubini for q = 1: the double integral collapses to int_0^v s*phi(s) ds.
    const double swapped = integrate(
        [&](double s) {
            const double iso = iso_profile(p, s);
            return s * std::sqrt(s) / (iso * iso);
        },
        0.0, 0.3, 1e-11);
    CHECK(std::abs(c2 - swapped) <= 1e-8);
    CHECK(sobolev_c2(p, 1e-3, 2.0, 1.0) <= 1e-3);
    CHECK_THROWS_AS(sobolev_c2(p, 0.3, 1.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sobolev_c2(ModelParams(1.0, 8.0), 0.3, 2.0, 5.0), std::invalid_argument);
}

TEST_CASE("model first eigenvalue") {
    const ModelParams p(1.0, 2.0);
    CHECK(std::abs(model_first_eigenvalue(p, 0.5, 512) - 2.0) <= 1e-3);

    // Curvature rescaling doubles the eigenvalue.
    const ModelParams p2(2.0, 2.0);
    CHECK(model_first_eigenvalue(p2, 0.5, 512) ==
          doctest::Approx(2.0 * model_first_eigenvalue(p, 0.5, 512)).epsilon(1e-6));

    // Monotone decreasing in the mass.
    double prev = std::numeric_limits<double>::infinity();
    for (double v : {0.2, 0.4, 0.6, 0.8}) {
        const double lam = model_first_eigenvalue(p, v, 256);
        CHECK(lam < prev);
        prev = lam;
    }

    // Shooting oracle on a different parameter set.
    const ModelParams p13(1.0, 3.0);
    const double r_v = inv_H(p13, 0.4);
    const auto cot = [&](double x) {
        return std::sqrt(1.0 * 2.0) * (1.0 / std::tan(std::sqrt(1.0 / 2.0) * x));
    };
    const double lam_shoot = oracle::shooting_eigenvalue(cot, 3.0, r_v, 1.0, 40.0);
    CHECK(model_first_eigenvalue(p13, 0.4, 512) == doctest::Approx(lam_shoot).epsilon(1e-4));
}

TEST_CASE("solver contract checks") {
    const ModelParams p(1.0, 2.0);
    const auto f = StepFunction::constant(1.0, 0.5);
    CHECK_THROWS_AS(solve_model_poisson(p, f, 0.7, 1.0, 128), std::invalid_argument);
    CHECK_THROWS_AS(solve_model_poisson(p, f, 0.5, -1.0, 128), std::invalid_argument);
    CHECK_THROWS_AS(solve_model_poisson(p, f, 0.5, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(model_gradient_lq_norm(solve_model_poisson(p, f, 0.5, 1.0, 64), 3.0),
                    std::invalid_argument);
}
