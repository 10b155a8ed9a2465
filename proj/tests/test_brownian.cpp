#include "talenti/brownian.hpp"
#include "talenti/model_solver.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

using namespace talenti;

TEST_CASE("determinism across seeds and workers") {
    const ModelParams p(1.0, 2.0);
    const auto dom = WalkDomain::analytic_caps(p, {{{0.0, 0.0, 1.0}, 0.5}});
    WalkOptions a;
    a.dt = 2e-3;
    a.n_samples = 600;
    a.seed = 12345;
    a.workers = 1;
    WalkOptions b = a;
    b.workers = 3;
    const auto ea = simulate_exit_time(dom, {0.0, 0.0, 1.0}, a);
    const auto eb = simulate_exit_time(dom, {0.0, 0.0, 1.0}, b);
    CHECK(ea.mean == eb.mean);
    CHECK(ea.stderr_ == eb.stderr_);

    WalkOptions c = a;
    c.seed = 999;
    const auto ec = simulate_exit_time(dom, {0.0, 0.0, 1.0}, c);
    CHECK(ec.mean != ea.mean); // different stream, different estimate
}

TEST_CASE("hemisphere exit time matches the stress function") {
    const ModelParams p(1.0, 2.0);
    const auto dom = WalkDomain::analytic_caps(p, {{{0.0, 0.0, 1.0}, 0.5}});
    WalkOptions opt;
    opt.dt = 1e-3;
    opt.n_samples = 6000;
    opt.seed = 31337;
    opt.workers = 4;
    const auto est = simulate_exit_time(dom, {0.0, 0.0, 1.0}, opt);
    const double band = 3.0 * est.stderr_ + 2.0 * std::sqrt(opt.dt);
    CHECK(std::abs(est.mean - 2.0 * std::log(2.0)) <= band);

    SUBCASE("interior start point against the radial profile") {
        const double rho = std::numbers::pi / 4.0;
        const Vec3 start{std::sin(rho), 0.0, std::cos(rho)};
        const auto est2 = simulate_exit_time(dom, start, opt);
        const double expected = oracle::stress_12(rho);
        CHECK(std::abs(est2.mean - expected) <= 3.0 * est2.stderr_ + 2.0 * std::sqrt(opt.dt));
    }

    SUBCASE("halving dt stays inside the statistical band plus bias allowance") {
        WalkOptions half = opt;
        half.dt = 5e-4;
        half.n_samples = 4000;
        const auto est_half = simulate_exit_time(dom, {0.0, 0.0, 1.0}, half);
        CHECK(std::abs(est_half.mean - est.mean) <=
              3.0 * (est.stderr_ + est_half.stderr_) + 2.0 * std::sqrt(opt.dt));
    }
}

TEST_CASE("starts near the boundary exit almost immediately") {
    const ModelParams p(1.0, 2.0);
    const auto dom = WalkDomain::analytic_caps(p, {{{0.0, 0.0, 1.0}, 0.5}});
    const double rho = std::numbers::pi / 2.0 * (1.0 - 1e-6);
    const Vec3 start{std::sin(rho), 0.0, std::cos(rho)};
    WalkOptions opt;
    opt.dt = 1e-5;
    opt.n_samples = 2000;
    opt.seed = 5;
    opt.workers = 2;
    const auto est = simulate_exit_time(dom, start, opt);
    CHECK(est.mean < 0.01);
}

TEST_CASE("contracts") {
    const ModelParams p(1.0, 2.0);
    const auto dom = WalkDomain::analytic_caps(p, {{{0.0, 0.0, 1.0}, 0.3}});
    WalkOptions opt;
    opt.n_samples = 0;
    CHECK_THROWS_AS(simulate_exit_time(dom, {0.0, 0.0, 1.0}, opt), std::invalid_argument);
    WalkOptions big;
    big.dt = 10.0;
    big.n_samples = 10;
    CHECK_THROWS_AS(simulate_exit_time(dom, {0.0, 0.0, 1.0}, big), std::invalid_argument);
    WalkOptions ok;
    ok.n_samples = 10;
    CHECK_THROWS_AS(simulate_exit_time(dom, {0.0, 0.0, -1.0}, ok), std::invalid_argument);
    CHECK_THROWS_AS(WalkDomain::analytic_caps(p, {{{0.0, 0.0, 1.0}, 0.75},
                                                  {{0.0, 0.0, -1.0}, 0.3}}),
                    std::invalid_argument); // caps overlap
    CHECK_THROWS_AS(average_exit_time(dom, p, ok, 0), std::invalid_argument);
}

TEST_CASE("average exit time on the hemisphere") {
    const ModelParams p(1.0, 2.0);
    const auto dom = WalkDomain::analytic_caps(p, {{{0.0, 0.0, 1.0}, 0.5}});
    WalkOptions opt;
    opt.dt = 1e-3;
    opt.n_samples = 24;
    opt.seed = 77;
    opt.workers = 4;
    const auto avg = average_exit_time(dom, p, opt, 192);
    // T_{1,2,1/2}/v = 2(2ln2 - 1); the equality case, so the margin sits at 0
    // within the allowance.
    const double expected = (2.0 * std::log(2.0) - 1.0) / 0.5;
    CHECK(std::abs(avg.model_mean - expected) <= 1e-10);
    CHECK(std::abs(avg.mean - expected) <= 3.0 * avg.allowance);
    CHECK(avg.pass);
}

TEST_CASE("meshed domain walk agrees with the analytic cap") {
    const ModelParams p(1.0, 2.0);
    auto mesh = std::make_shared<SurfaceMesh>(generate_icosphere(4, 1.0));
    const auto cap = cap_domain(mesh, {0.0, 0.0, 1.0}, 0.5);
    const auto dom_mesh = WalkDomain::from_mesh(mesh, cap.inside);
    const auto dom_exact = WalkDomain::analytic_caps(p, {{{0.0, 0.0, 1.0}, 0.5}});
    WalkOptions opt;
    opt.dt = 1e-3;
    opt.n_samples = 3000;
    opt.seed = 2718;
    opt.workers = 4;
    const auto em = simulate_exit_time(dom_mesh, {0.0, 0.0, 1.0}, opt);
    const auto ee = simulate_exit_time(dom_exact, {0.0, 0.0, 1.0}, opt);
    CHECK(std::abs(em.mean - ee.mean) <=
          3.0 * (em.stderr_ + ee.stderr_) + 2.0 * std::sqrt(opt.dt) + 5.0 * mesh->max_edge);
}
