#include "talenti/comparison.hpp"
#include "talenti/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <stdexcept>

using namespace talenti;

namespace {

std::shared_ptr<const SurfaceMesh> shared_icosphere(int s) {
    return std::make_shared<SurfaceMesh>(generate_icosphere(s, 1.0));
}

DomainSpec twocap(const std::shared_ptr<const SurfaceMesh>& mesh, double m1, double m2) {
    return union_domains(cap_domain(mesh, {0.0, 0.0, 1.0}, m1),
                         cap_domain(mesh, {0.0, 0.0, -1.0}, m2));
}

} // namespace

TEST_CASE("monotonicity metric") {
    CHECK(monotonicity_violation({0.0, 0.0, 0.0}, {3.0, 2.0, 1.0}) == 0.0);
    CHECK(monotonicity_violation({0.0, 0.0, 0.0}, {1.0, 2.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("hemisphere equality case") {
    const auto mesh = shared_icosphere(3);
    const auto dom = cap_domain(mesh, {0.0, 0.0, 1.0}, 0.5);
    const auto coeff = CoefficientField::identity(*mesh);
    const std::vector<double> f(mesh->n_vertices(), 2.0);
    const ModelParams p(1.0, 2.0);
    TalentiOptions opt;
    opt.n_grid = 512;
    opt.with_torsion = true;
    opt.with_faber_krahn = true;
    opt.sobolev_cases = {{kInfinityNorm, 0.0}};
    const auto rep = talenti_check(dom, coeff, f, p, opt);

    CHECK(rep.all_pass());
    CHECK(rep.v == doctest::Approx(0.5).epsilon(0.05));
    // Equality case: both curves near each other at coarse-mesh scale.
    double sup = 0.0;
    for (std::size_t i = 0; i < rep.grid.size(); ++i)
        sup = std::max(sup, std::abs(rep.w_curve[i] - rep.u_star_curve[i]));
    CHECK(sup <= rep.eps_mesh);
    CHECK(rep.monotonicity_violation <= rep.eps_mesh);
    REQUIRE(rep.torsion.has_value());
    CHECK(std::abs(rep.torsion->margin) <= rep.eps_mesh);
    REQUIRE(rep.faber_krahn.has_value());
    CHECK(std::abs(rep.faber_krahn->margin) <= rep.eps_mesh);
}

TEST_CASE("zero data gives zero curves") {
    const auto mesh = shared_icosphere(2);
    const auto dom = cap_domain(mesh, {0.0, 0.0, 1.0}, 0.4);
    const auto coeff = CoefficientField::identity(*mesh);
    const std::vector<double> f(mesh->n_vertices(), 0.0);
    const auto rep = talenti_check(dom, coeff, f, ModelParams(1.0, 2.0), {});
    CHECK(rep.pointwise_margin == 0.0);
    CHECK(rep.monotonicity_violation == 0.0);
    for (const auto& [q, margin] : rep.gradient_margins)
        CHECK(margin == 0.0);
}

TEST_CASE("two disjoint caps: strict inequality observed") {
    const auto mesh = shared_icosphere(3);
    const auto dom = twocap(mesh, 0.15, 0.15);
    const auto coeff = CoefficientField::identity(*mesh);
    const std::vector<double> f(mesh->n_vertices(), 2.0);
    const ModelParams p(1.0, 2.0);
    TalentiOptions opt;
    opt.n_grid = 512;
    opt.with_torsion = true;
    opt.with_faber_krahn = true;
    const auto rep = talenti_check(dom, coeff, f, p, opt);
    CHECK(rep.all_pass());
    // Strictness is an observed margin, not a theorem; at this resolution the
    // torsion gap is visible and the eigenvalue gap is far beyond mesh error.
    CHECK(rep.torsion->margin > 0.0);
    CHECK(rep.faber_krahn->margin > 1.0);
}

TEST_CASE("scale equivariance of the pipeline") {
    const auto mesh = shared_icosphere(3);
    const auto dom = cap_domain(mesh, {0.0, 0.0, 1.0}, 0.5);
    const auto coeff = CoefficientField::identity(*mesh);
    const ModelParams p(1.0, 2.0);
    TalentiOptions opt;
    opt.n_grid = 256;
    const std::vector<double> f1(mesh->n_vertices(), 2.0);
    const std::vector<double> f2(mesh->n_vertices(), 4.0);
    const auto r1 = talenti_check(dom, coeff, f1, p, opt);
    const auto r2 = talenti_check(dom, coeff, f2, p, opt);
    // Doubling f doubles u, u*, w; the L^q functionals scale by 2^q.
    for (std::size_t i = 0; i < r1.grid.size(); i += 17) {
        CHECK(r2.w_curve[i] == doctest::Approx(2.0 * r1.w_curve[i]).epsilon(1e-10));
        CHECK(r2.u_star_curve[i] == doctest::Approx(2.0 * r1.u_star_curve[i]).epsilon(1e-10));
    }
    for (double q : {1.0, 1.5, 2.0})
        CHECK(r2.gradient_margins.at(q) ==
              doctest::Approx(std::pow(2.0, q) * r1.gradient_margins.at(q)).epsilon(1e-9));
}

TEST_CASE("report serialization schema") {
    const auto mesh = shared_icosphere(2);
    const auto dom = cap_domain(mesh, {0.0, 0.0, 1.0}, 0.4);
    const auto coeff = CoefficientField::identity(*mesh);
    const std::vector<double> f(mesh->n_vertices(), 2.0);
    TalentiOptions opt;
    opt.n_grid = 128;
    opt.with_torsion = true;
    opt.with_faber_krahn = true;
    opt.sobolev_cases = {{kInfinityNorm, 0.0}};
    const auto rep = talenti_check(dom, coeff, f, ModelParams(1.0, 2.0), opt);
    const auto j = nlohmann::json::parse(rep.to_json());
    const std::vector<std::string> keys = {"v",       "alpha",       "pointwise_margin",
                                           "gradient_margins", "monotonicity_violation",
                                           "torsion", "faber_krahn", "sobolev",
                                           "mesh_h",  "pass"};
    CHECK(j.size() == keys.size());
    for (const auto& k : keys)
        CHECK(j.contains(k));
    CHECK(j["gradient_margins"].contains("1.5"));
    CHECK(j["pass"].contains("all"));
}

TEST_CASE("sobolev check on the hemisphere attains the bound") {
    const auto mesh = shared_icosphere(4);
    const auto dom = cap_domain(mesh, {0.0, 0.0, 1.0}, 0.5);
    const auto coeff = CoefficientField::identity(*mesh);
    const std::vector<double> f(mesh->n_vertices(), 2.0);
    const ModelParams p(1.0, 2.0);
    const auto sc = sobolev_check(dom, coeff, f, p, kInfinityNorm, 0.0,
                                  5.0 * mesh->max_edge);
    CHECK(sc.pass);
    // Equality case: the sup norm sits against (c1/alpha)*||f||_inf.
    CHECK(std::abs(sc.attained - sc.bound) <= 5.0 * mesh->max_edge);
}

TEST_CASE("polya-szego check") {
    const ModelParams p(1.0, 2.0);
    const auto mesh = shared_icosphere(4);

    SUBCASE("radial non-increasing data is near equality") {
        const auto dom = cap_domain(mesh, {0.0, 0.0, 1.0}, 0.5);
        std::vector<double> u(mesh->n_vertices(), 0.0);
        for (std::size_t i = 0; i < mesh->n_vertices(); ++i)
            if (dom.inside[i])
                u[i] = std::max(0.0, mesh->vertices[i].z - 0.2); // radial, dead near the rim
        const auto ps = polya_szego_check(dom, u, 2.0, p, 1024);
        CHECK(ps.pass);
        CHECK(ps.lhs == doctest::Approx(ps.rhs).epsilon(0.25));
    }

    SUBCASE("stress function on two caps passes strictly") {
        const auto dom = twocap(mesh, 0.15, 0.15);
        const auto coeff = CoefficientField::identity(*mesh);
        const std::vector<double> f(mesh->n_vertices(), 2.0);
        const auto sol = solve_poisson(dom, coeff, f);
        const auto ps = polya_szego_check(dom, sol.u, 2.0, p, 1024);
        CHECK(ps.pass);
        CHECK(ps.lhs < ps.rhs);
    }

    SUBCASE("rejects functions alive outside the domain") {
        const auto dom = cap_domain(mesh, {0.0, 0.0, 1.0}, 0.3);
        const std::vector<double> ones(mesh->n_vertices(), 1.0);
        CHECK_THROWS_AS(polya_szego_check(dom, ones, 2.0, p), std::invalid_argument);
    }
}

TEST_CASE("anisotropic coefficients with declared alpha") {
    const auto mesh = shared_icosphere(3);
    const auto dom = twocap(mesh, 0.15, 0.15);
    SplitMix64 rng(4711);
    CoefficientField field;
    field.tensors.resize(mesh->n_triangles());
    double lo = 10.0, hi = 0.0;
    for (auto& t : field.tensors) {
        const double l1 = 0.5 + rng.uniform();
        const double l2 = 0.5 + rng.uniform();
        const double th = 2.0 * std::numbers::pi * rng.uniform();
        const double cs = std::cos(th), sn = std::sin(th);
        t = {cs * cs * l1 + sn * sn * l2, cs * sn * (l1 - l2), sn * sn * l1 + cs * cs * l2};
        lo = std::min({lo, l1, l2});
        hi = std::max({hi, l1, l2});
    }
    field.alpha = lo;
    field.beta = hi;
    const std::vector<double> f(mesh->n_vertices(), 2.0);
    TalentiOptions opt;
    opt.n_grid = 512;
    const auto rep = talenti_check(dom, field, f, ModelParams(1.0, 2.0), opt);
    CHECK(rep.alpha == field.alpha);
    CHECK(rep.all_pass());
}
