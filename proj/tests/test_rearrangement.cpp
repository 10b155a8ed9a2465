#include "talenti/rearrangement.hpp"
#include "talenti/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

using namespace talenti;

namespace {

WeightedFunction random_function(SplitMix64& rng, int max_cells, bool signed_values = true) {
    const int n = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_cells));
    std::vector<WeightedCell> cells(static_cast<std::size_t>(n));
    double total = 0.0;
    for (auto& c : cells) {
        c.weight = 0.01 + rng.uniform();
        total += c.weight;
    }
    const double target = 0.05 + 0.9 * rng.uniform();
    for (auto& c : cells) {
        c.weight *= target / total;
        const double sign = signed_values && (rng.next() & 1) ? -1.0 : 1.0;
        c.value = sign * 10.0 * rng.uniform();
    }
    return WeightedFunction(std::move(cells));
}

double step_diff_lp(const StepFunction& a, const StepFunction& b, double p) {
    std::vector<double> cuts;
    cuts.insert(cuts.end(), a.breakpoints().begin(), a.breakpoints().end());
    cuts.insert(cuts.end(), b.breakpoints().begin(), b.breakpoints().end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double acc = 0.0, sup = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        const double d = std::abs(a(mid) - b(mid));
        sup = std::max(sup, d);
        if (!std::isinf(p))
            acc += (cuts[i + 1] - cuts[i]) * std::pow(d, p);
    }
    return std::isinf(p) ? sup : std::pow(acc, 1.0 / p);
}

} // namespace

TEST_CASE("distribution function basics") {
    const WeightedFunction u({{3.0, 0.2}, {1.0, 0.5}, {2.0, 0.3}});
    CHECK(distribution_function(u, 1.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(distribution_function(u, 3.0) == 0.0);
    CHECK(distribution_function(u, 57.0) == 0.0);

    const WeightedFunction s(std::vector<WeightedCell>{{-2.0, 0.4}, {2.0, 0.6}});
    CHECK(distribution_function(s, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("decreasing rearrangement examples") {
    const auto sharp = decreasing_rearrangement(WeightedFunction(std::vector<WeightedCell>{{3.0, 0.2}, {1.0, 0.5}, {2.0, 0.3}}));
    REQUIRE(sharp.values().size() == 3);
    CHECK(sharp.values()[0] == 3.0);
    CHECK(sharp.values()[1] == 2.0);
    CHECK(sharp.values()[2] == 1.0);
    CHECK(sharp.breakpoints()[1] == doctest::Approx(0.2));
    CHECK(sharp.breakpoints()[2] == doctest::Approx(0.5));
    CHECK(sharp.breakpoints()[3] == doctest::Approx(1.0));

    const auto flat = decreasing_rearrangement(WeightedFunction(std::vector<WeightedCell>{{4.0, 0.3}, {4.0, 0.4}}));
    CHECK(flat.values().size() == 1); // ties merge
    CHECK(flat.values()[0] == 4.0);

    const auto mixed = decreasing_rearrangement(WeightedFunction(std::vector<WeightedCell>{{-4.0, 0.1}, {4.0, 0.1}, {0.0, 0.8}}));
    REQUIRE(mixed.values().size() == 2);
    CHECK(mixed.values()[0] == 4.0);
    CHECK(mixed.values()[1] == 0.0);
    CHECK(mixed.breakpoints()[1] == doctest::Approx(0.2));
}

TEST_CASE("step function conventions") {
    const StepFunction f({0.0, 0.25, 1.0}, {3.0, 1.0});
    CHECK(f(0.0) == 3.0);          // sup at the origin
    CHECK(f(0.25) == 3.0);         // left continuity at the interior breakpoint
    CHECK(f(0.250001) == 1.0);
    CHECK(f(1.0) == 1.0);          // last value at the right end
    CHECK(f.integral(0.25) == doctest::Approx(0.75));
    CHECK(f.integral(1.0) == doctest::Approx(0.75 + 0.75));
}

TEST_CASE("schwarz symmetrization") {
    const ModelParams p(1.0, 2.0);

    SUBCASE("constant function stays constant") {
        const SchwarzSymmetrization star(WeightedFunction(std::vector<WeightedCell>{{3.5, 0.2}, {3.5, 0.3}}), p);
        CHECK(star.radius() == doctest::Approx(oracle::invH_12(0.5)).epsilon(1e-12));
        for (double x : {0.0, 0.3, star.radius()})
            CHECK(star(x) == 3.5);
    }

    SUBCASE("two-level function lands at the closed-form radius") {
        const SchwarzSymmetrization star(WeightedFunction(std::vector<WeightedCell>{{1.0, 0.25}, {0.0, 0.25}}), p);
        const double r_cut = std::numbers::pi / 3.0; // H(pi/3) = 1/4
        CHECK(star(r_cut * 0.999) == 1.0);
        CHECK(star(r_cut * 1.001) == 0.0);
        CHECK(star(star.radius()) == 0.0);
    }

    SUBCASE("equimeasurability in the model measure") {
        SplitMix64 rng(99);
        for (int k = 0; k < 20; ++k) {
            const auto u = random_function(rng, 24);
            const auto sharp = decreasing_rearrangement(u);
            const SchwarzSymmetrization star(sharp, p);
            for (std::size_t i = 0; i < sharp.values().size(); ++i) {
                const double t = sharp.values()[i] * 0.9999;
                // {u* > t} is the cap [0, x_t); its mass must be mu(t).
                const double mu = distribution_function(u, t);
                const double x_t = inv_H(p, std::min(mu, 1.0));
                CHECK(std::abs(eval_H(p, x_t) - mu) <= 1e-10);
                if (x_t > 1e-12 && x_t < star.radius())
                    CHECK(star(x_t * (1.0 - 1e-9)) > t);
            }
        }
    }
}

TEST_CASE("hardy-littlewood bound") {
    const WeightedFunction f({{3.0, 0.2}, {1.0, 0.5}, {2.0, 0.3}});
    CHECK(hardy_littlewood_bound(f, 0.3) == doctest::Approx(0.2 * 3.0 + 0.1 * 2.0).epsilon(1e-14));
    CHECK(hardy_littlewood_bound(f, 0.0) == 0.0);
    double full = 0.0;
    for (const auto& c : f.cells())
        full += std::abs(c.value) * c.weight;
    CHECK(hardy_littlewood_bound(f, f.total_mass()) == doctest::Approx(full).epsilon(1e-14));

    // Every explicit subset obeys the bound.
    SplitMix64 rng(7);
    for (int k = 0; k < 200; ++k) {
        const auto u = random_function(rng, 16, false);
        double subset_int = 0.0, subset_mass = 0.0;
        for (const auto& c : u.cells())
            if (rng.next() & 1) {
                subset_int += c.value * c.weight;
                subset_mass += c.weight;
            }
        if (subset_mass > 0.0)
            CHECK(subset_int <= hardy_littlewood_bound(u, subset_mass) + 1e-12);
    }
}

TEST_CASE("lp norms") {
    const WeightedFunction u({{3.0, 0.2}, {1.0, 0.5}, {2.0, 0.3}});
    CHECK(lp_norm(u, 1.0) == doctest::Approx(1.7).epsilon(1e-15));
    CHECK(lp_norm(u, kInfinityNorm) == 3.0);
    const auto sharp = decreasing_rearrangement(u);
    CHECK(lp_norm(u, 2.0) == lp_norm(sharp, 2.0));

    // Zero-weight cells are null sets.
    const WeightedFunction z(std::vector<WeightedCell>{{100.0, 0.0}, {1.0, 0.5}});
    CHECK(lp_norm(z, kInfinityNorm) == 1.0);
}

TEST_CASE("equimeasurability and norm preservation on random data") {
    SplitMix64 rng(1234);
    for (int k = 0; k < 300; ++k) {
        const auto u = random_function(rng, 64);
        const auto sharp = decreasing_rearrangement(u);
        for (std::size_t i = 0; i < sharp.values().size(); ++i) {
            const double t = sharp.values()[i];
            // Measure of the superlevel of the step function at its own level.
            std::size_t j = 0;
            while (j < sharp.values().size() && sharp.values()[j] > t)
                ++j;
            CHECK(distribution_function(u, t) == sharp.breakpoints()[j]);
        }
        for (double p : {1.0, 2.0, 7.5, kInfinityNorm})
            CHECK(lp_norm(u, p) == lp_norm(sharp, p));
        CHECK(oracle::lp_brute(u, 2.0) == doctest::Approx(lp_norm(u, 2.0)).epsilon(1e-13));
        CHECK(oracle::distribution_brute(u, 1.0) ==
              doctest::Approx(distribution_function(u, 1.0)).epsilon(1e-13));
    }
}

TEST_CASE("contraction of the rearrangement map") {
    SplitMix64 rng(555);
    for (int k = 0; k < 200; ++k) {
        const auto u = random_function(rng, 48);
        auto cells = u.cells();
        for (auto& c : cells)
            c.value = ((rng.next() & 1) ? -1.0 : 1.0) * 10.0 * rng.uniform();
        const WeightedFunction v(cells);
        auto dcells = u.cells();
        for (std::size_t i = 0; i < dcells.size(); ++i)
            dcells[i].value -= cells[i].value;
        const WeightedFunction diff(dcells);
        for (double p : {1.0, 2.0, 7.5, kInfinityNorm}) {
            const double lhs =
                step_diff_lp(decreasing_rearrangement(u), decreasing_rearrangement(v), p);
            CHECK(lhs <= lp_norm(diff, p) * (1.0 + 1e-12) + 1e-15);
        }
    }
}

TEST_CASE("non-increasing step data is a fixed point") {
    // Push a non-increasing step profile onto the model interval, read it
    // back as cells, and re-symmetrize: nothing changes.
    const StepFunction phi({0.0, 0.1, 0.35, 0.6}, {5.0, 3.0, 0.5});
    std::vector<WeightedCell> cells;
    for (std::size_t i = 0; i < phi.values().size(); ++i)
        cells.push_back({phi.values()[i], phi.widths()[i]});
    const auto again = decreasing_rearrangement(WeightedFunction(cells));
    REQUIRE(again.values().size() == phi.values().size());
    for (std::size_t i = 0; i < phi.values().size(); ++i) {
        CHECK(again.values()[i] == phi.values()[i]);
        CHECK(again.breakpoints()[i + 1] == phi.breakpoints()[i + 1]);
    }
}

TEST_CASE("equal-measure sampling error") {
    const ModelParams p(1.0, 2.0);
    // Lipschitz profile on the interval; sup error of the sampled
    // rearrangement is O(1/n).
    const auto f = [](double t) { return std::cos(t); };
    const auto coarse = sample_equal_measure(p, f, 0.5, 256);
    const auto fine = sample_equal_measure(p, f, 0.5, 4096);
    const auto s_coarse = decreasing_rearrangement(coarse);
    const auto s_fine = decreasing_rearrangement(fine);
    const double d = step_diff_lp(s_coarse, s_fine, kInfinityNorm);
    CHECK(d <= 16.0 / 256.0);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(WeightedFunction(std::vector<WeightedCell>{{1.0, -0.1}}), std::invalid_argument);
    CHECK_THROWS_AS(WeightedFunction(std::vector<WeightedCell>{}), std::invalid_argument);
    CHECK_THROWS_AS(WeightedFunction(std::vector<WeightedCell>{{std::nan(""), 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(StepFunction({0.0, 0.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(distribution_function(WeightedFunction(std::vector<WeightedCell>{{1.0, 0.5}}), -1.0),
                    std::invalid_argument);
}
