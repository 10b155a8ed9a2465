#include "talenti/acceptance.hpp"

#include "talenti/brownian.hpp"
#include "talenti/comparison.hpp"
#include "talenti/csvio.hpp"
#include "talenti/rng.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace talenti::accept {

namespace {

using nlohmann::ordered_json;

constexpr std::uint64_t kSeedWf = 0x5EEDF00D01ull;
constexpr std::uint64_t kSeedPairs = 0x5EEDF00D02ull;
constexpr std::uint64_t kSeedRandF = 0x5EEDF00D03ull;
constexpr std::uint64_t kSeedCoeff = 0x5EEDF00D04ull;
constexpr std::uint64_t kSeedWalk = 0x5EEDF00D05ull;
constexpr std::uint64_t kSeedAvg = 0x5EEDF00D06ull;

std::string fmt(double x) { return format_double(x); }

// Lebesgue measure of {step > t}; bit-identical to the prefix sums used by
// distribution_function.
double measure_above(const StepFunction& s, double t) {
    std::size_t j = 0;
    while (j < s.values().size() && s.values()[j] > t)
        ++j;
    return s.breakpoints()[j];
}

// L^p distance of two step functions over their merged breakpoints.
double step_diff_lp(const StepFunction& a, const StepFunction& b, double p) {
    std::vector<double> cuts;
    cuts.reserve(a.breakpoints().size() + b.breakpoints().size());
    cuts.insert(cuts.end(), a.breakpoints().begin(), a.breakpoints().end());
    cuts.insert(cuts.end(), b.breakpoints().begin(), b.breakpoints().end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
            m = std::max(m, std::abs(a(mid) - b(mid)));
        }
        return m;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        acc += (cuts[i + 1] - cuts[i]) * std::pow(std::abs(a(mid) - b(mid)), p);
    }
    return std::pow(acc, 1.0 / p);
}

WeightedFunction random_weighted(SplitMix64& rng, int max_cells) {
    const int n = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_cells));
    std::vector<WeightedCell> cells(static_cast<std::size_t>(n));
    double total = 0.0;
    for (auto& c : cells) {
        c.weight = 0.01 + rng.uniform();
        total += c.weight;
    }
    const double target = 0.1 + 0.9 * rng.uniform();
    for (auto& c : cells) {
        c.weight *= target / total;
        const double sign = (rng.next() & 1) ? 1.0 : -1.0;
        c.value = sign * 10.0 * rng.uniform();
    }
    return WeightedFunction(std::move(cells));
}

std::vector<double> random_nonneg_vertex_function(const SurfaceMesh& mesh, std::uint64_t seed) {
    std::vector<double> f(mesh.n_vertices());
    for (std::size_t i = 0; i < f.size(); ++i) {
        SplitMix64 rng(seed ^ static_cast<std::uint64_t>(i));
        f[i] = 2.0 * rng.uniform();
    }
    return f;
}

CoefficientField random_coefficients(const SurfaceMesh& mesh, SplitMix64& rng, double lo,
                                     double hi) {
    CoefficientField c;
    c.tensors.resize(mesh.n_triangles());
    double emin = hi, emax = lo;
    for (auto& t : c.tensors) {
        const double l1 = lo + (hi - lo) * rng.uniform();
        const double l2 = lo + (hi - lo) * rng.uniform();
        const double th = 2.0 * std::numbers::pi * rng.uniform();
        const double cs = std::cos(th), sn = std::sin(th);
        t = {cs * cs * l1 + sn * sn * l2, cs * sn * (l1 - l2), sn * sn * l1 + cs * cs * l2};
        emin = std::min({emin, l1, l2});
        emax = std::max({emax, l1, l2});
    }
    c.alpha = emin;
    c.beta = emax;
    return c;
}

struct Runner {
    const Options& opt;
    const Tier& tier;
    std::vector<CriterionResult> results;

    // Meshes built lazily and shared between criteria.
    std::map<int, std::shared_ptr<const SurfaceMesh>> meshes;

    // Reports cached for the monotonicity and Sobolev criteria.
    std::vector<std::pair<std::string, ComparisonReport>> reports;

    explicit Runner(const Options& o) : opt(o), tier(o.tier) {}

    std::shared_ptr<const SurfaceMesh> mesh(int s) {
        auto it = meshes.find(s);
        if (it == meshes.end())
            it = meshes.emplace(s, std::make_shared<SurfaceMesh>(generate_icosphere(s, 1.0))).first;
        return it->second;
    }

    void write(const std::string& name, const std::string& content) {
        if (opt.out_dir.empty())
            return;
        std::filesystem::create_directories(opt.out_dir);
        atomic_write_text(opt.out_dir / name, content);
    }

    void run(int id, const std::string& name, double budget,
             const std::function<std::pair<bool, std::string>()>& body) {
        CriterionResult r;
        r.id = id;
        r.name = name;
        r.budget_seconds = budget;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            auto [pass, detail] = body();
            r.pass = pass;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (opt.enforce_budgets && budget > 0.0 && r.seconds > budget) {
            r.pass = false;
            r.detail += " [runtime budget exceeded]";
        }
        results.push_back(std::move(r));
    }

    // --- criteria ----------------------------------------------------------

    std::pair<bool, std::string> c1_model_closed_forms() {
        const ModelParams p(1.0, 2.0);
        double worst_iso = 0.0, worst_H = 0.0;
        for (int i = 0; i <= 99; ++i) {
            const double v = static_cast<double>(i) / 99.0;
            worst_iso = std::max(worst_iso,
                                 std::abs(iso_profile(p, v) - std::sqrt(v * (1.0 - v))));
            const double t = std::numbers::pi * v;
            worst_H = std::max(worst_H, std::abs(eval_H(p, t) - 0.5 * (1.0 - std::cos(t))));
        }
        const bool pass = worst_iso <= 1e-10 && worst_H <= 1e-12;
        return {pass, "max|iso-sqrt(v(1-v))|=" + fmt(worst_iso) + " max|H-(1-cos)/2|=" +
                          fmt(worst_H)};
    }

    std::pair<bool, std::string> c2_model_poisson() {
        const ModelParams p(1.0, 2.0);
        const auto f2 = StepFunction::constant(2.0, 0.5);
        const auto sol = solve_model_poisson(p, f2, 0.5, 1.0, tier.n_grid);
        const double w0_err = std::abs(sol.w.front() - 2.0 * std::log(2.0));
        const auto w2 = eval_repr2_on_grid(sol);
        double route_diff = 0.0;
        for (std::size_t i = 0; i < w2.size(); ++i)
            route_diff = std::max(route_diff, std::abs(w2[i] - sol.w[i]));
        const double residual = weak_form_residual(sol, 20);
        write("model_solution.csv", curve_csv(sol.grid, sol.w, sol.w_prime, "rho,w,w_prime"));
        const bool pass = w0_err <= 1e-8 && route_diff <= 1e-10 && residual <= 1e-6;
        return {pass, "|w(0)-2ln2|=" + fmt(w0_err) + " repr_diff=" + fmt(route_diff) +
                          " weak_residual=" + fmt(residual)};
    }

    std::pair<bool, std::string> c3_rearrangement_exact() {
        SplitMix64 rng(kSeedWf);
        long exact_fail = 0, star_fail = 0;
        double worst_star = 0.0;
        for (int k = 0; k < tier.n_random_wf; ++k) {
            const auto u = random_weighted(rng, 64);
            const auto sharp = decreasing_rearrangement(u);
            // Thresholds: 0, every distinct level, midpoints between levels.
            std::vector<double> ts{0.0};
            for (std::size_t i = 0; i < sharp.values().size(); ++i) {
                ts.push_back(sharp.values()[i]);
                if (i + 1 < sharp.values().size())
                    ts.push_back(0.5 * (sharp.values()[i] + sharp.values()[i + 1]));
            }
            for (double t : ts)
                if (distribution_function(u, t) != measure_above(sharp, t))
                    ++exact_fail;
            for (double pn : {1.0, 2.0, 7.5, kInfinityNorm})
                if (lp_norm(u, pn) != lp_norm(sharp, pn))
                    ++exact_fail;
            if (k % 10 == 0) { // model-space equimeasurability, spot-checked
                const ModelParams p(1.0, 2.0);
                const SchwarzSymmetrization star(sharp, p);
                for (std::size_t i = 0; i < std::min<std::size_t>(3, sharp.values().size());
                     ++i) {
                    const double t = sharp.values()[i] * 0.999;
                    // {u* > t} = [0, x_t) with H(x_t) = measure of {u# > t}.
                    const double s_t = measure_above(sharp, t);
                    const double x_t = inv_H(p, std::min(s_t, 1.0));
                    const double err = std::abs(eval_H(p, x_t) - s_t);
                    worst_star = std::max(worst_star, err);
                    if (err > 1e-10)
                        ++star_fail;
                }
            }
        }
        SplitMix64 rng2(kSeedPairs);
        long contraction_fail = 0;
        for (int k = 0; k < tier.n_random_pairs; ++k) {
            const auto u = random_weighted(rng2, 64);
            auto cells_v = u.cells();
            for (auto& c : cells_v) {
                const double sign = (rng2.next() & 1) ? 1.0 : -1.0;
                c.value = sign * 10.0 * rng2.uniform();
            }
            const WeightedFunction vfun(cells_v);
            auto cells_diff = u.cells();
            for (std::size_t i = 0; i < cells_diff.size(); ++i)
                cells_diff[i].value -= cells_v[i].value;
            const WeightedFunction diff(cells_diff);
            const auto us = decreasing_rearrangement(u);
            const auto vs = decreasing_rearrangement(vfun);
            for (double pn : {1.0, 2.0, 7.5, kInfinityNorm}) {
                const double lhs = step_diff_lp(us, vs, pn);
                const double rhs = lp_norm(diff, pn);
                if (lhs > rhs * (1.0 + 1e-12) + 1e-15)
                    ++contraction_fail;
            }
        }
        const bool pass = exact_fail == 0 && star_fail == 0 && contraction_fail == 0;
        return {pass, "exact_failures=" + std::to_string(exact_fail) +
                          " star_failures=" + std::to_string(star_fail) +
                          " contraction_failures=" + std::to_string(contraction_fail) +
                          " worst_star_equimeasure=" + fmt(worst_star)};
    }

    ComparisonReport cap_report(int s, const std::string& tag) {
        const auto m = mesh(s);
        const auto dom = cap_domain(m, {0.0, 0.0, 1.0}, 0.5);
        const auto coeff = CoefficientField::identity(*m);
        const std::vector<double> f(m->n_vertices(), 2.0);
        const ModelParams p(1.0, 2.0);
        TalentiOptions topt;
        topt.n_grid = tier.n_grid;
        topt.sobolev_cases = {{kInfinityNorm, 0.0}};
        auto rep = talenti_check(dom, coeff, f, p, topt);
        write("talenti_" + tag + ".json", rep.to_json());
        write("talenti_" + tag + ".csv",
              curve_csv(rep.grid, rep.u_star_curve, rep.w_curve, "rho,u_star,w"));
        reports.emplace_back(tag, rep);
        return rep;
    }

    DomainSpec twocap_domain(int s) {
        const auto m = mesh(s);
        const auto a = cap_domain(m, {0.0, 0.0, 1.0}, 0.15);
        const auto b = cap_domain(m, {0.0, 0.0, -1.0}, 0.15);
        return union_domains(a, b);
    }

    ComparisonReport twocap_report(int s, bool random_f, const std::string& tag) {
        const auto m = mesh(s);
        const auto dom = twocap_domain(s);
        const auto coeff = CoefficientField::identity(*m);
        const std::vector<double> f = random_f ? random_nonneg_vertex_function(*m, kSeedRandF)
                                               : std::vector<double>(m->n_vertices(), 2.0);
        const ModelParams p(1.0, 2.0);
        TalentiOptions topt;
        topt.n_grid = tier.n_grid;
        topt.sobolev_cases = {{kInfinityNorm, 0.0}, {4.0, 0.0}};
        auto rep = talenti_check(dom, coeff, f, p, topt);
        write("talenti_" + tag + ".json", rep.to_json());
        write("talenti_" + tag + ".csv",
              curve_csv(rep.grid, rep.u_star_curve, rep.w_curve, "rho,u_star,w"));
        reports.emplace_back(tag, rep);
        return rep;
    }

    std::pair<bool, std::string> c4_equality_case() {
        const auto lo = cap_report(tier.s_lo, "hemisphere_s" + std::to_string(tier.s_lo));
        const auto hi = cap_report(tier.s_hi, "hemisphere_s" + std::to_string(tier.s_hi));
        const auto sup_diff = [](const ComparisonReport& r) {
            double m = 0.0;
            for (std::size_t i = 0; i < r.grid.size(); ++i)
                m = std::max(m, std::abs(r.w_curve[i] - r.u_star_curve[i]));
            return m;
        };
        const double sup_lo = sup_diff(lo), sup_hi = sup_diff(hi);
        const double bound = tier.sup_factor * hi.w_curve.front();
        const double ratio = sup_lo / sup_hi;
        const bool pass = sup_hi <= bound && ratio >= tier.sup_ratio;
        return {pass, "sup|w-u*|: s" + std::to_string(tier.s_lo) + "=" + fmt(sup_lo) + " s" +
                          std::to_string(tier.s_hi) + "=" + fmt(sup_hi) + " bound=" + fmt(bound) +
                          " decrease_ratio=" + fmt(ratio)};
    }

    std::pair<bool, std::string> c5_twocap_inequality() {
        bool pass = true;
        std::ostringstream detail;
        for (int s : {tier.s_lo, tier.s_hi}) {
            for (bool rnd : {false, true}) {
                const std::string tag = std::string("twocap_") + (rnd ? "rand" : "const") + "_s" +
                                        std::to_string(s);
                const auto rep = twocap_report(s, rnd, tag);
                const double eps = rep.eps_mesh;
                bool ok = rep.pointwise_margin >= -eps;
                for (const auto& [q, margin] : rep.gradient_margins)
                    ok = ok && margin >= -eps;
                pass = pass && ok;
                detail << tag << ": min(w-u*)=" << fmt(rep.pointwise_margin) << " eps=" << fmt(eps)
                       << (ok ? " ok; " : " FAIL; ");
            }
        }
        return {pass, detail.str()};
    }

    std::pair<bool, std::string> c6_monotonicity() {
        bool pass = true;
        double worst = 0.0;
        for (const auto& [tag, rep] : reports) {
            worst = std::max(worst, rep.monotonicity_violation);
            pass = pass && rep.monotonicity_violation <= rep.eps_mesh;
        }
        return {pass, "runs=" + std::to_string(reports.size()) +
                          " worst_increase=" + fmt(worst)};
    }

    std::pair<bool, std::string> c7_torsion() {
        const ModelParams p(1.0, 2.0);
        const double T_exact = 2.0 * std::log(2.0) - 1.0;
        const double T_model = torsional_rigidity_model(p, 0.5);
        const double model_err = std::abs(T_model - T_exact);

        const auto T_dom = [&](int s) {
            const auto m = mesh(s);
            const auto dom = cap_domain(m, {0.0, 0.0, 1.0}, 0.5);
            return torsion_check(dom, p).domain;
        };
        const double T_lo = T_dom(tier.s_lo), T_hi = T_dom(tier.s_hi);
        const double rel_hi = std::abs(T_hi - T_exact) / T_exact;
        const bool converging = std::abs(T_hi - T_exact) < std::abs(T_lo - T_exact);

        const auto dom2 = twocap_domain(tier.s_torsion);
        const auto tc = torsion_check(dom2, p);
        const double eps2 = 5.0 * dom2.mesh->max_edge;
        const bool strict = tier.strict_margins ? tc.margin > eps2 : tc.margin > 0.0;

        const bool pass = model_err <= 1e-8 && rel_hi <= tier.torsion_rel && converging && strict;
        return {pass, "|T_model-(2ln2-1)|=" + fmt(model_err) + " hemisphere_rel=" + fmt(rel_hi) +
                          " converging=" + (converging ? std::string("yes") : std::string("no")) +
                          " twocap_margin=" + fmt(tc.margin) + " eps=" + fmt(eps2)};
    }

    std::pair<bool, std::string> c8_faber_krahn() {
        const ModelParams p(1.0, 2.0);
        const double lam_model_half = model_first_eigenvalue(p, 0.5, tier.eigen_grid);
        const double model_err = std::abs(lam_model_half - 2.0);

        const auto m = mesh(tier.s_hi);
        const auto dom = cap_domain(m, {0.0, 0.0, 1.0}, 0.5);
        const auto fk_hemi = faber_krahn_check(dom, p, tier.eigen_grid);
        const double rel = std::abs(fk_hemi.domain - 2.0) / 2.0;

        const auto dom2 = twocap_domain(tier.s_hi);
        const auto fk2 = faber_krahn_check(dom2, p, tier.eigen_grid);
        const double eps2 = 5.0 * dom2.mesh->max_edge;

        const bool pass = model_err <= 1e-3 && rel <= tier.eigen_rel && fk2.margin > eps2;
        return {pass, "|lam_model-2|=" + fmt(model_err) + " hemisphere_rel=" + fmt(rel) +
                          " twocap_margin=" + fmt(fk2.margin) + " eps=" + fmt(eps2)};
    }

    std::pair<bool, std::string> c9_sobolev() {
        const ModelParams p(1.0, 2.0);
        double worst_c1 = 0.0;
        for (double v : {0.25, 0.5, 0.9})
            worst_c1 = std::max(worst_c1, std::abs(sobolev_c1(p, v, kInfinityNorm) +
                                                   std::log(1.0 - v)));

        bool all_pass = true;
        long n_checks = 0;
        for (const auto& [tag, rep] : reports)
            for (const auto& s : rep.sobolev) {
                all_pass = all_pass && s.pass;
                ++n_checks;
            }

        // Equality on the hemisphere: the finest cap run carries the p=inf check.
        double equality_gap = std::numeric_limits<double>::infinity();
        double eps_hi = 0.0;
        for (const auto& [tag, rep] : reports)
            if (tag == "hemisphere_s" + std::to_string(tier.s_hi))
                for (const auto& s : rep.sobolev)
                    if (std::isinf(s.p_exp)) {
                        equality_gap = std::abs(s.attained - s.bound);
                        eps_hi = rep.eps_mesh;
                    }

        const bool pass = worst_c1 <= 1e-10 && all_pass && equality_gap <= eps_hi;
        return {pass, "max|c1+ln(1-v)|=" + fmt(worst_c1) + " checks=" + std::to_string(n_checks) +
                          " all_pass=" + (all_pass ? std::string("yes") : std::string("no")) +
                          " hemisphere_equality_gap=" + fmt(equality_gap) + " eps=" + fmt(eps_hi)};
    }

    std::pair<bool, std::string> c10_brownian() {
        const ModelParams p(1.0, 2.0);
        const auto hemi = WalkDomain::analytic_caps(p, {{{0.0, 0.0, 1.0}, 0.5}});
        WalkOptions wopt;
        wopt.dt = tier.mc_dt;
        wopt.n_samples = tier.mc_n;
        wopt.seed = kSeedWalk;
        wopt.workers = opt.workers;
        const auto est = simulate_exit_time(hemi, {0.0, 0.0, 1.0}, wopt);
        const double dev = std::abs(est.mean - 2.0 * std::log(2.0));
        const double band = 3.0 * est.stderr_ + tier.mc_band_abs;
        {
            ordered_json j;
            j["start"] = {est.start.x, est.start.y, est.start.z};
            j["mean"] = est.mean;
            j["stderr"] = est.stderr_;
            j["n_samples"] = est.n_samples;
            j["dt"] = est.dt;
            j["seed"] = est.seed;
            j["rng"] = est.rng;
            j["midpoint_correction"] = est.midpoint_correction;
            write("brownian_hemisphere.json", j.dump(2));
        }

        const auto two = WalkDomain::analytic_caps(
            p, {{{0.0, 0.0, 1.0}, 0.15}, {{0.0, 0.0, -1.0}, 0.15}});
        WalkOptions aopt;
        aopt.dt = tier.mc_dt;
        aopt.n_samples = tier.mc_avg_n;
        aopt.seed = kSeedAvg;
        aopt.workers = opt.workers;
        const auto avg = average_exit_time(two, p, aopt, tier.mc_avg_points);
        {
            ordered_json j;
            j["mean"] = avg.mean;
            j["stderr"] = avg.stderr_;
            j["n_samples"] = avg.n_samples;
            j["model_mean"] = avg.model_mean;
            j["margin"] = avg.margin;
            j["allowance"] = avg.allowance;
            write("brownian_twocap_average.json", j.dump(2));
        }
        const bool pass = dev <= band && avg.margin > 3.0 * avg.allowance;
        return {pass, "|mean-2ln2|=" + fmt(dev) + " band=" + fmt(band) +
                          " twocap_margin=" + fmt(avg.margin) +
                          " 3x_allowance=" + fmt(3.0 * avg.allowance)};
    }

    std::pair<bool, std::string> c11_ellipticity() {
        const auto m = mesh(std::min(3, tier.s_lo));
        const auto dom = cap_domain(m, {0.0, 0.0, 1.0}, 0.4);
        const auto sys_id = assemble_stiffness(dom, CoefficientField::identity(*m));
        SplitMix64 rng(kSeedCoeff);
        long violations = 0;
        for (int k = 0; k < 50; ++k) {
            const auto coeff = random_coefficients(*m, rng, 0.5, 1.5);
            const auto sys_h = assemble_stiffness(dom, coeff);
            for (int rep = 0; rep < 20; ++rep) {
                Eigen::VectorXd x(sys_id.stiffness.rows());
                for (Eigen::Index i = 0; i < x.size(); ++i)
                    x[i] = rng.uniform() - 0.5;
                const double qid = x.dot(sys_id.stiffness * x);
                const double qh = x.dot(sys_h.stiffness * x);
                const double slack = 1e-12 * coeff.beta * qid;
                if (qh < coeff.alpha * qid - slack || qh > coeff.beta * qid + slack)
                    ++violations;
            }
        }

        // Anisotropic Talenti run with declared alpha < 1.
        const auto m4 = mesh(tier.s_lo);
        const auto dom2 = twocap_domain(tier.s_lo);
        SplitMix64 rng2(kSeedCoeff ^ 0xABCDull);
        const auto coeff2 = random_coefficients(*m4, rng2, 0.5, 1.5);
        const std::vector<double> f(m4->n_vertices(), 2.0);
        const ModelParams p(1.0, 2.0);
        TalentiOptions topt;
        topt.n_grid = tier.n_grid;
        auto rep = talenti_check(dom2, coeff2, f, p, topt);
        write("talenti_anisotropic.json", rep.to_json());
        reports.emplace_back("anisotropic", rep);
        bool aniso_ok = rep.pointwise_margin >= -rep.eps_mesh &&
                        rep.monotonicity_violation <= rep.eps_mesh;
        for (const auto& [q, margin] : rep.gradient_margins)
            aniso_ok = aniso_ok && margin >= -rep.eps_mesh;

        const bool pass = violations == 0 && aniso_ok;
        return {pass, "sandwich_violations=" + std::to_string(violations) +
                          " anisotropic_alpha=" + fmt(coeff2.alpha) +
                          " anisotropic_min_margin=" + fmt(rep.pointwise_margin)};
    }
};

} // namespace

Tier tier_standard() {
    Tier t;
    t.name = "standard";
    return t;
}

Tier tier_coarse() {
    Tier t;
    t.name = "coarse";
    t.s_lo = 2;
    t.s_hi = 3;
    t.s_torsion = 3;
    t.n_grid = 256;
    t.eigen_grid = 256;
    t.mc_n = 4000;
    t.mc_dt = 1e-3;
    t.mc_avg_points = 64;
    t.mc_avg_n = 16;
    t.n_random_wf = 200;
    t.n_random_pairs = 50;
    t.sup_factor = 0.30;
    t.sup_ratio = 1.2;
    t.torsion_rel = 0.10;
    t.eigen_rel = 0.05;
    t.mc_band_abs = 0.10;
    t.strict_margins = false;
    return t;
}

std::vector<CriterionResult> run_all(const Options& opt) {
    Runner r(opt);
    const bool std_tier = opt.tier.name == "standard";
    r.run(1, "model-space closed forms", std_tier ? 1.0 : 0.0,
          [&] { return r.c1_model_closed_forms(); });
    r.run(2, "model Poisson oracle", std_tier ? 5.0 : 0.0, [&] { return r.c2_model_poisson(); });
    r.run(3, "rearrangement exactness", std_tier ? 10.0 : 0.0,
          [&] { return r.c3_rearrangement_exact(); });
    r.run(4, "Talenti equality case", std_tier ? 60.0 : 0.0, [&] { return r.c4_equality_case(); });
    r.run(5, "Talenti two-cap inequality", std_tier ? 120.0 : 0.0,
          [&] { return r.c5_twocap_inequality(); });
    r.run(6, "monotonicity of w - u*", 0.0, [&] { return r.c6_monotonicity(); });
    r.run(7, "torsional rigidity", 0.0, [&] { return r.c7_torsion(); });
    r.run(8, "Faber-Krahn", 0.0, [&] { return r.c8_faber_krahn(); });
    r.run(9, "Sobolev constants", 0.0, [&] { return r.c9_sobolev(); });
    r.run(10, "Brownian exit time", std_tier ? 300.0 : 0.0, [&] { return r.c10_brownian(); });
    r.run(11, "ellipticity sandwich", 0.0, [&] { return r.c11_ellipticity(); });

    if (!opt.out_dir.empty())
        atomic_write_text(opt.out_dir / "criteria.json", consolidated_json(r.results, opt.tier));
    return r.results;
}

std::string consolidated_json(const std::vector<CriterionResult>& results, const Tier& tier) {
    ordered_json j;
    j["tier"] = tier.name;
    ordered_json arr = ordered_json::array();
    for (const auto& r : results)
        arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    j["criteria"] = arr;
    bool all = true;
    for (const auto& r : results)
        all = all && r.pass;
    j["all_pass"] = all;
    // Determinism (criterion 12) is established by the test suite, which runs
    // the `reproduce` pipeline twice and compares the output trees.
    j["determinism_note"] = "byte-identical reruns are verified by the acceptance suite";
    return j.dump(2);
}

} // namespace talenti::accept
