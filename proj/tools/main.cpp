#include "talenti/acceptance.hpp"
#include "talenti/brownian.hpp"
#include "talenti/comparison.hpp"
#include "talenti/csvio.hpp"
#include "talenti/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>

namespace {

using namespace talenti;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct GeometryArgs {
    int icosphere = -1;
    std::string mesh_path;
    std::string domain = "cap:0.5";
    std::string coeff_path;
    double K = 1.0;
    double N = 2.0;
};

struct Geometry {
    std::shared_ptr<const SurfaceMesh> mesh;
    DomainSpec dom;
    CoefficientField coeff;
    Vec3 center{0.0, 0.0, 1.0};
    double cap_radius = 0.0; // geodesic radius of the (first) cap, if any
};

std::vector<double> parse_masses(const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stod(item));
    return out;
}

Geometry resolve_geometry(const GeometryArgs& g) {
    Geometry geo;
    if (g.icosphere >= 0 && !g.mesh_path.empty())
        throw std::invalid_argument("pass either --icosphere or --mesh, not both");
    const double radius = 1.0 / std::sqrt(g.K);
    if (!g.mesh_path.empty())
        geo.mesh = std::make_shared<SurfaceMesh>(load_off(g.mesh_path));
    else
        geo.mesh = std::make_shared<SurfaceMesh>(generate_icosphere(
            g.icosphere >= 0 ? g.icosphere : 4, radius));

    if (g.domain.rfind("cap:", 0) == 0) {
        const double mass = std::stod(g.domain.substr(4));
        geo.dom = cap_domain(geo.mesh, {0.0, 0.0, 1.0}, mass);
        geo.center = {0.0, 0.0, 1.0};
        geo.cap_radius = inv_H(ModelParams(g.K, g.N), std::min(mass, 1.0 - 1e-12));
    } else if (g.domain.rfind("twocap:", 0) == 0) {
        const auto masses = parse_masses(g.domain.substr(7));
        if (masses.size() != 2)
            throw std::invalid_argument("twocap needs two masses, e.g. twocap:0.15,0.15");
        const auto a = cap_domain(geo.mesh, {0.0, 0.0, 1.0}, masses[0]);
        const auto b = cap_domain(geo.mesh, {0.0, 0.0, -1.0}, masses[1]);
        geo.dom = union_domains(a, b);
        geo.center = {0.0, 0.0, 1.0};
        geo.cap_radius = inv_H(ModelParams(g.K, g.N), masses[0]);
    } else if (g.domain.rfind("mask:", 0) == 0) {
        geo.dom = domain_from_mask(geo.mesh,
                                   read_mask_csv(g.domain.substr(5), geo.mesh->n_vertices()));
        geo.center = {0.0, 0.0, 1.0};
        geo.cap_radius = std::numbers::pi * radius * 0.5;
    } else {
        throw std::invalid_argument("unknown domain spec '" + g.domain +
                                    "' (expected cap:<mass>, twocap:<m1>,<m2> or mask:<csv>)");
    }

    if (g.coeff_path.empty()) {
        geo.coeff = CoefficientField::identity(*geo.mesh);
    } else {
        geo.coeff.tensors = read_coeff_csv(g.coeff_path, geo.mesh->n_triangles());
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& t : geo.coeff.tensors) {
            const double tr = t[0] + t[2];
            const double det = t[0] * t[2] - t[1] * t[1];
            const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
            lo = std::min(lo, 0.5 * tr - disc);
            hi = std::max(hi, 0.5 * tr + disc);
        }
        geo.coeff.alpha = lo;
        geo.coeff.beta = hi;
    }
    return geo;
}

// Function specs: const:<c>, radial:{cosdist,bump,linear}, csv:<path>.
std::vector<double> resolve_function(const std::string& spec, const Geometry& geo) {
    const auto& mesh = *geo.mesh;
    std::vector<double> f(mesh.n_vertices(), 0.0);
    if (spec.rfind("const:", 0) == 0) {
        std::fill(f.begin(), f.end(), std::stod(spec.substr(6)));
        return f;
    }
    if (spec.rfind("csv:", 0) == 0)
        return read_vertex_csv(spec.substr(4), mesh.n_vertices());
    if (spec.rfind("radial:", 0) == 0) {
        const std::string kind = spec.substr(7);
        const Vec3 c = geo.center.normalized();
        const double r0 = geo.cap_radius > 0.0 ? geo.cap_radius : std::numbers::pi * mesh.radius;
        for (std::size_t i = 0; i < mesh.n_vertices(); ++i) {
            const double ca = std::clamp(mesh.vertices[i].dot(c) / mesh.radius, -1.0, 1.0);
            const double d = std::acos(ca) * mesh.radius;
            if (kind == "cosdist")
                f[i] = std::cos(d / mesh.radius);
            else if (kind == "bump")
                f[i] = std::pow(std::max(0.0, 1.0 - (d / r0) * (d / r0)), 2.0);
            else if (kind == "linear")
                f[i] = std::max(0.0, 1.0 - d / r0);
            else
                throw std::invalid_argument("unknown radial function '" + kind +
                                            "' (catalog: cosdist, bump, linear)");
        }
        return f;
    }
    throw std::invalid_argument("unknown function spec '" + spec + "'");
}

void emit(const std::filesystem::path& out, const std::string& name, const std::string& content) {
    if (out.empty()) {
        std::cout << content << "\n";
    } else {
        std::filesystem::create_directories(out);
        atomic_write_text(out / name, content);
    }
}

int cmd_exit(bool pass) { return pass ? kExitOk : kExitCheckFailed; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symmetrization and comparison laboratory on model spaces and sphere meshes"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value configuration file; flags override");

    std::string out_dir;
    app.add_option("--out", out_dir, "output directory (default: print to stdout)");

    // ---- model ----
    auto* model_cmd = app.add_subcommand("model", "evaluate the 1-D model space");
    double K = 1.0, N = 2.0, v_arg = -1.0, t_arg = -1.0;
    model_cmd->add_option("--K", K, "curvature lower bound (> 0)")->required();
    model_cmd->add_option("--N", N, "dimension upper bound (> 1)")->required();
    model_cmd->add_option("--v", v_arg, "mass fraction for inv_H / iso_profile");
    model_cmd->add_option("--t", t_arg, "coordinate for h / H");

    // ---- rearrange ----
    auto* rearr_cmd = app.add_subcommand("rearrange", "decreasing rearrangement of value,weight CSV");
    std::string in_path, out_path;
    rearr_cmd->add_option("--in", in_path, "input CSV with value,weight rows")->required();
    rearr_cmd->add_option("--out-file", out_path, "output CSV (breakpoint,value)");

    // ---- solve-model ----
    auto* solve_cmd = app.add_subcommand("solve-model", "solve the weighted model Poisson problem");
    double sm_v = 0.5, sm_alpha = 1.0;
    int sm_grid = 2048;
    std::string sm_f = "const:2";
    solve_cmd->add_option("--K", K)->required();
    solve_cmd->add_option("--N", N)->required();
    solve_cmd->add_option("--v", sm_v, "domain mass in (0,1)")->required();
    solve_cmd->add_option("--alpha", sm_alpha, "ellipticity constant");
    solve_cmd->add_option("--f", sm_f, "data: const:<c> or csv:<value,weight rows>");
    solve_cmd->add_option("--n-grid", sm_grid, "grid nodes");

    // ---- geometry-based commands ----
    GeometryArgs geo_args;
    const auto add_geometry = [&](CLI::App* cmd) {
        cmd->add_option("--icosphere", geo_args.icosphere, "icosphere subdivisions");
        cmd->add_option("--mesh", geo_args.mesh_path, "OFF mesh path");
        cmd->add_option("--domain", geo_args.domain,
                        "cap:<mass> | twocap:<m1>,<m2> | mask:<csv>");
        cmd->add_option("--coeff", geo_args.coeff_path, "triangle_index,a11,a12,a22 CSV");
        cmd->add_option("--K", geo_args.K);
        cmd->add_option("--N", geo_args.N);
    };

    auto* tal_cmd = app.add_subcommand("talenti-check", "domain vs model comparison report");
    std::string tal_f = "const:2";
    int tal_grid = 2048;
    double tal_ctol = 5.0;
    bool tal_torsion = false, tal_eigen = false;
    add_geometry(tal_cmd);
    tal_cmd->add_option("--f", tal_f, "const:<c> | radial:<name> | csv:<path>");
    tal_cmd->add_option("--n-grid", tal_grid);
    tal_cmd->add_option("--ctol", tal_ctol, "eps_mesh = ctol * max edge length");
    tal_cmd->add_flag("--torsion", tal_torsion, "include the torsion comparison");
    tal_cmd->add_flag("--eigen", tal_eigen, "include the eigenvalue comparison");

    auto* tor_cmd = app.add_subcommand("torsion", "torsional rigidity (model or domain vs model)");
    bool tor_model_only = false;
    double tor_v = 0.5;
    add_geometry(tor_cmd);
    tor_cmd->add_flag("--model", tor_model_only, "model value only");
    tor_cmd->add_option("--v", tor_v, "mass for --model");

    auto* eig_cmd = app.add_subcommand("eigen", "first Dirichlet eigenvalue");
    bool eig_model_only = false;
    double eig_v = 0.5;
    int eig_grid = 1024;
    add_geometry(eig_cmd);
    eig_cmd->add_flag("--model", eig_model_only, "model value only");
    eig_cmd->add_option("--v", eig_v, "mass for --model");
    eig_cmd->add_option("--n-grid", eig_grid);

    auto* sob_cmd = app.add_subcommand("sobolev", "embedding constants and checks");
    double sob_v = 0.5, sob_p = std::numeric_limits<double>::infinity(), sob_q = 0.0;
    bool sob_model_only = false;
    std::string sob_f = "const:2";
    add_geometry(sob_cmd);
    sob_cmd->add_flag("--model", sob_model_only, "constant only, no domain check");
    sob_cmd->add_option("--v", sob_v, "mass for --model");
    sob_cmd->add_option("--p", sob_p, "data exponent (inf allowed)");
    sob_cmd->add_option("--q", sob_q, "target exponent (0 = sup norm)");
    sob_cmd->add_option("--f", sob_f);

    auto* br_cmd = app.add_subcommand("brownian", "geodesic-walk exit times");
    std::string br_domain = "cap:0.5", br_start = "pole", br_mask;
    double br_dt = 1e-4;
    long br_n = 100000;
    std::uint64_t br_seed = 1;
    int br_workers = 4, br_points = 256;
    bool br_average = false;
    double br_K = 1.0;
    std::string br_mesh;
    br_cmd->add_option("--domain", br_domain, "cap:<mass> | twocap:<m1>,<m2> (analytic) ");
    br_cmd->add_option("--mesh", br_mesh, "OFF mesh for a meshed domain");
    br_cmd->add_option("--mask", br_mask, "vertex mask CSV for a meshed domain");
    br_cmd->add_option("--K", br_K);
    br_cmd->add_option("--start", br_start, "pole | x,y,z");
    br_cmd->add_option("--dt", br_dt);
    br_cmd->add_option("--n", br_n, "walkers (per start point with --average)");
    br_cmd->add_option("--seed", br_seed);
    br_cmd->add_option("--workers", br_workers);
    br_cmd->add_flag("--average", br_average, "measure-averaged exit time vs the model cap");
    br_cmd->add_option("--points", br_points, "start points for --average");

    auto* rep_cmd = app.add_subcommand("reproduce", "run the acceptance pipelines");
    std::string rep_tier = "coarse";
    int rep_workers = 4;
    rep_cmd->add_option("--tier", rep_tier, "coarse | standard");
    rep_cmd->add_option("--workers", rep_workers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (model_cmd->parsed()) {
            const ModelParams p(K, N);
            const auto mc = asympt_constants(p);
            ordered_json j;
            j["K"] = K;
            j["N"] = N;
            j["interval_length"] = p.interval_length();
            j["normalizing_constant"] = p.normalizing_constant();
            j["gamma1"] = mc.gamma1;
            j["gamma2"] = mc.gamma2;
            if (v_arg >= 0.0) {
                j["v"] = v_arg;
                j["inv_H"] = inv_H(p, v_arg);
                j["iso_profile"] = iso_profile(p, v_arg);
            }
            if (t_arg >= 0.0) {
                j["t"] = t_arg;
                j["h"] = eval_h(p, t_arg);
                j["H"] = eval_H(p, t_arg);
            }
            emit(out_dir, "model.json", j.dump(2));
            return kExitOk;
        }

        if (rearr_cmd->parsed()) {
            const auto u = read_weighted_csv(in_path);
            const auto sharp = decreasing_rearrangement(u);
            const std::string csv = step_function_csv(sharp);
            if (!out_path.empty())
                atomic_write_text(out_path, csv);
            else
                emit(out_dir, "rearranged.csv", csv);
            return kExitOk;
        }

        if (solve_cmd->parsed()) {
            const ModelParams p(K, N);
            StepFunction data;
            if (sm_f.rfind("const:", 0) == 0)
                data = StepFunction::constant(std::stod(sm_f.substr(6)), sm_v);
            else if (sm_f.rfind("csv:", 0) == 0)
                data = decreasing_rearrangement(read_weighted_csv(sm_f.substr(4)));
            else
                throw std::invalid_argument("solve-model takes const:<c> or csv:<path> data");
            const auto sol = solve_model_poisson(p, data, sm_v, sm_alpha, sm_grid);
            emit(out_dir, "model_solution.csv",
                 curve_csv(sol.grid, sol.w, sol.w_prime, "rho,w,w_prime"));
            ordered_json j;
            j["r_v"] = sol.r_v;
            j["w0"] = sol.w.front();
            j["alpha"] = sm_alpha;
            emit(out_dir, "model_solution.json", j.dump(2));
            return kExitOk;
        }

        if (tal_cmd->parsed()) {
            const auto geo = resolve_geometry(geo_args);
            const auto f = resolve_function(tal_f, geo);
            const ModelParams p(geo_args.K, geo_args.N);
            TalentiOptions topt;
            topt.n_grid = tal_grid;
            topt.c_tol = tal_ctol;
            topt.with_torsion = tal_torsion;
            topt.with_faber_krahn = tal_eigen;
            topt.sobolev_cases = {{std::numeric_limits<double>::infinity(), 0.0}};
            const auto rep = talenti_check(geo.dom, geo.coeff, f, p, topt);
            emit(out_dir, "talenti_report.json", rep.to_json());
            if (!out_dir.empty())
                atomic_write_text(std::filesystem::path(out_dir) / "talenti_curve.csv",
                                  curve_csv(rep.grid, rep.u_star_curve, rep.w_curve,
                                            "rho,u_star,w"));
            std::printf("talenti-check v=%s min(w-u*)=%s eps=%s %s\n",
                        format_double(rep.v).c_str(), format_double(rep.pointwise_margin).c_str(),
                        format_double(rep.eps_mesh).c_str(), rep.all_pass() ? "PASS" : "FAIL");
            return cmd_exit(rep.all_pass());
        }

        if (tor_cmd->parsed()) {
            const ModelParams p(geo_args.K, geo_args.N);
            if (tor_model_only) {
                std::printf("%.12f\n", torsional_rigidity_model(p, tor_v));
                return kExitOk;
            }
            const auto geo = resolve_geometry(geo_args);
            const auto tc = torsion_check(geo.dom, p);
            const double eps = 5.0 * geo.mesh->max_edge;
            ordered_json j;
            j["domain"] = tc.domain;
            j["model"] = tc.model;
            j["margin"] = tc.margin;
            j["eps_mesh"] = eps;
            emit(out_dir, "torsion.json", j.dump(2));
            return cmd_exit(tc.margin >= -eps);
        }

        if (eig_cmd->parsed()) {
            const ModelParams p(geo_args.K, geo_args.N);
            if (eig_model_only) {
                std::printf("%.12f\n", model_first_eigenvalue(p, eig_v, eig_grid));
                return kExitOk;
            }
            const auto geo = resolve_geometry(geo_args);
            const auto fk = faber_krahn_check(geo.dom, p, eig_grid);
            const double eps = 5.0 * geo.mesh->max_edge;
            ordered_json j;
            j["domain"] = fk.domain;
            j["model"] = fk.model;
            j["margin"] = fk.margin;
            j["eps_mesh"] = eps;
            emit(out_dir, "eigen.json", j.dump(2));
            return cmd_exit(fk.margin >= -eps);
        }

        if (sob_cmd->parsed()) {
            const ModelParams p(geo_args.K, geo_args.N);
            if (sob_model_only) {
                const double c = sob_q > 0.0 ? sobolev_c2(p, sob_v, sob_p, sob_q)
                                             : sobolev_c1(p, sob_v, sob_p);
                std::printf("%.12f\n", c);
                return kExitOk;
            }
            const auto geo = resolve_geometry(geo_args);
            const auto f = resolve_function(sob_f, geo);
            const auto sc = sobolev_check(geo.dom, geo.coeff, f, p, sob_p, sob_q,
                                          5.0 * geo.mesh->max_edge);
            ordered_json j;
            j["p"] = std::isinf(sc.p_exp) ? ordered_json("inf") : ordered_json(sc.p_exp);
            j["q"] = sc.q_exp;
            j["bound"] = sc.bound;
            j["attained"] = sc.attained;
            j["pass"] = sc.pass;
            emit(out_dir, "sobolev.json", j.dump(2));
            return cmd_exit(sc.pass);
        }

        if (br_cmd->parsed()) {
            const ModelParams p(br_K, 2.0);
            WalkDomain dom = [&] {
                if (!br_mesh.empty()) {
                    auto mesh = std::make_shared<SurfaceMesh>(load_off(br_mesh));
                    if (br_mask.empty())
                        throw std::invalid_argument("meshed walks need --mask");
                    return WalkDomain::from_mesh(mesh,
                                                 read_mask_csv(br_mask, mesh->n_vertices()));
                }
                if (br_domain.rfind("cap:", 0) == 0)
                    return WalkDomain::analytic_caps(
                        p, {{{0.0, 0.0, 1.0}, std::stod(br_domain.substr(4))}});
                if (br_domain.rfind("twocap:", 0) == 0) {
                    const auto masses = parse_masses(br_domain.substr(7));
                    if (masses.size() != 2)
                        throw std::invalid_argument("twocap:<m1>,<m2>");
                    return WalkDomain::analytic_caps(
                        p, {{{0.0, 0.0, 1.0}, masses[0]}, {{0.0, 0.0, -1.0}, masses[1]}});
                }
                throw std::invalid_argument("unknown walk domain '" + br_domain + "'");
            }();

            WalkOptions wopt;
            wopt.dt = br_dt;
            wopt.n_samples = br_n;
            wopt.seed = br_seed;
            wopt.workers = br_workers;

            if (br_average) {
                const auto avg = average_exit_time(dom, p, wopt, br_points);
                ordered_json j;
                j["mean"] = avg.mean;
                j["stderr"] = avg.stderr_;
                j["n_samples"] = avg.n_samples;
                j["model_mean"] = avg.model_mean;
                j["margin"] = avg.margin;
                j["allowance"] = avg.allowance;
                j["pass"] = avg.pass;
                emit(out_dir, "brownian_average.json", j.dump(2));
                return cmd_exit(avg.pass);
            }

            Vec3 start{0.0, 0.0, 1.0};
            if (br_start != "pole") {
                const auto parts = parse_masses(br_start);
                if (parts.size() != 3)
                    throw std::invalid_argument("--start takes 'pole' or x,y,z");
                start = Vec3{parts[0], parts[1], parts[2]}.normalized() * dom.sphere_radius();
            } else {
                start = Vec3{0.0, 0.0, 1.0} * dom.sphere_radius();
            }
            const auto est = simulate_exit_time(dom, start, wopt);
            ordered_json j;
            j["start"] = {est.start.x, est.start.y, est.start.z};
            j["mean"] = est.mean;
            j["stderr"] = est.stderr_;
            j["n_samples"] = est.n_samples;
            j["dt"] = est.dt;
            j["seed"] = est.seed;
            j["rng"] = est.rng;
            j["midpoint_correction"] = est.midpoint_correction;
            emit(out_dir, "brownian.json", j.dump(2));
            return kExitOk;
        }

        if (rep_cmd->parsed()) {
            accept::Options aopt;
            if (rep_tier == "standard")
                aopt.tier = accept::tier_standard();
            else if (rep_tier == "coarse")
                aopt.tier = accept::tier_coarse();
            else
                throw std::invalid_argument("unknown tier '" + rep_tier + "'");
            aopt.workers = rep_workers;
            aopt.out_dir = out_dir.empty() ? std::filesystem::path("reproduce_" + rep_tier)
                                           : std::filesystem::path(out_dir);
            aopt.enforce_budgets = false; // budgets belong to the test suite
            const auto results = accept::run_all(aopt);
            bool all = true;
            for (const auto& r : results) {
                std::printf("criterion %2d %-28s %s  %s\n", r.id, r.name.c_str(),
                            r.pass ? "PASS" : "FAIL", r.detail.c_str());
                all = all && r.pass;
            }
            std::printf("report written to %s\n", aopt.out_dir.string().c_str());
            return cmd_exit(all);
        }
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitUsage;
}
