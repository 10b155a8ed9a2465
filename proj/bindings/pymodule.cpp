#include "talenti/acceptance.hpp"
#include "talenti/brownian.hpp"
#include "talenti/comparison.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

namespace py = pybind11;
using namespace talenti;

namespace {

StepFunction step_from_pairs(const std::vector<double>& breakpoints,
                             const std::vector<double>& values) {
    return StepFunction(breakpoints, values);
}

py::dict solution_dict(const ModelSolution& sol) {
    py::dict d;
    d["r_v"] = sol.r_v;
    d["v"] = sol.v;
    d["alpha"] = sol.alpha;
    d["grid"] = sol.grid;
    d["w"] = sol.w;
    d["w_prime"] = sol.w_prime;
    return d;
}

} // namespace

PYBIND11_MODULE(talentilab, m) {
    m.doc() = "Schwarz symmetrization, weighted model Poisson problems and "
              "comparison checks on sphere meshes";

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<double, double>(), py::arg("K"), py::arg("N"))
        .def_property_readonly("K", &ModelParams::curvature)
        .def_property_readonly("N", &ModelParams::dimension)
        .def_property_readonly("interval_length", &ModelParams::interval_length)
        .def_property_readonly("normalizing_constant", &ModelParams::normalizing_constant)
        .def("h", [](const ModelParams& p, double t) { return eval_h(p, t); }, py::arg("t"))
        .def("H", [](const ModelParams& p, double t) { return eval_H(p, t); }, py::arg("t"))
        .def("inv_H", [](const ModelParams& p, double v) { return inv_H(p, v); }, py::arg("v"))
        .def("iso_profile", [](const ModelParams& p, double v) { return iso_profile(p, v); },
             py::arg("v"))
        .def("asympt_constants", [](const ModelParams& p) {
            const auto c = asympt_constants(p);
            return py::make_tuple(c.gamma1, c.gamma2);
        });

    m.def("decreasing_rearrangement",
          [](const std::vector<double>& values, const std::vector<double>& weights) {
              const auto s = decreasing_rearrangement(WeightedFunction(values, weights));
              return py::make_tuple(s.breakpoints(), s.values());
          },
          py::arg("values"), py::arg("weights"));

    m.def("distribution_function",
          [](const std::vector<double>& values, const std::vector<double>& weights, double t) {
              return distribution_function(WeightedFunction(values, weights), t);
          },
          py::arg("values"), py::arg("weights"), py::arg("t"));

    m.def("lp_norm",
          [](const std::vector<double>& values, const std::vector<double>& weights, double p) {
              return lp_norm(WeightedFunction(values, weights), p);
          },
          py::arg("values"), py::arg("weights"), py::arg("p"));

    m.def("hardy_littlewood_bound",
          [](const std::vector<double>& values, const std::vector<double>& weights,
             double subset_mass) {
              return hardy_littlewood_bound(WeightedFunction(values, weights), subset_mass);
          },
          py::arg("values"), py::arg("weights"), py::arg("subset_mass"));

    m.def("schwarz_symmetrize",
          [](const std::vector<double>& values, const std::vector<double>& weights,
             const ModelParams& p, const std::vector<double>& at) {
              const SchwarzSymmetrization star(WeightedFunction(values, weights), p);
              std::vector<double> out;
              out.reserve(at.size());
              for (double x : at)
                  out.push_back(star(x));
              return py::make_tuple(star.radius(), out);
          },
          py::arg("values"), py::arg("weights"), py::arg("params"), py::arg("at"));

    m.def("solve_model_poisson",
          [](const ModelParams& p, const std::vector<double>& breakpoints,
             const std::vector<double>& values, double v, double alpha, int n_grid) {
              return solution_dict(
                  solve_model_poisson(p, step_from_pairs(breakpoints, values), v, alpha, n_grid));
          },
          py::arg("params"), py::arg("breakpoints"), py::arg("values"), py::arg("v"),
          py::arg("alpha") = 1.0, py::arg("n_grid") = 2048);

    m.def("solve_model_poisson_const",
          [](const ModelParams& p, double c, double v, double alpha, int n_grid) {
              return solution_dict(
                  solve_model_poisson(p, StepFunction::constant(c, v), v, alpha, n_grid));
          },
          py::arg("params"), py::arg("c"), py::arg("v"), py::arg("alpha") = 1.0,
          py::arg("n_grid") = 2048);

    m.def("torsional_rigidity_model", &torsional_rigidity_model, py::arg("params"), py::arg("v"));
    m.def("sobolev_c1", &sobolev_c1, py::arg("params"), py::arg("v"), py::arg("p"));
    m.def("sobolev_c2", &sobolev_c2, py::arg("params"), py::arg("v"), py::arg("p"), py::arg("q"));
    m.def("model_first_eigenvalue", &model_first_eigenvalue, py::arg("params"), py::arg("v"),
          py::arg("n_grid") = 1024);
    m.attr("INF") = std::numeric_limits<double>::infinity();

    m.def("generate_icosphere",
          [](int subdivisions, double radius) {
              const auto mesh = generate_icosphere(subdivisions, radius);
              std::vector<std::array<double, 3>> verts;
              verts.reserve(mesh.n_vertices());
              for (const auto& v : mesh.vertices)
                  verts.push_back({v.x, v.y, v.z});
              return py::make_tuple(verts, mesh.triangles, mesh.vertex_measure, mesh.max_edge);
          },
          py::arg("subdivisions"), py::arg("radius") = 1.0);

    m.def("talenti_check_cap",
          [](int subdivisions, double cap_mass, double f_const, double K, double N, int n_grid) {
              auto mesh = std::make_shared<SurfaceMesh>(generate_icosphere(subdivisions,
                                                                           1.0 / std::sqrt(K)));
              const auto dom = cap_domain(mesh, {0.0, 0.0, 1.0}, cap_mass);
              const auto coeff = CoefficientField::identity(*mesh);
              const std::vector<double> f(mesh->n_vertices(), f_const);
              TalentiOptions topt;
              topt.n_grid = n_grid;
              const auto rep = talenti_check(dom, coeff, f, ModelParams(K, N), topt);
              py::dict d;
              d["v"] = rep.v;
              d["pointwise_margin"] = rep.pointwise_margin;
              d["monotonicity_violation"] = rep.monotonicity_violation;
              d["eps_mesh"] = rep.eps_mesh;
              d["mesh_h"] = rep.mesh_h;
              d["all_pass"] = rep.all_pass();
              py::dict gm;
              for (const auto& [q, margin] : rep.gradient_margins)
                  gm[py::float_(q)] = margin;
              d["gradient_margins"] = gm;
              return d;
          },
          py::arg("subdivisions"), py::arg("cap_mass"), py::arg("f_const") = 2.0,
          py::arg("K") = 1.0, py::arg("N") = 2.0, py::arg("n_grid") = 1024);

    m.def("exit_time_cap",
          [](double cap_mass, double K, double dt, long n, std::uint64_t seed, int workers) {
              const ModelParams p(K, 2.0);
              const auto dom = WalkDomain::analytic_caps(p, {{{0.0, 0.0, 1.0}, cap_mass}});
              WalkOptions opt;
              opt.dt = dt;
              opt.n_samples = n;
              opt.seed = seed;
              opt.workers = workers;
              const auto est =
                  simulate_exit_time(dom, Vec3{0.0, 0.0, 1.0} * dom.sphere_radius(), opt);
              py::dict d;
              d["mean"] = est.mean;
              d["stderr"] = est.stderr_;
              d["n_samples"] = est.n_samples;
              d["dt"] = est.dt;
              d["seed"] = est.seed;
              return d;
          },
          py::arg("cap_mass") = 0.5, py::arg("K") = 1.0, py::arg("dt") = 1e-3,
          py::arg("n") = 10000, py::arg("seed") = 1, py::arg("workers") = 2);
}
