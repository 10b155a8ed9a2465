#include "talenti/comparison.hpp"

#include "talenti/errors.hpp"
#include "talenti/quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace talenti {

namespace {

std::string format_q(double q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

} // namespace

bool ComparisonReport::all_pass() const {
    for (const auto& [name, entry] : checks)
        if (!entry.pass)
            return false;
    return true;
}

std::string ComparisonReport::to_json() const {
    nlohmann::ordered_json j;
    j["v"] = v;
    j["alpha"] = alpha;
    j["pointwise_margin"] = pointwise_margin;
    nlohmann::ordered_json gm;
    for (const auto& [q, margin] : gradient_margins)
        gm[format_q(q)] = margin;
    j["gradient_margins"] = gm;
    j["monotonicity_violation"] = monotonicity_violation;
    if (torsion) {
        j["torsion"] = {{"domain", torsion->domain}, {"model", torsion->model},
                        {"margin", torsion->margin}};
    } else {
        j["torsion"] = nullptr;
    }
    if (faber_krahn) {
        j["faber_krahn"] = {{"domain", faber_krahn->domain}, {"model", faber_krahn->model},
                            {"margin", faber_krahn->margin}};
    } else {
        j["faber_krahn"] = nullptr;
    }
    nlohmann::ordered_json sb = nlohmann::ordered_json::array();
    for (const auto& s : sobolev)
        sb.push_back({{"p", std::isinf(s.p_exp) ? nlohmann::ordered_json("inf")
                                                : nlohmann::ordered_json(s.p_exp)},
                      {"q", s.q_exp},
                      {"bound", s.bound},
                      {"attained", s.attained},
                      {"pass", s.pass}});
    j["sobolev"] = sb;
    j["mesh_h"] = mesh_h;
    nlohmann::ordered_json passes;
    for (const auto& [name, entry] : checks)
        passes[name] = {{"pass", entry.pass}, {"margin", entry.margin},
                        {"tolerance", entry.tolerance}};
    passes["all"] = all_pass();
    j["pass"] = passes;
    return j.dump(2);
}

double monotonicity_violation(const std::vector<double>& u_star, const std::vector<double>& w) {
    if (u_star.size() != w.size() || u_star.empty())
        throw std::invalid_argument("curve size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const double now = w[i] - u_star[i];
        const double next = w[i + 1] - u_star[i + 1];
        worst = std::max(worst, next - now);
    }
    return worst;
}

TorsionCheck torsion_check(const DomainSpec& dom, const ModelParams& params) {
    const auto coeff = CoefficientField::identity(*dom.mesh);
    std::vector<double> f(dom.mesh->n_vertices(), 2.0);
    const auto sol = solve_poisson(dom, coeff, f);
    TorsionCheck out;
    for (std::size_t i = 0; i < sol.u.size(); ++i)
        out.domain += sol.u[i] * dom.mesh->vertex_measure[i];
    out.model = torsional_rigidity_model(params, dom.volume_fraction);
    out.margin = out.model - out.domain;
    return out;
}

FaberKrahnCheck faber_krahn_check(const DomainSpec& dom, const ModelParams& params,
                                  int model_grid) {
    const auto coeff = CoefficientField::identity(*dom.mesh);
    FaberKrahnCheck out;
    out.domain = first_eigen(dom, coeff).lambda;
    out.model = model_first_eigenvalue(params, dom.volume_fraction, model_grid);
    out.margin = out.domain - out.model;
    return out;
}

SobolevCheck sobolev_check(const DomainSpec& dom, const CoefficientField& coeff,
                           const std::vector<double>& f_vertex, const ModelParams& params,
                           double p_exp, double q_exp, double eps_mesh) {
    SobolevCheck out;
    out.p_exp = p_exp;
    out.q_exp = q_exp;
    const auto sol = solve_poisson(dom, coeff, f_vertex);
    const double f_norm = domain_lp_norm(dom, f_vertex, p_exp);
    if (q_exp <= 0.0) {
        out.q_exp = 0.0;
        out.bound = sobolev_c1(params, dom.volume_fraction, p_exp) / coeff.alpha * f_norm;
        out.attained = domain_lp_norm(dom, sol.u, kInfinityNorm);
    } else {
        out.bound = sobolev_c2(params, dom.volume_fraction, p_exp, q_exp) / coeff.alpha * f_norm;
        out.attained = domain_lp_norm(dom, sol.u, q_exp);
    }
    out.pass = out.attained <= out.bound * (1.0 + eps_mesh);
    return out;
}

ComparisonReport talenti_check(const DomainSpec& dom, const CoefficientField& coeff,
                               const std::vector<double>& f_vertex, const ModelParams& params,
                               const TalentiOptions& opt) {
    ComparisonReport rep;
    rep.v = dom.volume_fraction;
    rep.alpha = coeff.alpha;
    rep.mesh_h = dom.mesh->max_edge;
    rep.eps_mesh = opt.c_tol * rep.mesh_h;

    const auto f_cells = restrict_to_domain(dom, f_vertex);
    if (std::abs(f_cells.total_mass() - dom.volume_fraction) > 1e-10)
        throw numerical_error("domain mass and cell mass disagree beyond 1e-10");

    const auto fem_sol = solve_poisson(dom, coeff, f_vertex);
    const auto u_cells = restrict_to_domain(dom, fem_sol.u);
    const StepFunction u_sharp = decreasing_rearrangement(u_cells);
    const StepFunction f_sharp = decreasing_rearrangement(f_cells);

    const auto model = solve_model_poisson(params, f_sharp, dom.volume_fraction, coeff.alpha,
                                           opt.n_grid);

    rep.grid = model.grid;
    rep.w_curve = model.w;
    rep.u_star_curve.resize(model.grid.size());
    for (std::size_t i = 0; i < model.grid.size(); ++i)
        rep.u_star_curve[i] = u_sharp(model.grid_H[i]);

    rep.pointwise_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.grid.size(); ++i)
        rep.pointwise_margin = std::min(rep.pointwise_margin, rep.w_curve[i] - rep.u_star_curve[i]);

    rep.monotonicity_violation = monotonicity_violation(rep.u_star_curve, rep.w_curve);

    // Mass-variable form of the pointwise bound, evaluated at the step
    // midpoints of u# (points the shared rho grid does not see).
    {
        double worst = std::numeric_limits<double>::infinity();
        const auto& bp = u_sharp.breakpoints();
        for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
            const double s = 0.5 * (bp[k] + bp[k + 1]);
            const double rhs = model.eval(inv_H(params, s));
            worst = std::min(worst, rhs - u_sharp(s));
        }
        rep.rearranged_bound_margin = worst;
    }

    for (double q : opt.q_list) {
        const double model_norm = model_gradient_lq_norm(model, q);
        const double domain_norm = lq_gradient_norm(*dom.mesh, fem_sol.u, q);
        rep.gradient_margins[q] = model_norm - domain_norm;
    }

    if (opt.with_torsion)
        rep.torsion = torsion_check(dom, params);
    if (opt.with_faber_krahn)
        rep.faber_krahn = faber_krahn_check(dom, params);
    for (const auto& [p_exp, q_exp] : opt.sobolev_cases)
        rep.sobolev.push_back(
            sobolev_check(dom, coeff, f_vertex, params, p_exp, q_exp, rep.eps_mesh));

    const double eps = rep.eps_mesh;
    rep.checks["pointwise"] = {rep.pointwise_margin, eps, rep.pointwise_margin >= -eps};
    rep.checks["monotonicity"] = {rep.monotonicity_violation, eps,
                                  rep.monotonicity_violation <= eps};
    rep.checks["rearranged_bound"] = {rep.rearranged_bound_margin, eps,
                                      rep.rearranged_bound_margin >= -eps};
    for (const auto& [q, margin] : rep.gradient_margins)
        rep.checks["gradient_q" + format_q(q)] = {margin, eps, margin >= -eps};
    if (rep.torsion)
        rep.checks["torsion"] = {rep.torsion->margin, eps, rep.torsion->margin >= -eps};
    if (rep.faber_krahn)
        rep.checks["faber_krahn"] = {rep.faber_krahn->margin, eps,
                                     rep.faber_krahn->margin >= -eps};
    for (const auto& s : rep.sobolev) {
        std::string name = "sobolev_p" + (std::isinf(s.p_exp) ? std::string("inf") : format_q(s.p_exp));
        if (s.q_exp > 0.0)
            name += "_q" + format_q(s.q_exp);
        rep.checks[name] = {s.bound * (1.0 + eps) - s.attained, eps, s.pass};
    }
    return rep;
}

PolyaSzegoCheck polya_szego_check(const DomainSpec& dom, const std::vector<double>& u_vertex,
                                  double p_exp, const ModelParams& params, int n_grid,
                                  double c_tol) {
    if (!(p_exp > 1.0))
        throw std::invalid_argument("Polya-Szego exponent must exceed 1");
    for (std::size_t i = 0; i < dom.inside.size(); ++i)
        if (!dom.inside[i] && u_vertex[i] != 0.0)
            throw std::invalid_argument("function does not vanish outside the domain");

    PolyaSzegoCheck out;
    const auto u_cells = restrict_to_domain(dom, u_vertex);
    const StepFunction u_sharp = decreasing_rearrangement(u_cells);
    const double v = dom.volume_fraction;
    const double r_v = inv_H(params, v);
    // Width: two model-grid cells, but never below the mesh scale. The
    // rearranged profile of mesh data is a staircase whose boundary jump is
    // an O(h) artifact; a narrower kernel would turn that jump into spurious
    // gradient mass.
    out.mollifier_width = std::max(2.0 * r_v / (n_grid - 1), dom.mesh->max_edge);

    // u* as a step function of the radial variable.
    std::vector<double> radii;
    radii.reserve(u_sharp.breakpoints().size());
    for (double s : u_sharp.breakpoints())
        radii.push_back(inv_H(params, std::min(s, v)));

    const auto& vals = u_sharp.values();
    double jump_max = 0.0;
    for (std::size_t k = 0; k + 1 < vals.size(); ++k)
        jump_max = std::max(jump_max, vals[k] - vals[k + 1]);
    const double range = vals.front() - std::min(0.0, vals.back());
    out.large_jumps = jump_max > 0.05 * std::max(range, 1e-300);

    // Prefix integrals of the radial step function; cum(x) = int_0^x u*.
    std::vector<double> cum(radii.size(), 0.0);
    for (std::size_t k = 0; k + 1 < radii.size(); ++k)
        cum[k + 1] = cum[k] + (radii[k + 1] - radii[k]) * vals[k];
    const auto cum_at = [&](double x) -> double {
        if (x <= 0.0)
            return 0.0;
        if (x >= r_v)
            return cum.back();
        const auto it = std::upper_bound(radii.begin(), radii.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - radii.begin()) - 1;
        return cum[k] + (x - radii[k]) * vals[k];
    };
    // Integral over [a, b] with even reflection through 0 and zero extension
    // past r_v.
    const auto star_integral = [&](double a, double b) -> double {
        double acc = 0.0;
        if (a < 0.0) {
            acc += cum_at(-a);
            a = 0.0;
        }
        return acc + cum_at(b) - cum_at(a);
    };

    const double W = out.mollifier_width;
    const auto mollified_derivative = [&](double rho) {
        return (star_integral(rho, rho + W) - star_integral(rho - W, rho)) / (W * W);
    };

    const int n_fine = 4 * n_grid;
    double lhs = 0.0;
    // Composite Simpson over a uniform grid; the integrand is piecewise
    // smooth with kinks at mollifier-width scale, which the fine grid resolves.
    const double dh = r_v / n_fine;
    for (int i = 0; i <= n_fine; ++i) {
        const double rho = i * dh;
        const double g = std::abs(mollified_derivative(rho));
        const double wgt = (i == 0 || i == n_fine) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        lhs += wgt * std::pow(g, p_exp) * eval_h(params, rho);
    }
    lhs *= dh / 3.0;

    out.lhs = lhs;
    out.rhs = lq_gradient_norm(*dom.mesh, u_vertex, p_exp);
    out.pass = out.lhs <= out.rhs * (1.0 + c_tol * dom.mesh->max_edge);
    return out;
}

} // namespace talenti
