#pragma once

#include "talenti/fem.hpp"
#include "talenti/mesh.hpp"
#include "talenti/model_solver.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace talenti {

struct CheckEntry {
    double margin = 0.0;    // signed; >= 0 means the inequality holds strictly
    double tolerance = 0.0; // tolerance it was judged against
    bool pass = false;
};

struct TorsionCheck {
    double domain = 0.0;
    double model = 0.0;
    double margin = 0.0; // model - domain
};

struct FaberKrahnCheck {
    double domain = 0.0;
    double model = 0.0;
    double margin = 0.0; // domain - model
};

struct SobolevCheck {
    double p_exp = 0.0;
    double q_exp = 0.0; // 0 marks the L^infinity case
    double bound = 0.0;
    double attained = 0.0;
    bool pass = false;
};

struct ComparisonReport {
    double v = 0.0;
    double alpha = 1.0;
    double pointwise_margin = 0.0; // min over the model grid of w - u*
    std::map<double, double> gradient_margins;
    double monotonicity_violation = 0.0; // max grid increase of w - u*
    double rearranged_bound_margin = 0.0; // min of the mass-variable bound vs u#
    std::optional<TorsionCheck> torsion;
    std::optional<FaberKrahnCheck> faber_krahn;
    std::vector<SobolevCheck> sobolev;
    double mesh_h = 0.0;
    double eps_mesh = 0.0;
    std::map<std::string, CheckEntry> checks;

    // Shared evaluation grid and the two curves, for CSV dumps.
    std::vector<double> grid;
    std::vector<double> u_star_curve;
    std::vector<double> w_curve;

    bool all_pass() const;
    std::string to_json() const; // fixed key schema
};

struct TalentiOptions {
    int n_grid = 2048;
    double c_tol = 5.0; // eps_mesh = c_tol * max edge length
    std::vector<double> q_list = {1.0, 1.5, 2.0};
    bool with_torsion = false;     // identity-coefficient extras
    bool with_faber_krahn = false;
    // (p, q) pairs for the Sobolev checks; q = 0 requests the sup-norm case.
    std::vector<std::pair<double, double>> sobolev_cases;
};

// Solve on the domain, symmetrize, solve the model problem, and report the
// margins of every comparison inequality.
ComparisonReport talenti_check(const DomainSpec& dom, const CoefficientField& coeff,
                               const std::vector<double>& f_vertex, const ModelParams& params,
                               const TalentiOptions& opt = {});

// Max increase between consecutive grid nodes of w - u_star (0 when the
// difference is non-increasing, as the comparison theory predicts).
double monotonicity_violation(const std::vector<double>& u_star, const std::vector<double>& w);

TorsionCheck torsion_check(const DomainSpec& dom, const ModelParams& params);
FaberKrahnCheck faber_krahn_check(const DomainSpec& dom, const ModelParams& params,
                                  int model_grid = 1024);

SobolevCheck sobolev_check(const DomainSpec& dom, const CoefficientField& coeff,
                           const std::vector<double>& f_vertex, const ModelParams& params,
                           double p_exp, double q_exp, double eps_mesh);

struct PolyaSzegoCheck {
    double lhs = 0.0; // int |grad u*_mollified|^p dm on the model space
    double rhs = 0.0; // int |grad u|^p on the mesh
    bool pass = false;
    double mollifier_width = 0.0;
    bool large_jumps = false; // u# had jumps big enough to warn about
};

PolyaSzegoCheck polya_szego_check(const DomainSpec& dom, const std::vector<double>& u_vertex,
                                  double p_exp, const ModelParams& params, int n_grid = 2048,
                                  double c_tol = 5.0);

} // namespace talenti
