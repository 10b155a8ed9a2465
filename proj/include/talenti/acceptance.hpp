#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace talenti::accept {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail; // deterministic one-line summary
    double seconds = 0.0;
    double budget_seconds = 0.0; // 0 = no budget
};

// Resolution tier. `standard` is the normative gate; `coarse` exercises the
// same pipelines at smoke-test scale (used for wiring and byte-identical
// reproduction checks) with correspondingly looser bounds.
struct Tier {
    std::string name;
    int s_lo = 4, s_hi = 5;   // icosphere subdivision pair for the equality case
    int s_torsion = 7;        // mesh for the two-cap torsion strictness clause
    int n_grid = 2048;        // model solver grid
    int eigen_grid = 1024;
    long mc_n = 100000;       // hemisphere walkers
    double mc_dt = 1e-4;
    int mc_avg_points = 256;  // start points for the average exit time
    long mc_avg_n = 64;       // walkers per start point
    int n_random_wf = 1000;
    int n_random_pairs = 200;
    double sup_factor = 0.05;    // criterion 4 bound on sup|w - u*| / ||w||_inf
    double sup_ratio = 1.5;      // required decrease factor between meshes
    double torsion_rel = 0.03;   // hemisphere torsion relative error bound
    double eigen_rel = 0.02;     // hemisphere eigenvalue relative error bound
    double mc_band_abs = 0.02;   // additive part of the walker band
    bool strict_margins = true;  // enforce margin > eps_mesh strictness clauses
};

Tier tier_standard();
Tier tier_coarse();

struct Options {
    Tier tier = tier_standard();
    std::filesystem::path out_dir; // empty = no files
    int workers = 4;
    bool enforce_budgets = true;
};

std::vector<CriterionResult> run_all(const Options& opt);

std::string consolidated_json(const std::vector<CriterionResult>& results,
                              const Tier& tier); // deterministic (no timings)

} // namespace talenti::accept
