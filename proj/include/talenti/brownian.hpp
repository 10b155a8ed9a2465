#pragma once

#include "talenti/mesh.hpp"
#include "talenti/model_space.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace talenti {

// Domain on the round sphere for walkers: either a union of analytic geodesic
// caps (exact exit test) or a meshed vertex mask (exit test via the nearest
// vertex's flag).
struct CapRegion {
    Vec3 center;   // unit direction
    double radius; // geodesic radius (arc length on the sphere)
    double mass;   // model mass of the cap
};

class WalkDomain {
public:
    // Caps of the given masses on the sphere for (K, N=2); radii from the
    // model CDF.
    static WalkDomain analytic_caps(const ModelParams& params,
                                    const std::vector<std::pair<Vec3, double>>& centers_masses);
    static WalkDomain from_mesh(std::shared_ptr<const SurfaceMesh> mesh,
                                std::vector<std::uint8_t> inside);

    bool contains(const Vec3& x) const;
    double sphere_radius() const { return sphere_radius_; }
    double inradius() const;        // conservative: smallest cap radius
    double total_mass() const;
    const std::vector<CapRegion>& caps() const { return caps_; }
    bool is_analytic() const { return mesh_ == nullptr; }
    const SurfaceMesh* mesh() const { return mesh_.get(); }
    const std::vector<std::uint8_t>& inside_mask() const { return inside_; }

private:
    double sphere_radius_ = 1.0;
    std::vector<CapRegion> caps_;
    std::shared_ptr<const SurfaceMesh> mesh_;
    std::vector<std::uint8_t> inside_;
    double mesh_inradius_ = 0.0;
    // Direction-bucket lookup for nearest-vertex queries.
    int n_band_ = 0;
    std::vector<std::vector<int>> buckets_;
    int nearest_vertex(const Vec3& x) const;
};

struct ExitTimeEstimate {
    Vec3 start;
    double mean = 0.0;
    double stderr_ = 0.0; // sample standard deviation / sqrt(n)
    long n_samples = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::string rng = "splitmix64/xor-walker-index";
    bool midpoint_correction = true;
};

struct WalkOptions {
    double dt = 1e-4;
    long n_samples = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
    bool midpoint_correction = true; // credit dt/2 on the exiting step
};

// Geodesic random walk started at `start`: isotropic tangent increments with
// per-component variance dt (generator Laplacian/2), moved along great
// circles, until the walker leaves the domain. Deterministic for fixed
// (seed, dt, n, domain) regardless of worker count.
ExitTimeEstimate simulate_exit_time(const WalkDomain& dom, const Vec3& start,
                                    const WalkOptions& opt);

struct AverageExitTime {
    double mean = 0.0;    // estimate of (1/m(Omega)) int E_x[tau] dm
    double stderr_ = 0.0;
    long n_samples = 0;
    double model_mean = 0.0; // T_{K,N,v}/v for the matching model cap
    double margin = 0.0;     // model_mean - mean
    double allowance = 0.0;  // statistical + step-bias allowance
    bool pass = false;
};

// Start points sampled from the measure restricted to the domain,
// n_per_point walkers each; compares against the model cap of the same mass.
AverageExitTime average_exit_time(const WalkDomain& dom, const ModelParams& params,
                                  const WalkOptions& opt, int quadrature_points);

} // namespace talenti
