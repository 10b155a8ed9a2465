#pragma once

#include "talenti/mesh.hpp"
#include "talenti/rearrangement.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace talenti {

// Per-triangle symmetric coefficient tensor (entries a11, a12, a22) expressed
// in the triangle's tangent frame: e1 along the first edge, e2 = n x e1. The
// same frame is used when assembling, so coefficient files are bit-exactly
// reproducible.
struct CoefficientField {
    std::vector<std::array<double, 3>> tensors;
    double alpha = 1.0; // uniform ellipticity lower bound
    double beta = 1.0;  // upper bound

    static CoefficientField identity(const SurfaceMesh& mesh);
    // Per-triangle eigenvalue range; throws if outside [alpha, beta].
    void validate(const SurfaceMesh& mesh) const;
};

struct AssembledSystem {
    Eigen::SparseMatrix<double> stiffness; // restricted to inside vertices, SPD
    std::vector<int> inside_vertices;      // row -> vertex index
    std::vector<int> row_of_vertex;        // vertex index -> row, -1 outside
    Eigen::VectorXd lumped_mass;           // vertex measures per row
};

// P1 stiffness of the form (u,v) -> int h(grad u, grad v) dm over the
// normalized measure, with Dirichlet elimination of every vertex not strictly
// inside. For the identity tensor this is the cotangent Laplacian divided by
// the total area.
AssembledSystem assemble_stiffness(const DomainSpec& dom, const CoefficientField& coeff);

struct PoissonSolveResult {
    std::vector<double> u; // per vertex, zero outside the domain
    double residual = 0.0; // relative, as reported by CG
    int iterations = 0;
};

// CG solve of K u = M f to relative residual 1e-10; f is given per vertex
// (values outside the domain are ignored).
PoissonSolveResult solve_poisson(const DomainSpec& dom, const CoefficientField& coeff,
                                 const std::vector<double>& f_vertex);

struct EigenResult {
    double lambda = 0.0;
    std::vector<double> u; // per vertex, zero outside, sign-normalized
    int iterations = 0;
};

// Smallest eigenpair of K u = lambda M u by inverse power iteration with CG
// inner solves.
EigenResult first_eigen(const DomainSpec& dom, const CoefficientField& coeff);

// sum over triangles of |grad u|^q * area / total_area, with the constant P1
// gradient per triangle. Exponent q >= 1.
double lq_gradient_norm(const SurfaceMesh& mesh, const std::vector<double>& u, double q);

// Length of the linearly interpolated level curve {u = t} divided by total
// mesh area. Returns 0 and sets *missed when the level set hits no triangle.
double superlevel_perimeter(const SurfaceMesh& mesh, const std::vector<double>& u, double t,
                            bool* missed = nullptr);

// Mass of {u > t} with respect to the vertex measures.
double superlevel_mass(const SurfaceMesh& mesh, const std::vector<double>& u, double t);

// The cells (u_i, measure_i) over the inside vertices, ready for
// rearrangement. Total mass equals the domain's volume fraction.
WeightedFunction restrict_to_domain(const DomainSpec& dom, const std::vector<double>& u_vertex);

// Discrete L^p norm over the inside vertices.
double domain_lp_norm(const DomainSpec& dom, const std::vector<double>& u_vertex, double p);

} // namespace talenti
