#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

namespace talenti {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const;
    Vec3 normalized() const;
};

// Closed oriented triangulation of a round sphere, with lumped vertex
// measures normalized to total mass one (so the ambient space plays the role
// of a probability space).
struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<double> vertex_measure; // barycentric lumping / total area
    double radius = 1.0;
    double total_area = 0.0;
    double max_edge = 0.0;
    std::vector<double> tri_area;

    std::size_t n_vertices() const { return vertices.size(); }
    std::size_t n_triangles() const { return triangles.size(); }

    // Computes areas/measures, checks closedness, orientation, the sphere
    // radius constraint and triangle quality. Throws std::invalid_argument on
    // violated invariants.
    void finalize();
};

// Icosahedron subdivided `subdivisions` times with vertices projected to the
// sphere; 20*4^s triangles, 10*4^s + 2 vertices. Poles sit at +-z.
SurfaceMesh generate_icosphere(int subdivisions, double radius = 1.0);

SurfaceMesh load_off(const std::filesystem::path& path);
void save_off(const SurfaceMesh& mesh, const std::filesystem::path& path);

// An open domain given by a vertex mask. Every vertex not strictly inside
// belongs to the Dirichlet set.
struct DomainSpec {
    std::shared_ptr<const SurfaceMesh> mesh;
    std::vector<std::uint8_t> inside;
    double volume_fraction = 0.0;        // sum of inside vertex measures
    std::vector<int> boundary_vertices;  // inside vertices adjacent to outside

    void finalize(); // recompute v and the boundary list, validate
};

// Geodesic cap around `center` (unit direction): vertices within the largest
// radius whose accumulated measure does not exceed target_mass. Whole
// equal-distance rings are kept or dropped together.
DomainSpec cap_domain(std::shared_ptr<const SurfaceMesh> mesh, const Vec3& center,
                      double target_mass);

DomainSpec domain_from_mask(std::shared_ptr<const SurfaceMesh> mesh,
                            std::vector<std::uint8_t> inside);

// Union of disjoint domains on the same mesh.
DomainSpec union_domains(const DomainSpec& a, const DomainSpec& b);

} // namespace talenti
