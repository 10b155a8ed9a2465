#include "talenti/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace talenti {

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 Vec3::normalized() const {
    const double n = norm();
    if (!(n > 0.0))
        throw std::invalid_argument("cannot normalize the zero vector");
    return {x / n, y / n, z / n};
}

void SurfaceMesh::finalize() {
    const std::size_t nv = vertices.size();
    if (nv < 4 || triangles.empty())
        throw std::invalid_argument("mesh too small");

    // Sphere constraint.
    double rsum = 0.0;
    for (const auto& p : vertices)
        rsum += p.norm();
    radius = rsum / static_cast<double>(nv);
    for (const auto& p : vertices)
        if (std::abs(p.norm() - radius) > 1e-9 * radius)
            throw std::invalid_argument("vertices are not on a common sphere (1e-9 relative)");

    // Closed orientable: every directed edge appears exactly once, and its
    // reverse exactly once.
    std::set<std::pair<int, int>> directed;
    for (const auto& t : triangles) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[static_cast<std::size_t>(k)];
            const int b = t[static_cast<std::size_t>((k + 1) % 3)];
            if (a < 0 || b < 0 || a >= static_cast<int>(nv) || b >= static_cast<int>(nv) || a == b)
                throw std::invalid_argument("triangle references invalid vertices");
            if (!directed.insert({a, b}).second)
                throw std::invalid_argument("duplicated directed edge: mesh not orientable");
        }
    }
    for (const auto& e : directed)
        if (!directed.count({e.second, e.first}))
            throw std::invalid_argument("boundary edge found: mesh is not closed");

    tri_area.resize(triangles.size());
    total_area = 0.0;
    max_edge = 0.0;
    double signed_volume = 0.0;
    constexpr double kMaxAngle = 170.0 * std::numbers::pi / 180.0;
    for (std::size_t f = 0; f < triangles.size(); ++f) {
        const Vec3& p0 = vertices[static_cast<std::size_t>(triangles[f][0])];
        const Vec3& p1 = vertices[static_cast<std::size_t>(triangles[f][1])];
        const Vec3& p2 = vertices[static_cast<std::size_t>(triangles[f][2])];
        const Vec3 e01 = p1 - p0, e02 = p2 - p0, e12 = p2 - p1;
        const double area = 0.5 * e01.cross(e02).norm();
        if (area < 1e-14)
            throw std::invalid_argument("degenerate triangle " + std::to_string(f));
        const double l01 = e01.norm(), l02 = e02.norm(), l12 = e12.norm();
        max_edge = std::max({max_edge, l01, l02, l12});
        // Law of cosines per corner; reject nearly flat corners that would
        // produce strongly negative cotangent weights.
        const auto angle = [](double a, double b, double c) {
            return std::acos(std::clamp((a * a + b * b - c * c) / (2.0 * a * b), -1.0, 1.0));
        };
        if (angle(l01, l02, l12) > kMaxAngle || angle(l01, l12, l02) > kMaxAngle ||
            angle(l02, l12, l01) > kMaxAngle)
            throw std::invalid_argument("triangle " + std::to_string(f) + " has an angle > 170 deg");
        tri_area[f] = area;
        total_area += area;
        signed_volume += p0.dot(p1.cross(p2)) / 6.0;
    }
    if (signed_volume <= 0.0)
        throw std::invalid_argument("mesh is inward-oriented");

    vertex_measure.assign(nv, 0.0);
    for (std::size_t f = 0; f < triangles.size(); ++f)
        for (int k = 0; k < 3; ++k)
            vertex_measure[static_cast<std::size_t>(triangles[f][static_cast<std::size_t>(k)])] +=
                tri_area[f] / 3.0;
    for (auto& m : vertex_measure)
        m /= total_area;
}

SurfaceMesh generate_icosphere(int subdivisions, double radius) {
    if (subdivisions < 0)
        throw std::invalid_argument("subdivisions must be >= 0");
    if (!(radius > 0.0))
        throw std::invalid_argument("radius must be positive");

    SurfaceMesh mesh;
    const double pi = std::numbers::pi;
    // Icosahedron with poles on the z axis: two pentagonal rings at
    // z = +-1/sqrt(5).
    mesh.vertices.push_back({0.0, 0.0, 1.0});
    const double zr = 1.0 / std::sqrt(5.0);
    const double xr = 2.0 / std::sqrt(5.0);
    for (int k = 0; k < 5; ++k) {
        const double a = 2.0 * pi * k / 5.0;
        mesh.vertices.push_back({xr * std::cos(a), xr * std::sin(a), zr});
    }
    for (int k = 0; k < 5; ++k) {
        const double a = 2.0 * pi * k / 5.0 + pi / 5.0;
        mesh.vertices.push_back({xr * std::cos(a), xr * std::sin(a), -zr});
    }
    mesh.vertices.push_back({0.0, 0.0, -1.0});
    const int top = 0, bot = 11;
    const auto up = [](int k) { return 1 + (k % 5); };
    const auto dn = [](int k) { return 6 + (k % 5); };
    for (int k = 0; k < 5; ++k) {
        mesh.triangles.push_back({top, up(k), up(k + 1)});
        mesh.triangles.push_back({up(k), dn(k), up(k + 1)});
        mesh.triangles.push_back({dn(k), dn(k + 1), up(k + 1)});
        mesh.triangles.push_back({bot, dn(k + 1), dn(k)});
    }

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        const auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            const auto it = midpoint.find(key);
            if (it != midpoint.end())
                return it->second;
            const Vec3 m = (mesh.vertices[static_cast<std::size_t>(a)] +
                            mesh.vertices[static_cast<std::size_t>(b)]) *
                           0.5;
            mesh.vertices.push_back(m.normalized());
            const int idx = static_cast<int>(mesh.vertices.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(mesh.triangles.size() * 4);
        for (const auto& t : mesh.triangles) {
            const int m01 = mid(t[0], t[1]);
            const int m12 = mid(t[1], t[2]);
            const int m20 = mid(t[2], t[0]);
            next.push_back({t[0], m01, m20});
            next.push_back({t[1], m12, m01});
            next.push_back({t[2], m20, m12});
            next.push_back({m01, m12, m20});
        }
        mesh.triangles = std::move(next);
    }

    for (auto& p : mesh.vertices)
        p = p.normalized() * radius;
    mesh.finalize();
    return mesh;
}

SurfaceMesh load_off(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open mesh file " + path.string());
    std::string header;
    in >> header;
    if (header != "OFF")
        throw std::invalid_argument("not an OFF file: " + path.string());
    std::size_t nv = 0, nf = 0, ne = 0;
    in >> nv >> nf >> ne;
    SurfaceMesh mesh;
    mesh.vertices.resize(nv);
    for (auto& p : mesh.vertices)
        in >> p.x >> p.y >> p.z;
    mesh.triangles.resize(nf);
    for (auto& t : mesh.triangles) {
        int deg = 0;
        in >> deg >> t[0] >> t[1] >> t[2];
        if (deg != 3)
            throw std::invalid_argument("only triangle faces are supported");
    }
    if (!in)
        throw std::invalid_argument("truncated OFF file: " + path.string());
    mesh.finalize();
    return mesh;
}

void save_off(const SurfaceMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::invalid_argument("cannot write mesh file " + path.string());
    out << "OFF\n" << mesh.n_vertices() << " " << mesh.n_triangles() << " 0\n";
    char buf[96];
    for (const auto& p : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x, p.y, p.z);
        out << buf;
    }
    for (const auto& t : mesh.triangles)
        out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

void DomainSpec::finalize() {
    if (!mesh)
        throw std::invalid_argument("domain has no mesh");
    if (inside.size() != mesh->n_vertices())
        throw std::invalid_argument("inside mask size mismatch");

    volume_fraction = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < inside.size(); ++i)
        if (inside[i]) {
            volume_fraction += mesh->vertex_measure[i];
            ++count;
        }
    if (count == 0)
        throw std::invalid_argument("domain is empty");
    if (count == inside.size())
        throw std::invalid_argument("domain covers the whole mesh; no Dirichlet set remains");

    std::vector<std::uint8_t> touches_outside(inside.size(), 0);
    for (const auto& t : mesh->triangles) {
        const bool any_out = !inside[static_cast<std::size_t>(t[0])] ||
                             !inside[static_cast<std::size_t>(t[1])] ||
                             !inside[static_cast<std::size_t>(t[2])];
        if (any_out)
            for (int k = 0; k < 3; ++k)
                touches_outside[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])] = 1;
    }
    boundary_vertices.clear();
    for (std::size_t i = 0; i < inside.size(); ++i)
        if (inside[i] && touches_outside[i])
            boundary_vertices.push_back(static_cast<int>(i));
}

DomainSpec cap_domain(std::shared_ptr<const SurfaceMesh> mesh, const Vec3& center,
                      double target_mass) {
    if (!(target_mass > 0.0) || !(target_mass < 1.0))
        throw std::invalid_argument("target mass must lie in (0, 1)");
    const Vec3 c = center.normalized();

    struct Entry {
        double angle;
        int index;
    };
    std::vector<Entry> order;
    order.reserve(mesh->n_vertices());
    for (std::size_t i = 0; i < mesh->n_vertices(); ++i) {
        const double ca = std::clamp(mesh->vertices[i].dot(c) / mesh->radius, -1.0, 1.0);
        order.push_back({std::acos(ca), static_cast<int>(i)});
    }
    std::sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) {
        return a.angle < b.angle || (a.angle == b.angle && a.index < b.index);
    });

    // Greedy prefix in distance order: the largest accumulated mass that does
    // not exceed the target, so the achieved mass is within one vertex
    // measure of it. Ties in distance resolve by vertex index.
    DomainSpec dom;
    dom.mesh = mesh;
    dom.inside.assign(mesh->n_vertices(), 0);
    double mass = 0.0;
    bool any = false;
    for (const auto& e : order) {
        const double w = mesh->vertex_measure[static_cast<std::size_t>(e.index)];
        if (mass + w > target_mass + 1e-12)
            break;
        dom.inside[static_cast<std::size_t>(e.index)] = 1;
        mass += w;
        any = true;
    }
    if (!any)
        throw std::invalid_argument("no vertex fits in a cap of mass " +
                                    std::to_string(target_mass));
    dom.finalize();
    return dom;
}

DomainSpec domain_from_mask(std::shared_ptr<const SurfaceMesh> mesh,
                            std::vector<std::uint8_t> inside) {
    DomainSpec dom;
    dom.mesh = std::move(mesh);
    dom.inside = std::move(inside);
    dom.finalize();
    return dom;
}

DomainSpec union_domains(const DomainSpec& a, const DomainSpec& b) {
    if (a.mesh != b.mesh)
        throw std::invalid_argument("domains live on different meshes");
    DomainSpec dom;
    dom.mesh = a.mesh;
    dom.inside.resize(a.inside.size());
    for (std::size_t i = 0; i < a.inside.size(); ++i) {
        if (a.inside[i] && b.inside[i])
            throw std::invalid_argument("domains overlap");
        dom.inside[i] = a.inside[i] || b.inside[i];
    }
    dom.finalize();
    return dom;
}

} // namespace talenti
