#include "talenti/fem.hpp"

#include "talenti/errors.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>

namespace talenti {

namespace {

struct TriangleFrame {
    Vec3 e1, e2, normal;
    double area;
};

TriangleFrame triangle_frame(const SurfaceMesh& mesh, std::size_t f) {
    const Vec3& p0 = mesh.vertices[static_cast<std::size_t>(mesh.triangles[f][0])];
    const Vec3& p1 = mesh.vertices[static_cast<std::size_t>(mesh.triangles[f][1])];
    const Vec3& p2 = mesh.vertices[static_cast<std::size_t>(mesh.triangles[f][2])];
    TriangleFrame fr;
    fr.e1 = (p1 - p0).normalized();
    fr.normal = (p1 - p0).cross(p2 - p0).normalized();
    fr.e2 = fr.normal.cross(fr.e1);
    fr.area = mesh.tri_area[f];
    return fr;
}

// In-plane gradients of the three hat functions.
std::array<Vec3, 3> hat_gradients(const SurfaceMesh& mesh, std::size_t f) {
    const Vec3& p0 = mesh.vertices[static_cast<std::size_t>(mesh.triangles[f][0])];
    const Vec3& p1 = mesh.vertices[static_cast<std::size_t>(mesh.triangles[f][1])];
    const Vec3& p2 = mesh.vertices[static_cast<std::size_t>(mesh.triangles[f][2])];
    const Vec3 n = (p1 - p0).cross(p2 - p0).normalized();
    const double inv2A = 1.0 / (2.0 * mesh.tri_area[f]);
    return {n.cross(p2 - p1) * inv2A, n.cross(p0 - p2) * inv2A, n.cross(p1 - p0) * inv2A};
}

} // namespace

CoefficientField CoefficientField::identity(const SurfaceMesh& mesh) {
    CoefficientField c;
    c.tensors.assign(mesh.n_triangles(), {1.0, 0.0, 1.0});
    c.alpha = 1.0;
    c.beta = 1.0;
    return c;
}

void CoefficientField::validate(const SurfaceMesh& mesh) const {
    if (tensors.size() != mesh.n_triangles())
        throw std::invalid_argument("coefficient field size mismatch");
    if (!(alpha > 0.0) || !(beta >= alpha))
        throw std::invalid_argument("need 0 < alpha <= beta");
    for (std::size_t f = 0; f < tensors.size(); ++f) {
        const auto& t = tensors[f];
        const double tr = t[0] + t[2];
        const double det = t[0] * t[2] - t[1] * t[1];
        const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
        const double lo = 0.5 * tr - disc, hi = 0.5 * tr + disc;
        const double slack = 1e-12 * std::max(1.0, beta);
        if (lo < alpha - slack || hi > beta + slack)
            throw std::invalid_argument("triangle " + std::to_string(f) +
                                        " tensor eigenvalues escape [alpha, beta]");
    }
}

AssembledSystem assemble_stiffness(const DomainSpec& dom, const CoefficientField& coeff) {
    const SurfaceMesh& mesh = *dom.mesh;
    coeff.validate(mesh);

    AssembledSystem sys;
    sys.row_of_vertex.assign(mesh.n_vertices(), -1);
    for (std::size_t i = 0; i < mesh.n_vertices(); ++i)
        if (dom.inside[i]) {
            sys.row_of_vertex[i] = static_cast<int>(sys.inside_vertices.size());
            sys.inside_vertices.push_back(static_cast<int>(i));
        }
    const int n = static_cast<int>(sys.inside_vertices.size());

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.n_triangles() * 9);
    for (std::size_t f = 0; f < mesh.n_triangles(); ++f) {
        const auto g = hat_gradients(mesh, f);
        const TriangleFrame fr = triangle_frame(mesh, f);
        const auto& tens = coeff.tensors[f];
        const double scale = fr.area / mesh.total_area;
        std::array<std::array<double, 2>, 3> loc{};
        for (int i = 0; i < 3; ++i)
            loc[static_cast<std::size_t>(i)] = {g[static_cast<std::size_t>(i)].dot(fr.e1),
                                                g[static_cast<std::size_t>(i)].dot(fr.e2)};
        for (int i = 0; i < 3; ++i) {
            const int vi = mesh.triangles[f][static_cast<std::size_t>(i)];
            const int ri = sys.row_of_vertex[static_cast<std::size_t>(vi)];
            if (ri < 0)
                continue;
            for (int j = 0; j < 3; ++j) {
                const int vj = mesh.triangles[f][static_cast<std::size_t>(j)];
                const int rj = sys.row_of_vertex[static_cast<std::size_t>(vj)];
                if (rj < 0)
                    continue;
                const auto& a = loc[static_cast<std::size_t>(i)];
                const auto& b = loc[static_cast<std::size_t>(j)];
                const double kij = scale * (tens[0] * a[0] * b[0] + tens[1] * a[0] * b[1] +
                                            tens[1] * a[1] * b[0] + tens[2] * a[1] * b[1]);
                trip.emplace_back(ri, rj, kij);
            }
        }
    }
    sys.stiffness.resize(n, n);
    sys.stiffness.setFromTriplets(trip.begin(), trip.end());
    // Exact symmetry regardless of summation order.
    Eigen::SparseMatrix<double> sym =
        0.5 * (Eigen::SparseMatrix<double>(sys.stiffness.transpose()) + sys.stiffness);
    sys.stiffness.swap(sym);

    sys.lumped_mass.resize(n);
    for (int r = 0; r < n; ++r)
        sys.lumped_mass[r] = mesh.vertex_measure[static_cast<std::size_t>(sys.inside_vertices[static_cast<std::size_t>(r)])];
    return sys;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using CGSolver = Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper>;

} // namespace

PoissonSolveResult solve_poisson(const DomainSpec& dom, const CoefficientField& coeff,
                                 const std::vector<double>& f_vertex) {
    const SurfaceMesh& mesh = *dom.mesh;
    if (f_vertex.size() != mesh.n_vertices())
        throw std::invalid_argument("data vector size mismatch");
    const AssembledSystem sys = assemble_stiffness(dom, coeff);
    const int n = static_cast<int>(sys.inside_vertices.size());

    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r)
        rhs[r] = sys.lumped_mass[r] *
                 f_vertex[static_cast<std::size_t>(sys.inside_vertices[static_cast<std::size_t>(r)])];

    CGSolver cg;
    cg.setTolerance(1e-10);
    cg.setMaxIterations(10L * n);
    cg.compute(sys.stiffness);
    const Eigen::VectorXd x = cg.solve(rhs);
    if (cg.info() != Eigen::Success && cg.error() > 1e-10)
        throw numerical_error("CG did not converge after " + std::to_string(cg.iterations()) +
                              " iterations; relative residual " + std::to_string(cg.error()));

    PoissonSolveResult out;
    out.u.assign(mesh.n_vertices(), 0.0);
    for (int r = 0; r < n; ++r)
        out.u[static_cast<std::size_t>(sys.inside_vertices[static_cast<std::size_t>(r)])] = x[r];
    out.residual = cg.error();
    out.iterations = static_cast<int>(cg.iterations());
    return out;
}

EigenResult first_eigen(const DomainSpec& dom, const CoefficientField& coeff) {
    const AssembledSystem sys = assemble_stiffness(dom, coeff);
    const int n = static_cast<int>(sys.inside_vertices.size());

    CGSolver cg;
    cg.setTolerance(1e-12);
    cg.setMaxIterations(10L * n);
    cg.compute(sys.stiffness);

    const auto M = sys.lumped_mass.asDiagonal();
    const auto m_dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return a.dot(M * b);
    };

    // Block inverse power iteration with a two-dimensional Rayleigh-Ritz
    // step. Symmetric domains (two identical caps) carry a nearly degenerate
    // lowest pair, on which single-vector iteration crawls; the block
    // converges at the rate of the next separated eigenvalue.
    Eigen::MatrixXd X(n, 2);
    X.col(0).setOnes();
    for (int r = 0; r < n; ++r)
        X.col(1)[r] = dom.mesh->vertices[static_cast<std::size_t>(
                          sys.inside_vertices[static_cast<std::size_t>(r)])].z;

    const auto orthonormalize = [&](Eigen::MatrixXd& Y) {
        Y.col(0) /= std::sqrt(m_dot(Y.col(0), Y.col(0)));
        Y.col(1) -= m_dot(Y.col(0), Y.col(1)) * Y.col(0);
        const double nrm = std::sqrt(m_dot(Y.col(1), Y.col(1)));
        if (nrm <= 1e-14) {
            // Degenerate block; reseed deterministically.
            for (int r = 0; r < n; ++r)
                Y.col(1)[r] = ((r * 2654435761u) % 1024) / 1024.0 - 0.5;
            Y.col(1) -= m_dot(Y.col(0), Y.col(1)) * Y.col(0);
            Y.col(1) /= std::sqrt(m_dot(Y.col(1), Y.col(1)));
        } else {
            Y.col(1) /= nrm;
        }
    };
    orthonormalize(X);

    double lambda = 0.0;
    Eigen::VectorXd ritz;
    int it = 0;
    bool converged = false;
    for (; it < 200 && !converged; ++it) {
        Eigen::MatrixXd Y(n, 2);
        for (int c = 0; c < 2; ++c) {
            Y.col(c) = cg.solve(M * X.col(c));
            if (cg.info() != Eigen::Success && cg.error() > 1e-10)
                throw numerical_error("inner CG stalled during inverse iteration");
        }
        orthonormalize(Y);
        // 2x2 Rayleigh-Ritz: A w = mu B w with B = I after orthonormalization.
        Eigen::Matrix2d A;
        const Eigen::VectorXd K0 = sys.stiffness * Y.col(0);
        const Eigen::VectorXd K1 = sys.stiffness * Y.col(1);
        A(0, 0) = Y.col(0).dot(K0);
        A(0, 1) = Y.col(0).dot(K1);
        A(1, 0) = A(0, 1);
        A(1, 1) = Y.col(1).dot(K1);
        const double tr = A(0, 0) + A(1, 1);
        const double det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
        const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
        const double mu = 0.5 * tr - disc;
        Eigen::Vector2d wvec;
        if (std::abs(A(0, 1)) > 1e-300)
            wvec << A(0, 1), mu - A(0, 0);
        else
            wvec << (A(0, 0) <= A(1, 1) ? 1.0 : 0.0), (A(0, 0) <= A(1, 1) ? 0.0 : 1.0);
        wvec.normalize();
        ritz = Y * wvec;
        if (it > 0 && std::abs(mu - lambda) <= 1e-11 * std::abs(mu))
            converged = true;
        lambda = mu;
        X = Y;
    }
    if (!converged)
        throw numerical_error("inverse power iteration did not converge in 200 steps");

    Eigen::VectorXd x = ritz / std::sqrt(m_dot(ritz, ritz));
    // Sign normalization: the dominant component positive.
    int argmax = 0;
    for (int r = 1; r < n; ++r)
        if (std::abs(x[r]) > std::abs(x[argmax]))
            argmax = r;
    if (x[argmax] < 0.0)
        x = -x;

    EigenResult out;
    out.lambda = x.dot(sys.stiffness * x) / m_dot(x, x);
    out.iterations = it;
    out.u.assign(dom.mesh->n_vertices(), 0.0);
    for (int r = 0; r < n; ++r)
        out.u[static_cast<std::size_t>(sys.inside_vertices[static_cast<std::size_t>(r)])] = x[r];
    return out;
}

double lq_gradient_norm(const SurfaceMesh& mesh, const std::vector<double>& u, double q) {
    if (u.size() != mesh.n_vertices())
        throw std::invalid_argument("vertex vector size mismatch");
    if (!(q >= 1.0))
        throw std::invalid_argument("exponent q must be >= 1");
    double acc = 0.0;
    for (std::size_t f = 0; f < mesh.n_triangles(); ++f) {
        const auto g = hat_gradients(mesh, f);
        Vec3 grad{0.0, 0.0, 0.0};
        for (int k = 0; k < 3; ++k)
            grad = grad + g[static_cast<std::size_t>(k)] *
                              u[static_cast<std::size_t>(mesh.triangles[f][static_cast<std::size_t>(k)])];
        acc += std::pow(grad.norm(), q) * mesh.tri_area[f] / mesh.total_area;
    }
    return acc;
}

double superlevel_perimeter(const SurfaceMesh& mesh, const std::vector<double>& u, double t,
                            bool* missed) {
    if (u.size() != mesh.n_vertices())
        throw std::invalid_argument("vertex vector size mismatch");
    if (missed)
        *missed = false;

    double lo = u[0], hi = u[0];
    for (double v : u) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    // Nudge the level off exact vertex values so the curve never runs along
    // edges (which would be counted twice).
    double level = t;
    const double nudge = 1e-9 * std::max(hi - lo, 1e-30);
    for (double v : u)
        if (v == level) {
            level = t + nudge;
            break;
        }

    double length = 0.0;
    for (std::size_t f = 0; f < mesh.n_triangles(); ++f) {
        std::array<Vec3, 2> pts;
        int npts = 0;
        for (int k = 0; k < 3 && npts < 2; ++k) {
            const int a = mesh.triangles[f][static_cast<std::size_t>(k)];
            const int b = mesh.triangles[f][static_cast<std::size_t>((k + 1) % 3)];
            const double ua = u[static_cast<std::size_t>(a)], ub = u[static_cast<std::size_t>(b)];
            if ((ua > level) == (ub > level))
                continue;
            const double s = (level - ua) / (ub - ua);
            pts[static_cast<std::size_t>(npts++)] =
                mesh.vertices[static_cast<std::size_t>(a)] +
                (mesh.vertices[static_cast<std::size_t>(b)] - mesh.vertices[static_cast<std::size_t>(a)]) * s;
        }
        if (npts == 2)
            length += (pts[1] - pts[0]).norm();
    }
    if (length == 0.0 && missed)
        *missed = true;
    return length / mesh.total_area;
}

double superlevel_mass(const SurfaceMesh& mesh, const std::vector<double>& u, double t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < mesh.n_vertices(); ++i)
        if (u[i] > t)
            acc += mesh.vertex_measure[i];
    return acc;
}

WeightedFunction restrict_to_domain(const DomainSpec& dom, const std::vector<double>& u_vertex) {
    if (u_vertex.size() != dom.mesh->n_vertices())
        throw std::invalid_argument("vertex vector size mismatch");
    std::vector<WeightedCell> cells;
    cells.reserve(dom.mesh->n_vertices());
    for (std::size_t i = 0; i < dom.inside.size(); ++i)
        if (dom.inside[i])
            cells.push_back({u_vertex[i], dom.mesh->vertex_measure[i]});
    return WeightedFunction(std::move(cells));
}

double domain_lp_norm(const DomainSpec& dom, const std::vector<double>& u_vertex, double p) {
    return lp_norm(restrict_to_domain(dom, u_vertex), p);
}

} // namespace talenti
