#include "sectorhomog/geometry_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "sectorhomog/error.hpp"

namespace sectorhomog {

SectorDomain::SectorDomain(double omega, double outer_radius)
    : omega_(omega), outer_radius_(outer_radius)
{
    if (!(omega > 0.0) || omega > 2.0 * pi * (1.0 + 1e-14)) {
        throw Error(ErrorKind::Config, "sector angle must lie in (0, 2*pi]");
    }
    if (!(outer_radius > 0.0)) {
        throw Error(ErrorKind::Config, "sector outer radius must be positive");
    }
    omega_ = std::min(omega, 2.0 * pi);
}

double SectorDomain::rho_bar(int n) const
{
    if (n < 1) {
        throw Error(ErrorKind::Config, "singular mode index must be >= 1");
    }
    return n * pi / omega_;
}

const char* to_string(BoundaryTag tag)
{
    switch (tag) {
    case BoundaryTag::Lower: return "LOWER";
    case BoundaryTag::Upper: return "UPPER";
    case BoundaryTag::Arc: return "ARC";
    }
    return "?";
}

namespace {

double corner_angle(const Point& at, const Point& a, const Point& b)
{
    const Vec2 u = a - at;
    const Vec2 v = b - at;
    const double c = u.dot(v) / (u.norm() * v.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

TriMesh::TriMesh(SectorDomain domain, std::vector<Point> vertices, std::vector<Triangle> triangles,
                 std::vector<BoundaryEdge> boundary_edges, double grading_exponent)
    : domain_(domain),
      vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)),
      grading_(grading_exponent)
{
    geometry_.reserve(triangles_.size());
    min_angle_ = pi;
    for (const auto& t : triangles_) {
        for (auto v : t) {
            if (v >= vertices_.size()) {
                throw Error(ErrorKind::Config, "triangle references a vertex out of range");
            }
        }
        const Point& p0 = vertices_[t[0]];
        const Point& p1 = vertices_[t[1]];
        const Point& p2 = vertices_[t[2]];
        const double twice_area = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
        ElementGeometry g;
        g.area = 0.5 * twice_area;
        const std::array<const Point*, 3> p{&p0, &p1, &p2};
        for (int i = 0; i < 3; ++i) {
            const Point& b = *p[(i + 1) % 3];
            const Point& c = *p[(i + 2) % 3];
            g.grad_lambda[i] = Vec2(b.y() - c.y(), c.x() - b.x()) / twice_area;
        }
        g.centroid = (p0 + p1 + p2) / 3.0;
        geometry_.push_back(g);

        max_edge_ = std::max({max_edge_, (p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
        if (twice_area > 0.0) {
            min_angle_ = std::min({min_angle_, corner_angle(p0, p1, p2), corner_angle(p1, p2, p0),
                                   corner_angle(p2, p0, p1)});
        } else {
            min_angle_ = 0.0;
        }
    }
    on_boundary_.assign(vertices_.size(), 0);
    for (const auto& e : boundary_edges_) {
        on_boundary_.at(e.v[0]) = 1;
        on_boundary_.at(e.v[1]) = 1;
    }
}

TriMesh TriMesh::scaled(double factor) const
{
    std::vector<Point> v = vertices_;
    for (auto& p : v) {
        p *= factor;
    }
    return TriMesh(SectorDomain(domain_.omega(), domain_.outer_radius() * factor), std::move(v), triangles_,
                   boundary_edges_, grading_);
}

TriMesh build_sector_mesh(const SectorDomain& domain, double h_target, double grading_exponent)
{
    const double R = domain.outer_radius();
    const double omega = domain.omega();
    if (!(grading_exponent >= 1.0)) {
        throw Error(ErrorKind::Config, "grading exponent must be >= 1");
    }
    if (!(h_target > 0.0)) {
        throw Error(ErrorKind::Config, "mesh size must be positive");
    }
    const auto K = static_cast<std::size_t>(std::ceil(R / h_target - 1e-12));
    if (K < 4) {
        std::ostringstream msg;
        msg << "mesh size " << h_target << " too coarse for radius " << R << ": " << K
            << " radial layers, at least 4 required";
        throw Error(ErrorKind::Config, msg.str());
    }

    std::vector<double> radius(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        radius[k] = R * std::pow(static_cast<double>(k) / static_cast<double>(K), grading_exponent);
    }
    radius[K] = R;

    // Angular segments per layer: tangential spacing matched to the radial spacing.
    std::vector<std::size_t> segments(K + 1, 0);
    for (std::size_t k = 1; k <= K; ++k) {
        const double dr = radius[k] - radius[k - 1];
        const auto m = static_cast<std::size_t>(std::ceil(omega * radius[k] / dr - 1e-9));
        segments[k] = std::max({m, segments[k - 1], std::size_t{1}});
    }

    std::vector<Point> vertices;
    std::vector<std::size_t> layer_start(K + 1, 0);
    vertices.emplace_back(0.0, 0.0);
    for (std::size_t k = 1; k <= K; ++k) {
        layer_start[k] = vertices.size();
        const std::size_t m = segments[k];
        for (std::size_t j = 0; j <= m; ++j) {
            const double t = omega * static_cast<double>(j) / static_cast<double>(m);
            double c = std::cos(t);
            double s = std::sin(t);
            if (j == 0) {
                c = 1.0;
                s = 0.0;
            }
            if (j == m) {
                // exact edge placement; for omega = 2*pi this duplicates the j = 0 point
                c = (omega == 2.0 * pi) ? 1.0 : std::cos(omega);
                s = (omega == 2.0 * pi) ? 0.0 : std::sin(omega);
            }
            vertices.emplace_back(radius[k] * c, radius[k] * s);
        }
    }
    auto vid = [&](std::size_t k, std::size_t j) { return k == 0 ? std::size_t{0} : layer_start[k] + j; };

    std::vector<Triangle> triangles;
    auto push = [&](std::size_t a, std::size_t b, std::size_t c) {
        const Point& pa = vertices[a];
        const Point& pb = vertices[b];
        const Point& pc = vertices[c];
        const double cross = (pb - pa).x() * (pc - pa).y() - (pb - pa).y() * (pc - pa).x();
        if (cross > 0.0) {
            triangles.push_back({a, b, c});
        } else {
            triangles.push_back({a, c, b});
        }
    };

    for (std::size_t j = 0; j < segments[1]; ++j) {
        push(0, vid(1, j), vid(1, j + 1));
    }
    for (std::size_t k = 1; k < K; ++k) {
        const std::size_t m_in = segments[k];
        const std::size_t m_out = segments[k + 1];
        std::size_t i = 0, j = 0;
        while (i < m_in || j < m_out) {
            bool advance_inner;
            if (i == m_in) {
                advance_inner = false;
            } else if (j == m_out) {
                advance_inner = true;
            } else {
                // advance whichever row's next segment midpoint comes first in angle
                const double mid_in = (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(m_in);
                const double mid_out = (2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(m_out);
                advance_inner = mid_in < mid_out;
            }
            if (advance_inner) {
                push(vid(k, i), vid(k, i + 1), vid(k + 1, j));
                ++i;
            } else {
                push(vid(k, i), vid(k + 1, j + 1), vid(k + 1, j));
                ++j;
            }
        }
    }

    std::vector<BoundaryEdge> boundary;
    for (std::size_t k = 0; k < K; ++k) {
        boundary.push_back({{vid(k, 0), vid(k + 1, 0)}, BoundaryTag::Lower});
    }
    for (std::size_t k = 0; k < K; ++k) {
        boundary.push_back({{vid(k, segments[k]), vid(k + 1, segments[k + 1])}, BoundaryTag::Upper});
    }
    for (std::size_t j = 0; j < segments[K]; ++j) {
        boundary.push_back({{vid(K, j), vid(K, j + 1)}, BoundaryTag::Arc});
    }

    return TriMesh(domain, std::move(vertices), std::move(triangles), std::move(boundary), grading_exponent);
}

std::vector<std::size_t> shell_elements(const TriMesh& mesh, double R_shell)
{
    if (!(R_shell > 0.0) || R_shell > mesh.domain().outer_radius() * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "shell radius " << R_shell << " outside (0, " << mesh.domain().outer_radius() << "]";
        throw Error(ErrorKind::Config, msg.str());
    }
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const double r = mesh.centroid_radius(e);
        if (r > 0.5 * R_shell && r <= R_shell) {
            out.push_back(e);
        }
    }
    if (out.empty()) {
        std::ostringstream msg;
        msg << "no element centroid in shell (" << 0.5 * R_shell << ", " << R_shell << "]";
        throw Error(ErrorKind::EmptyRegion, msg.str());
    }
    return out;
}

std::vector<std::size_t> disk_elements(const TriMesh& mesh, double r)
{
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        if (mesh.centroid_radius(e) <= r) {
            out.push_back(e);
        }
    }
    if (out.empty()) {
        std::ostringstream msg;
        msg << "no element centroid within radius " << r;
        throw Error(ErrorKind::EmptyRegion, msg.str());
    }
    return out;
}

PointLocator::PointLocator(MeshPtr mesh) : mesh_(std::move(mesh))
{
    const auto& v = mesh_->vertices();
    Point lo(std::numeric_limits<double>::max(), std::numeric_limits<double>::max());
    Point hi = -lo;
    for (const auto& p : v) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double extent = std::max(hi.x() - lo.x(), hi.y() - lo.y());
    const double n = std::max<double>(1.0, std::sqrt(static_cast<double>(mesh_->num_elements())) / 2.0);
    cell_ = extent / n;
    lo_ = lo - Point::Constant(1e-9 * extent);
    nx_ = static_cast<std::size_t>((hi.x() - lo_.x()) / cell_) + 2;
    ny_ = static_cast<std::size_t>((hi.y() - lo_.y()) / cell_) + 2;
    buckets_.resize(nx_ * ny_);
    for (std::size_t e = 0; e < mesh_->num_elements(); ++e) {
        const auto& t = mesh_->triangles()[e];
        Point a = v[t[0]].cwiseMin(v[t[1]]).cwiseMin(v[t[2]]);
        Point b = v[t[0]].cwiseMax(v[t[1]]).cwiseMax(v[t[2]]);
        const auto i0 = static_cast<std::size_t>((a.x() - lo_.x()) / cell_);
        const auto i1 = static_cast<std::size_t>((b.x() - lo_.x()) / cell_);
        const auto j0 = static_cast<std::size_t>((a.y() - lo_.y()) / cell_);
        const auto j1 = static_cast<std::size_t>((b.y() - lo_.y()) / cell_);
        for (std::size_t j = j0; j <= j1; ++j) {
            for (std::size_t i = i0; i <= i1; ++i) {
                buckets_[j * nx_ + i].push_back(e);
            }
        }
    }
}

Location PointLocator::locate(const Point& x) const
{
    const double tol = 1e-12 * mesh_->domain().outer_radius();
    const double fx = (x.x() - lo_.x()) / cell_;
    const double fy = (x.y() - lo_.y()) / cell_;
    if (fx >= 0.0 && fy >= 0.0 && fx < static_cast<double>(nx_) && fy < static_cast<double>(ny_)) {
        const auto& bucket = buckets_[static_cast<std::size_t>(fy) * nx_ + static_cast<std::size_t>(fx)];
        const auto& verts = mesh_->vertices();
        for (std::size_t e : bucket) {  // ascending ids: first hit is the lowest id
            const auto& g = mesh_->geometry(e);
            const auto& t = mesh_->triangles()[e];
            std::array<double, 3> lam{};
            bool inside = true;
            for (int i = 0; i < 3; ++i) {
                // lambda_i(x) = 1 + grad_i . (x - p_i)
                lam[i] = 1.0 + g.grad_lambda[i].dot(x - verts[t[i]]);
                if (lam[i] < -tol * g.grad_lambda[i].norm()) {
                    inside = false;
                    break;
                }
            }
            if (inside) {
                double sum = 0.0;
                for (auto& l : lam) {
                    l = std::clamp(l, 0.0, 1.0);
                    sum += l;
                }
                for (auto& l : lam) {
                    l /= sum;
                }
                return {e, lam};
            }
        }
    }
    std::ostringstream msg;
    msg << "point (" << x.x() << ", " << x.y() << ") is outside the mesh";
    throw Error(ErrorKind::NotFound, msg.str());
}

Location locate_point(const MeshPtr& mesh, const Point& x)
{
    return PointLocator(mesh).locate(x);
}

void write_mesh(std::ostream& out, const TriMesh& mesh)
{
    char buf[96];
    out << "sectormesh v1 " << mesh.num_vertices() << ' ' << mesh.num_elements() << ' '
        << mesh.boundary_edges().size() << '\n';
    for (const auto& p : mesh.vertices()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x(), p.y());
        out << buf;
    }
    for (const auto& t : mesh.triangles()) {
        out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    for (const auto& e : mesh.boundary_edges()) {
        out << e.v[0] << ' ' << e.v[1] << ' ' << to_string(e.tag) << '\n';
    }
}

}  // namespace sectorhomog
