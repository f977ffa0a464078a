#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "sectorhomog/types.hpp"

namespace sectorhomog {

/// Truncated sector D_R = {r(cos t, sin t) : 0 < r < R, 0 < t < omega}.
class SectorDomain {
public:
    SectorDomain(double omega, double outer_radius);

    double omega() const noexcept { return omega_; }
    double outer_radius() const noexcept { return outer_radius_; }

    /// Singular exponent n*pi/omega.
    double rho_bar(int n) const;

    double area() const noexcept { return 0.5 * omega_ * outer_radius_ * outer_radius_; }

private:
    double omega_;
    double outer_radius_;
};

enum class BoundaryTag : std::uint8_t { Lower, Upper, Arc };

const char* to_string(BoundaryTag tag);

struct BoundaryEdge {
    std::array<std::size_t, 2> v;
    BoundaryTag tag;
};

using Triangle = std::array<std::size_t, 3>;

/// Per-element quantities derived once at construction.
struct ElementGeometry {
    double area;
    std::array<Vec2, 3> grad_lambda;  // gradients of the barycentric coordinates
    Point centroid;
};

class TriMesh {
public:
    TriMesh(SectorDomain domain, std::vector<Point> vertices, std::vector<Triangle> triangles,
            std::vector<BoundaryEdge> boundary_edges, double grading_exponent);

    const SectorDomain& domain() const noexcept { return domain_; }
    const std::vector<Point>& vertices() const noexcept { return vertices_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    const std::vector<BoundaryEdge>& boundary_edges() const noexcept { return boundary_edges_; }
    double grading_exponent() const noexcept { return grading_; }

    std::size_t num_vertices() const noexcept { return vertices_.size(); }
    std::size_t num_elements() const noexcept { return triangles_.size(); }

    const ElementGeometry& geometry(std::size_t e) const { return geometry_[e]; }
    double centroid_radius(std::size_t e) const { return geometry_[e].centroid.norm(); }

    /// Mask of vertices on the topological boundary (all of the sector boundary).
    const std::vector<std::uint8_t>& boundary_vertex_mask() const noexcept { return on_boundary_; }

    double max_edge_length() const noexcept { return max_edge_; }
    double min_angle() const noexcept { return min_angle_; }

    /// Copy with every vertex multiplied by `factor` (domain radius scaled alike).
    TriMesh scaled(double factor) const;

private:
    SectorDomain domain_;
    std::vector<Point> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<BoundaryEdge> boundary_edges_;
    double grading_;
    std::vector<ElementGeometry> geometry_;
    std::vector<std::uint8_t> on_boundary_;
    double max_edge_ = 0.0;
    double min_angle_ = 0.0;
};

using MeshPtr = std::shared_ptr<const TriMesh>;

/// Graded triangulation with radial layers r_k = R (k/K)^g, K = ceil(R/h_target).
TriMesh build_sector_mesh(const SectorDomain& domain, double h_target, double grading_exponent);

inline MeshPtr make_sector_mesh(const SectorDomain& domain, double h_target, double grading_exponent)
{
    return std::make_shared<const TriMesh>(build_sector_mesh(domain, h_target, grading_exponent));
}

/// Elements whose centroid radius lies in (R_shell/2, R_shell].
std::vector<std::size_t> shell_elements(const TriMesh& mesh, double R_shell);

/// Elements whose centroid radius lies in [0, r] (the truncated disk D_r).
std::vector<std::size_t> disk_elements(const TriMesh& mesh, double r);

struct Location {
    std::size_t element;
    std::array<double, 3> bary;
};

/// Bucket-grid point location. Ties (points on shared edges) go to the lowest element id.
class PointLocator {
public:
    explicit PointLocator(MeshPtr mesh);

    Location locate(const Point& x) const;

private:
    MeshPtr mesh_;
    Point lo_;
    double cell_;
    std::size_t nx_ = 0, ny_ = 0;
    std::vector<std::vector<std::size_t>> buckets_;
};

Location locate_point(const MeshPtr& mesh, const Point& x);

/// `sectormesh v1 <nv> <nt> <nb>` text dump.
void write_mesh(std::ostream& out, const TriMesh& mesh);

}  // namespace sectorhomog
