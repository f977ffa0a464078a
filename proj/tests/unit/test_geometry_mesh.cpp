#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "sectorhomog/error.hpp"
#include "sectorhomog/geometry_mesh.hpp"

using namespace sectorhomog;

namespace {

double signed_area(const TriMesh& m, std::size_t e)
{
    const auto& t = m.triangles()[e];
    const Point& a = m.vertices()[t[0]];
    const Point& b = m.vertices()[t[1]];
    const Point& c = m.vertices()[t[2]];
    return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

std::map<std::pair<std::size_t, std::size_t>, int> edge_counts(const TriMesh& m)
{
    std::map<std::pair<std::size_t, std::size_t>, int> count;
    for (const auto& t : m.triangles()) {
        for (int k = 0; k < 3; ++k) {
            auto a = t[k], b = t[(k + 1) % 3];
            count[{std::min(a, b), std::max(a, b)}]++;
        }
    }
    return count;
}

}  // namespace

TEST(SectorDomain, RhoBarAndValidation)
{
    const SectorDomain d(1.95 * pi, 1.0);
    EXPECT_DOUBLE_EQ(d.rho_bar(1), 1.0 / 1.95);
    EXPECT_DOUBLE_EQ(d.rho_bar(3), 3.0 / 1.95);
    EXPECT_THROW(d.rho_bar(0), Error);
    EXPECT_THROW(SectorDomain(0.0, 1.0), Error);
    EXPECT_THROW(SectorDomain(2.0 * pi + 1e-9, 1.0), Error);
    EXPECT_THROW(SectorDomain(pi, -1.0), Error);
}

TEST(BuildSectorMesh, HalfDiskUniformLayers)
{
    const SectorDomain d(pi, 1.0);
    const TriMesh m = build_sector_mesh(d, 0.25, 1.0);
    std::set<long> radii;
    for (const auto& v : m.vertices()) {
        radii.insert(std::lround(v.norm() * 1e6));
    }
    EXPECT_EQ(radii, (std::set<long>{0, 250000, 500000, 750000, 1000000}));
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
        EXPECT_GT(signed_area(m, e), 0.0) << "element " << e;
    }
}

TEST(BuildSectorMesh, GradedInnermostLayer)
{
    const SectorDomain d(1.95 * pi, 1.0);
    const TriMesh m = build_sector_mesh(d, 0.01, 2.0);
    double rmin = 1e300;
    for (const auto& v : m.vertices()) {
        if (v.norm() > 0.0) {
            rmin = std::min(rmin, v.norm());
        }
    }
    EXPECT_NEAR(rmin, 1e-4, 1e-12);  // K = 100 layers, r_1 = (1/100)^2
}

TEST(BuildSectorMesh, AreaAndOrientation)
{
    for (double omega : {0.5 * pi, pi, 1.95 * pi, 2.0 * pi}) {
        const SectorDomain d(omega, 1.0);
        const TriMesh m = build_sector_mesh(d, 0.02, 2.0);
        double area = 0.0;
        for (std::size_t e = 0; e < m.num_elements(); ++e) {
            EXPECT_GT(signed_area(m, e), 0.0);
            area += m.geometry(e).area;
        }
        EXPECT_NEAR(area / d.area(), 1.0, 5e-3) << "omega " << omega;
        EXPECT_LE(area, d.area());
    }
}

TEST(BuildSectorMesh, EdgeManifoldAndBoundaryTags)
{
    const double omega = 1.95 * pi;
    const SectorDomain d(omega, 1.0);
    const TriMesh m = build_sector_mesh(d, 0.05, 2.0);
    const auto count = edge_counts(m);
    std::set<std::pair<std::size_t, std::size_t>> single;
    for (const auto& [edge, n] : count) {
        EXPECT_LE(n, 2);
        if (n == 1) {
            single.insert(edge);
        }
    }
    std::set<std::pair<std::size_t, std::size_t>> tagged;
    std::map<BoundaryTag, int> per_tag;
    const Vec2 upper_dir(std::cos(omega), std::sin(omega));
    for (const auto& b : m.boundary_edges()) {
        tagged.insert({std::min(b.v[0], b.v[1]), std::max(b.v[0], b.v[1])});
        per_tag[b.tag]++;
        for (auto v : b.v) {
            const Point& p = m.vertices()[v];
            switch (b.tag) {
            case BoundaryTag::Lower:
                EXPECT_NEAR(p.y(), 0.0, 1e-14);
                EXPECT_GE(p.x(), 0.0);
                break;
            case BoundaryTag::Upper:
                EXPECT_NEAR(upper_dir.x() * p.y() - upper_dir.y() * p.x(), 0.0, 1e-14);
                EXPECT_GE(p.dot(upper_dir), -1e-14);
                break;
            case BoundaryTag::Arc:
                EXPECT_NEAR(p.norm(), 1.0, 1e-14);
                break;
            }
        }
    }
    EXPECT_EQ(single, tagged);
    EXPECT_GT(per_tag[BoundaryTag::Lower], 0);
    EXPECT_GT(per_tag[BoundaryTag::Upper], 0);
    EXPECT_GT(per_tag[BoundaryTag::Arc], 0);
    EXPECT_STREQ(to_string(BoundaryTag::Arc), "ARC");
}

TEST(BuildSectorMesh, SlitDiskHasIndependentEdges)
{
    const SectorDomain d(2.0 * pi, 1.0);
    const TriMesh m = build_sector_mesh(d, 0.1, 1.0);
    std::set<std::size_t> lower, upper;
    for (const auto& b : m.boundary_edges()) {
        for (auto v : b.v) {
            const Point& p = m.vertices()[v];
            if (b.tag == BoundaryTag::Lower || b.tag == BoundaryTag::Upper) {
                EXPECT_NEAR(p.y(), 0.0, 1e-14);
                EXPECT_GE(p.x(), -1e-14);
                (b.tag == BoundaryTag::Lower ? lower : upper).insert(v);
            }
        }
    }
    ASSERT_FALSE(lower.empty());
    std::set<std::size_t> shared;
    for (auto v : lower) {
        if (upper.count(v) && m.vertices()[v].norm() > 0.0) {
            shared.insert(v);
        }
    }
    EXPECT_TRUE(shared.empty());
}

TEST(BuildSectorMesh, RefinementKeepsInnermostLayer)
{
    const SectorDomain d(1.95 * pi, 1.0);
    auto innermost = [&](double h) {
        const TriMesh m = build_sector_mesh(d, h, 2.0);
        double r = 1e300;
        for (std::size_t e = 0; e < m.num_elements(); ++e) {
            r = std::min(r, m.centroid_radius(e));
        }
        return r;
    };
    for (double h : {0.1, 0.05, 0.025}) {
        EXPECT_GE(innermost(0.5 * h), 0.25 * innermost(h) * (1.0 - 1e-12));
    }
}

TEST(BuildSectorMesh, RejectsCoarseOrBadGrading)
{
    const SectorDomain d(pi, 1.0);
    EXPECT_THROW(build_sector_mesh(d, 0.4, 1.0), Error);
    EXPECT_THROW(build_sector_mesh(d, 0.1, 0.5), Error);
    EXPECT_THROW(build_sector_mesh(d, 0.0, 1.0), Error);
}

TEST(ShellElements, OuterHalfOfUniformHalfDisk)
{
    const SectorDomain d(pi, 1.0);
    const TriMesh m = build_sector_mesh(d, 0.05, 1.0);
    const auto shell = shell_elements(m, 1.0);
    std::size_t expected = 0;
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
        const double r = m.centroid_radius(e);
        expected += (r > 0.5 && r <= 1.0) ? 1 : 0;
    }
    EXPECT_EQ(shell.size(), expected);
    for (auto e : shell) {
        EXPECT_GT(m.centroid_radius(e), 0.5);
    }
    EXPECT_THROW(shell_elements(m, 1.5), Error);
}

TEST(ShellElements, GradedNearCorner)
{
    const SectorDomain d(1.95 * pi, 1.0);
    // K = 20 layers: innermost radius (1/20)^2 = 0.0025 < 0.01
    const TriMesh fine = build_sector_mesh(d, 0.05, 2.0);
    EXPECT_FALSE(shell_elements(fine, 0.02).empty());
    // K = 4 layers: innermost radius 1/16 > 0.02, the shell (0.01, 0.02] holds no centroid
    const TriMesh coarse = build_sector_mesh(d, 0.25, 2.0);
    EXPECT_THROW(shell_elements(coarse, 0.02), Error);
}

TEST(PointLocator, VertexCentroidAndEdge)
{
    const SectorDomain d(1.95 * pi, 1.0);
    const MeshPtr mesh = make_sector_mesh(d, 0.1, 2.0);
    const PointLocator loc(mesh);

    const std::size_t e = mesh->num_elements() / 3;
    const auto& t = mesh->triangles()[e];
    const Point c = mesh->geometry(e).centroid;
    const Location lc = loc.locate(c);
    EXPECT_EQ(lc.element, e);
    for (double b : lc.bary) {
        EXPECT_NEAR(b, 1.0 / 3.0, 1e-12);
    }

    const Location lv = loc.locate(mesh->vertices()[t[1]]);
    const auto& tv = mesh->triangles()[lv.element];
    bool found = false;
    for (int k = 0; k < 3; ++k) {
        if (tv[k] == t[1]) {
            EXPECT_NEAR(lv.bary[k], 1.0, 1e-12);
            found = true;
        }
    }
    EXPECT_TRUE(found);

    const Point mid = 0.5 * (mesh->vertices()[t[0]] + mesh->vertices()[t[1]]);
    const Location lm = loc.locate(mid);
    const auto& tm = mesh->triangles()[lm.element];
    Point back = Point::Zero();
    for (int k = 0; k < 3; ++k) {
        back += lm.bary[k] * mesh->vertices()[tm[k]];
    }
    EXPECT_NEAR((back - mid).norm(), 0.0, 1e-12);
    EXPECT_LE(lm.element, e);

    EXPECT_THROW(loc.locate(Point(2.0, 0.0)), Error);
}

TEST(TriMesh, ScaledAndDump)
{
    const SectorDomain d(pi, 1.0);
    const TriMesh m = build_sector_mesh(d, 0.25, 1.0);
    const TriMesh s = m.scaled(2.0);
    EXPECT_DOUBLE_EQ(s.domain().outer_radius(), 2.0);
    EXPECT_NEAR(s.geometry(0).area, 4.0 * m.geometry(0).area, 1e-14);
    std::ostringstream out;
    write_mesh(out, m);
    std::istringstream in(out.str());
    std::string tag, version;
    std::size_t nv, nt;
    in >> tag >> version >> nv >> nt;
    EXPECT_EQ(tag, "sectormesh");
    EXPECT_EQ(version, "v1");
    EXPECT_EQ(nv, m.num_vertices());
    EXPECT_EQ(nt, m.num_elements());
}
