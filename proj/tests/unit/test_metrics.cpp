#include <gtest/gtest.h>

#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "sectorhomog/error.hpp"
#include "sectorhomog/metrics.hpp"

using namespace sectorhomog;

namespace {

const double omega = 1.95 * pi;

FEFunction tau_interp(const MeshPtr& m, int n)
{
    const SingularFunction tau(n, m->domain().omega());
    return interpolate(m, [&](const Point& x) { return tau.value(x); });
}

}  // namespace

TEST(LogLogSlope, ExactPowerLaw)
{
    const std::vector<double> xs = {0.1, 0.2, 0.4, 0.8, 1.6};
    std::vector<double> ys;
    for (double x : xs) {
        ys.push_back(3.0 * x * x);
    }
    const auto f = loglog_slope(xs, ys);
    EXPECT_NEAR(f.slope, 2.0, 1e-13);
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-13);
    EXPECT_LE(f.half_width, 1e-12);
    EXPECT_EQ(f.points, 5u);
}

TEST(LogLogSlope, NoisyData)
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.05);
    const auto xs = log_spaced(1e-3, 0.5, 20);
    std::vector<double> ys;
    for (double x : xs) {
        ys.push_back(std::pow(x, -0.6) * std::exp(noise(rng)));
    }
    const auto f = loglog_slope(xs, ys);
    EXPECT_NEAR(f.slope, -0.6, 0.1);
    EXPECT_LE(f.lo(), -0.6);
    EXPECT_GE(f.hi(), -0.6);
    EXPECT_GT(f.half_width, 0.0);
}

TEST(LogLogSlope, Errors)
{
    auto kind_of = [](auto&& call) -> std::optional<ErrorKind> {
        try {
            call();
        } catch (const Error& e) {
            return e.kind();
        }
        return std::nullopt;
    };
    EXPECT_EQ(kind_of([] { loglog_slope({1, 2, 3}, {1, 2, 3}); }), ErrorKind::Fit);
    EXPECT_EQ(kind_of([] { loglog_slope({1, 2, 3, 4}, {1, 2, 0, 4}); }), ErrorKind::Fit);
    EXPECT_EQ(kind_of([] { loglog_slope({1, 2, 3, 4}, {1, 2, NAN, 4}); }), ErrorKind::Fit);
    EXPECT_EQ(kind_of([] { loglog_slope({1, 2, 3, 4}, {1, 2, 3}); }), ErrorKind::Fit);
    EXPECT_EQ(kind_of([] { loglog_slope({2, 2, 2, 2}, {1, 2, 3, 4}); }), ErrorKind::Fit);
}

TEST(Radii, DyadicAndLogSpaced)
{
    EXPECT_EQ(dyadic_radii(1, 3), (std::vector<double>{0.5, 0.25, 0.125}));
    const auto v = log_spaced(0.01, 1.0, 3);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[0], 0.01);
    EXPECT_NEAR(v[1], 0.1, 1e-15);
    EXPECT_EQ(v[2], 1.0);
    EXPECT_THROW(log_spaced(0.0, 1.0, 3), Error);
}

TEST(ShellErrorCurve, ZeroUnitAndSingularGradient)
{
    const SectorDomain d(omega, 1.0);
    const MeshPtr m = make_sector_mesh(d, 0.005, 2.0);
    const auto radii = dyadic_radii(1, 6);
    for (double E : shell_error_curve(*m, std::vector<Vec2>(m->num_elements(), Vec2::Zero()), radii)) {
        EXPECT_EQ(E, 0.0);
    }
    for (double E : shell_error_curve(*m, std::vector<Vec2>(m->num_elements(), Vec2(0.6, 0.8)), radii)) {
        EXPECT_NEAR(E, 1.0, 1e-13);
    }
    // |grad tau_1| = rho r^(rho - 1)
    const SingularFunction tau(1, omega);
    const auto E = shell_error_curve(*m, gradient_p0(tau_interp(m, 1)), radii);
    EXPECT_NEAR(loglog_slope(radii, E).slope, tau.rho() - 1.0, 0.02);
}

TEST(Excess, VanishesOnTheSpan)
{
    const SectorDomain d(omega, 1.0);
    const MeshPtr m = make_sector_mesh(d, 0.01, 2.0);
    const FEFunction t1 = tau_interp(m, 1), t2 = tau_interp(m, 2);
    const FEFunction u = 2.0 * t1 - 0.5 * t2;
    const auto e = excess(u, 0.3, 2, {t1, t2});
    EXPECT_LE(e.value, 1e-20);
    EXPECT_NEAR(e.gamma[0], 2.0, 1e-10);
    EXPECT_NEAR(e.gamma[1], -0.5, 1e-10);
}

TEST(Excess, AngularModesDecouple)
{
    // grad tau_1 and grad tau_2 are L2-orthogonal on D_r, so the fit returns the exact
    // coefficient and the excess is the average of |grad tau_2|^2 = rho_2^2 r^(2 rho_2 - 2)
    const SectorDomain d(omega, 1.0);
    const MeshPtr m = make_sector_mesh(d, 0.005, 2.0);
    const FEFunction t1 = tau_interp(m, 1), t2 = tau_interp(m, 2);
    const double r = 0.3, rho2 = d.rho_bar(2);
    const auto e0 = excess(t1 + t2, r, 0, {});
    const auto e1 = excess(t1 + t2, r, 1, {t1});
    EXPECT_NEAR(e1.gamma[0], 1.0, 1e-2);
    // avg over the truncated disk of rho^2 s^(2 rho - 2): (1/(omega r^2/2)) (omega/2) rho^2 r^(2 rho)/rho
    const double exact = rho2 * std::pow(r, 2 * rho2 - 2);
    EXPECT_NEAR(e1.value / exact, 1.0, 2e-2);
    EXPECT_GT(e0.value, e1.value);
}

TEST(Excess, MonotoneInNAndRankError)
{
    const SectorDomain d(omega, 1.0);
    const MeshPtr m = make_sector_mesh(d, 0.01, 2.0);
    const auto data = random_arc_data(omega, 5);
    const FEFunction u = solve_arc_problem(m, CoeffField::identity(), data);
    std::vector<FEFunction> basis = {tau_interp(m, 1), tau_interp(m, 2), tau_interp(m, 3)};
    for (double r : {0.05, 0.2, 0.5}) {
        double prev = excess(u, r, 0, basis).value;
        for (int N = 1; N <= 3; ++N) {
            const double cur = excess(u, r, N, basis).value;
            EXPECT_LE(cur, prev * (1.0 + 1e-12)) << "r " << r << " N " << N;
            prev = cur;
        }
    }
    try {
        excess(u, 0.3, 2, {basis[0], 3.0 * basis[0]});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Rank);
    }
}

TEST(ArcData, DeterministicWithLeadingMode)
{
    const auto a = random_arc_data(omega, 11);
    const auto b = random_arc_data(omega, 11);
    const auto c = random_arc_data(omega, 12);
    ASSERT_EQ(a.xi.size(), 8u);
    EXPECT_EQ(a.xi[0], 1.0);
    EXPECT_EQ(a.xi, b.xi);
    EXPECT_NE(a.xi, c.xi);
    EXPECT_NEAR(a(0.0), 0.0, 1e-15);
    EXPECT_NEAR(a(omega), 0.0, 1e-13);
    EXPECT_THROW(random_arc_data(omega, 1, 0), Error);
}

TEST(ArcProblem, LeadingModeGivesSingularFunction)
{
    const SectorDomain d(omega, 1.0);
    const MeshPtr m = make_sector_mesh(d, 0.01, 2.0);
    const ArcData data{omega, {1.0}};
    const FEFunction u = solve_arc_problem(m, CoeffField::identity(), data);
    EXPECT_LE((u - tau_interp(m, 1)).max_abs(), 2e-3);
}

TEST(ExcessDecay, AnalyticExponent)
{
    const SectorDomain d(omega, 1.0);
    const MeshPtr m = make_sector_mesh(d, 0.01, 2.0);
    const FEFunction u = tau_interp(m, 1) + 0.5 * tau_interp(m, 2);
    const auto rep = excess_decay_of(u, 1, {tau_interp(m, 1)}, log_spaced(0.02, 0.5, 8), 0.0, 1.0);
    EXPECT_NEAR(rep.predicted, 2.0 * (d.rho_bar(2) - 1.0), 1e-15);
    EXPECT_NEAR(rep.fit.slope, rep.predicted, 0.05);
    ASSERT_EQ(rep.rows.size(), 8u);
    std::ostringstream out;
    write_excess_csv(out, rep.rows, 1);
    EXPECT_EQ(out.str().substr(0, 17), "r,excess,gamma_1\n");
}

TEST(Gain, IdentityBundleHasNoGain)
{
    const SectorDomain d(omega, 1.0);
    const MeshPtr m = make_sector_mesh(d, 0.02, 2.0);
    const auto b = build_expansions(m, CoeffField::identity(), default_forcing());
    const auto radii = dyadic_radii(1, 5);
    const auto rows = gain_rows(b, radii);
    ASSERT_EQ(rows.size(), radii.size());
    for (const auto& r : rows) {
        EXPECT_EQ(r.E0, 0.0);
        EXPECT_TRUE(std::isnan(r.gain));
    }
    const auto rep = gain_report(rows, 0.0, 1.0);
    EXPECT_TRUE(std::isnan(rep.slope_gain.slope));
    EXPECT_TRUE(std::isnan(rep.slope_E0.slope));
    EXPECT_THROW(gain_report(rows, 0.2, 1.0), Error);
}

TEST(Gain, RowsAndCsv)
{
    const std::vector<GainRow> rows = {{0.05, 0.5, 2.0, 1.0, 2.0}, {0.05, 0.25, 2.0, 0.5, 4.0},
                                       {0.05, 0.125, 2.0, 0.25, 8.0}, {0.05, 0.0625, 2.0, 0.125, 16.0}};
    const auto rep = gain_report(rows, 0.0, 1.0);
    EXPECT_NEAR(rep.slope_gain.slope, -1.0, 1e-13);
    EXPECT_NEAR(rep.slope_E0.slope, 0.0, 1e-13);
    EXPECT_NEAR(rep.slope_E1.slope, 1.0, 1e-13);
    std::ostringstream out;
    write_gain_csv(out, rows);
    EXPECT_EQ(out.str().substr(0, 47), "epsilon,R,E0,E1,gain\n0.050000000000000003,0.5,2");
}
