#include <bhflow/bhflow.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace bhflow;

namespace {

const PhysParams P1 = PhysParams::relativistic(1, 0.3, 1);

TestFunction bump(double r0)
{
    return {[=](double t, double r) { return std::exp(-(r - r0) * (r - r0) / 4) * (1 + 0.5 * t); },
            [=](double, double r) { return 0.5 * std::exp(-(r - r0) * (r - r0) / 4); },
            [=](double t, double r) { return -(r - r0) / 2 * std::exp(-(r - r0) * (r - r0) / 4) * (1 + 0.5 * t); }};
}

double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += std::log(x[i]);
        sy += std::log(y[i]);
        sxx += std::log(x[i]) * std::log(x[i]);
        sxy += std::log(x[i]) * std::log(y[i]);
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct DamBreak : ::testing::Test {
    double r0 = 6;
    OrbitPtr lo = make_orbit_ptr(make_base(6, 1, 0, P1), P1);
    OrbitPtr ro = make_orbit_ptr(make_base(6, 0.5, 0, P1), P1);
};

} // namespace

TEST(Grp, ExactOnEquilibria)
{
    const auto o = make_orbit_ptr(make_base(6, 1, 0.2, P1), P1);
    const auto g = solve_grp(0, 6, o, o, 0.2, P1);
    double worst = 0;
    for (int i = 0; i <= 10; ++i)
        for (int j = -20; j <= 20; ++j) {
            const double t = 0.02 * i, r = 6 + 0.05 * j;
            const FluidState a = eval_grp(g, t, r), b = o->eval(r);
            worst = std::max({worst, std::abs(a.rho - b.rho) / b.rho, std::abs(a.v - b.v)});
        }
    EXPECT_LT(worst, 1e-12);
    EXPECT_LT(weak_residual(g, 0.1, 0.5, bump(6)).value(), 1e-10);
}

TEST_F(DamBreak, InitialTimeAndFarField)
{
    const auto g = solve_grp(0, r0, lo, ro, 0.1, P1);
    EXPECT_EQ(eval_grp(g, 0, 5.5).rho, lo->eval(5.5).rho);
    EXPECT_EQ(eval_grp(g, 0, 6.5).rho, ro->eval(6.5).rho);
    EXPECT_EQ(eval_grp(g, 0.1, 3).rho, lo->eval(3).rho);
    EXPECT_EQ(eval_grp(g, 0.1, 9).rho, ro->eval(9).rho);
    EXPECT_THROW(eval_grp(g, 0.2, 6), domain_error);
    EXPECT_THROW(eval_grp(g, -0.1, 6), domain_error);
}

TEST_F(DamBreak, EdgesOrderedAndFanMatchesFrozenFanAtStart)
{
    const auto g = solve_grp(0, r0, lo, ro, 0.1, P1);
    ASSERT_EQ(g.fan.wave1.kind, WaveKind::Rarefaction);
    ASSERT_EQ(g.fan.wave2.kind, WaveKind::Shock);
    for (int i = 0; i < 3; ++i)
        EXPECT_LE(g.edges[i], g.edges[i + 1]);
    // at small tau the corrected fan is the frozen fan; tau is kept large enough that r0 + xi tau resolves xi
    const double tau = 1e-6;
    for (int i = 1; i < 10; ++i) {
        const double xi = g.edges[0] + (g.edges[1] - g.edges[0]) * i / 10;
        const FluidState a = eval_grp(g, tau, r0 + xi * tau), b = sample_fan(g.fan, xi);
        EXPECT_NEAR(a.rho, b.rho, 1e-6);
        EXPECT_NEAR(a.v, b.v, 1e-6);
    }
}

TEST_F(DamBreak, InnerFanEdgeMatchesAdjacentOrbit)
{
    const auto g = solve_grp(0, r0, lo, ro, 0.1, P1);
    for (double t : {0.025, 0.05, 0.1}) {
        const double r = r0 + g.edges[0] * (t - g.t0);
        const FluidState a = eval_grp(g, t, r), b = lo->eval(r);
        EXPECT_NEAR(a.rho, b.rho, 1e-8);
        EXPECT_NEAR(a.v, b.v, 1e-8);
    }
}

TEST_F(DamBreak, DefectsScaleWithSlabLength)
{
    std::vector<double> dts, rh, edge, weak;
    for (int n = 0; n <= 4; ++n) {
        const double dt = 0.2 / std::pow(2.0, n);
        const auto g = solve_grp(0, r0, lo, ro, dt, P1);
        dts.push_back(dt);
        rh.push_back(shock_rh_defect(g, dt));
        edge.push_back(fan_edge_mismatch(g, dt));
        weak.push_back(weak_residual(g, dt, 2.5 * dt, bump(r0), 4).value());
    }
    EXPECT_NEAR(slope(dts, rh), 1, 0.3);
    EXPECT_NEAR(slope(dts, edge), 1, 0.3);
    EXPECT_NEAR(slope(dts, weak), 2, 0.3);
    // the linear constant of the shock defect relative to the jump size
    const double jump = std::abs(lo->eval(r0).rho - ro->eval(r0).rho);
    EXPECT_LT(rh.front() / (jump * dts.front()), 1.0);
}

TEST_F(DamBreak, FrozenFanVariantIsAlsoFirstOrder)
{
    GrpOptions opt;
    opt.frozen_fan_only = true;
    std::vector<double> dts, edge;
    for (int n = 0; n <= 4; ++n) {
        const double dt = 0.2 / std::pow(2.0, n);
        dts.push_back(dt);
        edge.push_back(fan_edge_mismatch(solve_grp(0, r0, lo, ro, dt, P1, opt), dt));
    }
    EXPECT_NEAR(slope(dts, edge), 1, 0.3);
}

TEST_F(DamBreak, WeakResidualPreconditions)
{
    const auto g = solve_grp(0, r0, lo, ro, 0.1, P1);
    const TestFunction zero{[](double, double) { return 0.0; }, [](double, double) { return 0.0; },
                            [](double, double) { return 0.0; }};
    EXPECT_EQ(weak_residual(g, 0.1, 0.25, zero).value(), 0);
    EXPECT_THROW(weak_residual(g, 0.1, 0.001, bump(r0)), misuse_error);
    EXPECT_THROW(weak_residual(g, 0.2, 0.5, bump(r0)), misuse_error);
}

TEST(Grp, PureShockTravelsOnStraightLine)
{
    const double r0 = 6;
    const FluidState ul{1, 0.1};
    const auto [ur, s] = shock_state(ul, 2, 1, r0, P1);
    const auto lo = make_orbit_ptr(make_base(r0, ul.rho, ul.v, P1), P1);
    const auto ro = make_orbit_ptr(make_base(r0, ur.rho, ur.v, P1), P1);
    const auto g = solve_grp(0, r0, lo, ro, 0.1, P1);
    EXPECT_EQ(g.fan.wave2.kind, WaveKind::Null);
    EXPECT_EQ(g.middle.get(), ro.get());
    const double t = 0.08, rs = r0 + s * t;
    EXPECT_EQ(eval_grp(g, t, rs - 1e-9).rho, lo->eval(rs - 1e-9).rho);
    EXPECT_EQ(eval_grp(g, t, rs + 1e-9).rho, ro->eval(rs + 1e-9).rho);
}

TEST(Grp, PlanarFanIsSelfSimilar)
{
    const auto p = PhysParams::minkowski(1, 0.3);
    const auto lo = make_orbit_ptr(make_base(0, 1, 0, p), p);
    const auto ro = make_orbit_ptr(make_base(0, 0.3, 0, p), p);
    const auto g = solve_grp(0, 0, lo, ro, 0.5, p);
    ASSERT_TRUE(g.fan1.has_value());
    EXPECT_EQ(g.fan1->max_dev, 0);
    for (double t : {0.1, 0.5})
        for (int i = 0; i <= 10; ++i) {
            const double xi = g.edges[0] + (g.edges[1] - g.edges[0]) * i / 10;
            EXPECT_NEAR(eval_grp(g, t, xi * t).rho, sample_fan(g.fan, xi).rho, 1e-13);
        }
}

TEST(Grp, StandingShockIsRecognised)
{
    const double rj = 7;
    const FluidState ul{1, 0.9};
    const auto lo = make_orbit_ptr(make_base(rj, ul.rho, ul.v, P1), P1);
    const FluidState ur = steady_jump(ul, P1);
    const auto ro = make_orbit_ptr(make_base(rj, ur.rho, ur.v, P1), P1);
    GrpOptions opt;
    opt.steady_window = 0.1;
    const auto g = solve_grp(0, rj + 0.04, lo, ro, 0.02, P1, opt);
    ASSERT_TRUE(g.steady_shock.has_value());
    EXPECT_NEAR(*g.steady_shock, rj, 1e-9);
    EXPECT_EQ(eval_grp(g, 0.01, 6.9).v, lo->eval(6.9).v);
    EXPECT_EQ(eval_grp(g, 0.01, 7.02).v, ro->eval(7.02).v);
    EXPECT_FALSE(detect_steady_shock(*lo, *lo, rj, 0.1).has_value());
}
