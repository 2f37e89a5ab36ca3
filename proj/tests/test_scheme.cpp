#include <bhflow/bhflow.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace bhflow;

namespace {

const PhysParams P1 = PhysParams::relativistic(1, 0.3, 1);

SchemeConfig base_config()
{
    SchemeConfig c;
    c.params = P1;
    c.dr = 0.05;
    c.dt = 0.02;
    c.r_lo = 2.5;
    c.r_hi = 20;
    c.t_end = 0.2;
    return c;
}

SchemeConfig planar_config(double dr)
{
    SchemeConfig c;
    c.params = PhysParams::minkowski(1, 0.3);
    c.dr = dr;
    c.dt = dr / 4;
    c.r_lo = -1;
    c.r_hi = 1;
    c.t_end = 0.25;
    return c;
}

InitialData dam_break()
{
    return InitialData::from_sampler([](double r) { return r < 0 ? FluidState{2, 0} : FluidState{1, 0}; });
}

} // namespace

TEST(Sequence, VanDerCorputValues)
{
    EXPECT_EQ(van_der_corput(1), 0.0);
    EXPECT_EQ(van_der_corput(2), -0.5);
    EXPECT_EQ(van_der_corput(3), 0.5);
    EXPECT_EQ(van_der_corput(1, 2), van_der_corput(3));
    double mean = 0;
    for (int i = 1; i <= 1024; ++i)
        mean += van_der_corput(static_cast<std::uint64_t>(i));
    EXPECT_NEAR(mean / 1024, 0, 1e-3);
}

TEST(Config, Validation)
{
    auto c = base_config();
    EXPECT_NO_THROW(c.validate());
    c.dt = 0.05;
    EXPECT_THROW(c.validate(), config_error);
    c = base_config();
    c.r_lo = 2;
    EXPECT_THROW(c.validate(), config_error);
    c = base_config();
    c.r_hi = c.r_lo;
    EXPECT_THROW(c.validate(), config_error);
    c = base_config();
    c.sequence = SuppliedSequence{{0.5, 1.5}};
    EXPECT_THROW(c.validate(), config_error);
    const auto o = make_orbit_ptr(make_base(10, 1, 0.05, P1), P1);
    c = base_config();
    c.dt = 0.1;
    EXPECT_THROW(run(c, InitialData::from_orbit(o)), config_error);
}

TEST(Reconstruct, SingleOrbitIsExact)
{
    const auto cfg = base_config();
    const auto o = make_orbit_ptr(make_base(10, 1, 0.05, P1), P1);
    const auto lv = reconstruct_initial(cfg, InitialData::from_sampler([&](double r) { return o->eval(r); }));
    for (const auto& c : lv.cells) {
        for (double r : {scheme_detail::lo_edge(cfg, c.center), c.node_r, scheme_detail::hi_edge(cfg, c.center)}) {
            EXPECT_NEAR(c.orbit->eval(r).rho, o->eval(r).rho, 1e-10 * o->eval(r).rho);
            EXPECT_NEAR(c.orbit->eval(r).v, o->eval(r).v, 1e-10);
        }
    }
    EXPECT_NEAR(lv.cells.front().node.rho, o->eval(lv.cells.front().node_r).rho, 1e-14);
}

// With M = 0 the radial weights still make constants non-steady.
TEST(Reconstruct, RadialMinkowskiConstantIsNotSteady)
{
    auto cfg = base_config();
    cfg.params = PhysParams::relativistic(1, 0.3, 0);
    cfg.r_lo = 1;
    cfg.r_hi = 3;
    const auto lv = reconstruct_initial(cfg, InitialData::from_sampler([](double) { return FluidState{1, 0.1}; }));
    const auto& c = lv.cells[lv.cells.size() / 2];
    const FluidState far = c.orbit->eval(c.node_r + 0.5);
    EXPECT_GT(std::abs(far.v - 0.1), 1e-4);
    const double r = c.node_r, h = 1e-5;
    const double dF = (flux(c.orbit->eval(r + h), r + h, cfg.params).u2 - flux(c.orbit->eval(r - h), r - h, cfg.params).u2) / (2 * h);
    EXPECT_NEAR(dF, source(c.orbit->eval(r), r, cfg.params).u2, 1e-6);
}

TEST(Step, SmoothOrbitIsPreserved)
{
    const auto cfg = base_config();
    const auto o = make_orbit_ptr(make_base(10, 1, -0.05, P1), P1);
    const auto lv0 = reconstruct_initial(cfg, InitialData::from_orbit(o));
    const auto lv1 = step(lv0, cfg);
    EXPECT_EQ(lv1.index, 1);
    EXPECT_NE(lv1.parity(), lv0.parity());
    for (const auto& c : lv1.cells)
        EXPECT_NEAR(c.node.v, o->eval(c.node_r).v, 1e-10);
}

TEST(Run, SteadyShockStaysPut)
{
    auto cfg = base_config();
    cfg.t_end = 1;
    cfg.snapshot_every = 1;
    const FluidState ul{1, 0.9};
    const auto lo = make_orbit_ptr(make_base(7, ul.rho, ul.v, P1), P1);
    const FluidState ur = steady_jump(ul, P1);
    const auto ro = make_orbit_ptr(make_base(7, ur.rho, ur.v, P1), P1);
    const auto sol = run(cfg, InitialData::from_pieces({-1e300, 7}, {lo, ro}));
    ASSERT_FALSE(sol.failed) << sol.failure;
    for (const auto& lv : sol.snapshots)
        for (const auto& c : lv.cells) {
            if (std::abs(c.node_r - 7) < 2 * cfg.dr)
                continue;
            const auto& ref = c.node_r < 7 ? lo : ro;
            EXPECT_NEAR(c.node.v, ref->eval(c.node_r).v, 1e-10) << lv.index << " " << c.node_r;
        }
}

TEST(Run, DeterministicAndThreadIndependent)
{
    auto cfg = planar_config(1.0 / 100);
    const auto a = run(cfg, dam_break());
    const auto b = run(cfg, dam_break());
    cfg.threads = 4;
    const auto c = run(cfg, dam_break());
    ASSERT_EQ(a.final_level.cells.size(), c.final_level.cells.size());
    for (std::size_t i = 0; i < a.final_level.cells.size(); ++i) {
        EXPECT_EQ(a.final_level.cells[i].node.rho, b.final_level.cells[i].node.rho);
        EXPECT_EQ(a.final_level.cells[i].node.rho, c.final_level.cells[i].node.rho);
        EXPECT_EQ(a.final_level.cells[i].node.v, c.final_level.cells[i].node.v);
    }
    cfg.threads = 1;
    cfg.sequence = VanDerCorput{7};
    const auto d = run(cfg, dam_break());
    bool differs = false;
    for (std::size_t i = 0; i < a.final_level.cells.size(); ++i)
        differs |= a.final_level.cells[i].node.rho != d.final_level.cells[i].node.rho;
    EXPECT_TRUE(differs);
}

TEST(Tv, SingleOrbitAndSingleInterface)
{
    const auto cfg = base_config();
    const auto o = make_orbit_ptr(make_base(10, 1, 0.05, P1), P1);
    const auto lv = reconstruct_initial(cfg, InitialData::from_orbit(o));
    const auto tv = tv_functionals(lv, cfg);
    EXPECT_LT(tv.L_J, 1e-12);
    EXPECT_GT(tv.tv_lnrho, 0);

    const auto pcfg = planar_config(0.1);
    const auto two = reconstruct_initial(pcfg, dam_break());
    const auto t2 = tv_functionals(two, pcfg);
    const auto fan = solve_riemann({2, 0}, {1, 0}, 0, pcfg.params);
    EXPECT_NEAR(t2.L_J, fan.strength(), 1e-12);
    EXPECT_NEAR(t2.tv_lnrho, std::log(2.0), 1e-12);
}

// Interface jumps of a small smooth perturbation are linear in its amplitude.
TEST(Tv, InterfaceStrengthIsLinearInPerturbation)
{
    const auto cfg = base_config();
    const auto o = make_orbit_ptr(make_base(10, 1, 0.05, P1), P1);
    auto level = [&](double amp) {
        return reconstruct_initial(cfg, InitialData::from_sampler([&, amp](double r) {
            const FluidState s = o->eval(r);
            return FluidState{s.rho * (1 + amp * std::sin(r)), s.v};
        }));
    };
    const double a = tv_functionals(level(1e-3), cfg).L_J, b = tv_functionals(level(2e-3), cfg).L_J;
    EXPECT_GT(a, 0);
    EXPECT_NEAR(b / a, 2, 1e-2);
}

TEST(Run, PlanarMonitors)
{
    auto cfg = planar_config(1.0 / 200);
    cfg.t_end = 100 * cfg.dt;
    const auto sol = run(cfg, dam_break());
    ASSERT_FALSE(sol.failed);
    const double l0 = sol.diagnostics.front().L_J;
    for (const auto& d : sol.diagnostics) {
        EXPECT_LE(d.L_J, 10 * l0);
        EXPECT_TRUE(std::isfinite(d.tv_lnrho));
        EXPECT_LT(d.max_wavespeed, cfg.dr / cfg.dt);
    }
    const double m0 = sol.diagnostics.front().mass, m1 = sol.diagnostics.back().mass;
    RecordProperty("mass_drift", std::to_string(std::abs(m1 - m0) / m0));
    EXPECT_LT(std::abs(m1 - m0) / m0, 1e-2);
}

TEST(Run, PlanarHomogeneousMassIsConserved)
{
    auto cfg = planar_config(1.0 / 200);
    cfg.t_end = 100 * cfg.dt;
    const auto sol = run(cfg, InitialData::from_sampler([](double) { return FluidState{1.3, 0.2}; }));
    ASSERT_FALSE(sol.failed);
    const double m0 = sol.diagnostics.front().mass, m1 = sol.diagnostics.back().mass;
    EXPECT_LT(std::abs(m1 - m0) / m0, 1e-6);
}

TEST(Run, TrustedWindowShrinksAtSignalSpeed)
{
    auto cfg = base_config();
    const auto o = make_orbit_ptr(make_base(10, 1, 0.05, P1), P1);
    const auto sol = run(cfg, InitialData::from_orbit(o));
    const auto& d = sol.diagnostics.back();
    EXPECT_NEAR(d.trusted_lo, cfg.r_lo + cfg.t_end, 1e-12);
    EXPECT_NEAR(d.trusted_hi, cfg.r_hi - cfg.t_end, 1e-12);
    EXPECT_TRUE(sol.final_level.cells.front().untrusted);
}
