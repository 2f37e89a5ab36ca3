#include <bhflow/bhflow.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace bhflow;

namespace {

const PhysParams P1 = PhysParams::relativistic(1, 0.3, 1);

FluidState random_state(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> ul(-3, 3), uv(-0.95, 0.95);
    return {std::exp(ul(rng)), uv(rng)};
}

double nu(double v) { return (1 + v) / (2 * (1 - v)); }

} // namespace

TEST(Rarefaction, BaseAndInvariance)
{
    const FluidState b{2, 0.1};
    const FluidState s = rarefaction_state(b, 2, 1, P1);
    EXPECT_EQ(s.rho, b.rho);
    EXPECT_NEAR(s.v, b.v, 1e-16);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.01, 1);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const FluidState base = random_state(rng);
        const double rho = base.rho * u(rng);
        try {
            const auto t = rarefaction_state(base, rho, 1, P1);
            worst = std::max(worst, std::abs(riemann_invariants(t, P1).w - riemann_invariants(base, P1).w));
            const auto t2 = rarefaction_state(base, rho, 2, P1);
            worst = std::max(worst, std::abs(riemann_invariants(t2, P1).z - riemann_invariants(base, P1).z));
        } catch (const domain_error&) {
            // velocity left the light cone; the curve ends there
        }
    }
    EXPECT_LT(worst, 1e-13);
    EXPECT_THROW(rarefaction_state(b, 3, 1, P1), domain_error);
}

TEST(Rarefaction, NuPowerLawAndLambdaMonotone)
{
    const FluidState b{1, 0};
    const double chi = P1.chi;
    double prev = -1e9;
    for (double rho = 1.0; rho > 0.05; rho *= 0.8) {
        const auto s = rarefaction_state(b, rho, 1, P1);
        EXPECT_NEAR(std::log(nu(s.v) / nu(0)), -chi * std::log(rho), 1e-13);
        const double lam = eigenvalues(s, 4, P1).lambda;
        EXPECT_GT(lam, prev);
        prev = lam;
    }
}

TEST(Shock, BaseLimitAndRankineHugoniot)
{
    const FluidState b{1, 0};
    const auto [s0, sp0] = shock_state(b, 1, 1, 4, P1);
    EXPECT_EQ(s0.rho, 1);
    EXPECT_NEAR(sp0, eigenvalues(b, 4, P1).lambda, 1e-15);
    const auto [s, sp] = shock_state(b, 2, 1, 4, P1);
    EXPECT_LT(rh_residual(b, s, sp, 4, P1), 1e-12);
    // nu-form of the shock curve
    const double x = std::sqrt(nu(s.v) / nu(0));
    EXPECT_NEAR(x - 1 / x, -P1.chi * (std::sqrt(2.0) - std::sqrt(0.5)), 1e-13);
    const auto eb = eigenvalues(b, 4, P1), es = eigenvalues(s, 4, P1);
    EXPECT_GT(eb.lambda, sp);
    EXPECT_GT(sp, es.lambda);
    EXPECT_THROW(shock_state(b, 0.5, 1, 4, P1), domain_error);
}

TEST(Shock, SlopeBoundInInvariantPlane)
{
    const FluidState b{1, 0.2};
    const auto ib = riemann_invariants(b, P1);
    double pw = ib.w, pz = ib.z;
    for (double rho = 1.05; rho < 50; rho *= 1.05) {
        const auto iv = riemann_invariants(shock_state(b, rho, 1, 4, P1).first, P1);
        const double dw = iv.w - pw, dz = iv.z - pz;
        // along S1 both invariants decrease with z falling faster
        ASSERT_LT(dz, 0);
        EXPECT_GE(dw / dz, 0);
        EXPECT_LT(dw / dz, 1);
        pw = iv.w;
        pz = iv.z;
    }
}

TEST(Curves, SecondOrderContactAtBase)
{
    const FluidState b{1, 0.1};
    const double y0 = rapidity(b.v, P1);
    auto shock = [&](double l) { return rapidity(shock_state(b, std::exp(l), 1, 4, P1).first.v, P1) - y0; };
    auto rare = [&](double l) { return rapidity(rarefaction_state(b, std::exp(-l), 1, P1).v, P1) - y0; };
    // y(l) for l > 0 on the shock branch against the analytic continuation of the rarefaction branch y = -ck l
    for (double h : {1e-2, 5e-3}) {
        const double ds = shock(h), dr = -rare(h);
        EXPECT_LT(std::abs(ds - dr), 0.1 * h * h * h + 1e-15);
    }
}

TEST(Solve, TrivialAndSingleWave)
{
    const FluidState a{1.5, 0.2};
    const auto f = solve_riemann(a, a, 4, P1);
    EXPECT_EQ(f.wave1.kind, WaveKind::Null);
    EXPECT_EQ(f.wave2.kind, WaveKind::Null);
    EXPECT_EQ(f.strength(), 0);
    const auto [s, sp] = shock_state(a, 3, 1, 4, P1);
    const auto g = solve_riemann(a, s, 4, P1);
    EXPECT_EQ(g.wave1.kind, WaveKind::Shock);
    EXPECT_EQ(g.wave2.kind, WaveKind::Null);
    EXPECT_NEAR(g.middle.rho, s.rho, 1e-12);
    EXPECT_NEAR(g.wave1.speed(), sp, 1e-12);
}

TEST(Solve, FanOrderingAndStrengthDecomposition)
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 2000; ++i) {
        const FluidState l = random_state(rng), r = random_state(rng);
        const auto f = solve_riemann(l, r, 4, P1);
        EXPECT_LE(f.wave1.speed_lo, f.wave1.speed_hi);
        EXPECT_LE(f.wave1.speed_hi, f.wave2.speed_lo + 1e-14);
        EXPECT_NEAR(f.strength(), wave_strength(l, f.middle, r), 1e-13);
    }
}

TEST(Sample, RegionsAndFanInterior)
{
    const FluidState l{1, 0}, r{0.2, 0};
    const auto f = solve_riemann(l, r, 4, P1);
    ASSERT_EQ(f.wave1.kind, WaveKind::Rarefaction);
    EXPECT_EQ(sample_fan(f, -10).rho, l.rho);
    EXPECT_EQ(sample_fan(f, 10).rho, r.rho);
    const double mid = 0.5 * (f.wave1.speed_hi + f.wave2.speed_lo);
    EXPECT_EQ(sample_fan(f, mid).rho, f.middle.rho);
    for (int i = 1; i < 10; ++i) {
        const double xi = f.wave1.speed_lo + (f.wave1.speed_hi - f.wave1.speed_lo) * i / 10;
        EXPECT_NEAR(eigenvalues(sample_fan(f, xi), 4, P1).lambda, xi, 1e-10);
    }
    EXPECT_NEAR(sample_fan(f, f.wave1.speed_hi).rho, f.middle.rho, 1e-12);
    EXPECT_THROW(sample_fan(f, NAN), misuse_error);
}

TEST(Strength, Values)
{
    EXPECT_EQ(wave_strength({1, 0}, {1, 0}, {1, 0}), 0);
    EXPECT_NEAR(wave_strength({1, 0}, {std::exp(1.0), 0}, {1, 0}), 2, 1e-15);
}

TEST(Interaction, DegenerateSplits)
{
    const FluidState l{1, 0.3}, r{0.4, -0.2};
    const auto a = check_interaction(l, l, r, 4, P1);
    EXPECT_NEAR(a.lhs, a.rhs, 1e-14);
    const auto m = solve_riemann(l, r, 4, P1).middle;
    const auto b = check_interaction(l, m, r, 4, P1);
    EXPECT_NEAR(b.lhs, b.rhs, 1e-12);
}

TEST(Stiff, ContactsAndInvariants)
{
    const auto p = PhysParams::stiff(1, 1);
    const FluidState l{1, 0.2}, r{0.5, -0.1};
    const auto f = solve_riemann(l, r, 4, p);
    EXPECT_EQ(f.wave1.kind, WaveKind::Contact);
    EXPECT_EQ(f.wave1.speed(), -0.5);
    EXPECT_EQ(f.wave2.speed(), 0.5);
    EXPECT_NEAR(riemann_invariants(f.middle, p).w, riemann_invariants(l, p).w, 1e-13);
    EXPECT_NEAR(riemann_invariants(f.middle, p).z, riemann_invariants(r, p).z, 1e-13);
    const auto g = stiff_riemann(l, l, 4, p);
    EXPECT_EQ(g.strength(), 0);
    EXPECT_THROW(stiff_riemann(l, r, 4, P1), misuse_error);
}

TEST(Stiff, NearDegenerateGeneralSolverAgrees)
{
    const double eps = 1;
    const auto near = PhysParams::relativistic(eps, (1 / eps) * (1 - 1e-10), 1);
    const auto st = PhysParams::stiff(eps, 1);
    const FluidState l{1, 0.2}, r{0.5, -0.1};
    const auto a = solve_riemann(l, r, 4, near), b = solve_riemann(l, r, 4, st);
    EXPECT_NEAR(a.middle.rho, b.middle.rho, 1e-4);
    EXPECT_NEAR(a.middle.v, b.middle.v, 1e-4);
    EXPECT_NEAR(a.wave1.speed_lo, b.wave1.speed(), 1e-4);
    EXPECT_NEAR(a.wave2.speed_hi, b.wave2.speed(), 1e-4);
}

TEST(NonRel, ShockCurveValueAndLimit)
{
    const auto n = PhysParams::non_relativistic(0.3, 1);
    const FluidState b{1, 0};
    EXPECT_NEAR(nonrel_riemann_curves(b, 4, 1, CurveKind::Shock, n).v, -0.45, 1e-15);
    EXPECT_EQ(nonrel_riemann_curves(b, 1, 1, CurveKind::Shock, n).v, 0);
    const auto rel = PhysParams::relativistic(1e-5, 0.3, 0);
    for (double rho : {1.5, 4.0, 20.0})
        EXPECT_NEAR(shock_state(b, rho, 1, 1, rel).first.v, nonrel_riemann_curves(b, rho, 1, CurveKind::Shock, n).v,
                    1e-8);
    EXPECT_THROW(nonrel_riemann_curves(b, 4, 1, CurveKind::Shock, P1), misuse_error);
}

TEST(Solve, NearVacuumIsReported)
{
    EXPECT_THROW(solve_riemann({1, -0.999999}, {1, 0.999999}, 4, PhysParams::relativistic(1, 0.01, 1)), error);
}
