#include <bhflow/bhflow.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace bhflow;

namespace {

const PhysParams P1 = PhysParams::relativistic(1, 0.3, 1);

}

TEST(Params, DerivedConstants)
{
    const auto p = PhysParams::relativistic(0.5, 0.8, 2);
    const double e2 = 0.16;
    EXPECT_DOUBLE_EQ(p.kappa, (1 - e2) / (1 + e2));
    EXPECT_DOUBLE_EQ(p.chi, 2 * 0.4 / (1 + e2));
    EXPECT_DOUBLE_EQ(p.m, 8.0);
    EXPECT_GT(p.kappa, 0);
    EXPECT_LT(p.chi, 1);
    const auto s = PhysParams::stiff(2, 1);
    EXPECT_EQ(s.kind, ModelKind::Stiff);
    EXPECT_NEAR(s.kappa, 0, 1e-15);
    EXPECT_NEAR(s.chi, 1, 1e-15);
}

TEST(Params, RejectsBadInput)
{
    EXPECT_THROW(PhysParams::relativistic(1, 1.5, 1), config_error);
    EXPECT_THROW(PhysParams::relativistic(0, 0.3, 1), config_error);
    EXPECT_THROW(PhysParams::relativistic(1, 0.3, -1), config_error);
    EXPECT_THROW(PhysParams::non_relativistic(-0.3, 1), config_error);
    EXPECT_THROW(P1.check_radius(2.0), domain_error);
}

TEST(Eigen, RestStateIsSymmetric)
{
    const auto ev = eigenvalues({1, 0}, 4, P1);
    EXPECT_NEAR(ev.lambda, -0.15, 1e-15);
    EXPECT_NEAR(ev.mu, 0.15, 1e-15);
}

TEST(Eigen, SonicStateHasZeroLambda)
{
    for (double r : {2.5, 4.0, 100.0})
        EXPECT_NEAR(eigenvalues({3, 0.3}, r, P1).lambda, 0, 1e-16);
}

TEST(Eigen, VanishAtHorizonAndStayInsideLightCone)
{
    const auto ev = eigenvalues({1, 0.5}, 2 * (1 + 1e-12), P1);
    EXPECT_LT(std::abs(ev.lambda), 1e-11);
    EXPECT_LT(std::abs(ev.mu), 1e-11);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uv(-0.999, 0.999), ur(2.01, 50);
    for (int i = 0; i < 1000; ++i) {
        const double r = ur(rng);
        const auto e = eigenvalues({1, uv(rng)}, r, P1);
        const double a = 1 - 2 / r;
        EXPECT_LT(e.lambda, e.mu);
        EXPECT_GT(e.lambda, -a);
        EXPECT_LT(e.mu, a);
    }
}

TEST(Eigen, RejectsInadmissible)
{
    EXPECT_THROW(eigenvalues({1, 1.0}, 4, P1), domain_error);
    EXPECT_THROW(eigenvalues({-1, 0}, 4, P1), domain_error);
    EXPECT_THROW(eigenvalues({1, 0}, 1.5, P1), domain_error);
}

TEST(Invariants, HandValues)
{
    const auto p = PhysParams::relativistic(1, 0.5, 1);
    const auto a = riemann_invariants({1, 0}, p);
    EXPECT_EQ(a.w, 0);
    EXPECT_EQ(a.z, 0);
    const auto b = riemann_invariants({std::exp(1.0), 0}, p);
    EXPECT_NEAR(b.w, 0.4, 1e-15);
    EXPECT_NEAR(b.z, -0.4, 1e-15);
    const auto s = state_from_invariants({0.4, -0.4}, p);
    EXPECT_NEAR(s.rho, std::exp(1.0), 1e-15);
    EXPECT_NEAR(s.v, 0, 1e-16);
}

TEST(Invariants, RoundTripFuzz)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ul(-5, 5), uv(-0.99, 0.99);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const FluidState s{std::exp(ul(rng)), uv(rng)};
        const auto t = state_from_invariants(riemann_invariants(s, P1), P1);
        worst = std::max({worst, std::abs(t.rho - s.rho) / s.rho, std::abs(t.v - s.v)});
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(Invariants, DifferenceTracksDensity)
{
    const auto p = PhysParams::relativistic(0.7, 0.9, 1);
    for (double rho : {0.1, 1.0, 7.0}) {
        const auto iv = riemann_invariants({rho, 0.3}, p);
        EXPECT_NEAR(iv.w - iv.z, 2 * 0.9 / (1 + 0.49 * 0.81) * std::log(rho), 1e-14);
        EXPECT_EQ(iv.w >= iv.z, rho >= 1);
    }
}

TEST(Conserved, HandValues)
{
    const auto c = conserved({2, 0}, 4, P1);
    EXPECT_DOUBLE_EQ(c.u1, 32);
    EXPECT_DOUBLE_EQ(c.u2, 0);
    const auto f = flux({2, 0}, 4, P1);
    EXPECT_DOUBLE_EQ(f.u1, 0);
    EXPECT_NEAR(f.u2, 0.72, 1e-15);
    EXPECT_NEAR(source({2, 0}, 4, P1).u2, -0.37, 1e-15);
}

TEST(Conserved, NonRelativisticForm)
{
    const auto p = PhysParams::non_relativistic(0.3, 1);
    const FluidState s{1.7, -0.4};
    const auto c = conserved(s, 3, p);
    EXPECT_DOUBLE_EQ(c.u1, 9 * 1.7);
    EXPECT_DOUBLE_EQ(c.u2, 9 * 1.7 * -0.4);
}

TEST(Conserved, StiffFluxMatchesDirectSubstitution)
{
    const auto p = PhysParams::stiff(2, 1);
    const FluidState s{1.3, 0.2};
    const double r = 5, h = r - 2, d = 1 - 4 * 0.04;
    const auto f = flux(s, r, p);
    EXPECT_NEAR(f.u1, r * h * 2 * s.rho * s.v / d, 1e-14);
    EXPECT_NEAR(f.u2, h * h * (s.v * s.v + 0.25) * s.rho / d, 1e-14);
}

TEST(Conserved, InversionRoundTrip)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ul(-4, 4), uv(-0.98, 0.98), ur(2.1, 40);
    for (const auto& p : {P1, PhysParams::relativistic(0.3, 1.2, 2), PhysParams::non_relativistic(0.3, 1),
                          PhysParams::minkowski(1, 0.3)}) {
        double worst = 0;
        for (int i = 0; i < 2000; ++i) {
            const double r = p.planar() ? ur(rng) - 20 : ur(rng) + 2 * p.M;
            const FluidState s{std::exp(ul(rng)), uv(rng) / std::max(p.eps, 1.0)};
            const auto t = primitive_from_conserved(conserved(s, r, p), r, p);
            worst = std::max({worst, std::abs(t.rho - s.rho) / s.rho, std::abs(t.v - s.v)});
        }
        EXPECT_LT(worst, 1e-12);
    }
    EXPECT_THROW(primitive_from_conserved({-1, 0}, 4, P1), inversion_error);
    EXPECT_THROW(primitive_from_conserved({1, 100}, 4, P1), inversion_error);
}

TEST(Conserved, MinkowskiPlanarIsRadialWithoutWeights)
{
    const auto radial = PhysParams::relativistic(1, 0.3, 0);
    const auto planar = PhysParams::minkowski(1, 0.3);
    const FluidState s{2, 0.4};
    const double r = 3;
    EXPECT_NEAR(flux(s, r, radial).u2 / (r * r), flux(s, 0, planar).u2, 1e-14);
    EXPECT_EQ(source(s, 0, planar).u2, 0);
}

TEST(PressureLaw, Classification)
{
    EXPECT_EQ(classify_pressure_law(1, 0.3), PressureLaw::GenuinelyNonlinear);
    EXPECT_EQ(classify_pressure_law(1, 1), PressureLaw::LinearlyDegenerate);
    EXPECT_EQ(classify_pressure_law(0, 0.3), PressureLaw::GenuinelyNonlinear);
    EXPECT_EQ(classify_pressure_law(1, 0), PressureLaw::NonStrictlyHyperbolic);
}

// On a steady orbit w_t = z_t = 0, so mu w_r = sw and lambda z_r = sz.
TEST(CharacteristicSource, ConsistentWithSteadyOrbits)
{
    const auto o = make_global_orbit(make_base(10, 1, 0.05, P1), P1);
    for (double r : {3.0, 6.0, 15.0}) {
        const double h = 1e-5 * r;
        const auto wp = riemann_invariants(o.eval(r + h), P1), wm = riemann_invariants(o.eval(r - h), P1);
        const FluidState s = o.eval(r);
        const auto ev = eigenvalues(s, r, P1);
        const auto cs = characteristic_source(s, r, P1);
        EXPECT_NEAR(ev.mu * (wp.w - wm.w) / (2 * h), cs.sw, 1e-7 * (1 + std::abs(cs.sw)));
        EXPECT_NEAR(ev.lambda * (wp.z - wm.z) / (2 * h), cs.sz, 1e-7 * (1 + std::abs(cs.sz)));
    }
}

TEST(Nu, ScaledVelocity)
{
    EXPECT_NEAR(scaled_velocity_nu({1, 0}, P1), 0.5, 1e-16);
    EXPECT_THROW(scaled_velocity_nu({1, 0}, PhysParams::non_relativistic(0.3, 1)), misuse_error);
}
