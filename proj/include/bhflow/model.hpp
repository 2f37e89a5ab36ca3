#pragma once

#include "errors.hpp"
#include "params.hpp"

#include <array>
#include <cmath>
#include <string>

namespace bhflow {

struct FluidState {
    double rho = 1;
    double v = 0;
};

struct ConservedPair {
    double u1 = 0;
    double u2 = 0;
};

struct InvariantPair {
    double w = 0;
    double z = 0;
};

struct WaveSpeeds {
    double lambda = 0;
    double mu = 0;
};

enum class PressureLaw { GenuinelyNonlinear, LinearlyDegenerate, NonStrictlyHyperbolic };

inline constexpr double velocity_guard = 1e-12;
inline constexpr double density_floor = 1e-300;

inline bool admissible(const FluidState& s, const PhysParams& p)
{
    if (!std::isfinite(s.rho) || !std::isfinite(s.v) || !(s.rho >= density_floor))
        return false;
    return p.eps == 0 || std::abs(p.eps * s.v) <= 1 - velocity_guard;
}

inline void check_state(const FluidState& s, const PhysParams& p)
{
    if (!admissible(s, p))
        throw domain_error("inadmissible state rho=" + std::to_string(s.rho) + " v=" + std::to_string(s.v));
}

// 1 - eps^2 v^2 without cancellation near the light cone
inline double lorentz_d(double v, const PhysParams& p)
{
    const double ev = p.eps * v;
    return (1 - ev) * (1 + ev);
}

// atanh(eps v)/eps: the velocity part of both invariants, v itself when eps = 0
inline double rapidity(double v, const PhysParams& p)
{
    if (p.eps == 0)
        return v;
    return std::atanh(p.eps * v) / p.eps;
}

inline double velocity_from_rapidity(double y, const PhysParams& p)
{
    if (p.eps == 0)
        return y;
    return std::tanh(p.eps * y) / p.eps;
}

inline WaveSpeeds eigenvalues(const FluidState& s, double r, const PhysParams& p)
{
    check_state(s, p);
    p.check_radius(r);
    const double a = p.lapse(r);
    const double ek = p.eps * p.eps * p.k;
    return {a * (s.v - p.k) / (1 - ek * s.v), a * (s.v + p.k) / (1 + ek * s.v)};
}

inline InvariantPair riemann_invariants(const FluidState& s, const PhysParams& p)
{
    check_state(s, p);
    const double y = rapidity(s.v, p);
    const double l = p.ck * std::log(s.rho);
    return {y + l, y - l};
}

inline FluidState state_from_invariants(const InvariantPair& iv, const PhysParams& p)
{
    if (!std::isfinite(iv.w) || !std::isfinite(iv.z))
        throw range_error("non-finite Riemann invariants");
    const double lnrho = (iv.w - iv.z) / (2 * p.ck);
    if (lnrho > 709 || lnrho < std::log(density_floor))
        throw range_error("density exp(" + std::to_string(lnrho) + ") not representable");
    FluidState s{std::exp(lnrho), velocity_from_rapidity(0.5 * (iv.w + iv.z), p)};
    if (!admissible(s, p))
        throw range_error("invariants map outside the admissible velocity band");
    return s;
}

// (1/2eps)(1+eps v)/(1-eps v)
inline double scaled_velocity_nu(const FluidState& s, const PhysParams& p)
{
    if (p.eps == 0)
        throw misuse_error("nu is undefined for eps = 0");
    const double ev = p.eps * s.v;
    return (1 + ev) / (2 * p.eps * (1 - ev));
}

namespace detail {

// radial weights of U1, of (U2, F1) and of F2, with their r-derivatives
struct Weights {
    double ga, gb, gc;
    double dgb, dgc;
};

inline Weights weights(double r, const PhysParams& p)
{
    if (p.planar())
        return {1, 1, 1, 0, 0};
    const double h = r - 2 * p.M;
    return {r * r, r * h, h * h, 2 * r - 2 * p.M, 2 * h};
}

} // namespace detail

inline ConservedPair conserved(const FluidState& s, double r, const PhysParams& p)
{
    check_state(s, p);
    p.check_radius(r);
    const auto g = detail::weights(r, p);
    const double d = lorentz_d(s.v, p);
    const double e2v2 = p.eps * p.eps * p.e2 * s.v * s.v;
    return {g.ga * (1 + e2v2) * s.rho / d, g.gb * (1 + p.e2) * s.rho * s.v / d};
}

inline ConservedPair flux(const FluidState& s, double r, const PhysParams& p)
{
    check_state(s, p);
    p.check_radius(r);
    const auto g = detail::weights(r, p);
    const double d = lorentz_d(s.v, p);
    return {g.gb * (1 + p.e2) * s.rho * s.v / d, g.gc * (s.v * s.v + p.k * p.k) * s.rho / d};
}

inline ConservedPair source(const FluidState& s, double r, const PhysParams& p)
{
    check_state(s, p);
    p.check_radius(r);
    if (p.planar())
        return {0, 0};
    const double k2 = p.k * p.k;
    if (p.eps == 0)
        return {0, 2 * k2 * r * s.rho - p.m * s.rho};
    const double d = lorentz_d(s.v, p);
    const double h = r - 2 * p.M;
    const double e2v2 = p.eps * p.eps * p.e2 * s.v * s.v;
    // stiff closes k^2 = 1/eps^2 exactly
    const double kk = p.stiff_kind() ? 1 / (p.eps * p.eps) : k2;
    const double s2 = 3 * p.M * (h / r) * (s.v * s.v + kk) * s.rho / d
                    - p.m * (h / r) * (1 + e2v2) * s.rho / d
                    + 2 * h * h * kk * s.rho / r;
    return {0, s2};
}

inline FluidState primitive_from_conserved(const ConservedPair& c, double r, const PhysParams& p)
{
    p.check_radius(r);
    if (!(c.u1 > 0) || !std::isfinite(c.u1) || !std::isfinite(c.u2))
        throw inversion_error("first conserved density must be positive and finite");
    const auto g = detail::weights(r, p);
    // u2/u1 = (gb/ga)(1+e2) v / (1 + eps^2 e2 v^2)
    const double q = (c.u2 / c.u1) * g.ga / (g.gb * (1 + p.e2));
    const double b = p.eps * p.eps * p.e2;
    double v = q;
    if (b > 0) {
        const double disc = 1 - 4 * q * q * b;
        if (disc < 0)
            throw inversion_error("conserved pair implies a superluminal velocity");
        v = 2 * q / (1 + std::sqrt(disc));
    }
    if (p.eps > 0 && std::abs(p.eps * v) > 1 - velocity_guard)
        throw inversion_error("conserved pair implies |eps v| >= 1");
    const double d = lorentz_d(v, p);
    FluidState s{c.u1 * d / (g.ga * (1 + b * v * v)), v};
    if (!(s.rho >= density_floor))
        throw inversion_error("recovered density below floor");
    return s;
}

inline PressureLaw classify_pressure_law(double eps, double k)
{
    if (k == 0)
        return PressureLaw::NonStrictlyHyperbolic;
    if (eps > 0 && std::abs(eps * k - 1) <= 1e-14)
        return PressureLaw::LinearlyDegenerate;
    return PressureLaw::GenuinelyNonlinear;
}

inline PressureLaw classify_pressure_law(const PhysParams& p) { return classify_pressure_law(p.eps, p.k); }

inline const char* to_string(PressureLaw l)
{
    switch (l) {
    case PressureLaw::GenuinelyNonlinear: return "genuinely_nonlinear";
    case PressureLaw::LinearlyDegenerate: return "linearly_degenerate";
    case PressureLaw::NonStrictlyHyperbolic: return "non_strictly_hyperbolic";
    }
    return "?";
}

using Mat2 = std::array<std::array<double, 2>, 2>;

// dU/d(rho, v) and dF/d(rho, v) at fixed r
inline std::array<Mat2, 2> state_jacobians(const FluidState& s, double r, const PhysParams& p)
{
    const auto g = detail::weights(r, p);
    const double d = lorentz_d(s.v, p);
    const double e = p.eps * p.eps;
    const double kk = p.stiff_kind() ? 1 / e : p.k * p.k;
    Mat2 a{}, b{};
    a[0][0] = g.ga * (1 + e * p.e2 * s.v * s.v) / d;
    a[0][1] = g.ga * s.rho * 2 * e * s.v * (1 + p.e2) / (d * d);
    a[1][0] = g.gb * (1 + p.e2) * s.v / d;
    a[1][1] = g.gb * (1 + p.e2) * s.rho * (1 + e * s.v * s.v) / (d * d);
    b[0] = a[1];
    b[1][0] = g.gc * (s.v * s.v + kk) / d;
    b[1][1] = g.gc * s.rho * 2 * s.v * (1 + p.e2) / (d * d);
    return {a, b};
}

struct CharSource {
    double sw = 0; // dw/dt along mu-characteristics
    double sz = 0; // dz/dt along lambda-characteristics
};

// w is carried at speed mu and z at speed lambda; the balance law in these
// coordinates reads w_t + mu w_r = sw, z_t + lambda z_r = sz.
inline CharSource characteristic_source(const FluidState& s, double r, const PhysParams& p)
{
    if (p.planar())
        return {};
    const auto g = detail::weights(r, p);
    const double d = lorentz_d(s.v, p);
    const double kk = p.stiff_kind() ? 1 / (p.eps * p.eps) : p.k * p.k;
    const auto src = source(s, r, p);
    const double t1 = -g.dgb * (1 + p.e2) * s.rho * s.v / d;
    const double t2 = src.u2 - g.dgc * (s.v * s.v + kk) * s.rho / d;
    const auto a = state_jacobians(s, r, p)[0];
    const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    const double srho = (a[1][1] * t1 - a[0][1] * t2) / det;
    const double sv = (a[0][0] * t2 - a[1][0] * t1) / det;
    const double gr = p.ck / s.rho;
    return {gr * srho + sv / d, -gr * srho + sv / d};
}

} // namespace bhflow
