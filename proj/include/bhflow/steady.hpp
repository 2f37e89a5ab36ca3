#pragma once

#include "errors.hpp"
#include "model.hpp"
#include "params.hpp"
#include "roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bhflow {

inline constexpr double critical_tolerance = 1e-10;

struct SteadyBase {
    double r0 = 0;
    double rho0 = 1;
    double v0 = 0;
    double d0 = 0; // mass-flux integral at the base
    double c0 = 0; // energy integral at the base
};

enum class SonicRegime { NoSonicPoint, CriticalSonic, TwoSonicPoints, SingleSonicPoint };

inline const char* to_string(SonicRegime r)
{
    switch (r) {
    case SonicRegime::NoSonicPoint: return "no_sonic_point";
    case SonicRegime::CriticalSonic: return "critical_sonic";
    case SonicRegime::TwoSonicPoints: return "two_sonic_points";
    case SonicRegime::SingleSonicPoint: return "single_sonic_point";
    }
    return "?";
}

struct SonicClassification {
    double p_value = std::numeric_limits<double>::infinity();
    SonicRegime regime = SonicRegime::NoSonicPoint;
    double r_under = std::numeric_limits<double>::quiet_NaN();
    double r_bar = std::numeric_limits<double>::quiet_NaN();
    double domain_lo = 0; // interval carrying the base branch
    double domain_hi = std::numeric_limits<double>::infinity();
};

enum class OrbitKind { Smooth, ContinuousSonicCrossing, ShockBearing, StiffClosedForm, Uniform };

inline const char* to_string(OrbitKind k)
{
    switch (k) {
    case OrbitKind::Smooth: return "smooth";
    case OrbitKind::ContinuousSonicCrossing: return "sonic_crossing";
    case OrbitKind::ShockBearing: return "shock_bearing";
    case OrbitKind::StiffClosedForm: return "stiff_closed_form";
    case OrbitKind::Uniform: return "uniform";
    }
    return "?";
}

namespace steady_detail {

inline double log_ratio(double x, double y)
{
    const double d = x - y;
    if (std::abs(d) < 0.5 * std::abs(y))
        return std::log1p(d / y);
    return std::log(x / y);
}

inline double log_cosh(double x)
{
    x = std::abs(x);
    return x + std::log1p(std::exp(-2 * x)) - std::log(2.0);
}

} // namespace steady_detail

// Velocity part of the steady energy relation, shifted so that g(k) = 0 and g >= 0.
inline double steady_g(double v, const PhysParams& p)
{
    const double k = p.k, dv = v - k;
    const bool near = std::abs(dv) < 0.5 * k;
    if (p.eps == 0) {
        if (near) {
            const double u = dv / k;
            return k * k * (u + 0.5 * u * u - std::log1p(u));
        }
        return 0.5 * dv * (v + k) - k * k * std::log(v / k);
    }
    const double e = p.eps * p.eps;
    const double t1 = near ? -std::log1p(-e * dv * (v + k) / (1 - p.e2))
                           : std::log(1 - p.e2) - std::log(lorentz_d(v, p));
    const double t2 = near ? -p.A() * std::log1p(dv / k) : p.A() * std::log(k / v);
    return t1 + t2;
}

// dg/dv
inline double steady_dg(double v, const PhysParams& p)
{
    if (p.eps == 0)
        return v - p.k * p.k / v;
    return 2 * p.eps * p.eps * v / lorentz_d(v, p) - p.A() / v;
}

// Radial part H(r) - H(rref).
inline double steady_dH(double r, double rref, const PhysParams& p)
{
    using steady_detail::log_ratio;
    if (p.eps == 0)
        return -2 * p.k * p.k * log_ratio(r, rref) + p.m * (r - rref) / (r * rref);
    const double a = 2 * p.A() + 1;
    if (p.M == 0)
        return -(a - 1) * log_ratio(r, rref);
    return -a * log_ratio(r, rref) + log_ratio(r - 2 * p.M, rref - 2 * p.M);
}

inline double steady_dHdr(double r, const PhysParams& p)
{
    if (p.eps == 0)
        return -2 * p.k * p.k / r + p.m / (r * r);
    return -(2 * p.A() + 1) / r + 1 / (r - 2 * p.M);
}

inline SteadyBase make_base(double r0, double rho0, double v0, const PhysParams& p)
{
    p.check_radius(r0);
    check_state({rho0, v0}, p);
    SteadyBase b{r0, rho0, v0, 0, 0};
    if (p.planar()) {
        b.d0 = rho0 * v0;
        b.c0 = rho0;
    } else if (p.eps == 0) {
        b.d0 = r0 * r0 * rho0 * v0;
        b.c0 = 0.5 * v0 * v0 + p.k * p.k * std::log(rho0) - p.m / r0;
    } else {
        b.d0 = r0 * r0 * std::pow(rho0, p.kappa) * v0;
        b.c0 = p.lapse(r0) * std::pow(rho0, p.one_minus_kappa) / lorentz_d(v0, p);
    }
    return b;
}

// Algebraic residual whose zero set is the steady velocity profile through the base.
inline double eval_G(double r, double v, const SteadyBase& b, const PhysParams& p)
{
    const double v0 = std::abs(b.v0);
    return steady_g(v, p) - steady_g(v0, p) + steady_dH(r, b.r0, p);
}

// P (eps = 0) or P_eps: positive iff the steady branch through (r0, v0) meets no sonic point.
inline double sonic_P(double r0, double v0, const PhysParams& p)
{
    using steady_detail::log_ratio;
    if (p.planar() || p.stiff_kind())
        throw misuse_error("sonic function is defined for the isothermal Schwarzschild models only");
    if ((p.eps == 0 && p.m == 0) || (p.eps > 0 && p.M == 0))
        return -std::numeric_limits<double>::infinity();
    const double k = p.k;
    if (p.eps == 0)
        return 1.5 + 2 * std::log(p.r_min() / r0) + std::log(k / v0) + (v0 * v0 - 2 * p.m / r0) / (2 * k * k);
    const double e = p.eps * p.eps;
    const double lev = e * v0 * v0 < 0.5 ? std::log1p(-e * v0 * v0) : std::log(lorentz_d(v0, p));
    const double lhz = 2 * p.M / r0 < 0.5 ? std::log1p(-2 * p.M / r0) : std::log((r0 - 2 * p.M) / r0);
    const double kk = (1 - p.e2) / (2 * p.e2); // kappa / (1 - kappa)
    return 2 * log_ratio(p.r_min(), r0) + std::log(k / v0) + kk * (std::log1p(3 * p.e2) + lhz - lev);
}

// dv/dr along a smooth branch
inline double steady_dvdr(double r, double v, const PhysParams& p) { return -steady_dHdr(r, p) / steady_dg(v, p); }

// Solve g(v) = target on the supersonic (sigma > 0) or subsonic branch.
inline double branch_velocity(double target, int sigma, const PhysParams& p)
{
    const double k = p.k;
    if (!(target > 0))
        return k;
    if (sigma < 0) {
        auto f = [&](double s) { return steady_g(std::exp(s), p) - target; };
        const double s0 = std::log(k);
        std::pair<double, double> br;
        try {
            br = roots::expand(f, s0, -0.5, std::log(1e-300), "subsonic branch");
        } catch (const numerical_error&) {
            throw range_error("subsonic steady velocity below 1e-300 (not representable)");
        }
        return std::exp(roots::bracketed(f, br.second, br.first, "subsonic branch"));
    }
    if (p.eps == 0) {
        auto f = [&](double s) { return steady_g(std::exp(s), p) - target; };
        auto br = roots::expand(f, std::log(k), 0.5, 700.0, "supersonic branch");
        return std::exp(roots::bracketed(f, br.first, br.second, "supersonic branch"));
    }
    // supersonic, relativistic: rapidity x = atanh(eps v) keeps 1 - eps^2 v^2 resolved
    const double xk = std::atanh(p.eps * k);
    auto gx = [&](double x) {
        const double v = std::tanh(x) / p.eps;
        if (std::abs(v - k) < 0.25 * k)
            return steady_g(v, p);
        return std::log(1 - p.e2) + 2 * steady_detail::log_cosh(x) + p.A() * std::log(k / v);
    };
    auto f = [&](double x) { return gx(x) - target; };
    auto br = roots::expand(f, xk, 0.5, 350.0, "supersonic branch");
    return std::tanh(roots::bracketed(f, br.first, br.second, "supersonic branch")) / p.eps;
}

// density from the mass-flux integral, given the velocity
inline double density_on_branch(double r, double v, double r0, double rho0, double v0, const PhysParams& p)
{
    using steady_detail::log_ratio;
    if (p.eps == 0)
        return rho0 * (r0 / r) * (r0 / r) * (v0 / v);
    return rho0 * std::exp((2 * log_ratio(r0, r) + log_ratio(v0, v)) / p.kappa);
}

struct OrbitPiece {
    enum class Law { Branch, Static, Stiff, Uniform };
    Law law = Law::Branch;
    double lo = 0;
    double hi = std::numeric_limits<double>::infinity();
    int sigma = -1;    // +1 supersonic, -1 subsonic
    double r_ref = 0;  // velocity relation: g(v) = g_ref - (H(r) - H(r_ref))
    double g_ref = 0;
    double r0 = 0, rho0 = 1, v0 = 0; // anchor of the density relation
};

class SteadyOrbit {
public:
    PhysParams p;
    SteadyBase base;
    SonicClassification classification;
    OrbitKind kind = OrbitKind::Smooth;
    std::optional<double> shock_radius;
    std::optional<double> sonic_radius;
    bool reflected = false;
    std::vector<OrbitPiece> pieces; // ascending in r

    double domain_lo() const { return pieces.empty() ? 0 : pieces.front().lo; }

    int piece_index(double r, bool left_limit = false) const
    {
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const auto& pc = pieces[i];
            const bool in = left_limit ? (r > pc.lo && r <= pc.hi) : (r >= pc.lo && r < pc.hi);
            if (in)
                return static_cast<int>(i);
        }
        return -1;
    }

    // right-continuous at a steady shock
    FluidState eval(double r) const { return eval_impl(r, false); }
    FluidState eval_left(double r) const { return eval_impl(r, true); }

    int branch_id(double r) const { return piece_index(r); }

    int sigma_at(double r) const
    {
        const int i = piece_index(r);
        return i < 0 ? 0 : pieces[static_cast<std::size_t>(i)].sigma;
    }

private:
    FluidState eval_impl(double r, bool left_limit) const
    {
        p.check_radius(r);
        int i = piece_index(r, left_limit);
        if (i < 0 && left_limit)
            i = piece_index(r, false);
        if (i < 0) {
            std::string msg = "radius " + std::to_string(r) + " outside the orbit's domain";
            if (std::isfinite(classification.r_bar))
                msg += " (sonic radius " + std::to_string(classification.r_bar) + ")";
            throw domain_error(msg);
        }
        FluidState s = eval_piece(pieces[static_cast<std::size_t>(i)], r);
        if (reflected)
            s.v = -s.v;
        check_state(s, p);
        return s;
    }

    FluidState eval_piece(const OrbitPiece& pc, double r) const
    {
        using steady_detail::log_ratio;
        switch (pc.law) {
        case OrbitPiece::Law::Uniform:
            return {pc.rho0, pc.v0};
        case OrbitPiece::Law::Stiff: {
            const double e = p.eps * p.eps;
            const double q = (pc.r0 / r) * (pc.r0 / r);
            const double v = q * pc.v0;
            const double rho = pc.rho0 * lorentz_d(v, p) / lorentz_d(pc.v0, p)
                             * ((pc.r0 - 2 * p.M) * r) / (pc.r0 * (r - 2 * p.M));
            (void)e;
            return {rho, v};
        }
        case OrbitPiece::Law::Static: {
            if (p.eps == 0)
                return {pc.rho0 * std::exp(p.m * (1 / r - 1 / pc.r0) / (p.k * p.k)), 0};
            const double ex = (1 + p.e2) / (2 * p.e2); // 1/(1-kappa)
            const double l = log_ratio(pc.r0 - 2 * p.M, r - 2 * p.M) + log_ratio(r, pc.r0);
            return {pc.rho0 * std::exp(ex * l), 0};
        }
        case OrbitPiece::Law::Branch:
            break;
        }
        const double target = pc.g_ref - steady_dH(r, pc.r_ref, p);
        const double v = branch_velocity(target, pc.sigma, p);
        return {density_on_branch(r, v, pc.r0, pc.rho0, pc.v0, p), v};
    }
};

using OrbitPtr = std::shared_ptr<const SteadyOrbit>;

inline SonicClassification classify(const SteadyBase& b, const PhysParams& p)
{
    const double v0 = std::abs(b.v0);
    if (!(v0 > 0))
        throw misuse_error("classification requires a moving base (v0 != 0)");
    if (v0 == p.k)
        throw misuse_error("classification requires a non-sonic base (v0 != k)");
    SonicClassification c;
    c.p_value = sonic_P(b.r0, v0, p);
    c.domain_lo = p.eps == 0 ? 0.0 : 2 * p.M;
    const double gv0 = steady_g(v0, p);
    if (c.p_value == -std::numeric_limits<double>::infinity()) {
        // no central mass: one sonic radius below the base
        const double lam = p.eps == 0 ? 2 * p.k * p.k : 2 * p.A();
        c.regime = SonicRegime::SingleSonicPoint;
        c.r_under = c.r_bar = b.r0 * std::exp(-gv0 / lam);
        c.domain_lo = c.r_bar;
        return c;
    }
    if (c.p_value > critical_tolerance)
        return c;
    const double rm = p.r_min();
    if (c.p_value >= -critical_tolerance) {
        c.regime = SonicRegime::CriticalSonic;
        c.r_under = c.r_bar = rm;
        if (b.r0 >= rm)
            c.domain_lo = rm;
        else
            c.domain_hi = rm;
        return c;
    }
    c.regime = SonicRegime::TwoSonicPoints;
    auto h = [&](double r) { return steady_dH(r, b.r0, p) - gv0; };
    // inner root: parametrize by ln(r - 2M) (or ln r) to resolve the horizon side
    const double shift = p.eps == 0 ? 0.0 : 2 * p.M;
    auto hin = [&](double u) { return h(shift + std::exp(u)); };
    const double u0 = std::log(rm - shift);
    // a sonic radius beyond double range is reported as the limit it approaches
    try {
        auto bi = roots::expand(hin, u0, -0.25, -700.0, "inner sonic point");
        c.r_under = shift + std::exp(roots::bracketed(hin, bi.second, bi.first, "inner sonic point"));
    } catch (const numerical_error&) {
        c.r_under = shift;
    }
    auto hout = [&](double u) { return h(std::exp(u)); };
    try {
        auto bo = roots::expand(hout, std::log(rm), 0.25, 700.0, "outer sonic point");
        c.r_bar = std::exp(roots::bracketed(hout, bo.first, bo.second, "outer sonic point"));
    } catch (const numerical_error&) {
        c.r_bar = std::numeric_limits<double>::infinity();
    }
    if (b.r0 >= rm)
        c.domain_lo = c.r_bar;
    else
        c.domain_hi = c.r_under;
    return c;
}

inline FluidState eval_smooth(double r, const SteadyBase& b, const SonicClassification& c, const PhysParams& p)
{
    p.check_radius(r);
    if (r < c.domain_lo || r > c.domain_hi) {
        const double rs = r < c.domain_lo ? c.domain_lo : c.domain_hi;
        throw domain_error("radius " + std::to_string(r) + " beyond the sonic radius " + std::to_string(rs));
    }
    const double v0 = std::abs(b.v0);
    const int sigma = v0 > p.k ? 1 : -1;
    const double target = steady_g(v0, p) - steady_dH(r, b.r0, p);
    const double v = branch_velocity(target, sigma, p);
    FluidState s{density_on_branch(r, v, b.r0, b.rho0, v0, p), v};
    if (b.v0 < 0)
        s.v = -s.v;
    return s;
}

inline FluidState eval_smooth(double r, const SteadyBase& b, const PhysParams& p)
{
    return eval_smooth(r, b, classify(b, p), p);
}

inline FluidState steady_jump(const FluidState& s, const PhysParams& p)
{
    if (s.v == 0)
        throw misuse_error("steady jump needs a moving state");
    const double k2 = p.k * p.k;
    const double vj = k2 / s.v;
    if (p.eps > 0 && std::abs(p.eps * vj) > 1 - velocity_guard)
        throw domain_error("steady jump leads to |eps v'| >= 1");
    const double q = (s.v / p.k) * (s.v / p.k);
    const double rho = p.eps == 0 ? s.rho * q : s.rho * lorentz_d(vj, p) / lorentz_d(s.v, p) * q;
    FluidState out{rho, vj};
    check_state(out, p);
    return out;
}

// Radius on the base branch where the jumped state becomes critical.
inline double critical_jump_radius(const SteadyBase& b, const SonicClassification& c, const PhysParams& p)
{
    if (c.regime != SonicRegime::TwoSonicPoints)
        throw misuse_error("critical jump radius requires two sonic points");
    const double v0 = std::abs(b.v0);
    const double rs = b.r0 >= p.r_min() ? c.r_bar : c.r_under;
    auto f = [&](double r) {
        const double v = eval_smooth(r, b, c, p).v;
        const double vj = p.k * p.k / std::abs(v);
        if (p.eps > 0 && p.eps * vj >= 1)
            return std::numeric_limits<double>::max();
        return sonic_P(r, vj, p);
    };
    const double fs = f(rs), f0 = f(b.r0);
    (void)v0;
    if (!(fs < 0 && f0 > 0))
        throw numerical_error("critical jump radius: no sign change between the base and the sonic point");
    return roots::bracketed(f, std::min(rs, b.r0), std::max(rs, b.r0), rs < b.r0 ? fs : f0, rs < b.r0 ? f0 : fs,
                            "critical jump radius");
}

inline double critical_jump_radius(const SteadyBase& b, const PhysParams& p)
{
    return critical_jump_radius(b, classify(b, p), p);
}

namespace steady_detail {

inline OrbitPiece branch_piece(double lo, double hi, int sigma, double r_ref, double g_ref, double r0, double rho0,
                               double v0)
{
    OrbitPiece pc;
    pc.law = OrbitPiece::Law::Branch;
    pc.lo = lo;
    pc.hi = hi;
    pc.sigma = sigma;
    pc.r_ref = r_ref;
    pc.g_ref = g_ref;
    pc.r0 = r0;
    pc.rho0 = rho0;
    pc.v0 = v0;
    return pc;
}

} // namespace steady_detail

// Globally defined equilibrium through the base: smooth, sonic-crossing, or with one steady shock.
inline SteadyOrbit make_global_orbit(const SteadyBase& base, const PhysParams& p)
{
    using steady_detail::branch_piece;
    SteadyOrbit o;
    o.p = p;
    o.base = base;
    p.check_radius(base.r0);
    check_state({base.rho0, base.v0}, p);
    const double inf = std::numeric_limits<double>::infinity();
    const double lo = p.planar() ? -inf : (p.eps == 0 ? 0.0 : 2 * p.M);
    o.classification.domain_lo = lo;

    if (p.planar()) {
        o.kind = OrbitKind::Uniform;
        OrbitPiece pc;
        pc.law = OrbitPiece::Law::Uniform;
        pc.lo = -inf;
        pc.rho0 = base.rho0;
        pc.v0 = base.v0;
        o.pieces.push_back(pc);
        return o;
    }
    o.reflected = base.v0 < 0;
    double v0 = std::abs(base.v0);
    const double rho0 = base.rho0, r0 = base.r0;

    if (p.stiff_kind()) {
        o.kind = OrbitKind::StiffClosedForm;
        OrbitPiece pc;
        pc.law = OrbitPiece::Law::Stiff;
        pc.lo = lo;
        pc.r0 = r0;
        pc.rho0 = rho0;
        pc.v0 = v0;
        o.pieces.push_back(pc);
        return o;
    }
    if (v0 == 0) {
        OrbitPiece pc;
        pc.law = OrbitPiece::Law::Static;
        pc.lo = lo;
        pc.r0 = r0;
        pc.rho0 = rho0;
        o.pieces.push_back(pc);
        return o;
    }
    // an exactly sonic base is moved onto the supersonic side
    if (std::abs(v0 - p.k) <= 1e-12 * p.k)
        v0 = p.k * (1 + 1e-9);

    const double gv0 = steady_g(v0, p);
    const int sigma = v0 > p.k ? 1 : -1;
    SteadyBase ab = base;
    ab.v0 = v0;
    o.classification = classify(ab, p);
    const auto& c = o.classification;

    switch (c.regime) {
    case SonicRegime::NoSonicPoint:
        o.kind = OrbitKind::Smooth;
        o.pieces.push_back(branch_piece(lo, inf, sigma, r0, gv0, r0, rho0, v0));
        return o;
    case SonicRegime::SingleSonicPoint:
        o.kind = OrbitKind::Smooth;
        o.pieces.push_back(branch_piece(c.r_bar, inf, sigma, r0, gv0, r0, rho0, v0));
        return o;
    case SonicRegime::CriticalSonic: {
        const double rs = p.r_min();
        o.kind = OrbitKind::ContinuousSonicCrossing;
        o.sonic_radius = rs;
        const int inner = r0 >= rs ? -sigma : sigma;
        o.pieces.push_back(branch_piece(lo, rs, inner, r0, gv0, r0, rho0, v0));
        o.pieces.push_back(branch_piece(rs, inf, -inner, r0, gv0, r0, rho0, v0));
        return o;
    }
    case SonicRegime::TwoSonicPoints:
        break;
    }

    const double rs = p.r_min();
    const double r1 = critical_jump_radius(ab, c, p);
    const FluidState u1 = eval_smooth(r1, ab, c, p);
    const FluidState uj = steady_jump(u1, p);
    const double gj = steady_g(uj.v, p);
    o.kind = OrbitKind::ShockBearing;
    o.shock_radius = r1;
    o.sonic_radius = rs;
    if (r1 >= rs) {
        o.pieces.push_back(branch_piece(lo, rs, sigma, r1, gj, r1, uj.rho, uj.v));
        o.pieces.push_back(branch_piece(rs, r1, -sigma, r1, gj, r1, uj.rho, uj.v));
        o.pieces.push_back(branch_piece(r1, inf, sigma, r0, gv0, r0, rho0, v0));
    } else {
        o.pieces.push_back(branch_piece(lo, r1, sigma, r0, gv0, r0, rho0, v0));
        o.pieces.push_back(branch_piece(r1, rs, -sigma, r1, gj, r1, uj.rho, uj.v));
        o.pieces.push_back(branch_piece(rs, inf, sigma, r1, gj, r1, uj.rho, uj.v));
    }
    return o;
}

inline OrbitPtr make_orbit_ptr(const SteadyBase& base, const PhysParams& p)
{
    return std::make_shared<const SteadyOrbit>(make_global_orbit(base, p));
}

inline FluidState eval_orbit(const SteadyOrbit& o, double r) { return o.eval(r); }

inline FluidState eval_sonic_crossing(double r, const SteadyBase& b, const PhysParams& p)
{
    const auto o = make_global_orbit(b, p);
    if (o.kind != OrbitKind::ContinuousSonicCrossing)
        throw misuse_error("base data are not critical (P = " + std::to_string(o.classification.p_value) + ")");
    return o.eval(r);
}

inline FluidState stiff_steady(double r, const SteadyBase& b, const PhysParams& p)
{
    if (!p.stiff_kind())
        throw misuse_error("stiff closed form requires k = 1/eps");
    return make_global_orbit(b, p).eval(r);
}

inline SteadyOrbit nonrel_orbit(const SteadyBase& b, const PhysParams& p)
{
    if (p.eps != 0)
        throw misuse_error("non-relativistic orbit requires eps = 0");
    return make_global_orbit(b, p);
}

// Two global orbits glued by a steady shock at rs (left part below rs).
inline SteadyOrbit join_at_shock(const SteadyOrbit& left, const SteadyOrbit& right, double rs)
{
    const auto& p = left.p;
    const FluidState ul = left.eval_left(rs), ur = right.eval(rs);
    const FluidState uj = steady_jump(ul, p);
    if (std::abs(uj.v - ur.v) > 1e-10 * std::abs(ur.v) || std::abs(uj.rho - ur.rho) > 1e-10 * ur.rho)
        throw misuse_error("states at the junction do not satisfy the steady jump relation");
    if (left.reflected != right.reflected)
        throw misuse_error("orbits with opposite flow directions cannot be joined");
    SteadyOrbit o = left;
    o.kind = OrbitKind::ShockBearing;
    o.shock_radius = rs;
    o.pieces.clear();
    for (auto pc : left.pieces)
        if (pc.lo < rs) {
            pc.hi = std::min(pc.hi, rs);
            o.pieces.push_back(pc);
        }
    for (auto pc : right.pieces)
        if (pc.hi > rs) {
            pc.lo = std::max(pc.lo, rs);
            o.pieces.push_back(pc);
        }
    return o;
}

struct IntegralResiduals {
    double mass = 0;   // relative residual of the mass-flux integral
    double energy = 0; // relative residual of the energy integral
};

// residuals of both first integrals at r, relative to the constants of the given anchor
inline IntegralResiduals first_integral_residuals(const FluidState& s, double r, const SteadyBase& b,
                                                  const PhysParams& p)
{
    const SteadyBase here = make_base(r, s.rho, s.v, p);
    IntegralResiduals out;
    out.mass = b.d0 == 0 ? std::abs(here.d0) : std::abs(here.d0 - b.d0) / std::abs(b.d0);
    if (p.eps == 0) {
        const double scale = 0.5 * s.v * s.v + p.k * p.k * std::abs(std::log(s.rho)) + p.m / r + p.k * p.k;
        out.energy = std::abs(here.c0 - b.c0) / scale;
    } else {
        out.energy = std::abs(here.c0 - b.c0) / std::abs(b.c0);
    }
    return out;
}

} // namespace bhflow
