#pragma once

#include "errors.hpp"
#include "model.hpp"
#include "params.hpp"
#include "roots.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace bhflow {

enum class WaveKind { Shock, Rarefaction, Contact, Null };

inline const char* to_string(WaveKind k)
{
    switch (k) {
    case WaveKind::Shock: return "shock";
    case WaveKind::Rarefaction: return "rarefaction";
    case WaveKind::Contact: return "contact";
    case WaveKind::Null: return "null";
    }
    return "?";
}

enum class CurveKind { Shock, Rarefaction };

struct WaveDescriptor {
    int family = 1;
    WaveKind kind = WaveKind::Null;
    double speed_lo = 0; // equal to speed_hi except for rarefactions
    double speed_hi = 0;
    FluidState left_state, right_state;

    double speed() const { return speed_lo; }
    double strength() const { return std::abs(std::log(right_state.rho / left_state.rho)); }
};

struct RiemannFan {
    double r0 = 0;
    PhysParams p;
    FluidState left, middle, right;
    WaveDescriptor wave1, wave2;

    double strength() const { return wave1.strength() + wave2.strength(); }
};

inline constexpr double zero_strength = 1e-14;

namespace riemann_detail {

// rapidity change along the shock branch for l = ln(rho/rho_base) > 0
inline double shock_rapidity_jump(double l, const PhysParams& p)
{
    if (p.eps == 0)
        return 2 * p.k * std::sinh(0.5 * l);
    return std::asinh(p.chi * std::sinh(0.5 * l)) / p.eps;
}

// rapidity on W1 through the left base (family 1) or on W2 through the right base
// (family 2), as a function of l = ln(rho/rho_base)
inline double curve_rapidity(double y_base, double l, int family, const PhysParams& p)
{
    const double dy = l <= 0 ? p.ck * l : shock_rapidity_jump(l, p);
    return family == 1 ? y_base - dy : y_base + dy;
}

inline void check_family(int family)
{
    if (family != 1 && family != 2)
        throw misuse_error("wave family must be 1 or 2");
}

} // namespace riemann_detail

// Shock speed between a base state and a state on its shock branch (lab frame at r0).
inline double shock_speed(const FluidState& base, const FluidState& s, int family, double r0, const PhysParams& p)
{
    const double l = std::log(s.rho / base.rho);
    const double a = p.lapse(r0);
    if (std::abs(l) < zero_strength) {
        const auto ev = eigenvalues(base, r0, p);
        return family == 1 ? ev.lambda : ev.mu;
    }
    const double dy = rapidity(s.v, p) - rapidity(base.v, p);
    const double q = p.eps == 0 ? dy : std::sinh(p.eps * dy) / p.eps;
    const double y = q * q / -std::expm1(-std::abs(l));
    const double e = p.eps * p.eps;
    double sp = std::sqrt(((1 + p.e2) * y + p.k * p.k) / (e * (1 + p.e2) * y + 1));
    if (p.stiff_kind())
        sp = 1 / p.eps;
    if (family == 1)
        sp = -sp;
    const double sig = (sp + base.v) / (1 + e * sp * base.v);
    return a * sig;
}

inline FluidState rarefaction_state(const FluidState& base, double rho, int family, const PhysParams& p)
{
    riemann_detail::check_family(family);
    check_state(base, p);
    if (!(rho > 0))
        throw domain_error("density must be positive");
    if (rho > base.rho)
        throw domain_error("rarefaction half-curve requires rho <= rho_base");
    const double l = std::log(rho / base.rho);
    const double y = riemann_detail::curve_rapidity(rapidity(base.v, p), l, family, p);
    FluidState s{rho, velocity_from_rapidity(y, p)};
    check_state(s, p);
    return s;
}

inline std::pair<FluidState, double> shock_state(const FluidState& base, double rho, int family, double r0,
                                                 const PhysParams& p)
{
    riemann_detail::check_family(family);
    check_state(base, p);
    if (rho < base.rho)
        throw domain_error("shock half-curve requires rho >= rho_base");
    const double l = std::log(rho / base.rho);
    const double y = riemann_detail::curve_rapidity(rapidity(base.v, p), l, family, p);
    FluidState s{rho, velocity_from_rapidity(y, p)};
    check_state(s, p);
    return {s, shock_speed(base, s, family, r0, p)};
}

// Point of the family's wave curve at density rho, choosing the branch by rho.
inline FluidState wave_curve_state(const FluidState& base, double rho, int family, const PhysParams& p)
{
    riemann_detail::check_family(family);
    const double l = std::log(rho / base.rho);
    const double y = riemann_detail::curve_rapidity(rapidity(base.v, p), l, family, p);
    return {rho, velocity_from_rapidity(y, p)};
}

// Relative Rankine-Hugoniot defect of a jump a|b moving at `speed` in the frozen system at r0.
inline double rh_residual(const FluidState& a, const FluidState& b, double speed, double r0, const PhysParams& p)
{
    const auto ua = conserved(a, r0, p), ub = conserved(b, r0, p);
    const auto fa = flux(a, r0, p), fb = flux(b, r0, p);
    const double s = std::abs(speed);
    const double d1 = std::abs(speed * (ub.u1 - ua.u1) - (fb.u1 - fa.u1));
    const double d2 = std::abs(speed * (ub.u2 - ua.u2) - (fb.u2 - fa.u2));
    const double n1 = s * (std::abs(ua.u1) + std::abs(ub.u1)) + std::abs(fa.u1) + std::abs(fb.u1);
    const double n2 = s * (std::abs(ua.u2) + std::abs(ub.u2)) + std::abs(fa.u2) + std::abs(fb.u2);
    return std::max(d1 / n1, d2 / n2);
}

namespace riemann_detail {

inline WaveDescriptor make_wave(int family, const FluidState& l, const FluidState& r, double r0, const PhysParams& p)
{
    WaveDescriptor w;
    w.family = family;
    w.left_state = l;
    w.right_state = r;
    const FluidState& base = family == 1 ? l : r;
    const FluidState& other = family == 1 ? r : l;
    const double lr = std::log(other.rho / base.rho);
    const auto eb = eigenvalues(base, r0, p);
    const double cb = family == 1 ? eb.lambda : eb.mu;
    if (std::abs(lr) < zero_strength) {
        w.kind = WaveKind::Null;
        w.speed_lo = w.speed_hi = cb;
        return w;
    }
    if (p.stiff_kind()) {
        w.kind = WaveKind::Contact;
        w.speed_lo = w.speed_hi = cb;
        return w;
    }
    if (lr > 0) {
        w.kind = WaveKind::Shock;
        w.speed_lo = w.speed_hi = shock_speed(base, other, family, r0, p);
        return w;
    }
    w.kind = WaveKind::Rarefaction;
    const auto el = eigenvalues(l, r0, p), er = eigenvalues(r, r0, p);
    w.speed_lo = family == 1 ? el.lambda : el.mu;
    w.speed_hi = family == 1 ? er.lambda : er.mu;
    return w;
}

} // namespace riemann_detail

inline RiemannFan stiff_riemann(const FluidState& left, const FluidState& right, double r0, const PhysParams& p)
{
    if (!p.stiff_kind())
        throw misuse_error("stiff Riemann solver requires k = 1/eps");
    check_state(left, p);
    check_state(right, p);
    p.check_radius(r0);
    const auto il = riemann_invariants(left, p), ir = riemann_invariants(right, p);
    RiemannFan f;
    f.r0 = r0;
    f.p = p;
    f.left = left;
    f.right = right;
    f.middle = state_from_invariants({il.w, ir.z}, p);
    f.wave1 = riemann_detail::make_wave(1, left, f.middle, r0, p);
    f.wave2 = riemann_detail::make_wave(2, f.middle, right, r0, p);
    return f;
}

inline RiemannFan solve_riemann(const FluidState& left, const FluidState& right, double r0, const PhysParams& p)
{
    check_state(left, p);
    check_state(right, p);
    p.check_radius(r0);
    if (p.stiff_kind())
        return stiff_riemann(left, right, r0, p);
    using riemann_detail::curve_rapidity;
    const double yl = rapidity(left.v, p), yr = rapidity(right.v, p);
    const double ll = std::log(left.rho), lr = std::log(right.rho);
    // decreasing in x = ln rho_M
    auto f = [&](double x) { return curve_rapidity(yl, x - ll, 1, p) - curve_rapidity(yr, x - lr, 2, p); };
    const double x0 = 0.5 * (ll + lr);
    const double f0 = f(x0);
    double xm = x0;
    if (f0 != 0) {
        const double vac = std::log(1e-250);
        try {
            auto br = f0 > 0 ? roots::expand(f, x0, 0.5, 709.0, "middle state")
                             : roots::expand(f, x0, -0.5, vac, "middle state");
            xm = roots::bracketed(f, std::min(br.first, br.second), std::max(br.first, br.second), "middle state");
        } catch (const numerical_error&) {
            if (f0 < 0)
                throw numerical_error("middle state density below 1e-250 (near vacuum)");
            throw;
        }
    }
    RiemannFan fan;
    fan.r0 = r0;
    fan.p = p;
    fan.left = left;
    fan.right = right;
    fan.middle = {std::exp(xm), velocity_from_rapidity(curve_rapidity(yl, xm - ll, 1, p), p)};
    check_state(fan.middle, p);
    // snap exactly onto a base when the wave has no strength
    if (std::abs(xm - ll) < zero_strength && std::abs(fan.middle.v - left.v) <= 1e-15 * (1 + std::abs(left.v)))
        fan.middle = left;
    fan.wave1 = riemann_detail::make_wave(1, left, fan.middle, r0, p);
    fan.wave2 = riemann_detail::make_wave(2, fan.middle, right, r0, p);
    return fan;
}

inline FluidState sample_fan(const RiemannFan& fan, double xi)
{
    const auto& p = fan.p;
    if (!std::isfinite(xi))
        throw misuse_error("self-similar variable must be finite");
    const double a = p.lapse(fan.r0);
    const double e = p.eps * p.eps;
    const auto& w1 = fan.wave1;
    const auto& w2 = fan.wave2;
    if (xi < w1.speed_lo)
        return fan.left;
    if (w1.kind == WaveKind::Rarefaction && xi <= w1.speed_hi) {
        const double x = std::clamp(xi, w1.speed_lo, w1.speed_hi) / a;
        const double v = (x + p.k) / (1 + e * p.k * x);
        const double wl = riemann_invariants(fan.left, p).w;
        return {std::exp((wl - rapidity(v, p)) / p.ck), v};
    }
    if (xi < w2.speed_lo)
        return fan.middle;
    if (w2.kind == WaveKind::Rarefaction && xi <= w2.speed_hi) {
        const double x = std::clamp(xi, w2.speed_lo, w2.speed_hi) / a;
        const double v = (x - p.k) / (1 - e * p.k * x);
        const double zr = riemann_invariants(fan.right, p).z;
        return {std::exp((rapidity(v, p) - zr) / p.ck), v};
    }
    return fan.right;
}

inline double wave_strength(const FluidState& left, const FluidState& middle, const FluidState& right)
{
    return std::abs(std::log(left.rho) - std::log(middle.rho)) + std::abs(std::log(right.rho) - std::log(middle.rho));
}

struct InteractionCheck {
    double lhs = 0;
    double rhs = 0;
};

inline InteractionCheck check_interaction(const FluidState& left, const FluidState& star, const FluidState& right,
                                          double r0, const PhysParams& p)
{
    const auto f = solve_riemann(left, right, r0, p);
    const auto a = solve_riemann(left, star, r0, p);
    const auto b = solve_riemann(star, right, r0, p);
    return {f.strength(), a.strength() + b.strength()};
}

inline FluidState nonrel_riemann_curves(const FluidState& base, double rho, int family, CurveKind kind,
                                        const PhysParams& p)
{
    if (p.eps != 0)
        throw misuse_error("non-relativistic wave curves require eps = 0");
    if (kind == CurveKind::Rarefaction)
        return rarefaction_state(base, rho, family, p);
    return shock_state(base, rho, family, 1.0, p).first;
}

} // namespace bhflow
