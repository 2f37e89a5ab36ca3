#pragma once

#include "errors.hpp"
#include "model.hpp"
#include "params.hpp"
#include "riemann.hpp"
#include "steady.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace bhflow {

struct GrpOptions {
    bool frozen_fan_only = false;
    int fan_knots = 32;
    int fan_steps = 8;
    int max_halvings = 6;
    // half-width of the window searched for a steady shock joining the two orbits (0: off)
    double steady_window = 0;
};

// Corrected rarefaction fan on the rays r = r0 + eta (t - t0); values are
// deviations in (w, z) from the frozen self-similar fan.
struct FanTable {
    int family = 1;
    double eta0 = 0, eta1 = 0;
    std::vector<double> eta;
    std::vector<double> tau;
    std::vector<InvariantPair> frozen;           // h(eta_i)
    std::vector<std::vector<InvariantPair>> dev; // [level][knot]
    int halvings = 0;
    double max_dev = 0;
};

struct GrpSolution {
    double t0 = 0, r0 = 0, dt_max = 0;
    PhysParams p;
    GrpOptions opt;
    OrbitPtr left, middle, right;
    RiemannFan fan;
    std::array<double, 4> edges{}; // s1-, s1+, s2-, s2+
    bool exact = false;
    std::optional<double> steady_shock; // left and right orbits joined by a standing shock here
    std::optional<FanTable> fan1, fan2;
};

namespace grp_detail {

inline InvariantPair operator+(InvariantPair a, InvariantPair b) { return {a.w + b.w, a.z + b.z}; }
inline InvariantPair operator-(InvariantPair a, InvariantPair b) { return {a.w - b.w, a.z - b.z}; }
inline InvariantPair lerp(InvariantPair a, InvariantPair b, double t)
{
    return {a.w + t * (b.w - a.w), a.z + t * (b.z - a.z)};
}

inline InvariantPair inv_of(const FluidState& s, const PhysParams& p) { return riemann_invariants(s, p); }

struct FanBuilder {
    const GrpSolution& sol;
    FanTable& tab;
    const SteadyOrbit& ladj;
    const SteadyOrbit& radj;

    const PhysParams& p() const { return sol.p; }
    int knots() const { return static_cast<int>(tab.eta.size()); }

    double own_speed(const FluidState& s, double r) const
    {
        const auto ev = eigenvalues(s, r, p());
        return tab.family == 1 ? ev.lambda : ev.mu;
    }
    double other_speed(const FluidState& s, double r) const
    {
        const auto ev = eigenvalues(s, r, p());
        return tab.family == 1 ? ev.mu : ev.lambda;
    }

    // invariants of the slab solution at time ta (relative to t0) and radius x,
    // using the fan values `vals` at that time
    InvariantPair lookup(const std::vector<InvariantPair>& vals, double ta, double x) const
    {
        const double r0 = sol.r0;
        if (ta == 0)
            return inv_of(x < r0 ? ladj.eval(x) : radj.eval(x), p());
        const double e = (x - r0) / ta;
        if (e < tab.eta0)
            return inv_of(ladj.eval(x), p());
        if (e > tab.eta1)
            return inv_of(radj.eval(x), p());
        const int n = knots();
        const double span = tab.eta1 - tab.eta0;
        if (!(span > 0))
            return vals[0];
        const double u = (e - tab.eta0) / span * (n - 1);
        const int i = std::clamp(static_cast<int>(u), 0, n - 2);
        return lerp(vals[static_cast<std::size_t>(i)], vals[static_cast<std::size_t>(i) + 1], u - i);
    }

    // one two-stage step of the characteristic transport from ta to ta + h
    std::vector<InvariantPair> step(const std::vector<InvariantPair>& vals, double ta, double h) const
    {
        const int n = knots();
        const double tb = ta + h;
        std::vector<InvariantPair> out(static_cast<std::size_t>(n));
        out[0] = inv_of(ladj.eval(sol.r0 + tab.eta0 * tb), p());
        const bool fam1 = tab.family == 1;
        for (int i = 1; i < n; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            const double ri = sol.r0 + tab.eta[iu] * tb;
            const FluidState vg = state_from_invariants(vals[iu], p());
            InvariantPair pred{}, fin{};
            for (int stage = 0; stage < 2; ++stage) {
                const FluidState va = stage == 0 ? vg : state_from_invariants(pred, p());
                double co = own_speed(va, ri), ct = other_speed(va, ri);
                double xo = ri - h * co, xt = ri - h * ct;
                if (stage == 1) {
                    // average the arrival and departure speeds
                    const FluidState fo0 = state_from_invariants(own_foot(vals, ta, ri - h * own_speed(vg, ri), iu), p());
                    const FluidState ft0 = state_from_invariants(lookup(vals, ta, ri - h * other_speed(vg, ri)), p());
                    co = 0.5 * (co + own_speed(fo0, ri - h * own_speed(vg, ri)));
                    ct = 0.5 * (ct + other_speed(ft0, ri - h * other_speed(vg, ri)));
                    xo = ri - h * co;
                    xt = ri - h * ct;
                }
                const InvariantPair io = own_foot(vals, ta, xo, iu);
                const InvariantPair it = lookup(vals, ta, xt);
                const FluidState so = state_from_invariants(io, p());
                const FluidState st = state_from_invariants(it, p());
                const CharSource cso = characteristic_source(so, xo, p());
                const CharSource cst = characteristic_source(st, xt, p());
                double src_own = fam1 ? cso.sz : cso.sw;
                double src_oth = fam1 ? cst.sw : cst.sz;
                if (stage == 1) {
                    const CharSource ca = characteristic_source(va, ri, p());
                    src_own = 0.5 * (src_own + (fam1 ? ca.sz : ca.sw));
                    src_oth = 0.5 * (src_oth + (fam1 ? ca.sw : ca.sz));
                }
                const double own = (fam1 ? io.z : io.w) + h * src_own;
                const double oth = (fam1 ? it.w : it.z) + h * src_oth;
                const InvariantPair next = fam1 ? InvariantPair{oth, own} : InvariantPair{own, oth};
                state_from_invariants(next, p()); // admissibility
                (stage == 0 ? pred : fin) = next;
            }
            out[iu] = fin;
        }
        return out;
    }

    // own-family characteristics leave the fan point itself at t0
    InvariantPair own_foot(const std::vector<InvariantPair>& vals, double ta, double x, std::size_t i) const
    {
        if (ta == 0)
            return tab.frozen[i];
        return lookup(vals, ta, x);
    }

    std::vector<InvariantPair> advance(const std::vector<InvariantPair>& vals, double ta, double h, int depth)
    {
        try {
            return step(vals, ta, h);
        } catch (const domain_error&) {
        } catch (const range_error&) {
        }
        if (depth >= sol.opt.max_halvings)
            throw numerical_error("fan transport: inadmissible state after maximal step halving");
        tab.halvings = std::max(tab.halvings, depth + 1);
        const auto mid = advance(vals, ta, 0.5 * h, depth + 1);
        return advance(mid, ta + 0.5 * h, 0.5 * h, depth + 1);
    }
};

} // namespace grp_detail

inline FanTable integrate_fan(const GrpSolution& sol, const WaveDescriptor& wave, const SteadyOrbit& ladj,
                              const SteadyOrbit& radj)
{
    using namespace grp_detail;
    if (wave.kind != WaveKind::Rarefaction)
        throw misuse_error("fan integration requires a rarefaction wave");
    FanTable tab;
    tab.family = wave.family;
    tab.eta0 = wave.speed_lo;
    tab.eta1 = wave.speed_hi;
    const int n = std::max(sol.opt.fan_knots, 2);
    const int steps = std::max(sol.opt.fan_steps, 1);
    for (int i = 0; i < n; ++i) {
        const double e = tab.eta0 + (tab.eta1 - tab.eta0) * i / (n - 1);
        tab.eta.push_back(e);
        tab.frozen.push_back(inv_of(sample_fan(sol.fan, e), sol.p));
    }
    for (int s = 0; s <= steps; ++s)
        tab.tau.push_back(sol.dt_max * s / steps);
    tab.dev.assign(static_cast<std::size_t>(steps) + 1, std::vector<InvariantPair>(static_cast<std::size_t>(n)));
    if (sol.opt.frozen_fan_only || sol.p.planar())
        return tab;

    FanBuilder b{sol, tab, ladj, radj};
    std::vector<InvariantPair> vals = tab.frozen;
    const double h = sol.dt_max / steps;
    for (int s = 0; s < steps; ++s) {
        vals = b.advance(vals, tab.tau[static_cast<std::size_t>(s)], h, 0);
        auto& d = tab.dev[static_cast<std::size_t>(s) + 1];
        for (std::size_t i = 0; i < vals.size(); ++i) {
            d[i] = vals[i] - tab.frozen[i];
            tab.max_dev = std::max({tab.max_dev, std::abs(d[i].w), std::abs(d[i].z)});
        }
    }
    return tab;
}

// Radius in [r0 - h, r0 + h] where the two orbits satisfy the steady jump relation, if any.
inline std::optional<double> detect_steady_shock(const SteadyOrbit& left, const SteadyOrbit& right, double r0, double h)
{
    const auto& p = left.p;
    const double k2 = p.k * p.k;
    auto mis = [&](double r) { return left.eval(r).v * right.eval(r).v / k2 - 1; };
    auto joined = [&](double r) {
        const FluidState a = left.eval(r), b = right.eval(r);
        if (std::abs(a.v * b.v / k2 - 1) > 1e-10)
            return false;
        const FluidState j = steady_jump(a, p);
        return std::abs(j.rho - b.rho) <= 1e-9 * b.rho && std::abs(j.v - b.v) <= 1e-9 * std::abs(b.v);
    };
    try {
        if (left.eval(r0).v == 0 || right.eval(r0).v == 0)
            return std::nullopt;
        const double lo = std::max(r0 - h, p.planar() ? r0 - h : p.horizon() + 0.5 * (r0 - p.horizon()));
        const double hi = r0 + h;
        const double m0 = mis(r0);
        if (m0 == 0)
            return joined(r0) ? std::optional<double>(r0) : std::nullopt;
        const double ml = mis(lo), mh = mis(hi);
        double rs;
        if ((ml > 0) != (m0 > 0))
            rs = roots::bracketed(mis, lo, r0, ml, m0, "steady shock");
        else if ((mh > 0) != (m0 > 0))
            rs = roots::bracketed(mis, r0, hi, m0, mh, "steady shock");
        else
            return std::nullopt;
        return joined(rs) ? std::optional<double>(rs) : std::nullopt;
    } catch (const error&) {
        return std::nullopt;
    }
}

inline GrpSolution solve_grp(double t0, double r0, OrbitPtr left, OrbitPtr right, double dt_max, const PhysParams& p,
                             const GrpOptions& opt = {})
{
    p.check_radius(r0);
    if (!(dt_max > 0))
        throw misuse_error("slab length must be positive");
    GrpSolution sol;
    sol.t0 = t0;
    sol.r0 = r0;
    sol.dt_max = dt_max;
    sol.p = p;
    sol.opt = opt;
    sol.left = left;
    sol.right = right;
    const FluidState ul = left->eval_left(r0);
    const FluidState ur = right->eval(r0);
    sol.fan = solve_riemann(ul, ur, r0, p);
    const auto& f = sol.fan;
    sol.edges = {f.wave1.speed_lo, f.wave1.speed_hi, f.wave2.speed_lo, f.wave2.speed_hi};
    if (left.get() == right.get()) {
        sol.exact = true;
        sol.middle = left;
        return sol;
    }
    if (opt.steady_window > 0) {
        if (auto rs = detect_steady_shock(*left, *right, r0, opt.steady_window)) {
            sol.steady_shock = rs;
            sol.middle = left;
            return sol;
        }
    }
    if (f.wave1.kind == WaveKind::Null)
        sol.middle = left;
    else if (f.wave2.kind == WaveKind::Null)
        sol.middle = right;
    else
        sol.middle = make_orbit_ptr(make_base(r0, f.middle.rho, f.middle.v, p), p);
    if (f.wave1.kind == WaveKind::Rarefaction)
        sol.fan1 = integrate_fan(sol, f.wave1, *sol.left, *sol.middle);
    if (f.wave2.kind == WaveKind::Rarefaction)
        sol.fan2 = integrate_fan(sol, f.wave2, *sol.middle, *sol.right);
    return sol;
}

namespace grp_detail {

inline FluidState eval_fan(const GrpSolution& sol, const FanTable& tab, const SteadyOrbit& ladj, double tau, double x)
{
    const auto& p = sol.p;
    const double e = std::clamp(x / tau, tab.eta0, tab.eta1);
    const FluidState h = sample_fan(sol.fan, e);
    if (sol.opt.frozen_fan_only || p.planar())
        return h;
    const int n = static_cast<int>(tab.eta.size());
    const int steps = static_cast<int>(tab.tau.size()) - 1;
    const double span = tab.eta1 - tab.eta0;
    const double u = span > 0 ? (e - tab.eta0) / span * (n - 1) : 0;
    const int i = std::clamp(static_cast<int>(u), 0, n - 2);
    const double fu = u - i;
    const double sv = std::clamp(tau / sol.dt_max * steps, 0.0, double(steps));
    const int j = std::clamp(static_cast<int>(sv), 0, steps - 1);
    const double fs = sv - j;
    const auto ju = static_cast<std::size_t>(j), iu = static_cast<std::size_t>(i);
    auto dev_at = [&](std::size_t lev, std::size_t k) { return tab.dev[lev][k]; };
    InvariantPair d0a = dev_at(ju, iu), d0b = dev_at(ju + 1, iu);
    if (i == 0) {
        // the boundary knot carries the adjacent orbit exactly
        const InvariantPair edge = inv_of(ladj.eval(sol.r0 + tab.eta0 * tau), p) - tab.frozen[0];
        d0a = d0b = edge;
    }
    const InvariantPair d0 = lerp(d0a, d0b, fs);
    const InvariantPair d1 = lerp(dev_at(ju, iu + 1), dev_at(ju + 1, iu + 1), fs);
    const InvariantPair d = lerp(d0, d1, fu);
    return state_from_invariants(inv_of(h, p) + d, p);
}

} // namespace grp_detail

inline FluidState eval_grp(const GrpSolution& sol, double t, double r)
{
    const double tau = t - sol.t0;
    if (tau < -1e-14 * (1 + std::abs(sol.t0)) || tau > sol.dt_max * (1 + 1e-12))
        throw domain_error("time outside the GRP slab");
    if (sol.exact)
        return sol.left->eval(r);
    if (sol.steady_shock)
        return r < *sol.steady_shock ? sol.left->eval(r) : sol.right->eval(r);
    const double x = r - sol.r0;
    if (tau <= 0) {
        if (x < 0)
            return sol.left->eval(r);
        if (x > 0)
            return sol.right->eval(r);
        return sample_fan(sol.fan, 0.0);
    }
    const auto& e = sol.edges;
    if (x < e[0] * tau)
        return sol.left->eval(r);
    if (x <= e[1] * tau && sol.fan1)
        return grp_detail::eval_fan(sol, *sol.fan1, *sol.left, tau, x);
    if (x < e[2] * tau)
        return sol.middle->eval(r);
    if (x <= e[3] * tau && sol.fan2)
        return grp_detail::eval_fan(sol, *sol.fan2, *sol.middle, tau, x);
    if (x < e[3] * tau)
        return sol.middle->eval(r);
    return sol.right->eval(r);
}

// The steady orbit carrying the slab solution at (t, r); null inside a rarefaction fan.
inline const OrbitPtr* grp_orbit_at(const GrpSolution& sol, double t, double r)
{
    if (sol.exact)
        return &sol.left;
    if (sol.steady_shock)
        return r < *sol.steady_shock ? &sol.left : &sol.right;
    const double tau = t - sol.t0, x = r - sol.r0;
    if (tau <= 0)
        return x < 0 ? &sol.left : (x > 0 ? &sol.right : nullptr);
    const auto& e = sol.edges;
    if (x < e[0] * tau)
        return &sol.left;
    if (x <= e[1] * tau && sol.fan1)
        return nullptr;
    if (x < e[2] * tau)
        return &sol.middle;
    if (x <= e[3] * tau && sol.fan2)
        return nullptr;
    if (x < e[3] * tau)
        return &sol.middle;
    return &sol.right;
}

// Largest |deviation| of the fan's far edge from the orbit it borders, in (w, z).
inline double fan_edge_mismatch(const GrpSolution& sol, double t)
{
    const double tau = t - sol.t0;
    double out = 0;
    auto one = [&](const FanTable& tab, const SteadyOrbit& ladj, const SteadyOrbit& radj) {
        const double x = tab.eta1 * tau;
        const auto a = riemann_invariants(grp_detail::eval_fan(sol, tab, ladj, tau, x), sol.p);
        const auto b = riemann_invariants(radj.eval(sol.r0 + x), sol.p);
        out = std::max({out, std::abs(a.w - b.w), std::abs(a.z - b.z)});
    };
    if (sol.fan1)
        one(*sol.fan1, *sol.left, *sol.middle);
    if (sol.fan2)
        one(*sol.fan2, *sol.middle, *sol.right);
    return out;
}

// Absolute Rankine-Hugoniot defect |s[U] - [F]| along the straight shock edges, scaled by r^2.
inline double shock_rh_defect(const GrpSolution& sol, double t)
{
    const double tau = t - sol.t0;
    double out = 0;
    auto one = [&](const WaveDescriptor& w, const SteadyOrbit& a, const SteadyOrbit& b) {
        if (w.kind != WaveKind::Shock)
            return;
        const double s = w.speed();
        const double rs = sol.r0 + s * tau;
        const FluidState ua = a.eval(rs), ub = b.eval(rs);
        const auto ca = conserved(ua, rs, sol.p), cb = conserved(ub, rs, sol.p);
        const auto fa = flux(ua, rs, sol.p), fb = flux(ub, rs, sol.p);
        const double sc = sol.p.planar() ? 1.0 : rs * rs;
        out = std::max({out, std::abs(s * (cb.u1 - ca.u1) - (fb.u1 - fa.u1)) / sc,
                        std::abs(s * (cb.u2 - ca.u2) - (fb.u2 - fa.u2)) / sc});
    };
    if (sol.exact)
        return 0;
    one(sol.fan.wave1, *sol.left, *sol.middle);
    one(sol.fan.wave2, *sol.middle, *sol.right);
    return out;
}

namespace grp_detail {

// 5-point Gauss-Legendre on [a, b] for a pair-valued integrand
template <class G>
std::array<double, 2> gauss5(const G& g, double a, double b)
{
    using GL = boost::math::quadrature::gauss<double, 5>;
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<double, 2> acc{0, 0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto f1 = g(c + h * x[i]);
        acc[0] += w[i] * f1[0];
        acc[1] += w[i] * f1[1];
        if (x[i] != 0) {
            const auto f2 = g(c - h * x[i]);
            acc[0] += w[i] * f2[0];
            acc[1] += w[i] * f2[1];
        }
    }
    return {acc[0] * h, acc[1] * h};
}

} // namespace grp_detail

struct TestFunction {
    std::function<double(double, double)> phi, phi_t, phi_r;
};

struct WeakResidual {
    double u1 = 0;
    double u2 = 0;
    double value() const { return std::hypot(u1, u2); }
};

// Weak-form defect on [t0, t0+dt] x [r0-dr, r0+dr]: volume integral minus the four boundary terms.
inline WeakResidual weak_residual(const GrpSolution& sol, double dt, double dr, const TestFunction& f, int panels = 8)
{
    const double vmax = std::max({std::abs(sol.edges[0]), std::abs(sol.edges[3])});
    if (!(dr / dt > vmax))
        throw misuse_error("stability condition dr/dt > max wave speed violated");
    if (dt > sol.dt_max * (1 + 1e-12))
        throw misuse_error("dt exceeds the slab length");
    using Vec = std::array<double, 2>;
    const auto& p = sol.p;
    const double ra = sol.r0 - dr, rb = sol.r0 + dr, t0 = sol.t0, t1 = sol.t0 + dt;

    auto splits_at = [&](double tau) {
        std::vector<double> s{ra, rb};
        for (double e : sol.edges)
            s.push_back(sol.r0 + e * tau);
        for (const auto* o : {sol.left.get(), sol.middle.get(), sol.right.get()})
            if (o && o->shock_radius)
                s.push_back(*o->shock_radius);
        for (const auto* tab : {sol.fan1 ? &*sol.fan1 : nullptr, sol.fan2 ? &*sol.fan2 : nullptr})
            if (tab && tau > 0)
                for (double e : tab->eta)
                    s.push_back(sol.r0 + e * tau);
        std::sort(s.begin(), s.end());
        s.erase(std::remove_if(s.begin(), s.end(), [&](double x) { return x < ra || x > rb; }), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return s;
    };
    // integral over [ra, rb], panels inside each smooth piece at time tau
    auto r_integral = [&](double tau, const std::function<Vec(double)>& g) {
        const auto s = splits_at(tau);
        Vec acc{0, 0};
        for (std::size_t k = 0; k + 1 < s.size(); ++k) {
            const double a = s[k], b = s[k + 1];
            if (!(b > a))
                continue;
            for (int q = 0; q < panels; ++q) {
                const auto v = grp_detail::gauss5(g, a + (b - a) * q / panels, a + (b - a) * (q + 1) / panels);
                acc[0] += v[0];
                acc[1] += v[1];
            }
        }
        return acc;
    };
    auto t_integral = [&](const std::function<Vec(double)>& g) {
        Vec acc{0, 0};
        for (int q = 0; q < panels; ++q) {
            const auto v = grp_detail::gauss5(g, t0 + dt * q / panels, t0 + dt * (q + 1) / panels);
            acc[0] += v[0];
            acc[1] += v[1];
        }
        return acc;
    };
    auto volume_at = [&](double t) {
        return r_integral(t - t0, [&](double r) {
            const FluidState s = eval_grp(sol, t, r);
            const auto u = conserved(s, r, p);
            const auto fl = flux(s, r, p);
            const auto so = source(s, r, p);
            const double ph = f.phi(t, r), pt = f.phi_t(t, r), pr = f.phi_r(t, r);
            return Vec{u.u1 * pt + fl.u1 * pr + so.u1 * ph, u.u2 * pt + fl.u2 * pr + so.u2 * ph};
        });
    };
    auto mass_at = [&](double t) {
        return r_integral(t - t0, [&](double r) {
            const auto u = conserved(eval_grp(sol, t, r), r, p);
            const double ph = f.phi(t, r);
            return Vec{u.u1 * ph, u.u2 * ph};
        });
    };
    auto flux_at = [&](double r) {
        return t_integral([&](double t) {
            const auto fl = flux(eval_grp(sol, t, r), r, p);
            const double ph = f.phi(t, r);
            return Vec{fl.u1 * ph, fl.u2 * ph};
        });
    };

    const Vec vol = t_integral(volume_at);
    const auto m1 = mass_at(t1), m0 = mass_at(t0), fb = flux_at(rb), fa = flux_at(ra);
    return {vol[0] - (m1[0] - m0[0]) - (fb[0] - fa[0]), vol[1] - (m1[1] - m0[1]) - (fb[1] - fa[1])};
}

} // namespace bhflow
