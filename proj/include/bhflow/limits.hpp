#pragma once

#include "errors.hpp"
#include "model.hpp"
#include "params.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace bhflow {

enum class LimitKind { Stiff, NonRelativistic, Minkowski, NonRelMinkowski };

inline const char* to_string(LimitKind k)
{
    switch (k) {
    case LimitKind::Stiff: return "stiff";
    case LimitKind::NonRelativistic: return "non_relativistic";
    case LimitKind::Minkowski: return "minkowski";
    case LimitKind::NonRelMinkowski: return "nonrel_minkowski";
    }
    return "?";
}

struct LimitCase {
    LimitKind kind;
    PhysParams params;

    static LimitCase make(LimitKind kind, double eps, double k, double m)
    {
        switch (kind) {
        case LimitKind::Stiff: return {kind, PhysParams::stiff(eps, m * eps * eps)};
        case LimitKind::NonRelativistic:
            if (!(m > 0))
                throw config_error("non-relativistic limit case needs m > 0");
            return {kind, PhysParams::non_relativistic(k, m)};
        case LimitKind::Minkowski: return {kind, PhysParams::relativistic(eps, k, 0)};
        case LimitKind::NonRelMinkowski: return {kind, PhysParams::non_relativistic(k, 0)};
        }
        throw config_error("unknown limit kind");
    }
};

struct LimitReport {
    LimitKind kind;
    std::vector<double> small;
    std::vector<double> dev_flux, dev_source, dev_eigen, dev_max;
    double order_flux = 0, order_source = 0, order_eigen = 0, order = 0;
    double exact_dev = 0; // stiff: general formulas at k = 1/eps against the stiff-specific ones
    double planar_dev = 0; // Minkowski: planar model against the r^2-scaled radial model
};

namespace limits_detail {

struct Sample {
    double f1, f2, s2, lam, mu;
};

inline Sample evaluate(const FluidState& s, double r, const PhysParams& p)
{
    const auto f = flux(s, r, p);
    const auto so = source(s, r, p);
    const auto ev = eigenvalues(s, r, p);
    return {f.u1, f.u2, so.u2, ev.lambda, ev.mu};
}

// stiff model written out directly with k = 1/eps
inline Sample stiff_direct(const FluidState& s, double r, const PhysParams& p)
{
    const double e = p.eps * p.eps, h = r - 2 * p.M;
    const double d = (1 - p.eps * s.v) * (1 + p.eps * s.v);
    const double a = 1 - 2 * p.M / r;
    const double kk = 1 / e;
    return {r * h * 2 * s.rho * s.v / d, h * h * (s.v * s.v + kk) * s.rho / d,
            3 * p.M * (h / r) * (s.v * s.v + kk) * s.rho / d - p.m * (h / r) * (1 + e * s.v * s.v) * s.rho / d
                + 2 * h * h * kk * s.rho / r,
            -a / p.eps, a / p.eps};
}

inline double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Grid {
    std::vector<FluidState> states;
    std::vector<double> radii;
};

struct Devs {
    double flux = 0, source = 0, eigen = 0;
};

template <class A, class B>
Devs compare(const Grid& g, A&& full, B&& lim)
{
    std::vector<Sample> a, b;
    for (double r : g.radii)
        for (const auto& s : g.states) {
            a.push_back(full(s, r));
            b.push_back(lim(s, r));
        }
    double nf1 = 0, nf2 = 0, ns = 0, ne = 0;
    for (const auto& x : b) {
        nf1 = std::max(nf1, std::abs(x.f1));
        nf2 = std::max(nf2, std::abs(x.f2));
        ns = std::max(ns, std::abs(x.s2));
        ne = std::max({ne, std::abs(x.lam), std::abs(x.mu)});
    }
    Devs d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d.flux = std::max({d.flux, std::abs(a[i].f1 - b[i].f1) / nf1, std::abs(a[i].f2 - b[i].f2) / nf2});
        d.source = std::max(d.source, std::abs(a[i].s2 - b[i].s2) / ns);
        d.eigen = std::max({d.eigen, std::abs(a[i].lam - b[i].lam) / ne, std::abs(a[i].mu - b[i].mu) / ne});
    }
    return d;
}

} // namespace limits_detail

// Deviation of the full model from the limiting one at small/2^n, n = 0..3, with fitted orders.
// base supplies eps, k and the mass scale (m for the eps -> 0 limits, M otherwise).
inline LimitReport limit_consistency(const PhysParams& base, LimitKind kind, double small)
{
    using namespace limits_detail;
    if (!(small > 0))
        throw misuse_error("limit parameter must be positive");
    LimitReport rep;
    rep.kind = kind;
    const double k = base.k;
    const double eps = base.eps > 0 ? base.eps : 1.0;
    Grid g;
    const double m = base.m > 0 ? base.m : 1.0;
    const double M = base.M > 0 ? base.M : 1.0;
    const double vs = kind == LimitKind::Stiff ? 1 / eps : k;
    for (double rho : {0.3, 1.0, 3.0})
        for (double f : {-0.6, -0.2, 0.0, 0.3, 0.7})
            g.states.push_back({rho, f * vs});
    switch (kind) {
    case LimitKind::NonRelativistic: g.radii = {3 * m, 6 * m, 20 * m}; break;
    case LimitKind::NonRelMinkowski: g.radii = {0.5, 2.0, 10.0}; break;
    case LimitKind::Minkowski: g.radii = {2.0, 5.0, 20.0}; break;
    case LimitKind::Stiff: g.radii = {3 * M, 6 * M, 20 * M}; break;
    }

    for (int n = 0; n < 4; ++n) {
        const double sp = small / std::pow(2.0, n);
        Devs d;
        switch (kind) {
        case LimitKind::NonRelativistic: {
            const auto full = PhysParams::relativistic(sp, k, sp * sp * m);
            const auto lim = PhysParams::non_relativistic(k, m);
            d = compare(g, [&](auto& s, double r) { return evaluate(s, r, full); },
                        [&](auto& s, double r) { return evaluate(s, r, lim); });
            break;
        }
        case LimitKind::NonRelMinkowski: {
            const auto full = PhysParams::relativistic(sp, k, 0);
            const auto lim = PhysParams::non_relativistic(k, 0);
            d = compare(g, [&](auto& s, double r) { return evaluate(s, r, full); },
                        [&](auto& s, double r) { return evaluate(s, r, lim); });
            break;
        }
        case LimitKind::Minkowski: {
            const auto full = PhysParams::relativistic(eps, k, sp);
            const auto lim = PhysParams::relativistic(eps, k, 0);
            d = compare(g, [&](auto& s, double r) { return evaluate(s, r, full); },
                        [&](auto& s, double r) { return evaluate(s, r, lim); });
            break;
        }
        case LimitKind::Stiff: {
            const auto full = PhysParams::relativistic(eps, (1 / eps) * (1 - sp), M);
            const auto lim = PhysParams::stiff(eps, M);
            d = compare(g, [&](auto& s, double r) { return evaluate(s, r, full); },
                        [&](auto& s, double r) { return stiff_direct(s, r, lim); });
            break;
        }
        }
        rep.small.push_back(sp);
        rep.dev_flux.push_back(d.flux);
        rep.dev_source.push_back(d.source);
        rep.dev_eigen.push_back(d.eigen);
        rep.dev_max.push_back(std::max({d.flux, d.source, d.eigen}));
    }
    rep.order_flux = slope(rep.small, rep.dev_flux);
    rep.order_source = slope(rep.small, rep.dev_source);
    rep.order_eigen = slope(rep.small, rep.dev_eigen);
    rep.order = slope(rep.small, rep.dev_max);

    if (kind == LimitKind::Stiff) {
        const auto st = PhysParams::stiff(eps, M);
        auto d = compare(g, [&](auto& s, double r) { return evaluate(s, r, st); },
                         [&](auto& s, double r) { return stiff_direct(s, r, st); });
        rep.exact_dev = std::max({d.flux, d.source, d.eigen});
    }
    if (kind == LimitKind::Minkowski) {
        const auto radial = PhysParams::relativistic(eps, k, 0);
        const auto planar = PhysParams::minkowski(eps, k);
        double dev = 0;
        for (double r : g.radii)
            for (const auto& s : g.states) {
                const auto a = flux(s, r, radial), b = flux(s, 0.0, planar);
                const auto ua = conserved(s, r, radial), ub = conserved(s, 0.0, planar);
                const auto ea = eigenvalues(s, r, radial), eb = eigenvalues(s, 0.0, planar);
                const double r2 = r * r;
                dev = std::max({dev, std::abs(a.u1 / r2 - b.u1) / (1 + std::abs(b.u1)),
                                std::abs(a.u2 / r2 - b.u2) / (1 + std::abs(b.u2)),
                                std::abs(ua.u1 / r2 - ub.u1) / (1 + std::abs(ub.u1)),
                                std::abs(ua.u2 / r2 - ub.u2) / (1 + std::abs(ub.u2)),
                                std::abs(ea.lambda - eb.lambda), std::abs(ea.mu - eb.mu)});
            }
        rep.planar_dev = dev;
    }
    return rep;
}

} // namespace bhflow
