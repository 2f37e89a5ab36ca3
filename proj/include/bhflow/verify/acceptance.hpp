#pragma once

// Acceptance suite shared by the test binary and `verify`. The oracles here are
// written out from first principles and avoid the library's own solution paths.

#include "../bhflow.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace bhflow::verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    double measured = 0;
    double tolerance = 0;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

inline std::string format_line(const CriterionResult& r)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, "criterion %2d %-24s %s measured=%.6g tolerance=%.6g time=%.2fs %s", r.id,
                  r.name.c_str(), r.pass ? "PASS" : "FAIL", r.measured, r.tolerance, r.seconds, r.detail.c_str());
    return buf;
}

namespace oracle {

inline double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Sonic radii of the branch through (r0, v0) are the zeros of
//   ln a(r) - ln a(r0) + A (2 ln r0 + ln v0 - 2 ln r - ln k) - ln(1 - e^2k^2) + ln(1 - e^2 v0^2),
// obtained by putting v = k into both first integrals and eliminating rho.
// Written in u = ln r since for small eps the outer root can lie far beyond double range in r.
inline double sonic_equation(double u, double r0, double v0, double eps, double k, double M)
{
    const double e2 = eps * eps * k * k;
    const double A = 2 * e2 / (1 - e2);
    return std::log1p(-2 * M * std::exp(-u)) - std::log(1 - 2 * M / r0)
         + A * (2 * std::log(r0) + std::log(v0) - 2 * u - std::log(k)) - std::log(1 - e2) + std::log(1 - eps * eps * v0 * v0);
}

inline int count_sign_changes(const std::vector<double>& xs, const std::function<double(double)>& f)
{
    int n = 0;
    double prev = f(xs.front());
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double cur = f(xs[i]);
        if ((cur > 0) != (prev > 0))
            ++n;
        prev = cur;
    }
    return n;
}

// stiff steady system d/dr F(q, r) = S(q, r) in primitive variables q = (rho, v)
struct StiffOde {
    double eps, M;
    double m() const { return M / (eps * eps); }

    std::array<double, 2> rhs(double r, double rho, double v) const
    {
        const double e = eps * eps, h = r - 2 * M, D = 1 - e * v * v, kk = 1 / e;
        // F1 = 2 r h rho v / D, F2 = h^2 (v^2 + kk) rho / D
        const double dD = -2 * e * v;
        const double f1r = 2 * r * h * v / D;
        const double f1v = 2 * r * h * rho * (1 / D - v * dD / (D * D));
        const double f1x = 2 * (2 * r - 2 * M) * rho * v / D;
        const double f2r = h * h * (v * v + kk) / D;
        const double f2v = h * h * rho * (2 * v / D - (v * v + kk) * dD / (D * D));
        const double f2x = 2 * h * (v * v + kk) * rho / D;
        const double s2 = 3 * M * (h / r) * (v * v + kk) * rho / D - m() * (h / r) * (1 + e * v * v) * rho / D
                        + 2 * h * h * kk * rho / r;
        const double b1 = -f1x, b2 = s2 - f2x;
        const double det = f1r * f2v - f1v * f2r;
        return {(b1 * f2v - f1v * b2) / det, (f1r * b2 - f2r * b1) / det};
    }

    // classical RK4 from r0 to r1 in n steps
    std::array<double, 2> integrate(double r0, double rho0, double v0, double r1, int n) const
    {
        const double h = (r1 - r0) / n;
        double r = r0, a = rho0, b = v0;
        for (int i = 0; i < n; ++i) {
            const auto k1 = rhs(r, a, b);
            const auto k2 = rhs(r + h / 2, a + h / 2 * k1[0], b + h / 2 * k1[1]);
            const auto k3 = rhs(r + h / 2, a + h / 2 * k2[0], b + h / 2 * k2[1]);
            const auto k4 = rhs(r + h, a + h * k3[0], b + h * k3[1]);
            a += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
            b += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
            r = r0 + (i + 1) * h;
        }
        return {a, b};
    }
};

// (1/2eps)(1 + eps v)/(1 - eps v)
inline double nu(double v, double eps) { return (1 + eps * v) / (2 * eps * (1 - eps * v)); }

// Residual of `s` on the family's wave curve through `base`, in the nu-form of the curves.
inline double curve_residual(const FluidState& base, const FluidState& s, int family, double eps, double k)
{
    const double chi = 2 * eps * k / (1 + eps * eps * k * k);
    const double sgn = family == 1 ? -1.0 : 1.0;
    const double q = s.rho / base.rho;
    if (q <= 1) // rarefaction: nu / nu_b = q^(-+chi)
        return std::abs(std::log(nu(s.v, eps) / nu(base.v, eps)) - sgn * chi * std::log(q));
    const double x = std::sqrt(nu(s.v, eps) / nu(base.v, eps));
    return std::abs((x - 1 / x) - sgn * chi * (std::sqrt(q) - 1 / std::sqrt(q)));
}

} // namespace oracle

template <class F>
CriterionResult timed(int id, const char* name, F&& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = body();
    } catch (const std::exception& e) {
        r.pass = false;
        r.measured = std::numeric_limits<double>::quiet_NaN();
        r.detail = std::string("exception: ") + e.what();
    }
    r.id = id;
    r.name = name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// 1. zeros of the sonic functions at the critical configuration
inline CriterionResult critical_zeros()
{
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> ue(0.01, 2.0), uf(0.01, 0.95), um(0.1, 10.0);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const double eps = ue(rng), k = uf(rng) / eps, M = um(rng);
        const auto p = PhysParams::relativistic(eps, k, M);
        const double e2 = eps * eps * k * k;
        const double kap = (1 - e2) / (1 + e2);
        worst = std::max(worst, std::abs(sonic_P((2 - kap) / (1 - kap) * M, k, p)));
        const double kn = uf(rng), m = um(rng);
        const auto pn = PhysParams::non_relativistic(kn, m);
        worst = std::max(worst, std::abs(sonic_P(m / (2 * kn * kn), kn, pn)));
    }
    CriterionResult r;
    r.measured = worst;
    r.tolerance = 1e-12;
    r.pass = worst < r.tolerance;
    r.detail = "200 evaluations";
    return r;
}

// 2. sign of the sonic function against a brute-force root count
inline CriterionResult sonic_classification()
{
    const double eps = 0.01, k = 0.3, M = 1;
    const auto p = PhysParams::relativistic(eps, k, M);
    // grid in u = ln r: log-spaced in r - 2M near the horizon, log-spaced in u far out, and
    // linear in r around the extremum of the sonic equation (its r-derivative vanishes at
    // (1 + 3e^2k^2)M/(2e^2k^2)), where two roots can sit close together
    const double e2 = eps * eps * k * k, rx = (1 + 3 * e2) * M / (2 * e2);
    std::vector<double> xs;
    for (int i = 0; i < 3000; ++i)
        xs.push_back(std::log(2 * M + std::exp(-30.0 + 60.0 * i / 2999)));
    const double u1 = xs.back();
    for (int i = 1; i <= 2000; ++i)
        xs.push_back(u1 * std::pow(1e7 / u1, i / 2000.0));
    for (int i = 0; i < 5000; ++i)
        xs.push_back(std::log(0.5 * rx + 1.5 * rx * i / 4999));
    std::sort(xs.begin(), xs.end());
    int agree = 0, total = 0, borderline = 0;
    std::string bad;
    for (int a = 0; a < 50; ++a)
        for (int b = 0; b < 50; ++b) {
            const double r0 = 2.5 * std::pow(2e5 / 2.5, a / 49.0);
            const double v0 = 0.01 * std::pow(5.0 / 0.01, b / 49.0);
            if (std::abs(v0 - k) < 1e-9)
                continue;
            const double P = sonic_P(r0, v0, p);
            if (std::abs(P) <= 1e-8) {
                ++borderline;
                continue;
            }
            const int roots = oracle::count_sign_changes(
                xs, [&](double r) { return oracle::sonic_equation(r, r0, v0, eps, k, M); });
            ++total;
            const bool ok = P > 0 ? roots == 0 : roots == 2;
            if (ok)
                ++agree;
            else if (bad.size() < 200)
                bad += " (r0=" + std::to_string(r0) + ",v0=" + std::to_string(v0) + ",P=" + std::to_string(P)
                     + ",roots=" + std::to_string(roots) + ")";
        }
    CriterionResult r;
    r.measured = static_cast<double>(agree) / total;
    r.tolerance = 1.0;
    r.pass = agree == total;
    r.detail = std::to_string(agree) + "/" + std::to_string(total) + " agree, " + std::to_string(borderline)
             + " borderline skipped" + bad;
    return r;
}

struct OrbitCase {
    PhysParams p;
    double r0, rho0, v0;
};

inline std::vector<OrbitCase> orbit_suite()
{
    const auto p1 = PhysParams::relativistic(1, 0.3, 1);
    const auto p2 = PhysParams::relativistic(0.5, 0.6, 2);
    const auto p3 = PhysParams::relativistic(0.01, 0.3, 1);
    const auto pn = PhysParams::non_relativistic(0.3, 1);
    return {
        {p1, 4, 1, 0.1},   {p1, 4, 1, 0.15},  {p1, 10, 1, 0.05},  {p1, 10, 2, 0.8},   {p1, 3, 1, 0.9},
        {p1, 5, 1, 0.2},  {p1, p1.r_min(), 1, 0.3}, {p1, 6, 1, -0.1}, {p1, 5, 1, 0.0}, {p2, 6, 1, 0.2},
        {p2, 12, 1, 0.9},  {p2, p2.r_min(), 1, 0.6}, {p2, 6, 1, 0.15}, {p3, 6e4, 1, 0.25}, {pn, 2, 1, 0.1},
        {pn, 10, 1, 0.5},  {pn, pn.r_min(), 1, 0.3}, {pn, 1, 1, 1.2}, {pn, 4, 1, -0.2}, {pn, 3, 1, 0.0},
    };
}

// 3. first integrals and steady weak form along constructed orbits
inline CriterionResult steady_integrals()
{
    double worst_int = 0, worst_weak = 0;
    std::string kinds;
    for (const auto& c : orbit_suite()) {
        const auto& p = c.p;
        const auto o = make_global_orbit(make_base(c.r0, c.rho0, c.v0, p), p);
        kinds += std::string(to_string(o.kind)).substr(0, 2) + " ";
        const double scale = p.eps == 0 ? p.r_min() : std::max(p.M, 1.0);
        // Subsonic velocities decay like exp(-c/A) towards the horizon (exp(-m/(k^2 r)) towards
        // r = 0 without relativity) and leave double range; start where v stays above ~e^-300.
        const double lo = p.eps == 0 ? 0.05 * p.r_min() : 2 * p.M / -std::expm1(-std::min(300 * p.A(), 9.0));
        const double hi = std::max(1e3 * scale, 10 * c.r0);
        std::vector<double> rs;
        // log-spaced in the distance to the horizon (to r = 0 without relativity)
        const double h0 = p.eps == 0 ? 0.0 : 2 * p.M;
        for (int i = 0; i < 1000; ++i)
            rs.push_back(h0 + (lo - h0) * std::pow((hi - h0) / (lo - h0), i / 999.0));
        for (double r : rs) {
            const int ip = o.piece_index(r);
            const auto& pc = o.pieces[static_cast<std::size_t>(ip)];
            const FluidState s = o.eval(r);
            FluidState a{pc.rho0, pc.v0};
            if (pc.law == OrbitPiece::Law::Static)
                a.v = 0;
            if (o.reflected) {
                a.v = -a.v;
            }
            const auto res = first_integral_residuals(s, r, make_base(pc.r0, a.rho, a.v, p), p);
            worst_int = std::max({worst_int, res.mass, res.energy});
        }
        // weak form on each panel: F(b) - F(a) - int S
        for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
            const double a = rs[i], b = rs[i + 1];
            const auto fa = flux(o.eval(a), a, p), fb = flux(o.eval_left(b), b, p);
            std::vector<double> cut{a, b};
            if (o.shock_radius && *o.shock_radius > a && *o.shock_radius < b)
                cut.insert(cut.begin() + 1, *o.shock_radius);
            double s2 = 0, abs_s2 = 0;
            for (std::size_t q = 0; q + 1 < cut.size(); ++q) {
                const double x0 = cut[q], x1 = cut[q + 1];
                const auto v = grp_detail::gauss5(
                    [&](double r) {
                        const double sv = source(o.eval(r), r, p).u2;
                        return std::array<double, 2>{sv, std::abs(sv)};
                    },
                    x0, x1);
                s2 += v[0];
                abs_s2 += v[1];
            }
            const double n1 = std::abs(fa.u1) + std::abs(fb.u1) + 1e-300;
            const double n2 = std::abs(fa.u2) + std::abs(fb.u2) + abs_s2;
            const double wv = std::max(std::abs(fb.u1 - fa.u1) / n1, std::abs(fb.u2 - fa.u2 - s2) / n2);
            worst_weak = std::max(worst_weak, wv);
        }
    }
    CriterionResult r;
    r.measured = std::max(worst_int / 1e-10, worst_weak / 1e-8);
    r.tolerance = 1;
    r.pass = worst_int < 1e-10 && worst_weak < 1e-8;
    char buf[160];
    std::snprintf(buf, sizeof buf, "integrals=%.3g (tol 1e-10) weak=%.3g (tol 1e-8) kinds: ", worst_int, worst_weak);
    r.detail = buf + kinds;
    return r;
}

// 4. stiff closed form against RK4 on the steady system
inline CriterionResult stiff_closed_form()
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u01(0, 1);
    double worst = 0;
    const double M = 1;
    for (int i = 0; i < 10; ++i) {
        const double eps = 0.5 + u01(rng);
        const auto p = PhysParams::stiff(eps, M);
        const double r0 = 3 * M + 47 * M * u01(rng);
        const double vmax = 0.8 * 9 * M * M / (eps * r0 * r0);
        const double v0 = (2 * u01(rng) - 1) * std::min(vmax, 0.8 / eps);
        const double rho0 = 0.5 + 1.5 * u01(rng);
        const auto b = make_base(r0, rho0, v0, p);
        oracle::StiffOde ode{eps, M};
        for (double r1 : {3 * M, 5 * M, 10 * M, 25 * M, 50 * M}) {
            const int n = std::max(1, static_cast<int>(std::abs(r1 - r0) / 2e-3));
            const auto q = ode.integrate(r0, rho0, v0, r1, n);
            const FluidState s = stiff_steady(r1, b, p);
            worst = std::max({worst, std::abs(s.rho - q[0]) / q[0], std::abs(s.v - q[1]) / (std::abs(q[1]) + 1e-300)});
        }
    }
    const auto p = PhysParams::stiff(1, 1);
    const double v8 = stiff_steady(8, make_base(4, 1, 0.1, p), p).v;
    CriterionResult r;
    r.measured = worst;
    r.tolerance = 1e-8;
    r.pass = worst < 1e-8 && std::abs(v8 - 0.025) < 1e-15;
    r.detail = "v(8)=" + std::to_string(v8);
    return r;
}

inline FluidState random_state(std::mt19937_64& rng, double vmax)
{
    std::uniform_real_distribution<double> ul(-3, 3), uv(-vmax, vmax);
    return {std::exp(ul(rng)), uv(rng)};
}

// 5. soundness of the Riemann solver
inline CriterionResult riemann_soundness()
{
    const double eps = 1, k = 0.3, r0 = 4;
    const auto p = PhysParams::relativistic(eps, k, 1);
    std::mt19937_64 rng(5);
    double curve = 0, rh = 0, inv = 0;
    int lax_fail = 0, shocks = 0, rars = 0;
    for (int i = 0; i < 10000; ++i) {
        const FluidState l = random_state(rng, 0.95), rr = random_state(rng, 0.95);
        const auto f = solve_riemann(l, rr, r0, p);
        curve = std::max({curve, oracle::curve_residual(l, f.middle, 1, eps, k),
                          oracle::curve_residual(rr, f.middle, 2, eps, k)});
        const auto el = eigenvalues(l, r0, p), em = eigenvalues(f.middle, r0, p), er = eigenvalues(rr, r0, p);
        if (f.wave1.kind == WaveKind::Shock) {
            ++shocks;
            const double s = f.wave1.speed();
            rh = std::max(rh, rh_residual(l, f.middle, s, r0, p));
            if (!(el.lambda > s && s > em.lambda))
                ++lax_fail;
        } else if (f.wave1.kind == WaveKind::Rarefaction) {
            ++rars;
            inv = std::max(inv, std::abs(riemann_invariants(l, p).w - riemann_invariants(f.middle, p).w));
        }
        if (f.wave2.kind == WaveKind::Shock) {
            ++shocks;
            const double s = f.wave2.speed();
            rh = std::max(rh, rh_residual(f.middle, rr, s, r0, p));
            if (!(em.mu > s && s > er.mu))
                ++lax_fail;
        } else if (f.wave2.kind == WaveKind::Rarefaction) {
            ++rars;
            inv = std::max(inv, std::abs(riemann_invariants(rr, p).z - riemann_invariants(f.middle, p).z));
        }
    }
    CriterionResult r;
    r.measured = std::max({curve / 1e-10, rh / 1e-10, inv / 1e-12});
    r.tolerance = 1;
    r.pass = curve < 1e-10 && rh < 1e-10 && inv < 1e-12 && lax_fail == 0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "curve=%.3g rh=%.3g invariants=%.3g lax_failures=%d shocks=%d rarefactions=%d",
                  curve, rh, inv, lax_fail, shocks, rars);
    r.detail = buf;
    return r;
}

// 6. wave strength does not increase under interaction
inline CriterionResult diminishing_tv()
{
    const auto p = PhysParams::relativistic(1, 0.3, 1);
    std::mt19937_64 rng(6);
    double worst = -std::numeric_limits<double>::infinity();
    int fails = 0;
    for (int i = 0; i < 10000; ++i) {
        const FluidState a = random_state(rng, 0.95), s = random_state(rng, 0.95), b = random_state(rng, 0.95);
        const auto c = check_interaction(a, s, b, 4, p);
        worst = std::max(worst, c.lhs - c.rhs);
        if (!(c.lhs <= c.rhs + 1e-12))
            ++fails;
    }
    CriterionResult r;
    r.measured = worst;
    r.tolerance = 1e-12;
    r.pass = fails == 0;
    r.detail = "max(lhs - rhs) over 10^4 triples, failures=" + std::to_string(fails);
    return r;
}

struct GrpStudy {
    std::vector<double> dts, rh, edge, weak;
    double exact_dev = 0;
    double rh_slope = 0, edge_slope = 0, weak_slope = 0;
};

inline GrpStudy grp_study(bool frozen = false)
{
    const auto p = PhysParams::relativistic(1, 0.3, 1);
    const double r0 = 6;
    GrpStudy st;
    const auto lo = make_orbit_ptr(make_base(r0, 1, 0.0, p), p);
    const auto ro = make_orbit_ptr(make_base(r0, 0.5, 0.0, p), p);
    {
        const auto eq = make_orbit_ptr(make_base(r0, 1, 0.2, p), p);
        const auto g = solve_grp(0, r0, eq, eq, 0.1, p);
        for (int i = 0; i <= 10; ++i)
            for (int j = -10; j <= 10; ++j) {
                const double t = 0.01 * i, r = r0 + 0.05 * j;
                const FluidState a = eval_grp(g, t, r), b = eq->eval(r);
                st.exact_dev = std::max({st.exact_dev, std::abs(a.rho - b.rho) / b.rho, std::abs(a.v - b.v)});
            }
    }
    TestFunction phi{[&](double t, double r) { return std::exp(-(r - r0) * (r - r0) / 4) * (1 + 0.5 * t); },
                     [&](double, double r) { return 0.5 * std::exp(-(r - r0) * (r - r0) / 4); },
                     [&](double t, double r) { return -(r - r0) / 2 * std::exp(-(r - r0) * (r - r0) / 4) * (1 + 0.5 * t); }};
    GrpOptions opt;
    opt.frozen_fan_only = frozen;
    for (int n = 0; n <= 4; ++n) {
        const double dt = 0.2 / std::pow(2.0, n);
        const auto g = solve_grp(0, r0, lo, ro, dt, p, opt);
        st.dts.push_back(dt);
        st.rh.push_back(shock_rh_defect(g, dt));
        st.edge.push_back(fan_edge_mismatch(g, dt));
        st.weak.push_back(weak_residual(g, dt, 2.5 * dt, phi, 4).value());
    }
    st.rh_slope = oracle::slope(st.dts, st.rh);
    st.edge_slope = oracle::slope(st.dts, st.edge);
    st.weak_slope = oracle::slope(st.dts, st.weak);
    return st;
}

// 7. GRP: exact on equilibria, first-order edge defects, second-order weak residual
inline CriterionResult grp_orders()
{
    const auto st = grp_study();
    CriterionResult r;
    r.measured = st.weak_slope;
    r.tolerance = 0;
    const auto in = [](double s, double a, double b) { return s >= a && s <= b; };
    r.pass = st.exact_dev < 1e-12 && in(st.rh_slope, 0.7, 1.3) && in(st.edge_slope, 0.7, 1.3)
          && in(st.weak_slope, 1.7, 2.3);
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "exact_dev=%.3g rh_slope=%.3f edge_slope=%.3f weak_slope=%.3f (windows [0.7,1.3],[0.7,1.3],[1.7,2.3])",
                  st.exact_dev, st.rh_slope, st.edge_slope, st.weak_slope);
    r.detail = buf;
    return r;
}

struct WellBalancedResult {
    double smooth_dev = 0;
    double shock_l1 = 0;
    double max_drift = 0;
    double dr = 0;
    bool failed = false;
};

inline double jump_location(const Level& lv, const SchemeConfig& cfg, const SteadyOrbit* right)
{
    for (std::size_t i = 0; i < lv.cells.size(); ++i)
        if (lv.cells[i].orbit.get() == right)
            return scheme_detail::lo_edge(cfg, lv.cells[i].center);
    return cfg.r_hi;
}

inline WellBalancedResult well_balanced()
{
    WellBalancedResult out;
    const auto p = PhysParams::relativistic(1, 0.3, 1);
    SchemeConfig cfg;
    cfg.params = p;
    cfg.dr = 0.05;
    cfg.dt = 0.02;
    cfg.r_lo = 2 * p.M + 0.5;
    cfg.r_hi = 20 * p.M;
    cfg.t_end = 100 * cfg.dt;
    cfg.snapshot_every = 1;
    out.dr = cfg.dr;
    // smooth orbits, outflow and accretion
    for (double v0 : {0.05, -0.05}) {
        const auto o = make_orbit_ptr(make_base(10, 1, v0, p), p);
        const auto sol = run(cfg, InitialData::from_orbit(o));
        out.failed |= sol.failed;
        for (const auto& c : sol.final_level.cells)
            for (int q = 0; q <= 16; ++q) {
                const double r = scheme_detail::lo_edge(cfg, c.center)
                               + (scheme_detail::hi_edge(cfg, c.center) - scheme_detail::lo_edge(cfg, c.center)) * q / 16;
                const FluidState a = c.orbit->eval(r), b = o->eval(r);
                out.smooth_dev = std::max({out.smooth_dev, std::abs(a.rho - b.rho) / b.rho, std::abs(a.v - b.v)});
            }
    }
    // standing shock at rj between a supersonic inner orbit and its jumped partner
    const double rj = 7;
    const FluidState ul{1, 0.9};
    const auto lo = make_orbit_ptr(make_base(rj, ul.rho, ul.v, p), p);
    const FluidState ur = steady_jump(ul, p);
    const auto ro = make_orbit_ptr(make_base(rj, ur.rho, ur.v, p), p);
    const auto sol = run(cfg, InitialData::from_pieces({-std::numeric_limits<double>::infinity(), rj}, {lo, ro}));
    out.failed |= sol.failed;
    double prev = jump_location(sol.snapshots.front(), cfg, ro.get());
    for (const auto& lv : sol.snapshots) {
        const double loc = jump_location(lv, cfg, ro.get());
        out.max_drift = std::max(out.max_drift, std::abs(loc - prev));
        prev = loc;
        // L1 deviation from the datum away from the jump
        double l1 = 0;
        for (const auto& c : lv.cells) {
            const double a = scheme_detail::lo_edge(cfg, c.center), b = scheme_detail::hi_edge(cfg, c.center);
            const auto v = grp_detail::gauss5(
                [&](double r) {
                    if (std::abs(r - rj) <= 2 * cfg.dr)
                        return std::array<double, 2>{0.0, 0.0};
                    const FluidState s = c.orbit->eval(r), d = r < rj ? lo->eval(r) : ro->eval(r);
                    return std::array<double, 2>{std::abs(s.rho - d.rho) + std::abs(s.v - d.v), 0.0};
                },
                a, b);
            l1 += v[0];
        }
        out.shock_l1 = std::max(out.shock_l1, l1);
    }
    return out;
}

// 8. well-balanced random choice scheme
inline CriterionResult glimm_well_balanced()
{
    const auto w = well_balanced();
    CriterionResult r;
    r.measured = std::max(w.smooth_dev, w.shock_l1);
    r.tolerance = 1e-8;
    r.pass = !w.failed && w.smooth_dev < 1e-8 && w.shock_l1 < 1e-8 && w.max_drift <= w.dr * (1 + 1e-12);
    char buf[200];
    std::snprintf(buf, sizeof buf, "smooth_sup=%.3g shock_L1=%.3g max_drift=%.3g (dr=%.3g)", w.smooth_dev, w.shock_l1,
                  w.max_drift, w.dr);
    r.detail = buf;
    return r;
}

struct ConvergenceStudy {
    std::vector<double> drs, errors, tv_constants;
    double order = 0;
    bool monotone = false;
};

inline ConvergenceStudy glimm_convergence_study(int refinements = 4, int threads = 1)
{
    const auto p = PhysParams::minkowski(1, 0.3);
    const FluidState ul{2, 0}, ur{1, 0};
    const auto exact = solve_riemann(ul, ur, 0, p);
    ConvergenceStudy st;
    for (int n = 0; n < refinements; ++n) {
        const double dr = 1.0 / (50 * (1 << n));
        SchemeConfig cfg;
        cfg.params = p;
        cfg.dr = dr;
        cfg.dt = dr / 4;
        cfg.r_lo = -1;
        cfg.r_hi = 1;
        cfg.t_end = 0.5;
        cfg.threads = threads;
        const auto sol = run(cfg, InitialData::from_sampler([&](double r) { return r < 0 ? ul : ur; }));
        if (sol.failed)
            throw numerical_error("convergence run failed: " + sol.failure);
        const double t = sol.final_level.t;
        double err = 0;
        for (const auto& c : sol.final_level.cells) {
            const double a = scheme_detail::lo_edge(cfg, c.center), b = scheme_detail::hi_edge(cfg, c.center);
            const int q = 64;
            for (int i = 0; i < q; ++i) {
                const double r = a + (b - a) * (i + 0.5) / q;
                err += std::abs(c.orbit->eval(r).rho - sample_fan(exact, r / t).rho) * (b - a) / q;
            }
        }
        double cmax = 0;
        for (std::size_t i = 0; i + 1 < sol.diagnostics.size(); ++i) {
            const auto& d1 = sol.diagnostics[i];
            const auto& d2 = sol.diagnostics[i + 1];
            if (d1.L_J > 0)
                cmax = std::max(cmax, (d2.L_J - d1.L_J) / ((cfg.dt + cfg.dr) * d1.L_J));
        }
        st.drs.push_back(dr);
        st.errors.push_back(err);
        st.tv_constants.push_back(cmax);
    }
    st.order = oracle::slope(st.drs, st.errors);
    st.monotone = true;
    for (std::size_t i = 1; i < st.errors.size(); ++i)
        st.monotone &= st.errors[i] < st.errors[i - 1];
    return st;
}

// 9. convergence to the exact self-similar solution in flat space
inline CriterionResult glimm_convergence()
{
    const auto st = glimm_convergence_study();
    CriterionResult r;
    r.measured = st.order;
    r.tolerance = 0.6;
    r.pass = st.monotone && st.order >= 0.6;
    std::string d = "L1 errors:";
    char buf[64];
    for (double e : st.errors) {
        std::snprintf(buf, sizeof buf, " %.4g", e);
        d += buf;
    }
    d += st.monotone ? " (monotone)" : " (NOT monotone)";
    d += " fitted TV constants C:";
    for (double c : st.tv_constants) {
        std::snprintf(buf, sizeof buf, " %.3g", c);
        d += buf;
    }
    r.detail = d;
    return r;
}

// 10. fitted orders of the formal limits
inline CriterionResult limit_orders()
{
    const auto nr = limit_consistency(PhysParams::non_relativistic(0.3, 1), LimitKind::NonRelativistic, 1e-4);
    const auto mk = limit_consistency(PhysParams::relativistic(1, 0.3, 1), LimitKind::Minkowski, 1e-6);
    const auto s1 = limit_consistency(PhysParams::stiff(1, 1), LimitKind::Stiff, 1e-6);
    const auto s2 = limit_consistency(PhysParams::stiff(0.5, 1), LimitKind::Stiff, 1e-6);
    const double exact = std::max(s1.exact_dev, s2.exact_dev);
    CriterionResult r;
    r.measured = nr.order;
    r.tolerance = 0;
    r.pass = nr.order >= 1.8 && nr.order <= 2.2 && mk.order >= 0.8 && mk.order <= 1.2 && exact <= 1e-14;
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "eps^2 order=%.3f (window [1.8,2.2]) M order=%.3f (window [0.8,1.2]) stiff exact dev=%.3g "
                  "near-stiff order=%.3f planar dev=%.3g",
                  nr.order, mk.order, exact, s1.order, mk.planar_dev);
    r.detail = buf;
    return r;
}

struct Criterion {
    int id;
    const char* name;
    std::function<CriterionResult()> run;
};

inline std::vector<Criterion> all_criteria()
{
    return {
        {1, "critical-zeros", critical_zeros},
        {2, "sonic-classification", sonic_classification},
        {3, "steady-first-integrals", steady_integrals},
        {4, "stiff-closed-form", stiff_closed_form},
        {5, "riemann-soundness", riemann_soundness},
        {6, "diminishing-tv", diminishing_tv},
        {7, "grp-orders", grp_orders},
        {8, "glimm-well-balanced", glimm_well_balanced},
        {9, "glimm-convergence", glimm_convergence},
        {10, "limit-orders", limit_orders},
    };
}

inline CriterionResult run_criterion(const Criterion& c) { return timed(c.id, c.name, c.run); }

} // namespace bhflow::verify
