#pragma once

#include "errors.hpp"
#include "grp.hpp"
#include "model.hpp"
#include "params.hpp"
#include "riemann.hpp"
#include "steady.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace bhflow {

// base-2 radical inverse of (i + offset), mapped to (-1, 1)
inline double van_der_corput(std::uint64_t i, std::uint64_t offset = 0)
{
    std::uint64_t n = i + offset;
    double x = 0, f = 0.5;
    while (n) {
        if (n & 1u)
            x += f;
        n >>= 1;
        f *= 0.5;
    }
    return 2 * x - 1;
}

struct VanDerCorput {
    std::uint64_t offset = 0;
};

struct SuppliedSequence {
    std::vector<double> values; // w_1, w_2, ... in (-1, 1), cycled
};

struct SchemeConfig {
    PhysParams params;
    double dr = 0.05;
    double dt = 0.02;
    double r_lo = 0; // inner edge of the window (> 2M)
    double r_hi = 1;
    double t0 = 0;
    double t_end = 1;
    std::variant<VanDerCorput, SuppliedSequence> sequence = VanDerCorput{};
    bool frozen_fan_only = false;
    bool diagnostics = true;
    int snapshot_every = 0; // 0: initial and final level only
    int threads = 1;
    double cfl_margin = 0.05; // eps = 0 only

    int steps() const { return static_cast<int>(std::llround((t_end - t0) / dt)); }
    int nodes() const { return static_cast<int>(std::llround((r_hi - r_lo) / dr)); }

    double w(std::uint64_t i) const
    {
        if (const auto* v = std::get_if<VanDerCorput>(&sequence))
            return van_der_corput(i, v->offset);
        const auto& s = std::get<SuppliedSequence>(sequence).values;
        return s[(i - 1) % s.size()];
    }

    void validate() const
    {
        const auto& p = params;
        if (!(dr > 0) || !(dt > 0))
            throw config_error("dr and dt must be positive");
        if (!(r_hi > r_lo) || nodes() < 2)
            throw config_error("empty computational domain (r_lo >= r_hi)");
        if (!p.planar()) {
            const double h = p.eps == 0 ? 0.0 : 2 * p.M;
            if (!(r_lo > h))
                throw config_error("inner edge must lie strictly outside the horizon");
        }
        if (p.eps > 0 && !(dr / dt > 2 / p.eps))
            throw config_error("CFL violated: need dr/dt > 2/eps, got dr/dt = " + std::to_string(dr / dt));
        if (!(t_end >= t0))
            throw config_error("t_end before t0");
        if (const auto* s = std::get_if<SuppliedSequence>(&sequence)) {
            if (s->values.empty())
                throw config_error("supplied sequence is empty");
            for (double v : s->values)
                if (!(v > -1 && v < 1))
                    throw config_error("sequence values must lie in (-1, 1)");
        }
    }
};

struct cell_error : error {
    int level = 0;
    int cell = 0;
    cell_error(const std::string& what, int lev, int c)
        : error("level " + std::to_string(lev) + ", cell " + std::to_string(c) + ": " + what), level(lev), cell(c)
    {
    }
};

struct Cell {
    int center = 0; // node index of the cell midpoint; the cell is [r_{c-1}, r_{c+1}]
    double node_r = 0;
    FluidState node;
    OrbitPtr orbit;
    bool untrusted = false;
};

struct Level {
    int index = 0;
    double t = 0;
    std::vector<Cell> cells; // ascending centers of parity (index + 1) mod 2

    int parity() const { return (index + 1) % 2; }
};

struct LevelDiagnostics {
    int index = 0;
    double t = 0;
    double tv_lnrho = 0;
    double tv_velocity = 0;
    double L_J = 0;
    double max_wavespeed = 0;
    double mass = 0;
    bool shock_flag = false;
    double trusted_lo = 0, trusted_hi = 0;
    int fan_halvings = 0;
};

struct GridSolution {
    SchemeConfig cfg;
    std::vector<LevelDiagnostics> diagnostics;
    std::vector<Level> snapshots;
    Level final_level;
    bool failed = false;
    int failure_level = -1;
    std::string failure;
};

// Initial data: a sampled profile, one orbit shared by every cell, or orbits by radial pieces.
struct InitialData {
    std::function<FluidState(double)> sampler;
    // pieces[i] covers [starts[i], starts[i+1])
    std::vector<double> starts;
    std::vector<OrbitPtr> orbits;

    static InitialData from_sampler(std::function<FluidState(double)> f)
    {
        InitialData d;
        d.sampler = std::move(f);
        return d;
    }
    static InitialData from_orbit(OrbitPtr o)
    {
        InitialData d;
        d.starts = {-std::numeric_limits<double>::infinity()};
        d.orbits = {std::move(o)};
        return d;
    }
    static InitialData from_pieces(std::vector<double> starts, std::vector<OrbitPtr> orbits)
    {
        if (starts.size() != orbits.size() || starts.empty())
            throw config_error("orbit pieces and start radii differ in number");
        InitialData d;
        d.starts = std::move(starts);
        d.orbits = std::move(orbits);
        return d;
    }
};

inline double node_radius(const SchemeConfig& cfg, int j) { return cfg.r_lo + j * cfg.dr; }

// cell of the level containing r
inline const Cell& cell_at(const Level& lv, const SchemeConfig& cfg, double r)
{
    const double u = (r - cfg.r_lo) / cfg.dr;
    const int par = lv.parity();
    const int c = par + 2 * static_cast<int>(std::floor((u - par + 1) / 2));
    const int first = lv.cells.front().center;
    const int i = std::clamp((c - first) / 2, 0, static_cast<int>(lv.cells.size()) - 1);
    return lv.cells[static_cast<std::size_t>(i)];
}

inline FluidState eval_level(const Level& lv, const SchemeConfig& cfg, double r)
{
    return cell_at(lv, cfg, r).orbit->eval(r);
}

namespace scheme_detail {

inline double clamp_node(const SchemeConfig& cfg, double r) { return std::clamp(r, cfg.r_lo, cfg.r_hi); }

inline double lo_edge(const SchemeConfig& cfg, int c) { return std::max(node_radius(cfg, c - 1), cfg.r_lo); }
inline double hi_edge(const SchemeConfig& cfg, int c) { return std::min(node_radius(cfg, c + 1), cfg.r_hi); }

inline double velocity_log(const FluidState& s, const PhysParams& p)
{
    // ln((1 - eps v)/(1 + eps v)); the eps = 0 case uses its scaled limit -2v
    if (p.eps == 0)
        return -2 * s.v;
    return -2 * std::atanh(p.eps * s.v);
}

template <class F>
void parallel_for(int n, int threads, F&& f)
{
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (int i = t; i < n; i += threads)
                    f(i);
            } catch (...) {
                errs[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    for (auto& th : pool)
        th.join();
    for (auto& e : errs)
        if (e)
            std::rethrow_exception(e);
}

} // namespace scheme_detail

// Piecewise-steady level 0: each cell carries the orbit through its node.
inline Level reconstruct_initial(const SchemeConfig& cfg, const InitialData& init)
{
    const auto& p = cfg.params;
    Level lv;
    lv.index = 0;
    lv.t = cfg.t0;
    const int n = cfg.nodes();
    for (int c = lv.parity(); c <= n; c += 2) {
        Cell cell;
        cell.center = c;
        cell.node_r = scheme_detail::clamp_node(cfg, node_radius(cfg, c));
        try {
            if (init.sampler) {
                cell.node = init.sampler(cell.node_r);
                cell.orbit = make_orbit_ptr(make_base(cell.node_r, cell.node.rho, cell.node.v, p), p);
            } else {
                std::size_t k = 0;
                while (k + 1 < init.starts.size() && cell.node_r >= init.starts[k + 1])
                    ++k;
                cell.orbit = init.orbits[k];
                cell.node = cell.orbit->eval(cell.node_r);
            }
        } catch (const error& e) {
            throw cell_error(e.what(), 0, c);
        }
        lv.cells.push_back(std::move(cell));
    }
    return lv;
}

struct StepInfo {
    bool shock_flag = false;
    int fan_halvings = 0;
};

// Advance one level: a GRP at every interface, sampled at the shifted nodes of the next level.
inline Level step(const Level& lv, const SchemeConfig& cfg, StepInfo* info = nullptr)
{
    const auto& p = cfg.params;
    const int n = cfg.nodes();
    Level next;
    next.index = lv.index + 1;
    next.t = lv.t + cfg.dt;
    const double w = cfg.w(static_cast<std::uint64_t>(next.index));
    const int first = lv.cells.front().center;
    auto cell_by_center = [&](int c) -> const Cell* {
        const int i = (c - first) / 2;
        if (c < first || i >= static_cast<int>(lv.cells.size()))
            return nullptr;
        return &lv.cells[static_cast<std::size_t>(i)];
    };
    GrpOptions opt;
    opt.frozen_fan_only = cfg.frozen_fan_only;
    opt.steady_window = 2 * cfg.dr;

    std::vector<int> centers;
    for (int j = next.parity(); j <= n; j += 2)
        centers.push_back(j);
    next.cells.resize(centers.size());
    std::vector<char> flags(centers.size(), 0);
    std::vector<int> halv(centers.size(), 0);
    scheme_detail::parallel_for(static_cast<int>(centers.size()), cfg.threads, [&](int k) {
        const int j = centers[static_cast<std::size_t>(k)];
        const Cell* lc = cell_by_center(j - 1);
        const Cell* rc = cell_by_center(j + 1);
        // ghost cells extend the adjacent orbit
        const OrbitPtr lo = lc ? lc->orbit : rc->orbit;
        const OrbitPtr ro = rc ? rc->orbit : lc->orbit;
        const double r0 = node_radius(cfg, j);
        Cell cell;
        cell.center = j;
        cell.node_r = scheme_detail::clamp_node(cfg, r0 + w * cfg.dr);
        try {
            const GrpSolution g = solve_grp(lv.t, r0, lo, ro, cfg.dt, p, opt);
            cell.node = eval_grp(g, next.t, cell.node_r);
            if (const OrbitPtr* o = grp_orbit_at(g, next.t, cell.node_r))
                cell.orbit = *o;
            else
                cell.orbit = make_orbit_ptr(make_base(cell.node_r, cell.node.rho, cell.node.v, p), p);
            bool f = false;
            if (g.middle && g.middle->shock_radius && std::abs(*g.middle->shock_radius - r0) <= cfg.dr)
                f = true;
            if (g.steady_shock)
                f = true;
            flags[static_cast<std::size_t>(k)] = f;
            halv[static_cast<std::size_t>(k)] = std::max(g.fan1 ? g.fan1->halvings : 0, g.fan2 ? g.fan2->halvings : 0);
        } catch (const error& e) {
            throw cell_error(e.what(), next.index, j);
        }
        next.cells[static_cast<std::size_t>(k)] = std::move(cell);
    });
    if (info) {
        info->shock_flag = std::any_of(flags.begin(), flags.end(), [](char c) { return c != 0; });
        info->fan_halvings = *std::max_element(halv.begin(), halv.end());
    }
    return next;
}

struct TvFunctionals {
    double tv_lnrho = 0;
    double tv_velocity = 0;
    double L_J = 0;
    double max_wavespeed = 0;
    double mass = 0;
};

inline TvFunctionals tv_functionals(const Level& lv, const SchemeConfig& cfg)
{
    using namespace scheme_detail;
    const auto& p = cfg.params;
    TvFunctionals out;
    constexpr int samples = 16;
    for (std::size_t i = 0; i < lv.cells.size(); ++i) {
        const auto& c = lv.cells[i];
        const double a = lo_edge(cfg, c.center), b = hi_edge(cfg, c.center);
        FluidState prev = c.orbit->eval(a);
        for (int q = 1; q <= samples; ++q) {
            const double r = q == samples ? b : a + (b - a) * q / samples;
            const FluidState s = q == samples ? c.orbit->eval_left(b) : c.orbit->eval(r);
            out.tv_lnrho += std::abs(std::log(s.rho) - std::log(prev.rho));
            out.tv_velocity += std::abs(velocity_log(s, p) - velocity_log(prev, p));
            const auto ev = eigenvalues(s, r, p);
            out.max_wavespeed = std::max({out.max_wavespeed, std::abs(ev.lambda), std::abs(ev.mu)});
            prev = s;
        }
        const auto m = grp_detail::gauss5(
            [&](double r) {
                const auto u = conserved(c.orbit->eval(r), r, p);
                return std::array<double, 2>{u.u1, 0.0};
            },
            a, b);
        out.mass += m[0];
        if (i + 1 < lv.cells.size()) {
            const auto& d = lv.cells[i + 1];
            const double r = hi_edge(cfg, c.center);
            const FluidState ul = c.orbit->eval_left(r), ur = d.orbit->eval(r);
            out.tv_lnrho += std::abs(std::log(ur.rho) - std::log(ul.rho));
            out.tv_velocity += std::abs(velocity_log(ur, p) - velocity_log(ul, p));
            out.L_J += solve_riemann(ul, ur, r, p).strength();
        }
    }
    return out;
}

inline GridSolution run(const SchemeConfig& cfg, const InitialData& init)
{
    cfg.validate();
    GridSolution sol;
    sol.cfg = cfg;
    const auto& p = cfg.params;
    Level lv = reconstruct_initial(cfg, init);
    double tr_lo = cfg.r_lo, tr_hi = cfg.r_hi;

    auto record = [&](const Level& l, const StepInfo& info) {
        LevelDiagnostics d;
        d.index = l.index;
        d.t = l.t;
        d.shock_flag = info.shock_flag;
        d.fan_halvings = info.fan_halvings;
        if (cfg.diagnostics) {
            const auto tv = tv_functionals(l, cfg);
            d.tv_lnrho = tv.tv_lnrho;
            d.tv_velocity = tv.tv_velocity;
            d.L_J = tv.L_J;
            d.max_wavespeed = tv.max_wavespeed;
            d.mass = tv.mass;
        }
        d.trusted_lo = tr_lo;
        d.trusted_hi = tr_hi;
        sol.diagnostics.push_back(d);
    };
    record(lv, {});
    sol.snapshots.push_back(lv);
    const int steps = cfg.steps();
    // signal speed bound for the domain of determinacy
    const double cmax = p.eps > 0 ? 1 / p.eps : cfg.dr / cfg.dt;
    try {
        for (int s = 0; s < steps; ++s) {
            if (cfg.diagnostics) {
                const double ws = sol.diagnostics.back().max_wavespeed;
                const double lim = p.eps > 0 ? cfg.dr / cfg.dt : cfg.dr / cfg.dt / (1 + cfg.cfl_margin);
                if (!(ws < lim))
                    throw config_error("CFL violated at level " + std::to_string(lv.index) + ": max wave speed "
                                       + std::to_string(ws));
            }
            StepInfo info;
            lv = step(lv, cfg, &info);
            tr_lo += cmax * cfg.dt;
            tr_hi -= cmax * cfg.dt;
            for (auto& c : lv.cells)
                c.untrusted = c.node_r < tr_lo || c.node_r > tr_hi;
            record(lv, info);
            if (cfg.snapshot_every > 0 && lv.index % cfg.snapshot_every == 0 && s + 1 < steps)
                sol.snapshots.push_back(lv);
        }
    } catch (const config_error&) {
        throw;
    } catch (const error& e) {
        sol.failed = true;
        sol.failure_level = lv.index + 1;
        sol.failure = e.what();
    }
    sol.final_level = lv;
    if (sol.snapshots.back().index != lv.index)
        sol.snapshots.push_back(lv);
    return sol;
}

} // namespace bhflow
