#pragma once

#include <bhflow/bhflow.hpp>
#include <bhflow/verify/acceptance.hpp>

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace bhflow::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

enum ExitCode { ok = 0, solver_failure = 2, config_failure = 3, usage = 64 };

struct usage_error : error {
    using error::error;
};

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seq_offset = 0;
    int parallel = 1;
    std::string suite = "all";
};

struct Manifest {
    std::string command;
    std::string config_path;
    std::string output_dir;
    std::vector<std::pair<std::string, std::string>> files; // name, sha256
    json extra = json::object();
};

inline std::string sha256_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw error("cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 15];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

inline std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// CSV writer: header row, LF endings, 17 significant digits
class Csv {
public:
    Csv(const fs::path& path, std::initializer_list<const char*> header) : out_(path, std::ios::binary)
    {
        if (!out_)
            throw error("cannot write " + path.string());
        bool first = true;
        for (const char* h : header) {
            out_ << (first ? "" : ",") << h;
            first = false;
        }
        out_ << '\n';
    }

    template <class... T>
    void row(const T&... xs)
    {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(xs), first = false), ...);
        out_ << '\n';
    }

private:
    static std::string cell(double x) { return fmt(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    std::ofstream out_;
};

inline int thread_cap(int requested)
{
    int n = std::max(1, requested);
    if (const char* s = std::getenv("SOLVER_THREADS")) {
        const int cap = std::atoi(s);
        if (cap > 0)
            n = std::min(n, cap);
    }
    return n;
}

inline json load_config(const std::string& path)
{
    if (path.empty())
        throw usage_error("--config is required for this command");
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw config_error(std::string("malformed config: ") + e.what());
    }
}

inline double need(const json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_number())
        throw config_error(std::string("missing numeric field '") + key + "'");
    return j.at(key).get<double>();
}

// No defaults for eps, k or the mass: every model parameter must be written out.
inline PhysParams parse_params(const json& j)
{
    const double eps = need(j, "eps");
    const std::string model = j.value("model", "");
    if (model == "stiff") {
        if (j.contains("k"))
            throw config_error("stiff model fixes k = 1/eps; omit 'k'");
        return PhysParams::stiff(eps, need(j, "M"));
    }
    const double k = need(j, "k");
    if (model == "planar")
        return PhysParams::minkowski(eps, k);
    if (!model.empty())
        throw config_error("unknown model '" + model + "'");
    if (eps == 0)
        return PhysParams::non_relativistic(k, need(j, "m"));
    return PhysParams::relativistic(eps, k, need(j, "M"));
}

inline FluidState parse_state(const json& j) { return {need(j, "rho"), need(j, "v")}; }

inline void write_manifest(Manifest& m)
{
    json j;
    j["command"] = m.command;
    j["config_path"] = m.config_path;
    j["output_dir"] = m.output_dir;
    std::sort(m.files.begin(), m.files.end());
    j["files"] = json::array();
    for (const auto& [name, sum] : m.files)
        j["files"].push_back({{"name", name}, {"sha256", sum}});
    for (const auto& [k, v] : m.extra.items())
        j[k] = v;
    std::ofstream out(fs::path(m.output_dir) / "manifest.json", std::ios::binary);
    out << j.dump(2) << '\n';
}

inline void record(Manifest& m, const fs::path& file)
{
    m.files.emplace_back(file.filename().string(), sha256_file(file));
}

template <class F>
void for_each_parallel(int n, int threads, F&& f)
{
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first;
    std::mutex mu;
    for (int t = 0; t < std::min(threads, n); ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lk(mu);
                    if (!first)
                        first = std::current_exception();
                }
            }
        });
    for (auto& th : pool)
        th.join();
    if (first)
        std::rethrow_exception(first);
}

// ---- steady ----------------------------------------------------------------

inline int cmd_steady(const Options& o, Manifest& man)
{
    const json cfg = load_config(o.config_path);
    std::vector<PhysParams> models;
    if (cfg.contains("models"))
        for (const auto& m : cfg.at("models"))
            models.push_back(parse_params(m));
    else if (cfg.contains("params"))
        models.push_back(parse_params(cfg.at("params")));
    else
        throw config_error("steady config needs 'params' or 'models'");
    struct Case {
        double r0, rho0, v0;
    };
    std::vector<Case> cases;
    for (const auto& c : cfg.value("cases", json::array()))
        cases.push_back({need(c, "r0"), need(c, "rho0"), need(c, "v0")});
    const int points = cfg.value("points", 400);
    if (points < 2)
        throw config_error("points must be at least 2");

    const int n = static_cast<int>(models.size() * cases.size());
    std::vector<json> results(static_cast<std::size_t>(n));
    std::mutex mu;
    for_each_parallel(n, thread_cap(o.parallel), [&](int idx) {
        const auto& p = models[static_cast<std::size_t>(idx) / cases.size()];
        const auto& c = cases[static_cast<std::size_t>(idx) % cases.size()];
        const int mi = idx / static_cast<int>(cases.size()), ci = idx % static_cast<int>(cases.size());
        json res = {{"model", mi}, {"case", ci}};
        try {
            const auto orbit = make_global_orbit(make_base(c.r0, c.rho0, c.v0, p), p);
            const std::string name = "steady_m" + std::to_string(mi) + "_c" + std::to_string(ci) + ".csv";
            const fs::path path = fs::path(o.out_dir) / name;
            // log grid in the distance to the horizon (to r = 0 without relativity)
            double base = 0, lo = 0, hi = 0;
            if (p.planar()) {
                lo = c.r0 - 10;
                hi = c.r0 + 10;
            } else if (p.eps == 0) {
                lo = 1e-3 * p.r_min();
                hi = 1e3 * p.r_min();
            } else {
                base = 2 * p.M;
                lo = 2 * p.M * (1 + 1e-6);
                hi = 1e3 * std::max(p.M, 1e-300);
            }
            int skipped = 0;
            {
                Csv csv(path, {"r", "rho", "v", "branch_id", "is_shock", "regime"});
                const std::string regime = to_string(orbit.kind);
                for (int i = 0; i < points; ++i) {
                    const double u = static_cast<double>(i) / (points - 1);
                    const double r = p.planar() ? lo + (hi - lo) * u : base + (lo - base) * std::pow((hi - base) / (lo - base), u);
                    try {
                        const FluidState s = orbit.eval(r);
                        const bool shock = orbit.shock_radius && std::abs(r - *orbit.shock_radius) <= 1e-12 * r;
                        csv.row(r, s.rho, s.v, orbit.branch_id(r), shock ? 1 : 0, regime);
                    } catch (const range_error&) {
                        ++skipped;
                    }
                }
                if (orbit.shock_radius) {
                    const double rs = *orbit.shock_radius;
                    const FluidState a = orbit.eval_left(rs), b = orbit.eval(rs);
                    csv.row(rs, a.rho, a.v, orbit.branch_id(rs * (1 - 1e-12)), 1, regime);
                    csv.row(rs, b.rho, b.v, orbit.branch_id(rs), 1, regime);
                }
            }
            res["file"] = name;
            res["kind"] = to_string(orbit.kind);
            res["p_value"] = orbit.classification.p_value;
            res["unrepresentable_points"] = skipped;
            if (orbit.shock_radius)
                res["shock_radius"] = *orbit.shock_radius;
            std::lock_guard lk(mu);
            record(man, path);
        } catch (const config_error&) {
            throw;
        } catch (const error& e) {
            res["error"] = e.what();
        }
        results[static_cast<std::size_t>(idx)] = res;
    });
    man.extra["cases"] = results;
    return ok;
}

// ---- riemann ---------------------------------------------------------------

inline int cmd_riemann(const Options& o, Manifest& man)
{
    const json cfg = load_config(o.config_path);
    const PhysParams p = parse_params(cfg.at("params"));
    const double r0 = need(cfg, "r0");
    const FluidState l = parse_state(cfg.at("left")), r = parse_state(cfg.at("right"));
    const int samples = cfg.value("samples", 512);
    const auto fan = solve_riemann(l, r, r0, p);

    const fs::path rec = fs::path(o.out_dir) / "riemann_record.txt";
    {
        std::ofstream out(rec, std::ios::binary);
        out << "middle_rho=" << fmt(fan.middle.rho) << '\n' << "middle_v=" << fmt(fan.middle.v) << '\n';
        for (const auto* w : {&fan.wave1, &fan.wave2}) {
            const std::string pre = "wave" + std::to_string(w->family) + "_";
            out << pre << "kind=" << to_string(w->kind) << '\n'
                << pre << "speed_lo=" << fmt(w->speed_lo) << '\n'
                << pre << "speed_hi=" << fmt(w->speed_hi) << '\n'
                << pre << "strength=" << fmt(w->strength()) << '\n';
        }
        out << "strength=" << fmt(fan.strength()) << '\n';
    }
    record(man, rec);

    const fs::path prof = fs::path(o.out_dir) / "riemann_profile.csv";
    {
        const double a = std::min(fan.wave1.speed_lo, fan.wave2.speed_lo);
        const double b = std::max(fan.wave1.speed_hi, fan.wave2.speed_hi);
        const double pad = 0.25 * std::max(b - a, 1e-3);
        Csv csv(prof, {"xi", "rho", "v"});
        for (int i = 0; i < samples; ++i) {
            const double xi = a - pad + (b - a + 2 * pad) * i / std::max(1, samples - 1);
            const FluidState s = sample_fan(fan, xi);
            csv.row(xi, s.rho, s.v);
        }
    }
    record(man, prof);
    return ok;
}

// ---- evolve ----------------------------------------------------------------

struct EvolveSetup {
    SchemeConfig cfg;
    InitialData init;
    std::function<FluidState(double)> reference; // initial datum, for the deviation column
};

inline EvolveSetup parse_evolve(const json& j, const Options& o)
{
    EvolveSetup s;
    auto& c = s.cfg;
    c.params = parse_params(j.at("params"));
    const json& g = j.at("grid");
    c.dr = need(g, "dr");
    c.dt = need(g, "dt");
    c.r_lo = need(g, "r_lo");
    c.r_hi = need(g, "r_hi");
    c.t0 = g.value("t0", 0.0);
    c.t_end = need(g, "t_end");
    c.snapshot_every = g.value("snapshot_every", 0);
    c.frozen_fan_only = j.value("frozen_fan_only", false);
    c.threads = thread_cap(o.parallel);
    if (j.contains("sequence"))
        c.sequence = SuppliedSequence{j.at("sequence").get<std::vector<double>>()};
    else
        c.sequence = VanDerCorput{o.seq_offset};

    const json& ini = j.at("initial");
    const std::string type = ini.value("type", "");
    const auto& p = c.params;
    if (type == "orbit") {
        const auto orbit = make_orbit_ptr(make_base(need(ini, "r0"), need(ini, "rho0"), need(ini, "v0"), p), p);
        s.init = InitialData::from_orbit(orbit);
        s.reference = [orbit](double r) { return orbit->eval(r); };
    } else if (type == "steady_shock") {
        const double rj = need(ini, "r_jump");
        const FluidState ul = parse_state(ini.at("left"));
        const auto lo = make_orbit_ptr(make_base(rj, ul.rho, ul.v, p), p);
        const FluidState ur = steady_jump(ul, p);
        const auto ro = make_orbit_ptr(make_base(rj, ur.rho, ur.v, p), p);
        s.init = InitialData::from_pieces({-std::numeric_limits<double>::infinity(), rj}, {lo, ro});
        s.reference = [=](double r) { return r < rj ? lo->eval(r) : ro->eval(r); };
    } else if (type == "riemann") {
        const double rs = need(ini, "r_split");
        const FluidState ul = parse_state(ini.at("left")), ur = parse_state(ini.at("right"));
        s.reference = [=](double r) { return r < rs ? ul : ur; };
        s.init = InitialData::from_sampler(s.reference);
    } else {
        throw config_error("initial.type must be orbit, steady_shock or riemann");
    }
    return s;
}

inline int cmd_evolve(const Options& o, Manifest& man)
{
    const json j = load_config(o.config_path);
    EvolveSetup s;
    try {
        s = parse_evolve(j, o);
    } catch (const json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    s.cfg.validate(); // CFL and domain gate before any stepping
    const auto sol = run(s.cfg, s.init);
    const auto& p = s.cfg.params;

    auto dump = [&](const Level& lv) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%06d.csv", lv.index);
        const fs::path path = fs::path(o.out_dir) / name;
        {
            Csv csv(path, {"t", "r", "rho", "v", "w", "z", "deviation"});
            for (int i = 0; i <= s.cfg.nodes(); ++i) {
                const double r = node_radius(s.cfg, i);
                const FluidState u = eval_level(lv, s.cfg, r);
                const auto inv = riemann_invariants(u, p);
                double dev = 0;
                try {
                    const FluidState ref = s.reference(r);
                    dev = std::max(std::abs(u.rho - ref.rho) / ref.rho, std::abs(u.v - ref.v));
                } catch (const error&) {
                    dev = std::numeric_limits<double>::quiet_NaN();
                }
                csv.row(lv.t, r, u.rho, u.v, inv.w, inv.z, dev);
            }
        }
        record(man, path);
    };
    for (const auto& lv : sol.snapshots)
        dump(lv);
    if (sol.snapshots.empty() || sol.snapshots.back().index != sol.final_level.index)
        dump(sol.final_level);

    const fs::path diag = fs::path(o.out_dir) / "diagnostics.csv";
    {
        Csv csv(diag, {"t", "tv_lnrho", "tv_velocity", "L_J", "max_wavespeed", "mass", "trusted_lo", "trusted_hi",
                       "shock_flag", "fan_halvings"});
        for (const auto& d : sol.diagnostics)
            csv.row(d.t, d.tv_lnrho, d.tv_velocity, d.L_J, d.max_wavespeed, d.mass, d.trusted_lo, d.trusted_hi,
                    d.shock_flag ? 1 : 0, d.fan_halvings);
    }
    record(man, diag);
    man.extra["steps"] = sol.final_level.index;
    if (sol.failed) {
        man.extra["failure_level"] = sol.failure_level;
        man.extra["failure"] = sol.failure;
        std::fprintf(stderr, "evolve: failed at level %d: %s\n", sol.failure_level, sol.failure.c_str());
        return solver_failure;
    }
    return ok;
}

// ---- limits ----------------------------------------------------------------

inline LimitKind parse_limit_kind(const std::string& s)
{
    for (auto k : {LimitKind::Stiff, LimitKind::NonRelativistic, LimitKind::Minkowski, LimitKind::NonRelMinkowski})
        if (s == to_string(k))
            return k;
    throw config_error("unknown limit kind '" + s + "'");
}

inline int cmd_limits(const Options& o, Manifest& man)
{
    const json cfg = load_config(o.config_path);
    const fs::path path = fs::path(o.out_dir) / "limits.csv";
    json orders = json::array();
    {
        Csv csv(path, {"kind", "small", "dev_flux", "dev_source", "dev_eigen", "dev_max"});
        for (const auto& c : cfg.at("checks")) {
            const auto kind = parse_limit_kind(c.at("kind").get<std::string>());
            const auto rep = limit_consistency(parse_params(c.at("params")), kind, need(c, "small"));
            for (std::size_t i = 0; i < rep.small.size(); ++i)
                csv.row(to_string(kind), rep.small[i], rep.dev_flux[i], rep.dev_source[i], rep.dev_eigen[i],
                        rep.dev_max[i]);
            orders.push_back({{"kind", to_string(kind)},
                              {"order", rep.order},
                              {"order_flux", rep.order_flux},
                              {"order_source", rep.order_source},
                              {"order_eigen", rep.order_eigen},
                              {"exact_dev", rep.exact_dev},
                              {"planar_dev", rep.planar_dev}});
        }
    }
    record(man, path);
    man.extra["orders"] = orders;
    return ok;
}

// ---- verify ----------------------------------------------------------------

inline std::vector<int> parse_suite(const std::string& s)
{
    std::vector<int> ids;
    if (s == "all") {
        for (int i = 1; i <= 10; ++i)
            ids.push_back(i);
        return ids;
    }
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        char* end = nullptr;
        const long v = std::strtol(tok.c_str(), &end, 10);
        if (tok.empty() || *end != '\0' || v < 1 || v > 10)
            throw usage_error("unknown suite id '" + tok + "' (use all or a comma list of 1..10)");
        ids.push_back(static_cast<int>(v));
    }
    return ids;
}

inline int cmd_verify(const Options& o, Manifest& man, bool write_files)
{
    const auto ids = parse_suite(o.suite);
    const auto all = verify::all_criteria();
    int failed = 0;
    std::ostringstream report;
    for (int id : ids) {
        const auto r = verify::run_criterion(all[static_cast<std::size_t>(id - 1)]);
        const std::string line = "id=" + std::to_string(r.id) + " measured=" + fmt(r.measured) + " tolerance="
                               + fmt(r.tolerance) + " pass=" + (r.pass ? "true" : "false") + " name=" + r.name
                               + " detail=\"" + r.detail + "\"";
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        report << line << '\n';
        failed += r.pass ? 0 : 1;
    }
    if (write_files) {
        const fs::path path = fs::path(o.out_dir) / "verify_report.txt";
        std::ofstream(path, std::ios::binary) << report.str();
        record(man, path);
    }
    man.extra["failed"] = failed;
    return failed == 0 ? ok : solver_failure;
}

// ---- plot helper -----------------------------------------------------------

// gnuplot script over the CSVs listed in an existing manifest
inline int cmd_plot(const Options& o, Manifest&)
{
    const fs::path mpath = fs::path(o.out_dir) / "manifest.json";
    std::ifstream in(mpath);
    if (!in)
        throw config_error("no manifest in " + o.out_dir + "; run a command first");
    const json m = json::parse(in);
    std::ofstream gp(fs::path(o.out_dir) / "plot.gp", std::ios::binary);
    gp << "set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 900,600\n";
    for (const auto& f : m.at("files")) {
        const std::string name = f.at("name");
        if (name.size() < 4 || name.substr(name.size() - 4) != ".csv")
            continue;
        const std::string stem = name.substr(0, name.size() - 4);
        gp << "set output '" << stem << ".png'\n";
        if (name.rfind("steady_", 0) == 0)
            gp << "set logscale x\nplot '" << name << "' using 1:3 with lines title 'v'\nunset logscale x\n";
        else if (name.rfind("snapshot_", 0) == 0)
            gp << "plot '" << name << "' using 2:3 with lines title 'rho', '' using 2:4 with lines title 'v'\n";
        else if (name == "riemann_profile.csv")
            gp << "plot '" << name << "' using 1:2 with lines title 'rho', '' using 1:3 with lines title 'v'\n";
        else if (name == "diagnostics.csv")
            gp << "plot '" << name << "' using 1:2 with lines, '' using 1:4 with lines\n";
    }
    return ok;
}

} // namespace bhflow::cli
