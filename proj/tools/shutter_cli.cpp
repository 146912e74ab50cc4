#include <CLI11.hpp>

#include <cmath>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "shutter/shutter.hpp"

using namespace shutter;

namespace {

struct Context {
    RunConfig cfg;
    std::string command;
    unsigned threads = 1;
};

std::vector<double> time_grid(const RunConfig& c)
{
    GridSpec g{c.positive("time.tmin"), c.positive("time.tmax"), int(c.integer("time.steps")), c.flag("time.log")};
    if (g.count < 1)
        throw Error(Errc::NonPositiveParameter, "time.steps must be >= 1");
    if (!(g.stop > g.start) && g.count > 1)
        throw Error(Errc::TypeError, "time.tmax must exceed time.tmin");
    return g.values();
}

SearchOptions search_options(const Context& ctx)
{
    SearchOptions o;
    o.t_lo = ctx.cfg.positive("search.t_lo");
    o.t_hi = ctx.cfg.positive("search.t_hi");
    o.n_grid = int(ctx.cfg.integer("search.n_grid"));
    o.dt_tol = ctx.cfg.positive("search.dt_tol");
    o.sample_tol = ctx.cfg.positive("numerics.tol");
    o.threads = ctx.threads;
    return o;
}

SweepOptions sweep_options(const Context& ctx)
{
    SweepOptions o;
    o.search = search_options(ctx);
    o.search.threads = 1;
    o.max_poles = int(ctx.cfg.integer("numerics.max_poles"));
    o.threads = ctx.threads;
    return o;
}

int max_poles(const Context& ctx)
{
    const long long n = ctx.cfg.integer("numerics.max_poles");
    if (n < 1)
        throw Error(Errc::NonPositiveParameter, "numerics.max_poles must be >= 1");
    return int(n);
}

double probe_x(const Context& ctx, const BarrierSystem& sys)
{
    return ctx.cfg.has("time.x_nm") ? ctx.cfg.real("time.x_nm") : sys.L;
}

CsvTable table(const Context& ctx, std::vector<std::string> header)
{
    CsvTable t;
    t.provenance = ctx.cfg.provenance(ctx.command);
    t.header = std::move(header);
    return t;
}

CsvTable run_poles(const Context& ctx)
{
    const BarrierSystem sys = system_from(ctx.cfg);
    const PoleSet ps = find_poles(sys, max_poles(ctx));
    CsvTable t = table(ctx, {"n", "Re_k", "Im_k", "Re_E", "Im_E", "residual"});
    for (const ResonancePole& p : ps.imaginary_poles())
        t.rows.push_back({0LL, p.k.real(), p.k.imag(), p.E.real(), p.E.imag(), p.residual});
    for (const ResonancePole& p : ps.poles())
        t.rows.push_back({(long long)p.n, p.k.real(), p.k.imag(), p.E.real(), p.E.imag(), p.residual});
    return t;
}

CsvTable run_evolve(const Context& ctx)
{
    const BarrierSystem sys = system_from(ctx.cfg);
    const Propagator prop(sys, max_poles(ctx));
    const Probe pr = prop.probe(probe_x(ctx, sys));
    const WaveTrace tr = trace(pr, time_grid(ctx.cfg), ctx.cfg.positive("numerics.tol"), ctx.threads);
    CsvTable t = table(ctx, {"t_fs", "re_psi", "im_psi", "abs2", "abs2_over_T2", "n_terms"});
    for (const WaveSample& s : tr.samples)
        t.rows.push_back({s.t, s.psi.real(), s.psi.imag(), std::norm(s.psi), std::norm(s.psi) / pr.plateau(),
                          (long long)s.n_terms_used});
    return t;
}

CsvTable run_spectrogram(const Context& ctx)
{
    const BarrierSystem sys = system_from(ctx.cfg);
    const Propagator prop(sys, max_poles(ctx));
    const Spectrogram sp = spectrogram(prop.probe(probe_x(ctx, sys)), time_grid(ctx.cfg),
                                       ctx.cfg.positive("numerics.tol"),
                                       ctx.cfg.positive("numerics.underflow_guard"), ctx.threads);
    CsvTable t = table(ctx, {"t_fs", "abs2_over_T2", "omega_av", "omega_ratio", "sigma"});
    for (std::size_t i = 0; i < sp.times.size(); ++i)
        t.rows.push_back({sp.times[i], sp.abs2_over_plateau[i], opt_cell(sp.omega_av[i]),
                          opt_cell(sp.omega_ratio[i]), opt_cell(sp.sigma[i])});
    return t;
}

CsvTable run_tmax(const Context& ctx)
{
    const BarrierSystem sys = system_from(ctx.cfg);
    const Propagator prop(sys, max_poles(ctx));
    const double x = probe_x(ctx, sys);
    const TimeDomainResonance r = find_time_domain_resonance(prop.probe(x), search_options(ctx));
    CsvTable t = table(ctx, {"x_nm", "exists", "t_max", "height", "omega_av", "omega_ratio", "sigma", "n_terms"});
    const auto num = [&](double v) { return r.exists ? CsvCell(v) : CsvCell(); };
    t.rows.push_back({x, (long long)r.exists, num(r.t_max), num(r.height), num(r.omega_av_at_peak),
                      num(r.omega_ratio_at_peak), num(r.sigma_at_peak), (long long)r.n_terms});
    return t;
}

void sweep_rows(CsvTable& t, const SweepTable& tab, const std::function<std::vector<CsvCell>(const SweepRow&)>& lead)
{
    for (const SweepRow& r : tab.rows) {
        std::vector<CsvCell> row = lead(r);
        row.push_back((long long)r.exists);
        row.push_back(r.exists ? CsvCell(r.t_max) : CsvCell());
        row.push_back(r.exists ? CsvCell(r.omega_ratio) : CsvCell());
        row.push_back(r.exists ? CsvCell(r.height) : CsvCell());
        t.rows.push_back(std::move(row));
    }
}

CsvTable run_scan_tmax_L(const Context& ctx)
{
    const BarrierSystem tmpl = system_from(ctx.cfg);
    const SweepTable tab = sweep_tmax_vs_L(ctx.cfg.grid("scan.L_grid").values(), tmpl, sweep_options(ctx));
    CsvTable t = table(ctx, {"L_nm", "alpha", "exists", "t_max", "omega_ratio", "height"});
    sweep_rows(t, tab, [&](const SweepRow& r) {
        return std::vector<CsvCell>{r.independent, std::sqrt(tmpl.V / tmpl.c) * r.independent};
    });
    if (const auto b = find_basin(tab))
        std::cerr << "basin minimum at L = " << b->min_independent << " nm, t_max = " << b->min_t << " fs\n";
    if (const auto f = linear_suffix(tab))
        std::cerr << "linear regime from L = " << tab.rows[f->first].independent << " nm, slope "
                  << f->slope << " fs/nm, R2 " << f->r2 << "\n";
    return t;
}

CsvTable run_scan_freq_x(const Context& ctx)
{
    const BarrierSystem sys = system_from(ctx.cfg);
    const std::vector<double> xs = ctx.cfg.has("scan.x_grid") ? ctx.cfg.grid("scan.x_grid").values()
                                                               : GridSpec{0.25 * sys.L, 8.0 * sys.L, 32, false}.values();
    const SweepTable tab = sweep_freq_vs_x(xs, sys, sweep_options(ctx));
    CsvTable t = table(ctx, {"x_nm", "x_over_L", "exists", "t_max", "omega_ratio", "height"});
    sweep_rows(t, tab, [&](const SweepRow& r) { return std::vector<CsvCell>{r.independent, r.independent / sys.L}; });
    return t;
}

CsvTable run_scan_freq_alpha(const Context& ctx)
{
    const double V = ctx.cfg.positive("system.V_eV"), m = ctx.cfg.positive("system.mass_ratio");
    const double u = ctx.cfg.positive("scan.u");
    const SweepOptions opt = sweep_options(ctx);
    const SweepTable tab = sweep_freq_vs_alpha(ctx.cfg.grid("scan.alpha_grid").values(), u, V, m, opt);
    CsvTable t = table(ctx, {"alpha", "L_nm", "exists", "t_max", "omega_ratio", "height"});
    sweep_rows(t, tab, [&](const SweepRow& r) {
        return std::vector<CsvCell>{r.independent, system_from_alpha(r.independent, u, V, m).L};
    });
    if (const auto c = ratio_crossing(tab, u, V, m, ctx.cfg.positive("scan.bisect_tol"), opt))
        std::cerr << "omega_av/omega_V crosses 1 at alpha = " << *c << "\n";
    return t;
}

CsvTable run_window(const Context& ctx)
{
    const double V = ctx.cfg.positive("system.V_eV"), m = ctx.cfg.positive("system.mass_ratio");
    const double u = ctx.cfg.positive("scan.u");
    const OpacityWindow w = opacity_window(u, V, m, ctx.cfg.positive("scan.bisect_tol"), sweep_options(ctx),
                                           ctx.cfg.grid("scan.alpha_grid").values());
    CsvTable t = table(ctx, {"u", "alpha_c", "alpha_u", "critical_opacity"});
    t.rows.push_back({u, w.alpha_c, w.alpha_u, w.critical_opacity});
    return t;
}

CsvTable run_oracle_compare(const Context& ctx)
{
    const BarrierSystem sys = system_from(ctx.cfg);
    CnConfig cn;
    cn.x_min = ctx.cfg.real("oracle.x_min");
    cn.x_max = ctx.cfg.real("oracle.x_max");
    cn.dx = ctx.cfg.positive("oracle.dx");
    cn.dt = ctx.cfg.positive("oracle.dt");
    cn.absorber_width = ctx.cfg.positive("oracle.absorber_width");
    cn.right_absorber_width = ctx.cfg.positive("oracle.right_absorber_width");
    cn.absorber_strength = ctx.cfg.positive("oracle.absorber_strength");
    const std::vector<double> probes = ctx.cfg.has("oracle.probes") ? ctx.cfg.list("oracle.probes")
                                                                    : std::vector<double>{0.5 * sys.L, sys.L, 2.0 * sys.L};
    const CnResult res = cn_evolve(sys, cn, probes, ctx.cfg.grid("oracle.times").values());
    const Propagator prop(sys, max_poles(ctx));
    const double tol = ctx.cfg.positive("numerics.tol");
    CsvTable t = table(ctx, {"x_nm", "t", "abs2_analytic", "abs2_cn", "rel_err"});
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const Probe pr = prop.probe(probes[p]);
        std::vector<WaveSample> ws(res.times.size());
        parallel_for(ws.size(), ctx.threads, [&](std::size_t i) { ws[i] = pr.sample_best(res.times[i], tol); });
        for (std::size_t i = 0; i < res.times.size(); ++i) {
            const double a = std::norm(ws[i].psi), c = std::norm(res.psi[p][i]);
            t.rows.push_back({probes[p], res.times[i], a, c, a > 0 ? CsvCell(std::abs(a - c) / a) : CsvCell()});
        }
    }
    return t;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantum shutter transients through a rectangular barrier"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", tool_version);

    std::string config_path, out_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    auto bind = [&](CLI::App* a, const std::string& flag, const std::string& key, const std::string& help) {
        a->add_option_function<std::string>(flag, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); }, help);
    };

    app.add_option("--config", config_path, "INI file, or a CSV written by this tool to replay its run");
    app.add_option("--out", out_path, "CSV destination (default stdout)");
    bind(&app, "--threads", "numerics.threads", "worker threads, 0 = all cores");
    bind(&app, "--tol", "numerics.tol", "relative truncation tolerance");
    bind(&app, "--V", "system.V_eV", "barrier height, eV");
    bind(&app, "--E", "system.E_eV", "incidence energy, eV");
    bind(&app, "--L", "system.L_nm", "barrier width, nm");
    bind(&app, "--mass", "system.mass_ratio", "effective mass ratio");
    bind(&app, "--max-poles", "numerics.max_poles", "pole pairs");
    app.add_option_function<std::vector<std::string>>("--set", [&](const std::vector<std::string>& kv) {
        for (const std::string& s : kv) {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("--set", "expected section.key=value");
            overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
        }
    }, "override any key, e.g. --set search.t_hi=80");

    using Runner = CsvTable (*)(const Context&);
    std::vector<std::pair<CLI::App*, Runner>> subs;
    auto sub = [&](const char* name, const char* help, Runner r) {
        CLI::App* s = app.add_subcommand(name, help);
        subs.emplace_back(s, r);
        return s;
    };
    auto timed = [&](CLI::App* s) {
        bind(s, "--x", "time.x_nm", "probe position, nm (default L)");
        bind(s, "--tmin", "time.tmin", "fs");
        bind(s, "--tmax", "time.tmax", "fs");
        bind(s, "--steps", "time.steps", "samples");
        bind(s, "--log", "time.log", "geometric spacing (true/false)");
    };
    sub("poles", "resonance pole table", run_poles);
    timed(sub("evolve", "psi(x, t) on a time grid", run_evolve));
    timed(sub("spectrogram", "local frequency and bandwidth on a time grid", run_spectrogram));
    bind(sub("tmax", "first time-domain resonance at x", run_tmax), "--x", "time.x_nm", "probe position, nm");
    bind(sub("scan-tmax-L", "t_max at x = L over barrier widths", run_scan_tmax_L), "--grid", "scan.L_grid", "start:stop:count[:log]");
    bind(sub("scan-freq-x", "omega_av/omega_V at t_max over positions", run_scan_freq_x), "--grid", "scan.x_grid", "start:stop:count[:log]");
    {
        CLI::App* s = sub("scan-freq-alpha", "omega_av/omega_V at x = L over opacities", run_scan_freq_alpha);
        bind(s, "--grid", "scan.alpha_grid", "start:stop:count[:log]");
        bind(s, "--u", "scan.u", "V/E");
    }
    {
        CLI::App* s = sub("window", "opacity window [alpha_c, alpha_u]", run_window);
        bind(s, "--grid", "scan.alpha_grid", "coarse alpha scan");
        bind(s, "--u", "scan.u", "V/E");
    }
    {
        CLI::App* s = sub("oracle-compare", "analytic vs Crank-Nicolson densities", run_oracle_compare);
        bind(s, "--probes", "oracle.probes", "comma-separated positions, nm");
        bind(s, "--times", "oracle.times", "start:stop:count");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        Context ctx;
        std::string replayed;
        if (!config_path.empty())
            ctx.cfg = load_config(config_path, &replayed);
        for (const auto& [k, v] : overrides)
            ctx.cfg.set(k, v);
        if (!out_path.empty())
            ctx.cfg.set("output.path", out_path);
        const long long th = ctx.cfg.integer("numerics.threads");
        if (th < 0)
            throw Error(Errc::NonPositiveParameter, "numerics.threads must be >= 0");
        ctx.threads = th == 0 ? default_threads() : unsigned(th);
        for (const auto& [s, run] : subs) {
            if (!s->parsed())
                continue;
            ctx.command = s->get_name();
            if (!replayed.empty() && replayed != ctx.command)
                std::cerr << "note: replaying parameters recorded by '" << replayed << "'\n";
            emit_csv(run(ctx), ctx.cfg.text("output.path"));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
