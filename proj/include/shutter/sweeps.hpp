#ifndef SHUTTER_SWEEPS_HPP
#define SHUTTER_SWEEPS_HPP

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "analysis.hpp"
#include "core_types.hpp"
#include "parallel.hpp"
#include "propagator.hpp"

namespace shutter {

enum class SweepKind { TmaxVsL, FreqVsX, FreqVsAlpha };

inline const char* sweep_kind_name(SweepKind k)
{
    switch (k) {
    case SweepKind::TmaxVsL: return "TmaxVsL";
    case SweepKind::FreqVsX: return "FreqVsX";
    case SweepKind::FreqVsAlpha: return "FreqVsAlpha";
    }
    return "";
}

struct SweepRow {
    double independent = 0;
    double t_max = std::numeric_limits<double>::quiet_NaN();
    double omega_ratio = std::numeric_limits<double>::quiet_NaN();
    bool exists = false;
    double height = std::numeric_limits<double>::quiet_NaN();
};

struct SweepTable {
    SweepKind kind = SweepKind::TmaxVsL;
    BarrierSystem fixed_params;
    std::vector<SweepRow> rows;
};

struct SweepOptions {
    SearchOptions search;
    int max_poles = default_max_poles;
    unsigned threads = 1;
};

namespace sweep_detail {

inline SweepRow row_from(double indep, const TimeDomainResonance& r)
{
    SweepRow row;
    row.independent = indep;
    row.exists = r.exists;
    if (r.exists) {
        row.t_max = r.t_max;
        row.omega_ratio = r.omega_ratio_at_peak;
        row.height = r.height;
    }
    return row;
}

// sorted copy of the grid; the table never depends on input order
inline std::vector<double> sorted(std::vector<double> g)
{
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

inline TimeDomainResonance edge_resonance(const BarrierSystem& sys, const SweepOptions& opt)
{
    const Propagator prop(sys, opt.max_poles);
    SearchOptions s = opt.search;
    s.threads = 1;
    return find_time_domain_resonance(prop.probe(sys.L), s);
}

} // namespace sweep_detail

inline SweepTable sweep_tmax_vs_L(const std::vector<double>& L_grid, const BarrierSystem& tmpl,
                                  const SweepOptions& opt = {})
{
    const std::vector<double> g = sweep_detail::sorted(L_grid);
    SweepTable tab;
    tab.kind = SweepKind::TmaxVsL;
    tab.fixed_params = tmpl;
    tab.rows.resize(g.size());
    parallel_for(g.size(), opt.threads, [&](std::size_t i) {
        const BarrierSystem sys = make_system(tmpl.V, tmpl.E, g[i], tmpl.mass_ratio);
        tab.rows[i] = sweep_detail::row_from(g[i], sweep_detail::edge_resonance(sys, opt));
    });
    return tab;
}

inline SweepTable sweep_freq_vs_x(const std::vector<double>& x_grid, const BarrierSystem& sys,
                                  const SweepOptions& opt = {})
{
    const std::vector<double> g = sweep_detail::sorted(x_grid);
    for (double x : g)
        if (!(x > 0))
            throw Error(Errc::XOutOfRange, "x grid must be positive");
    const Propagator prop(sys, opt.max_poles);
    SweepTable tab;
    tab.kind = SweepKind::FreqVsX;
    tab.fixed_params = sys;
    tab.rows.resize(g.size());
    SearchOptions s = opt.search;
    s.threads = 1;
    parallel_for(g.size(), opt.threads, [&](std::size_t i) {
        tab.rows[i] = sweep_detail::row_from(g[i], find_time_domain_resonance(prop.probe(g[i]), s));
    });
    return tab;
}

inline TimeDomainResonance resonance_at_alpha(double alpha, double u, double V, double mass_ratio,
                                              const SweepOptions& opt = {})
{
    return sweep_detail::edge_resonance(system_from_alpha(alpha, u, V, mass_ratio), opt);
}

inline SweepTable sweep_freq_vs_alpha(const std::vector<double>& alpha_grid, double u, double V,
                                      double mass_ratio, const SweepOptions& opt = {})
{
    if (!(u > 1))
        throw Error(Errc::NonPositiveParameter, "u must exceed 1");
    const std::vector<double> g = sweep_detail::sorted(alpha_grid);
    SweepTable tab;
    tab.kind = SweepKind::FreqVsAlpha;
    tab.fixed_params = system_from_alpha(g.empty() ? 1.0 : g.front(), u, V, mass_ratio);
    tab.rows.resize(g.size());
    parallel_for(g.size(), opt.threads, [&](std::size_t i) {
        tab.rows[i] = sweep_detail::row_from(g[i], resonance_at_alpha(g[i], u, V, mass_ratio, opt));
    });
    return tab;
}

// alpha where omega_av/omega_V crosses 1, bisected inside the first bracketing grid pair
inline std::optional<double> ratio_crossing(const SweepTable& tab, double u, double V, double mass_ratio,
                                            double tol, const SweepOptions& opt = {})
{
    const auto& r = tab.rows;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        if (!r[i].exists || !r[i + 1].exists)
            continue;
        if ((r[i].omega_ratio - 1.0) * (r[i + 1].omega_ratio - 1.0) > 0)
            continue;
        double a = r[i].independent, b = r[i + 1].independent;
        double fa = r[i].omega_ratio - 1.0;
        while (b - a > tol) {
            const double m = 0.5 * (a + b);
            const TimeDomainResonance res = resonance_at_alpha(m, u, V, mass_ratio, opt);
            const double fm = res.exists ? res.omega_ratio_at_peak - 1.0 : fa;
            if ((fm < 0) == (fa < 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    }
    return std::nullopt;
}

struct Basin {
    std::size_t i = 0, j = 0, k = 0;   // t(i) > t(j) < t(k)
    double min_independent = 0;
    double min_t = 0;
};

// interior minimum of t_max over rows with a resonance
inline std::optional<Basin> find_basin(const SweepTable& tab)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < tab.rows.size(); ++i)
        if (tab.rows[i].exists)
            idx.push_back(i);
    if (idx.size() < 3)
        return std::nullopt;
    std::size_t jm = 1;
    for (std::size_t j = 1; j + 1 < idx.size(); ++j)
        if (tab.rows[idx[j]].t_max < tab.rows[idx[jm]].t_max)
            jm = j;
    const double tj = tab.rows[idx[jm]].t_max;
    std::optional<std::size_t> left, right;
    for (std::size_t a = 0; a < jm; ++a)
        if (tab.rows[idx[a]].t_max > tj) { left = idx[a]; break; }
    for (std::size_t c = jm + 1; c < idx.size(); ++c)
        if (tab.rows[idx[c]].t_max > tj) { right = idx[c]; break; }
    if (!left || !right)
        return std::nullopt;
    return Basin{*left, idx[jm], *right, tab.rows[idx[jm]].independent, tj};
}

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    std::size_t first = 0;   // first row of the suffix
    std::size_t count = 0;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = double(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    f.count = x.size();
    return f;
}

// longest suffix of existing rows whose t_max is linear with R^2 > r2_min
inline std::optional<LinearFit> linear_suffix(const SweepTable& tab, double r2_min = 0.999,
                                              std::size_t min_points = 4)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < tab.rows.size(); ++i)
        if (tab.rows[i].exists)
            idx.push_back(i);
    // short suffixes are the most sensitive to ripple, so every length is tried
    for (std::size_t s = 0; s + min_points <= idx.size(); ++s) {
        std::vector<double> x, y;
        for (std::size_t j = s; j < idx.size(); ++j) {
            x.push_back(tab.rows[idx[j]].independent);
            y.push_back(tab.rows[idx[j]].t_max);
        }
        LinearFit f = least_squares(x, y);
        if (f.r2 > r2_min) {
            f.first = idx[s];
            return f;
        }
    }
    return std::nullopt;
}

struct OpacityWindow {
    double alpha_c = std::numeric_limits<double>::quiet_NaN();   // first alpha with a resonance
    double alpha_u = std::numeric_limits<double>::quiet_NaN();   // omega_av/omega_V = 1
    double critical_opacity = std::numeric_limits<double>::quiet_NaN();
};

// opacity at which d arg That/dk equals L at incidence energy V/u
inline double critical_opacity(double u, double V, double mass_ratio, double tol = 1e-10)
{
    auto g = [&](double a) {
        const BarrierSystem s = system_from_alpha(a, u, V, mass_ratio);
        return phase_length(s.k, s) / s.L - 1.0;
    };
    double lo = 0.5, hi = 6.0;
    double glo = g(lo), ghi = g(hi);
    if ((glo < 0) == (ghi < 0))
        throw Error(Errc::NoCrossing, "phase length never equals L on [0.5, 6]");
    boost::uintmax_t it = 200;
    const auto br = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi,
        [tol](double a, double b) { return std::abs(b - a) < tol; }, it);
    return 0.5 * (br.first + br.second);
}

inline std::vector<double> linear_grid(double lo, double hi, int n)
{
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo + (hi - lo) * double(i) / (n - 1);
    return g;
}

// window refined from an existing sweep_freq_vs_alpha table
inline OpacityWindow opacity_window(const SweepTable& tab, double u, double V, double mass_ratio, double tol,
                                    const SweepOptions& opt = {})
{
    if (!(u > 1))
        throw Error(Errc::NonPositiveParameter, "u must exceed 1");
    OpacityWindow w;
    w.critical_opacity = critical_opacity(u, V, mass_ratio);

    const auto& r = tab.rows;
    std::optional<std::size_t> first;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i].exists) { first = i; break; }
    if (!first)
        throw Error(Errc::NoCrossing, "no time-domain resonance on the scan");
    if (*first == 0) {
        w.alpha_c = r[0].independent;
    } else {
        double a = r[*first - 1].independent, b = r[*first].independent;
        while (b - a > tol) {
            const double m = 0.5 * (a + b);
            if (resonance_at_alpha(m, u, V, mass_ratio, opt).exists)
                b = m;
            else
                a = m;
        }
        w.alpha_c = 0.5 * (a + b);
    }
    const auto cross = ratio_crossing(tab, u, V, mass_ratio, tol, opt);
    if (!cross)
        throw Error(Errc::NoCrossing, "omega_av/omega_V does not cross 1 on the scan");
    w.alpha_u = *cross;
    return w;
}

inline OpacityWindow opacity_window(double u, double V, double mass_ratio, double tol,
                                    const SweepOptions& opt = {},
                                    const std::vector<double>& scan = linear_grid(1.0, 4.5, 36))
{
    if (!(u > 1))
        throw Error(Errc::NonPositiveParameter, "u must exceed 1");
    return opacity_window(sweep_freq_vs_alpha(scan, u, V, mass_ratio, opt), u, V, mass_ratio, tol, opt);
}

} // namespace shutter

#endif
