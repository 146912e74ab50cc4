#ifndef SHUTTER_ANALYSIS_HPP
#define SHUTTER_ANALYSIS_HPP

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "core_types.hpp"
#include "parallel.hpp"
#include "propagator.hpp"

namespace shutter {

struct LocalFrequency {
    double omega_av = 0;   // -Im(psi_t / psi)
    double sigma = 0;      // |Re(psi_t / psi)|
};

inline constexpr double default_underflow_guard = 1e-150;

inline LocalFrequency local_frequency(const WaveSample& s, double guard = default_underflow_guard)
{
    if (!(std::abs(s.psi) > guard))
        throw Error(Errc::AmplitudeUnderflow, "|psi| below guard at t=" + std::to_string(s.t));
    const cplx r = s.dpsi_dt / s.psi;
    return {-r.imag(), std::abs(r.real())};
}

struct SearchOptions {
    double t_lo = 0.01;          // fs
    double t_hi = 50.0;          // fs
    int n_grid = 2000;           // geometric, dense at small t
    double dt_tol = 1e-4;        // golden-section bracket width, fs
    double ripple = 1e-6;        // maxima below this fraction of the plateau are ignored
    double resolve_tol = 1e-3;   // maxima whose truncation estimate exceeds this are ignored
    double sample_tol = 1e-10;   // per-sample resonance-sum tolerance
    double plateau_min = 0.1;    // with no maximum, |psi|^2 at t_hi must reach this fraction
    unsigned threads = 1;
};

struct TimeDomainResonance {
    bool exists = false;
    double t_max = std::numeric_limits<double>::quiet_NaN();
    double height = std::numeric_limits<double>::quiet_NaN();   // |psi|^2 / stationary density
    double omega_ratio_at_peak = std::numeric_limits<double>::quiet_NaN();
    double sigma_at_peak = std::numeric_limits<double>::quiet_NaN();
    double omega_av_at_peak = std::numeric_limits<double>::quiet_NaN();
    int n_terms = 0;
};

inline std::vector<double> geometric_grid(double lo, double hi, int n)
{
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

namespace analysis_detail {

inline double golden_max(const Probe& pr, int N, double a, double b, double tol)
{
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double t) { return std::norm(pr.sample_fixed(t, N).psi); };
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// root of d|psi|^2/dt = 2 Re(conj(psi) psi_t) near a golden-section estimate
inline double polish(const Probe& pr, int N, double tg, double lo, double hi)
{
    auto g = [&](double t) {
        const WaveSample s = pr.sample_fixed(t, N);
        return std::real(std::conj(s.psi) * s.dpsi_dt);
    };
    double h = 1e-4;
    for (int it = 0; it < 40; ++it, h *= 2) {
        const double a = std::max(lo, tg - h), b = std::min(hi, tg + h);
        const double ga = g(a), gb = g(b);
        if (ga > 0 && gb < 0) {
            boost::uintmax_t iters = 100;
            const auto br = boost::math::tools::toms748_solve(
                g, a, b, ga, gb, boost::math::tools::eps_tolerance<double>(52), iters);
            return 0.5 * (br.first + br.second);
        }
        if (a == lo && b == hi)
            break;
    }
    return tg;
}

} // namespace analysis_detail

// first strict maximum of |psi(x,t)|^2 in the search window
inline TimeDomainResonance find_time_domain_resonance(const Probe& pr, const SearchOptions& opt = {})
{
    if (!(opt.t_lo > 0) || !(opt.t_hi > opt.t_lo) || opt.n_grid < 3)
        throw Error(Errc::TypeError, "invalid search window");
    const std::vector<double> ts = geometric_grid(opt.t_lo, opt.t_hi, opt.n_grid);
    std::vector<WaveSample> ws(ts.size());
    parallel_for(ts.size(), opt.threads, [&](std::size_t i) { ws[i] = pr.sample_best(ts[i], opt.sample_tol); });
    const double plateau = pr.plateau();
    auto dens = [&](std::size_t i) { return std::norm(ws[i].psi); };

    TimeDomainResonance out;
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        const double a = dens(i);
        if (!(a > dens(i - 1) && a >= dens(i + 1)))
            continue;
        if (a < opt.ripple * plateau)
            continue;
        bool resolved = true;
        for (std::size_t j = i - 1; j <= i + 1; ++j)
            resolved = resolved && ws[j].trunc_error_est <= opt.resolve_tol
                && 2.0 * std::abs(ws[j].psi) * ws[j].roundoff_est <= opt.resolve_tol * a;
        if (!resolved)
            continue;
        int N = 0;
        for (std::size_t j = i - 1; j <= i + 1; ++j)
            N = std::max(N, ws[j].n_terms_used);
        N = std::max(N, 4 * pole_block);
        N = std::min(N, pr.max_terms());
        const double tg = analysis_detail::golden_max(pr, N, ts[i - 1], ts[i + 1], opt.dt_tol);
        const double tm = analysis_detail::polish(pr, N, tg, ts[i - 1], ts[i + 1]);
        const WaveSample s = pr.sample_fixed(tm, N);
        const LocalFrequency lf = local_frequency(s);
        out.exists = true;
        out.t_max = tm;
        out.height = std::norm(s.psi) / plateau;
        out.omega_av_at_peak = lf.omega_av;
        out.omega_ratio_at_peak = lf.omega_av / pr.system().omegaV;
        out.sigma_at_peak = lf.sigma;
        out.n_terms = N;
        return out;
    }
    if (dens(ts.size() - 1) < opt.plateau_min * plateau)
        throw Error(Errc::WindowTooNarrow, "no maximum and the plateau is not reached by t=" + std::to_string(opt.t_hi) + " fs");
    return out;
}

inline TimeDomainResonance find_time_domain_resonance(double x, const Propagator& prop, const SearchOptions& opt = {})
{
    return find_time_domain_resonance(prop.probe(x), opt);
}

struct Spectrogram {
    double x = 0;
    std::vector<double> times;
    std::vector<std::optional<double>> omega_av;
    std::vector<std::optional<double>> sigma;
    std::vector<std::optional<double>> omega_ratio;
    std::vector<double> abs2;
    std::vector<double> abs2_over_plateau;
};

inline Spectrogram spectrogram(const Probe& pr, const std::vector<double>& times, double tol,
                               double guard = default_underflow_guard, unsigned threads = 1)
{
    const WaveTrace tr = trace(pr, times, tol, threads);
    Spectrogram sp;
    sp.x = pr.x();
    sp.times = times;
    const std::size_t n = times.size();
    sp.omega_av.resize(n);
    sp.sigma.resize(n);
    sp.omega_ratio.resize(n);
    sp.abs2.resize(n);
    sp.abs2_over_plateau.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const WaveSample& s = tr.samples[i];
        sp.abs2[i] = std::norm(s.psi);
        sp.abs2_over_plateau[i] = sp.abs2[i] / pr.plateau();
        if (!(std::abs(s.psi) > guard))
            continue;
        const LocalFrequency lf = local_frequency(s, guard);
        sp.omega_av[i] = lf.omega_av;
        sp.sigma[i] = lf.sigma;
        sp.omega_ratio[i] = lf.omega_av / pr.system().omegaV;
    }
    return sp;
}

} // namespace shutter

#endif
