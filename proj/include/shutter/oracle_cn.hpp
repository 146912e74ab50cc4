#ifndef SHUTTER_ORACLE_CN_HPP
#define SHUTTER_ORACLE_CN_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "core_types.hpp"

namespace shutter {

// Crank-Nicolson reference integrator for the shutter problem. Used by tests and
// the oracle-compare command only.
struct CnConfig {
    double x_min = -200.0;          // nm
    double x_max = 100.0;           // nm
    double dx = 0.025;              // nm
    double dt = 3e-4;               // fs
    double absorber_width = 30.0;   // left absorber; the right one uses right_absorber_width
    double right_absorber_width = 50.0;
    double absorber_strength = 4.0; // eV at the outer edge, quartic ramp
    double taper_width = 40.0;      // smooth cutoff of the initial wave next to the left absorber
    bool absorbers = true;
    bool barrier = true;            // false: free shutter
};

struct CnResult {
    std::vector<double> probes;
    std::vector<double> times;               // actual step times
    std::vector<std::vector<cplx>> psi;      // [probe][time]
    std::vector<double> norm;                // total norm at each recorded time
};

namespace cn_detail {

inline double smoothstep(double s)
{
    if (s <= 0) return 0;
    if (s >= 1) return 1;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

} // namespace cn_detail

inline void validate(const CnConfig& cfg, const BarrierSystem& sys, const std::vector<double>& probes,
                     double t_end)
{
    if (!(cfg.dx > 0) || !(cfg.dt > 0) || !(cfg.x_max > cfg.x_min))
        throw Error(Errc::GridTooCoarse, "dx, dt must be > 0 and x_max > x_min");
    if (sys.k * cfg.dx >= 0.1)
        throw Error(Errc::GridTooCoarse, "k dx >= 0.1");
    if (std::abs(sys.kappa0) * cfg.dx >= 0.1)
        throw Error(Errc::GridTooCoarse, "kappa0 dx >= 0.1");
    if (cfg.dt >= cfg.dx * cfg.dx / sys.hm)
        throw Error(Errc::GridTooCoarse, "dt >= dx^2 m / hbar");
    const double inner_lo = cfg.x_min + (cfg.absorbers ? cfg.absorber_width : 0.0);
    const double inner_hi = cfg.x_max - (cfg.absorbers ? cfg.right_absorber_width : 0.0);
    if (cfg.barrier && inner_hi < 3.0 * sys.L)
        throw Error(Errc::GridTooCoarse, "domain must extend to 3L");
    for (double p : probes)
        if (!(p > inner_lo && p < inner_hi))
            throw Error(Errc::XOutOfRange, "probe outside the unabsorbed interior");
    // the truncation front of the initial wave must not reach any probe
    const double vmax = sys.hm * std::sqrt(2.0 * sys.V / sys.c);
    double pmin = probes.empty() ? 0.0 : probes.front();
    for (double p : probes)
        pmin = std::min(pmin, p);
    if (pmin - inner_lo < 3.0 * vmax * t_end)
        throw Error(Errc::GridTooCoarse, "left edge too close for the time window (causality guard)");
}

// times must be increasing; each is rounded to the nearest step
inline CnResult cn_evolve(const BarrierSystem& sys, const CnConfig& cfg, const std::vector<double>& probes,
                          const std::vector<double>& times)
{
    const double t_end = times.empty() ? 0.0 : times.back();
    validate(cfg, sys, probes, t_end);
    const int n = int(std::lround((cfg.x_max - cfg.x_min) / cfg.dx)) + 1;
    const double hbar = phys.hbar;
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j)
        x[j] = cfg.x_min + j * cfg.dx;

    // H/hbar = -(hm/2) d^2/dx^2 + (V - iW)/hbar
    std::vector<cplx> U(n);
    const double wl = cfg.absorber_width, wr = cfg.right_absorber_width;
    for (int j = 0; j < n; ++j) {
        double V = 0;
        if (cfg.barrier) {
            const double lo = -0.5 * cfg.dx, hi = 0.5 * cfg.dx;
            // cell average of the step at 0 and L
            const double a = std::clamp((x[j] + hi - 0.0) / cfg.dx, 0.0, 1.0);
            const double b = std::clamp((sys.L - (x[j] + lo)) / cfg.dx, 0.0, 1.0);
            V = sys.V * std::max(0.0, a + b - 1.0);
        }
        double W = 0;
        if (cfg.absorbers) {
            if (x[j] < cfg.x_min + wl) {
                const double s = (cfg.x_min + wl - x[j]) / wl;
                W = cfg.absorber_strength * s * s * s * s;
            } else if (x[j] > cfg.x_max - wr) {
                const double s = (x[j] - (cfg.x_max - wr)) / wr;
                W = cfg.absorber_strength * s * s * s * s;
            }
        }
        U[j] = cplx(V, -W) / hbar;
    }
    const double off = -0.5 * sys.hm / (cfg.dx * cfg.dx);
    const cplx half(0, 0.5 * cfg.dt);

    // A psi^{n+1} = B psi^n with A = 1 + i dt/2 H, B = 1 - i dt/2 H; Dirichlet ends.
    // A is factored once; each step fuses B psi with the forward sweep.
    const cplx a_off = half * off, b_off = -half * off;
    std::vector<cplx> cprime(n), inv_denom(n), bdiag(n);
    {
        cplx prev = 0;
        for (int j = 0; j < n; ++j) {
            const cplx diag = 1.0 + half * (-2.0 * off + U[j]);
            inv_denom[j] = 1.0 / (diag - a_off * prev);
            cprime[j] = a_off * inv_denom[j];
            prev = cprime[j];
            bdiag[j] = 1.0 - half * (-2.0 * off + U[j]);
        }
    }

    std::vector<cplx> psi(n), rhs(n);
    const double taper_lo = cfg.x_min + (cfg.absorbers ? wl : 0.0);
    for (int j = 0; j < n; ++j) {
        if (x[j] >= 0) continue;
        const double w = cn_detail::smoothstep((x[j] - taper_lo) / cfg.taper_width);
        psi[j] = w * cplx(0, 2.0 * std::sin(sys.k * x[j]));
    }

    CnResult res;
    res.probes = probes;
    res.psi.assign(probes.size(), {});
    auto record = [&](double t) {
        res.times.push_back(t);
        for (std::size_t p = 0; p < probes.size(); ++p) {
            const double s = (probes[p] - cfg.x_min) / cfg.dx;
            const int j = std::clamp(int(std::floor(s)), 0, n - 2);
            const double f = s - j;
            res.psi[p].push_back((1.0 - f) * psi[j] + f * psi[j + 1]);
        }
        double nrm = 0;
        for (const cplx& v : psi)
            nrm += std::norm(v);
        res.norm.push_back(nrm * cfg.dx);
    };

    long step = 0;
    for (double target : times) {
        const long goal = std::lround(target / cfg.dt);
        while (step < goal) {
            cplx r_prev = 0, p_prev = 0;
            for (int j = 0; j < n; ++j) {
                const cplx p_next = j + 1 < n ? psi[j + 1] : cplx(0);
                const cplx r = bdiag[j] * psi[j] + b_off * (p_prev + p_next);
                p_prev = psi[j];
                r_prev = (r - a_off * r_prev) * inv_denom[j];
                rhs[j] = r_prev;
            }
            psi[n - 1] = rhs[n - 1];
            for (int j = n - 2; j >= 0; --j)
                psi[j] = rhs[j] - cprime[j] * psi[j + 1];
            ++step;
        }
        record(step * cfg.dt);
        if (res.norm.size() >= 2) {
            const double a = res.norm[res.norm.size() - 2], b = res.norm.back();
            if (b > a * (1.0 + 1e-9) + 1e-300)
                throw Error(Errc::AbsorberLeak, "norm increased at t=" + std::to_string(step * cfg.dt));
        }
    }
    return res;
}

} // namespace shutter

#endif
