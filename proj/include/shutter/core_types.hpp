#ifndef SHUTTER_CORE_TYPES_HPP
#define SHUTTER_CORE_TYPES_HPP

#include <cmath>
#include <complex>

#include "error.hpp"

namespace shutter {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

// eV, nm, fs throughout
struct PhysConstants {
    double hbar = 0.6582119569;          // eV fs
    double hbar2_over_2me = 0.0380998;   // eV nm^2
};

inline constexpr PhysConstants phys{};

struct BarrierSystem {
    double V = 0;
    double E = 0;
    double L = 0;
    double mass_ratio = 0;

    double c = 0;       // hbar^2/2m, eV nm^2
    double hm = 0;      // hbar/m, nm^2/fs
    double k = 0;
    cplx kappa0;        // imaginary when E > V
    double omegaV = 0;
    double alpha = 0;
    double u = 0;

    double v() const { return V / c; }   // barrier strength in nm^-2
};

inline BarrierSystem make_system(double V, double E, double L, double mass_ratio)
{
    if (!(V > 0) || !(E > 0) || !(L > 0) || !(mass_ratio > 0))
        throw Error(Errc::NonPositiveParameter, "V, E, L and mass_ratio must be > 0");
    if (!std::isfinite(V) || !std::isfinite(E) || !std::isfinite(L) || !std::isfinite(mass_ratio))
        throw Error(Errc::NonFinite, "system parameters must be finite");
    if (E == V)
        throw Error(Errc::EEqualsV, "E equals V, kappa0 vanishes");
    BarrierSystem s;
    s.V = V;
    s.E = E;
    s.L = L;
    s.mass_ratio = mass_ratio;
    s.c = phys.hbar2_over_2me / mass_ratio;
    s.hm = 2.0 * s.c / phys.hbar;
    s.k = std::sqrt(E / s.c);
    s.kappa0 = std::sqrt(cplx((V - E) / s.c, 0.0));
    s.omegaV = V / phys.hbar;
    s.alpha = std::sqrt(V / s.c) * L;
    s.u = V / E;
    return s;
}

// barrier with prescribed opacity at fixed V and u = V/E
inline BarrierSystem system_from_alpha(double alpha, double u, double V, double mass_ratio)
{
    if (!(alpha > 0) || !(u > 0))
        throw Error(Errc::NonPositiveParameter, "alpha and u must be > 0");
    const double c = phys.hbar2_over_2me / mass_ratio;
    return make_system(V, V / u, alpha / std::sqrt(V / c), mass_ratio);
}

} // namespace shutter

#endif
