#ifndef SHUTTER_FADDEEVA_HPP
#define SHUTTER_FADDEEVA_HPP

#include <array>
#include <cmath>
#include <complex>

#include "core_types.hpp"

namespace shutter {

// w(z) = exp(-z^2) erfc(-iz), evaluated on Im z >= 0 by one of three
// regions and reflected into the lower half plane.
namespace faddeeva_detail {

inline constexpr double inv_sqrt_pi = 0.56418958354775628695;
inline constexpr double r_series = 0.5;
inline constexpr double r_cfrac = 8.0;
inline constexpr int n_weideman = 40;
inline constexpr int cf_depth = 40;

struct Weideman {
    double L;
    std::array<double, n_weideman> a;
};

inline const Weideman& weideman()
{
    static const Weideman tab = [] {
        Weideman w{};
        const int N = n_weideman;
        const int M = 2 * N;
        w.L = std::sqrt(N / std::sqrt(2.0));
        std::array<double, 2 * M> f{};
        for (int k = -M + 1; k <= M - 1; ++k) {
            const double t = w.L * std::tan(k * pi / (2.0 * M));
            f[k + M] = std::exp(-t * t) * (w.L * w.L + t * t);
        }
        for (int n = 1; n <= N; ++n) {
            double s = 0;
            for (int k = -M + 1; k <= M - 1; ++k)
                s += f[k + M] * std::cos(pi * k * n / M);
            w.a[n - 1] = s / (2.0 * M);
        }
        return w;
    }();
    return tab;
}

inline cplx series(cplx z)
{
    // sum (iz)^n / Gamma(n/2 + 1)
    const cplx iz(-z.imag(), z.real());
    cplx term_even(1.0, 0.0);                  // (iz)^{2m}/m!
    cplx term_odd = iz * (2.0 * inv_sqrt_pi);  // (iz)^{2m+1}/Gamma(m+3/2)
    const cplx iz2 = iz * iz;
    cplx s = term_even + term_odd;
    for (int m = 1; m < 60; ++m) {
        term_even *= iz2 / double(m);
        term_odd *= iz2 / (m + 0.5);
        s += term_even + term_odd;
        if (std::abs(term_even) + std::abs(term_odd) < 1e-17 * std::abs(s))
            break;
    }
    return s;
}

inline cplx rational(cplx z)
{
    const Weideman& tab = weideman();
    const cplx iz(-z.imag(), z.real());
    const cplx den = tab.L - iz;
    const cplx Z = (tab.L + iz) / den;
    cplx p = tab.a[n_weideman - 1];
    for (int n = n_weideman - 2; n >= 0; --n)
        p = p * Z + tab.a[n];
    return 2.0 * p / (den * den) + inv_sqrt_pi / den;
}

// Laplace continued fraction; g is the tail so that w = (i/sqrt(pi))/(z - g)
inline cplx cfrac_tail(cplx z)
{
    cplx g = 0.0;
    for (int n = cf_depth; n >= 1; --n)
        g = (0.5 * n) / (z - g);
    return g;
}

struct WDW {
    cplx w;
    cplx dw;
};

inline WDW upper(cplx z)
{
    const double r = std::abs(z);
    const cplx i_sqrt_pi(0.0, inv_sqrt_pi);
    if (r >= r_cfrac) {
        const cplx g = cfrac_tail(z);
        const cplx w = i_sqrt_pi / (z - g);
        return {w, -2.0 * g * w};
    }
    const cplx w = r < r_series ? series(z) : rational(z);
    return {w, -2.0 * z * w + 2.0 * i_sqrt_pi};
}

inline void check(cplx z)
{
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw Error(Errc::NonFinite, "faddeeva argument is not finite");
}

inline WDW eval(cplx z)
{
    check(z);
    if (z.imag() >= 0)
        return upper(z);
    const cplx mz2 = -z * z;
    if (mz2.real() > 708.0)
        throw Error(Errc::Overflow, "exp(-z^2) overflows in the lower half plane");
    const WDW r = upper(-z);
    const cplx e = std::exp(mz2);
    return {2.0 * e - r.w, -4.0 * z * e + r.dw};
}

} // namespace faddeeva_detail

inline cplx faddeeva(cplx z) { return faddeeva_detail::eval(z).w; }

// w'(z) = -2 z w(z) + 2i/sqrt(pi)
inline cplx faddeeva_deriv(cplx z) { return faddeeva_detail::eval(z).dw; }

} // namespace shutter

#endif
