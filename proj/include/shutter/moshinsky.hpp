#ifndef SHUTTER_MOSHINSKY_HPP
#define SHUTTER_MOSHINSKY_HPP

#include <cmath>
#include <complex>

#include "core_types.hpp"
#include "faddeeva.hpp"

namespace shutter {

struct MoshinskyArg {
    cplx y;
    cplx q;
    double x = 0;
    double t = 0;
};

namespace moshinsky_detail {

inline const cplx em_ipi4{std::sqrt(0.5), -std::sqrt(0.5)};   // e^{-i pi/4}
inline const cplx ep_ipi4{std::sqrt(0.5), std::sqrt(0.5)};

inline void check_time(double t)
{
    if (!(t > 0))
        throw Error(Errc::NonPositiveTime, "t must be > 0");
}

inline cplx arg_y(double x, cplx q, double t, double hm)
{
    return em_ipi4 * (x - hm * q * t) / std::sqrt(2.0 * hm * t);
}

inline cplx dy_dt(double x, cplx q, double t, double hm)
{
    return em_ipi4 * (-0.5 * x / (t * std::sqrt(t)) - 0.5 * hm * q / std::sqrt(t)) / std::sqrt(2.0 * hm);
}

// value and time derivative; hm = hbar/m.
// for Im(iy) < 0 the reflected form keeps the plane wave exact and avoids exp overflow
struct MDM {
    cplx m;
    cplx dm;
};

inline MDM eval(double x, cplx q, double t, double hm)
{
    check_time(t);
    const double phi = x * x / (2.0 * hm * t);
    const double dphi = -x * x / (2.0 * hm * t * t);
    const cplx eph = std::polar(0.5, phi);
    const cplx y = arg_y(x, q, t, hm);
    const cplx dy = dy_dt(x, q, t, hm);
    const cplx iy = cplx(0, 1) * y;
    if (iy.imag() >= 0) {
        const auto r = faddeeva_detail::upper(iy);
        return {eph * r.w, eph * (cplx(0, dphi) * r.w + r.dw * cplx(0, 1) * dy)};
    }
    const auto r = faddeeva_detail::upper(-iy);
    const cplx plane = std::exp(cplx(0, 1) * (q * x - 0.5 * hm * q * q * t));
    const cplx dplane = cplx(0, -0.5) * hm * q * q * plane;
    return {plane - eph * r.w, dplane - eph * (cplx(0, dphi) * r.w - r.dw * cplx(0, 1) * dy)};
}

} // namespace moshinsky_detail

inline MoshinskyArg moshinsky_arg(double x, cplx q, double t, const BarrierSystem& sys)
{
    moshinsky_detail::check_time(t);
    return {moshinsky_detail::arg_y(x, q, t, sys.hm), q, x, t};
}

// M(y_q) = 1/2 e^{i m x^2 / 2 hbar t} w(i y_q)
inline cplx moshinsky_M(double x, cplx q, double t, const BarrierSystem& sys)
{
    return moshinsky_detail::eval(x, q, t, sys.hm).m;
}

inline cplx moshinsky_M_dt(double x, cplx q, double t, const BarrierSystem& sys)
{
    return moshinsky_detail::eval(x, q, t, sys.hm).dm;
}

} // namespace shutter

#endif
