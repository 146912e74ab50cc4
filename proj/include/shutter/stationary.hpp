#ifndef SHUTTER_STATIONARY_HPP
#define SHUTTER_STATIONARY_HPP

#include <cmath>
#include <complex>

#include "core_types.hpp"

namespace shutter {

// Barrier kernel at complex wavenumber p. q = sqrt(p^2 - v) on the branch with
// |p + q| >= |p - q|, so p - q = v/(p + q) is formed without cancellation.
// D = P1 - P2 is the transmission denominator: That(p) = T(p) e^{ipL} = 2p/D(p).
struct Kernel {
    cplx p, q, s, d;
    cplx P1, P2;
    double L = 0;

    cplx D() const { return P1 - P2; }

    cplx dD() const
    {
        const cplx iq = 1.0 / q;
        const cplx ilp = cplx(0, L) * p * iq;
        const cplx pq2 = p * iq * iq;
        return P1 * (2.0 * iq - ilp - pq2) - P2 * (-2.0 * iq + ilp - pq2);
    }

    // |D| relative to the size of its two terms
    double residual() const { return std::abs(P1 - P2) / (std::abs(P1) + std::abs(P2)); }

    // interior profile normalized at the right edge: f(0) = 1, f'(0) = ip
    cplx A() const { return s / (2.0 * q); }
    cplx B() const { return -d / (2.0 * q); }
    cplx f(double X) const
    {
        const cplx e = std::exp(cplx(0, 1) * q * X);
        return A() * e + B() / e;
    }
    cplx df(double X) const
    {
        const cplx e = std::exp(cplx(0, 1) * q * X);
        return cplx(0, 1) * q * (A() * e - B() / e);
    }
};

inline Kernel kernel(cplx p, const BarrierSystem& sys)
{
    const double v = sys.v();
    Kernel K;
    K.p = p;
    K.L = sys.L;
    cplx q = std::sqrt(p * p - v);
    if (std::abs(p + q) < std::abs(p - q))
        q = -q;
    K.q = q;
    K.s = p + q;
    K.d = v / K.s;
    const cplx e = std::exp(cplx(0, -1) * q * sys.L);
    K.P1 = K.s * K.s * e / (2.0 * q);
    K.P2 = K.d * K.d / e / (2.0 * q);
    return K;
}

inline cplx denominator(cplx p, const BarrierSystem& sys) { return kernel(p, sys).D(); }

inline void check_wavenumber(cplx k)
{
    if (k == cplx(0, 0))
        throw Error(Errc::ZeroWavenumber, "k must be nonzero");
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
        throw Error(Errc::NonFinite, "k is not finite");
}

// T e^{ikL}
inline cplx transmission_hat(cplx k, const BarrierSystem& sys)
{
    check_wavenumber(k);
    return 2.0 * k / kernel(k, sys).D();
}

inline cplx transmission_hat_dk(cplx k, const BarrierSystem& sys)
{
    const Kernel K = kernel(k, sys);
    const cplx D = K.D();
    return 2.0 / D - 2.0 * k * K.dD() / (D * D);
}

// transmitted wave T e^{ikx} for incident e^{ikx}
inline cplx transmission(cplx k, const BarrierSystem& sys)
{
    return transmission_hat(k, sys) * std::exp(cplx(0, -1) * k * sys.L);
}

inline cplx reflection(cplx k, const BarrierSystem& sys)
{
    check_wavenumber(k);
    const Kernel K = kernel(k, sys);
    return 2.0 * k / K.D() * K.f(-sys.L) - 1.0;
}

struct StationaryState {
    double k = 0;
    cplx T;
    cplx R;
    // interior: psi(x) = a e^{iqx} + b e^{-iqx}; q = i kappa0 below the barrier top
    cplx q;
    cplx a;
    cplx b;
};

inline StationaryState stationary_state(double k, const BarrierSystem& sys)
{
    check_wavenumber(k);
    const Kernel K = kernel(k, sys);
    const cplx th = 2.0 * k / K.D();
    StationaryState st;
    st.k = k;
    st.T = th * std::exp(cplx(0, -k * sys.L));
    st.R = th * K.f(-sys.L) - 1.0;
    st.q = K.q;
    st.a = th * K.A() * std::exp(cplx(0, -1) * K.q * sys.L);
    st.b = th * K.B() * std::exp(cplx(0, 1) * K.q * sys.L);
    return st;
}

// interior stationary wave for incidence e^{ikx}; k may be negative
inline cplx phi_stationary(double x, double k, const BarrierSystem& sys)
{
    if (!(x >= 0 && x <= sys.L))
        throw Error(Errc::XOutOfRange, "x must lie in [0, L]");
    check_wavenumber(k);
    const Kernel K = kernel(k, sys);
    return 2.0 * k / K.D() * K.f(x - sys.L);
}

inline cplx phi_stationary_dx(double x, double k, const BarrierSystem& sys)
{
    if (!(x >= 0 && x <= sys.L))
        throw Error(Errc::XOutOfRange, "x must lie in [0, L]");
    check_wavenumber(k);
    const Kernel K = kernel(k, sys);
    return 2.0 * k / K.D() * K.df(x - sys.L);
}

// d arg That / dk; equals L when the barrier delays the transmitted phase
// exactly as much as free flight over the same width
inline double phase_length(double k, const BarrierSystem& sys)
{
    return std::imag(transmission_hat_dk(k, sys) / transmission_hat(k, sys));
}

} // namespace shutter

#endif
