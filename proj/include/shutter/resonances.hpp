#ifndef SHUTTER_RESONANCES_HPP
#define SHUTTER_RESONANCES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "core_types.hpp"
#include "stationary.hpp"

namespace shutter {

struct ResonancePole {
    int n = 0;
    cplx k;        // a_n - i b_n
    cplx E;
    cplx u0;       // u_n(0)
    cplx uL;       // u_n(L)
    cplx rho;      // u_n(0) u_n(L), from the residue of That
    double residual = 0;

    ResonancePole mirror() const
    {
        ResonancePole m = *this;
        m.n = -n;
        m.k = -std::conj(k);
        m.E = std::conj(E);
        m.u0 = std::conj(u0);
        m.uL = std::conj(uL);
        m.rho = std::conj(rho);
        return m;
    }
};

struct GamowData {
    cplx u0;
    cplx uL;
};

// Outgoing state normalized by int_0^L u^2 dx + i [u(0)^2 + u(L)^2]/(2k) = 1,
// with the integral done in closed form.
inline GamowData gamow_boundary_data(cplx kn, const BarrierSystem& sys)
{
    const Kernel K = kernel(kn, sys);
    const double v = sys.v();
    const double L = sys.L;
    const cplx q = K.q, A = K.A(), B = K.B();
    const cplx i(0, 1);
    const cplx e2 = std::exp(-2.0 * i * q * L);
    const cplx AB = -v / (4.0 * q * q);
    const cplx norm = -i * v / (2.0 * kn * q * q) + AB * (2.0 * L + i / kn)
        + A * A * e2 * (0.5 * i) * (q + kn) / (kn * q)
        + B * B / e2 * (0.5 * i) * (q - kn) / (kn * q);
    if (!std::isfinite(std::abs(norm)) || std::abs(norm) < 1e-300)
        throw Error(Errc::NormalizationSingular, "normalization integral vanishes");
    const cplx uL = std::sqrt(1.0 / norm);
    return {uL * K.f(-L), uL};
}

// Gamow normalization integral evaluated from boundary data
inline cplx gamow_norm_boundary_term(const GamowData& g, cplx kn)
{
    return cplx(0, 1) * (g.u0 * g.u0 + g.uL * g.uL) / (2.0 * kn);
}

struct ArgCount {
    double winding = 0;   // total phase change / 2 pi
    int count = 0;
};

// zeros of D inside [re_lo, re_hi] x [im_lo, im_hi] by tracking arg D along the boundary
inline ArgCount argument_principle_count(const BarrierSystem& sys, double re_lo, double re_hi,
                                         double im_lo, double im_hi)
{
    const cplx corners[5] = {{re_lo, im_lo}, {re_hi, im_lo}, {re_hi, im_hi}, {re_lo, im_hi}, {re_lo, im_lo}};
    const double base = 0.1 * pi / sys.L;
    double total = 0;
    for (int e = 0; e < 4; ++e) {
        const cplx a = corners[e], b = corners[e + 1];
        const int pieces = std::max(4, int(std::ceil(std::abs(b - a) / base)));
        for (int j = 0; j < pieces; ++j) {
            struct Seg { cplx z0, z1; cplx d0, d1; int depth; };
            std::vector<Seg> stack;
            const cplx z0 = a + (b - a) * (double(j) / pieces);
            const cplx z1 = a + (b - a) * (double(j + 1) / pieces);
            stack.push_back({z0, z1, denominator(z0, sys), denominator(z1, sys), 0});
            while (!stack.empty()) {
                Seg s = stack.back();
                stack.pop_back();
                const double dth = std::arg(s.d1 / s.d0);
                if (std::abs(dth) > 0.3 && s.depth < 40) {
                    const cplx zm = 0.5 * (s.z0 + s.z1);
                    const cplx dm = denominator(zm, sys);
                    stack.push_back({zm, s.z1, dm, s.d1, s.depth + 1});
                    stack.push_back({s.z0, zm, s.d0, dm, s.depth + 1});
                    continue;
                }
                total += dth;
            }
        }
    }
    ArgCount r;
    r.winding = total / (2.0 * pi);
    r.count = int(std::lround(r.winding));
    return r;
}

class PoleSet {
public:
    PoleSet() = default;
    explicit PoleSet(const BarrierSystem& sys) : sys_(sys) {}

    const BarrierSystem& system() const { return sys_; }
    int size() const { return int(poles_.size()); }              // N_max
    const std::vector<ResonancePole>& poles() const { return poles_; }
    // zeros on the negative imaginary axis (thin barriers); each is its own mirror
    const std::vector<ResonancePole>& imaginary_poles() const { return imag_; }
    const ResonancePole& operator[](int i) const { return poles_[i]; }

    // signed access: k_{-n} = -conj(k_n)
    ResonancePole pole(int n) const
    {
        if (n == 0 || std::abs(n) > size())
            throw Error(Errc::XOutOfRange, "pole index out of range");
        return n > 0 ? poles_[n - 1] : poles_[-n - 1].mirror();
    }

    void extend(int N);
    ArgCount audit() const;

private:
    BarrierSystem sys_;
    std::vector<ResonancePole> poles_;
    std::vector<ResonancePole> imag_;
    int branch0_ = 0;          // collapsed low branches, one per imaginary pair
    bool started_ = false;
    cplx next_;                // pole N+1, bounds the audit rectangle
    bool have_next_ = false;

    friend PoleSet find_poles(const BarrierSystem&, int);
};

namespace resonance_detail {

inline cplx fixed_point_q(int n, cplx q, double v, double L)
{
    const cplx k = std::sqrt(q * q + v);
    return n * pi / L - cplx(0, 1.0 / L) * std::log((k + q) / (k - q));
}

// asymptotic branch: e^{2iqL} = ((k+q)/(k-q))^2 solved by iteration on q
inline cplx seed(int n, const BarrierSystem& sys)
{
    const double v = sys.v(), L = sys.L;
    cplx q(n * pi / L, -0.5 / L);
    for (int it = 0; it < 200; ++it) {
        const cplx qn = fixed_point_q(n, q, v, L);
        if (!std::isfinite(qn.real()) || !std::isfinite(qn.imag()))
            break;
        const bool done = std::abs(qn - q) < 1e-13 * std::abs(q);
        q = qn;
        if (done)
            break;
    }
    return std::sqrt(q * q + v);
}

inline bool newton(cplx& k, const BarrierSystem& sys)
{
    for (int it = 0; it < 80; ++it) {
        const Kernel K = kernel(k, sys);
        const cplx step = K.D() / K.dD();
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag()))
            return false;
        k -= step;
        if (std::abs(step) <= 1e-15 * std::abs(k)) {
            // one polishing step
            const Kernel K2 = kernel(k, sys);
            const cplx s2 = K2.D() / K2.dD();
            if (std::abs(s2) < std::abs(step) || std::abs(s2) <= 1e-15 * std::abs(k))
                k -= s2;
            return true;
        }
    }
    return kernel(k, sys).residual() <= 1e-12;
}

// branch index of a zero: nearest n with q = n pi / L - (i/L) Log((k+q)/(k-q))
inline int branch_index(cplx k, const BarrierSystem& sys)
{
    const Kernel K = kernel(k, sys);
    cplx q = K.q;
    if (q.real() < 0)
        q = -q;
    const cplx r = q + cplx(0, 1.0 / sys.L) * std::log((k + q) / (k - q));
    return int(std::lround(r.real() * sys.L / pi));
}

inline bool accept(cplx k, int n, const BarrierSystem& sys)
{
    return k.real() > 0 && k.imag() < 0 && kernel(k, sys).residual() <= 1e-12
        && branch_index(k, sys) == n;
}

inline ResonancePole make_pole(int n, cplx k, const BarrierSystem& sys)
{
    const Kernel K = kernel(k, sys);
    ResonancePole p;
    p.n = n;
    p.k = k;
    p.E = sys.c * k * k;
    p.residual = K.residual();
    p.rho = cplx(0, -2) * k / K.dD();
    const GamowData g = gamow_boundary_data(k, sys);
    p.u0 = g.u0;
    p.uL = g.uL;
    return p;
}

// D(-i g) is purely imaginary; its zeros are bracketed on a geometric grid
inline std::vector<ResonancePole> imaginary_zeros(const BarrierSystem& sys)
{
    const double sv = std::sqrt(sys.v());
    const double lo = 1e-6 * sv, hi = 50.0 / sys.L + 10.0 * sv;
    const int n = 4000;
    auto f = [&](double g) { return denominator(cplx(0, -g), sys).imag(); };
    std::vector<ResonancePole> out;
    double g0 = lo, f0 = f(lo);
    for (int i = 1; i < n; ++i) {
        const double g1 = lo * std::pow(hi / lo, double(i) / (n - 1));
        const double f1 = f(g1);
        if ((f0 < 0) != (f1 < 0)) {
            boost::uintmax_t it = 200;
            const auto br = boost::math::tools::toms748_solve(
                f, g0, g1, f0, f1, boost::math::tools::eps_tolerance<double>(53), it);
            cplx k(0, -0.5 * (br.first + br.second));
            newton(k, sys);
            k = cplx(0, k.imag());
            if (kernel(k, sys).residual() > 1e-12)
                throw Error(Errc::PoleNotConverged, "imaginary-axis pole");
            out.push_back(make_pole(0, k, sys));
        }
        g0 = g1;
        f0 = f1;
    }
    return out;
}

inline ResonancePole refine(int n, const BarrierSystem& sys)
{
    cplx k = seed(n, sys);
    bool ok = newton(k, sys) && accept(k, n, sys);
    if (!ok) {
        // local grid of starting points below the real axis
        for (int j = 1; j <= 40 && !ok; ++j) {
            for (int s = -2; s <= 2 && !ok; ++s) {
                cplx k0((n + 0.2 * s) * pi / sys.L, -0.15 * j / sys.L);
                if (newton(k0, sys) && accept(k0, n, sys)) {
                    k = k0;
                    ok = true;
                }
            }
        }
    }
    if (!ok)
        throw Error(Errc::PoleNotConverged, "pole n=" + std::to_string(n));
    return make_pole(n, k, sys);
}

} // namespace resonance_detail

inline void PoleSet::extend(int N)
{
    if (N <= size())
        return;
    if (!started_) {
        imag_ = resonance_detail::imaginary_zeros(sys_);
        branch0_ = int(imag_.size() + 1) / 2;
        started_ = true;
    }
    const int first = size() + 1;
    std::vector<ResonancePole> fresh(N + 1 - first + 1);
    for (int n = first; n <= N + 1; ++n) {
        fresh[n - first] = resonance_detail::refine(n + branch0_, sys_);
        fresh[n - first].n = n;
    }
    for (int n = first; n <= N; ++n) {
        const ResonancePole& p = fresh[n - first];
        const cplx prev = poles_.empty() ? cplx(0, 0) : poles_.back().k;
        if (!poles_.empty() && std::abs(p.k - prev) <= 1e-8)
            throw Error(Errc::DuplicatePole, "pole n=" + std::to_string(n));
        if (p.k.real() <= prev.real())
            throw Error(Errc::DuplicatePole, "poles out of order at n=" + std::to_string(n));
        poles_.push_back(p);
    }
    next_ = fresh.back().k;
    have_next_ = true;
}

inline ArgCount PoleSet::audit() const
{
    if (poles_.empty())
        return {};
    double bmax = 0;
    for (const auto& p : poles_)
        bmax = std::max(bmax, -p.k.imag());
    for (const auto& p : imag_)
        bmax = std::max(bmax, -p.k.imag());
    const double re_hi = 0.5 * (poles_.back().k.real() + next_.real());
    const double re_lo = -0.5 * poles_.front().k.real();
    const double im_lo = -(1.5 * bmax + 1.0 / sys_.L);
    const double im_hi = 0.5 / sys_.L;
    return argument_principle_count(sys_, re_lo, re_hi, im_lo, im_hi);
}

// first N poles in order of increasing a_n, audited by the argument principle
inline PoleSet find_poles(const BarrierSystem& sys, int N)
{
    if (N < 1)
        throw Error(Errc::NonPositiveParameter, "N must be >= 1");
    PoleSet ps(sys);
    ps.extend(N);
    const ArgCount c = ps.audit();
    const int found = N + int(ps.imaginary_poles().size());
    if (std::abs(c.winding - c.count) > 0.1 || c.count != found)
        throw Error(Errc::CountMismatch, "argument principle counts " + std::to_string(c.winding)
                    + " zeros, found " + std::to_string(found));
    return ps;
}

struct ExpansionCoeffs {
    std::vector<int> n;       // -N..-1, 1..N, then 0 for each imaginary-axis pole
    std::vector<cplx> phi;    // Phi_n(x) = 2ik u_n(0) u_n(x) / (k^2 - k_n^2)
    std::vector<cplx> T;      // T_n = 2ik u_n(0) u_n(L) e^{-ik_n L} / (k^2 - k_n^2)
};

inline cplx gamow_profile_product(const ResonancePole& p, double x, const BarrierSystem& sys)
{
    // u_n(0) u_n(x) = rho_n f_n(x - L)
    return p.rho * kernel(p.k, sys).f(x - sys.L);
}

inline ExpansionCoeffs expansion_coeffs(double x, double k, const PoleSet& poles)
{
    const BarrierSystem& sys = poles.system();
    if (!(x >= 0 && x <= sys.L))
        throw Error(Errc::XOutOfRange, "x must lie in [0, L]");
    ExpansionCoeffs out;
    const int N = poles.size();
    std::vector<ResonancePole> all;
    for (int n = -N; n <= N; ++n)
        if (n != 0)
            all.push_back(poles.pole(n));
    for (const auto& p : poles.imaginary_poles())
        all.push_back(p);
    for (const ResonancePole& p : all) {
        const int n = p.n;
        const cplx den = k * k - p.k * p.k;
        if (std::abs(den) < 1e-14)
            throw Error(Errc::PoleCollision, "k coincides with pole n=" + std::to_string(n));
        const cplx pre = cplx(0, 2.0 * k) / den;
        out.n.push_back(n);
        out.phi.push_back(pre * gamow_profile_product(p, x, sys));
        out.T.push_back(pre * p.rho * std::exp(cplx(0, -1) * p.k * sys.L));
    }
    return out;
}

} // namespace shutter

#endif
