#ifndef SHUTTER_PROPAGATOR_HPP
#define SHUTTER_PROPAGATOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <vector>

#include "core_types.hpp"
#include "moshinsky.hpp"
#include "parallel.hpp"
#include "resonances.hpp"
#include "stationary.hpp"

namespace shutter {

// Shutter solution for the initial wave Theta(-x)(e^{ikx} - e^{-ikx}).
//
// Interior, 0 <= x <= L:
//   Psi = Phi_k(x) M(0,k,t) - Phi_{-k}(x) M(0,-k,t) - sum_n Phi_n(x) M(0,k_n,t)
// Exterior, x >= L, with X = x - L:
//   Psi = That(k) M(X,k,t) - That(-k) M(X,-k,t) - sum_n T_n e^{ik_n L} M(X,k_n,t)
// where That = T e^{ikL}. Both sums run over n = +-1, +-2, ... The exterior Moshinsky
// functions are measured from the barrier edge and carry no extra -i; this is the
// combination that is continuous at x = L and matches direct integration.
//
// Acceleration: for large |y| each M has the expansion
//   M(X,q,t) ~ K sum_j a_j (hm t)^{-j} (q - xi)^{-(2j+1)},  a = {1, -i, -3}
// with K = -e^{i phi} e^{i pi/4}/sqrt(2 pi hm t), xi = X/(hm t). Those terms are
// subtracted pole by pole and summed exactly through
//   S_m = sum_n c_n (k_n - xi)^{-m} = sum of the residues of G(p)/(p - xi)^m at p = xi, +-k
// with G(p) = A(p) 2k/(p^2 - k^2) and A the amplitude function (Phi_p(x) inside,
// That(p) outside). The residue at xi is taken on a circle that avoids the poles.

struct WaveSample {
    double x = 0;
    double t = 0;
    cplx psi;
    cplx dpsi_dt;
    int n_terms_used = 0;        // positive pole indices summed (each with its mirror)
    double trunc_error_est = 0;  // relative to max(|psi|^2, floor)
    double roundoff_est = 0;     // absolute error bound on psi from cancellation
};

struct WaveTrace {
    double x = 0;
    std::vector<double> times;
    std::vector<WaveSample> samples;
    BarrierSystem system;
};

inline constexpr double small_t_guard = 1e-4;   // fs
inline constexpr int pole_block = 8;
inline constexpr int default_max_poles = 512;

enum class Region { Auto, Interior, Exterior };

class Probe {
public:
    static constexpr int n_asym = 3;
    static constexpr int n_sums = 2 * n_asym;   // S_1 .. S_6

    Probe(std::shared_ptr<const PoleSet> poles, double x, double k_inc, Region region = Region::Auto)
        : poles_(std::move(poles)), sys_(poles_->system()), x_(x), k_(k_inc)
    {
        if (!(x >= 0))
            throw Error(Errc::XOutOfRange, "x must be >= 0");
        interior_ = region == Region::Auto ? x <= sys_.L : region == Region::Interior;
        if ((interior_ && x > sys_.L) || (!interior_ && x < sys_.L))
            throw Error(Errc::XOutOfRange, "x outside the requested region");
        X_ = interior_ ? 0.0 : x - sys_.L;
        Ak_ = amplitude(k_);
        Amk_ = amplitude(-k_);
        const int N = poles_->size();
        c_.resize(N);
        cm_.resize(N);
        for (int i = 0; i < N; ++i) {
            const ResonancePole& p = (*poles_)[i];
            const cplx g = interior_ ? kernel(p.k, sys_).f(x_ - sys_.L) : cplx(1.0);
            const cplx den = k_ * k_ - p.k * p.k;
            if (std::abs(den) < 1e-14)
                throw Error(Errc::PoleCollision, "k coincides with a pole");
            c_[i] = cplx(0, 2.0 * k_) * p.rho * g / den;
            cm_[i] = -std::conj(c_[i]);
        }
        for (const ResonancePole& p : poles_->imaginary_poles()) {
            const cplx g = interior_ ? kernel(p.k, sys_).f(x_ - sys_.L) : cplx(1.0);
            ci_.push_back(cplx(0, 2.0 * k_) * p.rho * g / (k_ * k_ - p.k * p.k));
        }
        plateau_ = std::norm(Ak_);
        if (X_ == 0.0)
            pole_sums(0.0, S0_, &S0abs_);
    }

    double x() const { return x_; }
    bool interior() const { return interior_; }
    const BarrierSystem& system() const { return sys_; }
    const PoleSet& poles() const { return *poles_; }
    int max_terms() const { return poles_->size(); }
    double plateau() const { return plateau_; }
    cplx stationary_amplitude() const { return Ak_; }
    const std::vector<cplx>& coefficients() const { return c_; }

    // amplitude function: Phi_p(x) inside, That(p) outside
    cplx amplitude(cplx p) const
    {
        const Kernel K = kernel(p, sys_);
        const cplx th = 2.0 * p / K.D();
        return interior_ ? th * K.f(x_ - sys_.L) : th;
    }

    // S_m = sum over all poles (both signs) of c_n (k_n - xi)^{-m}, m = 1..6
    void pole_sums(double xi, std::array<cplx, n_sums + 1>& S, std::array<double, n_sums + 1>* Sabs = nullptr) const
    {
        const double k = k_;
        const int N = poles_->size();
        double dp = std::numeric_limits<double>::infinity();
        for (int i = 0; i < N; ++i)
            dp = std::min(dp, std::abs((*poles_)[i].k - xi));
        for (const ResonancePole& p : poles_->imaginary_poles())
            dp = std::min(dp, std::abs(p.k - xi));
        if (N > 0 && xi > (*poles_)[N - 1].k.real())
            dp = std::min(dp, -0.9 * (*poles_)[N - 1].k.imag());
        const double dk = std::abs(xi - k), dmk = xi + k;

        // radius with the largest logarithmic gap to every singular distance
        std::vector<double> d;
        if (dk < dp) d.push_back(dk);
        if (dmk < dp) d.push_back(dmk);
        std::sort(d.begin(), d.end());
        d.push_back(dp);
        std::vector<double> cand{0.5 * d.front()};
        for (std::size_t i = 0; i + 1 < d.size(); ++i)
            cand.push_back(std::sqrt(d[i] * d[i + 1]));
        const double all[3] = {dk, dmk, dp};
        double r = cand.front(), best = -1;
        for (double c : cand) {
            if (!(c > 0))
                continue;
            double gap = std::numeric_limits<double>::infinity();
            for (double a : all)
                gap = std::min(gap, std::abs(std::log(a / c)));
            if (gap > best) {
                best = gap;
                r = c;
            }
        }
        int M = int(std::ceil(42.0 / std::max(best, 0.04)));
        M = std::clamp((M + 7) / 8 * 8, 32, 1024);

        S.fill(0);
        std::array<double, n_sums + 1> mag{};
        for (int j = 0; j < M; ++j) {
            const cplx e = std::polar(r, 2.0 * pi * (j + 0.5) / M);
            const cplx p = xi + e;
            const cplx G = amplitude(p) * 2.0 * k / (p * p - k * k);
            cplx em = G;                 // G e^{1-m}
            for (int m = 1; m <= n_sums; ++m) {
                S[m] += em;
                mag[m] += std::abs(em);
                em /= e;
            }
        }
        for (int m = 1; m <= n_sums; ++m) {
            S[m] /= double(M);
            mag[m] /= double(M);
        }
        if (dk >= r) {
            const cplx z = 1.0 / (k - xi);
            cplx zm = z;
            for (int m = 1; m <= n_sums; ++m, zm *= z) {
                S[m] += Ak_ * zm;
                mag[m] += std::abs(Ak_ * zm);
            }
        }
        if (dmk >= r) {
            const cplx z = 1.0 / (-k - xi);
            cplx zm = z;
            for (int m = 1; m <= n_sums; ++m, zm *= z) {
                S[m] -= Amk_ * zm;
                mag[m] += std::abs(Amk_ * zm);
            }
        }
        if (Sabs)
            *Sabs = mag;
    }

    // fixed truncation at N positive poles; the estimate is from the last block
    WaveSample sample_fixed(double t, int N) const
    {
        Accum a = start(t);
        N = std::min(N, max_terms());
        double est = 0;
        if (!a.forced_zero) {
            const int last = std::max(0, N - pole_block);
            for (int i = 0; i < last; ++i)
                add_pole(a, i, t);
            const cplx before = a.psi;
            for (int i = last; i < N; ++i)
                add_pole(a, i, t);
            est = estimate(a, before, N);
        }
        return finish(a, t, N, est);
    }

    // blocks of 8 pole pairs until the block contribution to |psi|^2, scaled to a
    // tail estimate, falls below tol relative to max(|psi|^2, 1e-6 * stationary)
    WaveSample sample(double t, double tol) const
    {
        bool ok = false;
        WaveSample s = adaptive(t, tol, ok);
        if (!ok)
            throw Error(Errc::NotConverged, "resonance sum at t=" + std::to_string(t) + " fs, x="
                        + std::to_string(x_) + " nm did not reach tol with " + std::to_string(max_terms()) + " poles");
        return s;
    }

    // as sample, but returns the full-set result with its estimate instead of throwing
    WaveSample sample_best(double t, double tol) const
    {
        bool ok = false;
        return adaptive(t, tol, ok);
    }

private:
    struct Accum {
        cplx psi, dpsi;
        double absum = 0;
        bool forced_zero = false;
        double xi = 0, hmt = 0;
        cplx K, dK;
    };

    // block change scaled to a tail estimate, plus what the asymptotic subtraction
    // cannot represent for the omitted poles: their plane-wave parts, and any omitted
    // pole still close to xi
    double estimate(const Accum& a, cplx before, int N) const
    {
        const double scale = std::max(std::norm(a.psi), 1e-6 * plateau_);
        const auto rel = [&](double delta) {
            return (2.0 * std::abs(a.psi) * delta + delta * delta) / scale;
        };
        double est = rel(std::abs(a.psi - before)) * std::max(1.0, N / 16.0);
        if (N >= 1) {
            const cplx kN = (*poles_)[N - 1].k;
            const double aN = kN.real(), bN = -kN.imag();
            if (std::sqrt(0.5 * a.hmt) * (aN - a.xi) < 6.0)
                return std::numeric_limits<double>::infinity();
            const double decay = bN * a.hmt * pi / sys_.L;
            const double plane = std::abs(c_[N - 1]) * std::exp(bN * (X_ - a.hmt * aN)) / -std::expm1(-decay);
            est += rel(plane);
        }
        return est;
    }

    WaveSample adaptive(double t, double tol, bool& ok) const
    {
        Accum a = start(t);
        ok = true;
        if (a.forced_zero)
            return finish(a, t, 0, 0.0);
        const int cap = max_terms();
        int N = 0;
        double est = std::numeric_limits<double>::infinity();
        while (N < cap) {
            const cplx before = a.psi;
            const int hi = std::min(cap, N + pole_block);
            for (int i = N; i < hi; ++i)
                add_pole(a, i, t);
            N = hi;
            est = estimate(a, before, N);
            if (N >= 2 * pole_block && est <= tol)
                return finish(a, t, N, est);
        }
        ok = false;
        return finish(a, t, N, est);
    }

    static cplx asym_coeff(int j)
    {
        static const cplx a[n_asym] = {{1, 0}, {0, -1}, {-3, 0}};
        return a[j];
    }

    Accum start(double t) const
    {
        moshinsky_detail::check_time(t);
        Accum a;
        if (t < small_t_guard && x_ > 0) {
            a.forced_zero = true;
            return a;
        }
        const double hm = sys_.hm;
        const auto mk = moshinsky_detail::eval(X_, cplx(k_), t, hm);
        const auto mmk = moshinsky_detail::eval(X_, cplx(-k_), t, hm);
        const double phi = X_ * X_ / (2.0 * hm * t);
        const double dphi = -X_ * X_ / (2.0 * hm * t * t);
        a.xi = X_ / (hm * t);
        a.hmt = hm * t;
        a.K = -std::polar(1.0, phi) * moshinsky_detail::ep_ipi4 / std::sqrt(2.0 * pi * hm * t);
        a.dK = a.K * cplx(-0.5 / t, dphi);

        std::array<cplx, n_sums + 1> S;
        std::array<double, n_sums + 1> Sabs;
        if (X_ == 0.0) {
            S = S0_;
            Sabs = S0abs_;
        } else {
            pole_sums(a.xi, S, &Sabs);
        }
        const double dxi = -a.xi / t;
        cplx C = 0, dC = 0;
        double cabs = 0;
        for (int j = 0; j < n_asym; ++j) {
            const int m = 2 * j + 1;
            const cplx f = asym_coeff(j) * std::pow(a.hmt, -j);
            C += f * a.K * S[m];
            dC += f * ((a.dK - double(j) / t * a.K) * S[m] + a.K * double(m) * dxi * S[m + 1]);
            cabs += std::abs(f * a.K) * Sabs[m];
        }
        a.psi = Ak_ * mk.m - Amk_ * mmk.m - C;
        a.dpsi = Ak_ * mk.dm - Amk_ * mmk.dm - dC;
        a.absum = std::abs(Ak_ * mk.m) + std::abs(Amk_ * mmk.m) + cabs;
        const auto& im = poles_->imaginary_poles();
        for (std::size_t i = 0; i < im.size(); ++i) {
            cplx r, dr;
            double mag;
            remainder(a, im[i].k, t, r, dr, mag);
            a.psi -= ci_[i] * r;
            a.dpsi -= ci_[i] * dr;
            a.absum += std::abs(ci_[i]) * mag;
        }
        return a;
    }

    // M minus its first asymptotic terms, and the time derivative of the same
    void remainder(const Accum& a, cplx q, double t, cplx& r, cplx& dr, double& mag) const
    {
        const auto m = moshinsky_detail::eval(X_, q, t, sys_.hm);
        const cplx z = 1.0 / (q - a.xi);
        const cplx dlogK = a.dK / a.K;
        cplx s = 0, ds = 0;
        cplx zp = z;
        double h = 1.0;
        for (int j = 0; j < n_asym; ++j) {
            const cplx term = a.K * asym_coeff(j) * h * zp;
            s += term;
            ds += term * (dlogK - double(j) / t - double(2 * j + 1) * (a.xi / t) * z);
            zp *= z * z;
            h /= a.hmt;
        }
        r = m.m - s;
        dr = m.dm - ds;
        mag = std::abs(m.m) + std::abs(s);
    }

    void add_pole(Accum& a, int i, double t) const
    {
        const ResonancePole& p = (*poles_)[i];
        cplx r1, d1, r2, d2;
        double m1, m2;
        remainder(a, p.k, t, r1, d1, m1);
        remainder(a, -std::conj(p.k), t, r2, d2, m2);
        a.psi -= c_[i] * r1 + cm_[i] * r2;
        a.dpsi -= c_[i] * d1 + cm_[i] * d2;
        a.absum += std::abs(c_[i]) * (m1 + m2);
    }

    WaveSample finish(const Accum& a, double t, int N, double est) const
    {
        WaveSample s;
        s.x = x_;
        s.t = t;
        s.psi = a.psi;
        s.dpsi_dt = a.dpsi;
        s.n_terms_used = N;
        s.trunc_error_est = est;
        s.roundoff_est = 8.0 * std::numeric_limits<double>::epsilon() * a.absum;
        return s;
    }

    std::shared_ptr<const PoleSet> poles_;
    BarrierSystem sys_;
    double x_ = 0;
    double X_ = 0;
    double k_ = 0;
    bool interior_ = true;
    cplx Ak_, Amk_;
    double plateau_ = 0;
    std::vector<cplx> c_, cm_, ci_;
    std::array<cplx, n_sums + 1> S0_{};
    std::array<double, n_sums + 1> S0abs_{};
};

// owns one PoleSet per system; probes share it
class Propagator {
public:
    explicit Propagator(const BarrierSystem& sys, int max_poles = default_max_poles)
        : sys_(sys), poles_(std::make_shared<const PoleSet>(find_poles(sys, max_poles))) {}

    Propagator(const BarrierSystem& sys, std::shared_ptr<const PoleSet> poles)
        : sys_(sys), poles_(std::move(poles)) {}

    const BarrierSystem& system() const { return sys_; }
    std::shared_ptr<const PoleSet> poles() const { return poles_; }

    Probe probe(double x, Region region = Region::Auto) const { return Probe(poles_, x, sys_.k, region); }

    WaveSample psi(double x, double t, double tol) const { return probe(x).sample(t, tol); }

private:
    BarrierSystem sys_;
    std::shared_ptr<const PoleSet> poles_;
};

inline WaveSample psi_internal(double x, double t, const Propagator& prop, double tol)
{
    if (!(x >= 0 && x <= prop.system().L))
        throw Error(Errc::XOutOfRange, "x must lie in [0, L]");
    return prop.probe(x, Region::Interior).sample(t, tol);
}

inline WaveSample psi_external(double x, double t, const Propagator& prop, double tol)
{
    if (!(x >= prop.system().L))
        throw Error(Errc::XOutOfRange, "x must be >= L");
    return prop.probe(x, Region::Exterior).sample(t, tol);
}

inline void check_grid(const std::vector<double>& times)
{
    if (times.empty())
        throw Error(Errc::MissingRequired, "empty time grid");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0))
            throw Error(Errc::NonPositiveTime, "time grid must be > 0");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw Error(Errc::TypeError, "time grid must be strictly increasing");
    }
}

inline WaveTrace trace(const Probe& probe, const std::vector<double>& times, double tol,
                       unsigned threads = 1)
{
    check_grid(times);
    WaveTrace tr;
    tr.x = probe.x();
    tr.times = times;
    tr.system = probe.system();
    tr.samples.resize(times.size());
    parallel_for(times.size(), threads, [&](std::size_t i) { tr.samples[i] = probe.sample(times[i], tol); });
    return tr;
}

inline WaveTrace trace(double x, const std::vector<double>& times, const Propagator& prop, double tol,
                       unsigned threads = 1)
{
    return trace(prop.probe(x), times, tol, threads);
}

} // namespace shutter

#endif
