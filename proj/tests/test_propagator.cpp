#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace shutter;

namespace {

const Propagator& reference()
{
    static const Propagator p(make_system(0.3, 0.001, 4.0, 0.067));
    return p;
}

double rel2(cplx a, cplx b) { return std::abs(std::norm(a) - std::norm(b)) / std::norm(b); }

} // namespace

TEST(Propagator, ContinuousAtBarrierEdge)
{
    const Propagator& P = reference();
    const double L = P.system().L;
    const Probe in = P.probe(L, Region::Interior), out = P.probe(L, Region::Exterior);
    for (double t : {0.5, 2.0, 5.17, 12.0, 40.0, 300.0}) {
        const WaveSample a = in.sample(t, 1e-12), b = out.sample(t, 1e-12);
        EXPECT_LE(std::abs(a.psi - b.psi), 1e-8 * std::abs(b.psi)) << t;
        EXPECT_LE(std::abs(a.dpsi_dt - b.dpsi_dt), 1e-7 * std::abs(b.dpsi_dt)) << t;
    }
}

TEST(Propagator, ContinuousInX)
{
    const Propagator& P = reference();
    const double L = P.system().L;
    for (double t : {3.0, 8.0}) {
        const cplx lo = P.probe(L - 1e-6).sample(t, 1e-12).psi;
        const cplx hi = P.probe(L + 1e-6).sample(t, 1e-12).psi;
        EXPECT_LE(std::abs(lo - hi), 1e-5 * std::abs(hi));
    }
}

TEST(Propagator, SolvesSchrodingerEquation)
{
    const Propagator& P = reference();
    const BarrierSystem& s = P.system();
    const double h = 2e-3;
    for (double x : {1.0, 2.5, 6.0, 11.0})
        for (double t : {2.0, 6.0, 20.0}) {
            const WaveSample c = P.psi(x, t, 1e-12);
            const cplx l = P.psi(x - h, t, 1e-12).psi, r = P.psi(x + h, t, 1e-12).psi;
            const cplx pxx = (l - 2.0 * c.psi + r) / (h * h);
            const double V = x < s.L ? s.V : 0.0;
            const cplx resid = cplx(0, 1) * c.dpsi_dt + 0.5 * s.hm * pxx - V / phys.hbar * c.psi;
            EXPECT_LE(std::abs(resid), 1e-4 * std::abs(cplx(0, 1) * c.dpsi_dt) + 1e-4 * V / phys.hbar * std::abs(c.psi))
                << x << " " << t;
        }
}

TEST(Propagator, TimeDerivativeConsistent)
{
    const Probe pr = reference().probe(4.0);
    for (double t : {1.0, 5.0, 30.0}) {
        const double h = 1e-4;
        const cplx fd = (pr.sample_fixed(t + h, 256).psi - pr.sample_fixed(t - h, 256).psi) / (2 * h);
        EXPECT_LE(std::abs(fd - pr.sample_fixed(t, 256).dpsi_dt), 1e-6 * std::abs(fd));
    }
}

TEST(Propagator, TruncationErrorShrinksWithPoles)
{
    const Probe pr = reference().probe(4.0);
    for (double t : {1.0, 5.0}) {
        const cplx ref = pr.sample_fixed(t, 512).psi;
        double prev = INFINITY;
        for (int N : {8, 16, 32, 64, 128}) {
            const double err = std::abs(pr.sample_fixed(t, N).psi - ref);
            EXPECT_LE(err, prev * 1.01 + 1e-15) << "t=" << t << " N=" << N;
            prev = err;
        }
        const WaveSample s = pr.sample(t, 1e-10);
        EXPECT_LE(s.trunc_error_est, 1e-10);
        EXPECT_LE(std::abs(s.psi - ref), 1e-4 * std::abs(ref));
    }
}

TEST(Propagator, LongTimeLimitIsStationary)
{
    const Propagator& P = reference();
    const BarrierSystem& s = P.system();
    const double T2 = std::norm(transmission(s.k, s));
    EXPECT_NEAR(std::norm(P.psi(s.L, 1e5, 1e-10).psi) / T2, 1.0, 1e-3);
    const double x = 2.0;
    const double phi2 = std::norm(phi_stationary(x, s.k, s));
    EXPECT_NEAR(std::norm(P.psi(x, 1e5, 1e-10).psi) / phi2, 1.0, 2e-3);
}

TEST(Propagator, SmallTimeGuardAndErrors)
{
    const Propagator& P = reference();
    EXPECT_EQ(P.psi(2.0, 5e-5, 1e-10).psi, cplx(0, 0));
    EXPECT_THROW(P.psi(2.0, 0.0, 1e-10), Error);
    EXPECT_THROW(P.psi(2.0, -1.0, 1e-10), Error);
    EXPECT_THROW(psi_internal(5.0, 1.0, P, 1e-10), Error);
    EXPECT_THROW(psi_external(3.0, 1.0, P, 1e-10), Error);
    EXPECT_THROW(trace(2.0, {1.0, 0.5}, P, 1e-10), Error);
}

TEST(Propagator, ThinBarrierWithImaginaryPoles)
{
    const Propagator P(make_system(0.3, 0.001, 1.0, 0.067));
    ASSERT_FALSE(P.poles()->imaginary_poles().empty());
    const double L = 1.0;
    for (double t : {1.0, 4.0}) {
        const cplx a = P.probe(L, Region::Interior).sample(t, 1e-11).psi;
        const cplx b = P.probe(L, Region::Exterior).sample(t, 1e-11).psi;
        EXPECT_LE(std::abs(a - b), 1e-8 * std::abs(b));
    }
    const BarrierSystem& s = P.system();
    EXPECT_NEAR(std::norm(P.psi(L, 1e5, 1e-10).psi) / std::norm(transmission(s.k, s)), 1.0, 1e-3);
}

TEST(Propagator, TraceIsThreadCountIndependent)
{
    const std::vector<double> ts{0.5, 1.0, 2.0, 4.0, 8.0};
    const WaveTrace a = trace(4.0, ts, reference(), 1e-10, 1), b = trace(4.0, ts, reference(), 1e-10, 3);
    for (std::size_t i = 0; i < ts.size(); ++i)
        EXPECT_EQ(a.samples[i].psi, b.samples[i].psi);
}

TEST(Propagator, AgreesWithCrankNicolsonAtOnePoint)
{
    const BarrierSystem& s = reference().system();
    const CnResult cn = cn_evolve(s, CnConfig{}, {2.0}, {5.0});
    const cplx a = reference().psi(2.0, cn.times[0], 1e-10).psi;
    EXPECT_LE(rel2(cn.psi[0][0], a), 0.01);
}
