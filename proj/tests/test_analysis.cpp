#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace shutter;

namespace {

const Propagator& fig2()
{
    static const Propagator p(make_system(0.3, 0.001, 4.0, 0.067));
    return p;
}

const TimeDomainResonance& fig2_peak()
{
    static const TimeDomainResonance r = find_time_domain_resonance(4.0, fig2());
    return r;
}

} // namespace

TEST(Analysis, SigmaIsLogAmplitudeRate)
{
    const Probe pr = fig2().probe(4.0);
    for (double t : {1.5, 3.0, 7.0, 15.0}) {
        const WaveSample s = pr.sample_fixed(t, 256);
        const LocalFrequency lf = local_frequency(s);
        const double fd = oracle::dlog_abs_dt(pr, t, 256);
        EXPECT_LE(std::abs(lf.sigma - std::abs(fd)), 1e-10 * std::max(1.0, lf.sigma)) << t;
    }
}

TEST(Analysis, OmegaIsUnwrappedPhaseRate)
{
    const Probe pr = fig2().probe(2.0);
    const double h = 1e-4;
    for (double t : {2.0, 6.0, 25.0}) {
        const cplx a = pr.sample_fixed(t - h, 256).psi, b = pr.sample_fixed(t + h, 256).psi;
        const double dphase = std::arg(b / a) / (2 * h);
        EXPECT_NEAR(local_frequency(pr.sample_fixed(t, 256)).omega_av, -dphase, 1e-6 * std::abs(dphase));
    }
}

TEST(Analysis, Fig2PeakIsStationaryPoint)
{
    const TimeDomainResonance& r = fig2_peak();
    ASSERT_TRUE(r.exists);
    EXPECT_NEAR(r.t_max, 5.17, 0.05);
    EXPECT_LE(r.sigma_at_peak, 1e-6 * fig2().system().omegaV);
    EXPECT_LT(r.omega_ratio_at_peak, 1.0);
    const Probe pr = fig2().probe(4.0);
    const double h = 1e-3;
    const double c = std::norm(pr.sample(r.t_max, 1e-12).psi);
    EXPECT_GE(c, std::norm(pr.sample(r.t_max - h, 1e-12).psi));
    EXPECT_GE(c, std::norm(pr.sample(r.t_max + h, 1e-12).psi));
}

TEST(Analysis, DeterministicAndThreadIndependent)
{
    SearchOptions o;
    o.threads = 3;
    const TimeDomainResonance a = find_time_domain_resonance(4.0, fig2(), o);
    EXPECT_EQ(a.t_max, fig2_peak().t_max);
    EXPECT_EQ(a.omega_ratio_at_peak, fig2_peak().omega_ratio_at_peak);
}

TEST(Analysis, RefinementInvariance)
{
    SearchOptions o;
    o.n_grid = 3001;
    o.dt_tol = 5e-5;
    const TimeDomainResonance a = find_time_domain_resonance(4.0, fig2(), o);
    EXPECT_NEAR(a.t_max, fig2_peak().t_max, 1e-6);
    EXPECT_NEAR(a.omega_ratio_at_peak, fig2_peak().omega_ratio_at_peak, 1e-6);
}

TEST(Analysis, SpectrogramMarksUnderflow)
{
    const Probe pr = fig2().probe(8.0);
    const Spectrogram sp = spectrogram(pr, {1e-4 * 0.5, 1.0, 5.0}, 1e-10);
    EXPECT_FALSE(sp.omega_av[0].has_value());
    ASSERT_TRUE(sp.omega_ratio[2].has_value());
    EXPECT_NEAR(*sp.omega_ratio[2] * fig2().system().omegaV, *sp.omega_av[2], 1e-12 * std::abs(*sp.omega_av[2]));
    EXPECT_NEAR(sp.abs2_over_plateau[2] * pr.plateau(), sp.abs2[2], 1e-14 * sp.abs2[2]);
}

TEST(Analysis, Errors)
{
    WaveSample z;
    EXPECT_THROW(local_frequency(z), Error);
    SearchOptions o;
    o.t_hi = 0.5;
    o.n_grid = 200;
    try {
        find_time_domain_resonance(4.0, fig2(), o);
        ADD_FAILURE() << "expected WindowTooNarrow";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::WindowTooNarrow);
    }
}
