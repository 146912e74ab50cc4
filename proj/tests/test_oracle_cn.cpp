#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace shutter;

namespace {

const BarrierSystem ref_sys = make_system(0.3, 0.001, 4.0, 0.067);

Errc code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::IoError;
}

// free shutter, max relative error at x = 0.5, 1 and t = 0.5, 1. The taper sits
// far left and the absorbers are strong, so what remains is discretisation error;
// dt divides 0.5 exactly so no time rounding enters.
double free_error(double dx)
{
    CnConfig c;
    c.barrier = false;
    c.x_min = -130;
    c.x_max = 30;
    c.absorber_width = 10;
    c.right_absorber_width = 15;
    c.absorber_strength = 16;
    c.dx = dx;
    c.dt = 0.5 / std::ceil(0.5 * ref_sys.hm / (0.25 * dx * dx));
    const CnResult r = cn_evolve(ref_sys, c, {0.5, 1.0}, {0.5, 1.0});
    double e = 0;
    for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t i = 0; i < 2; ++i) {
            const cplx ex = oracle::free_shutter(r.probes[p], r.times[i], ref_sys);
            e = std::max(e, std::abs(r.psi[p][i] - ex) / std::abs(ex));
        }
    return e;
}

} // namespace

TEST(CrankNicolson, FreeShutterMatchesExactSolution)
{
    CnConfig c;
    c.barrier = false;
    std::vector<double> ts;
    for (double t = 1.0; t <= 10.0; t += 0.5)
        ts.push_back(t);
    const std::vector<double> probes{2.0, 4.0, 8.0};
    const CnResult r = cn_evolve(ref_sys, c, probes, ts);
    double worst = 0;
    for (std::size_t p = 0; p < probes.size(); ++p)
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            const double ex = std::norm(oracle::free_shutter(probes[p], r.times[i], ref_sys));
            if (ex < 1e-6)
                continue;
            worst = std::max(worst, std::abs(std::norm(r.psi[p][i]) - ex) / ex);
        }
    EXPECT_LE(worst, 0.005);
}

TEST(CrankNicolson, NormConservedWithReflectingWalls)
{
    CnConfig c;
    c.absorbers = false;
    c.x_min = -20;
    c.x_max = 20;
    c.taper_width = 8;
    std::vector<double> ts;
    for (int i = 1; i <= 200; ++i)
        ts.push_back(i * c.dt);
    const CnResult r = cn_evolve(ref_sys, c, {1.0}, ts);
    for (std::size_t i = 1; i < r.norm.size(); ++i)
        EXPECT_LE(std::abs(r.norm[i] - r.norm[i - 1]), 1e-12 * r.norm[i - 1]);
}

TEST(CrankNicolson, NormDecaysOnlyThroughAbsorbers)
{
    std::vector<double> ts;
    for (double t = 0.5; t <= 6.0; t += 0.5)
        ts.push_back(t);
    const CnResult r = cn_evolve(ref_sys, CnConfig{}, {2.0}, ts);
    for (std::size_t i = 1; i < r.norm.size(); ++i)
        EXPECT_LE(r.norm[i], r.norm[i - 1]);
}

TEST(CrankNicolson, SecondOrderConvergence)
{
    std::vector<double> lx, le;
    for (double dx : {0.1, 0.05, 0.025, 0.0125}) {
        lx.push_back(std::log(dx));
        le.push_back(std::log(free_error(dx)));
    }
    const LinearFit f = least_squares(lx, le);
    EXPECT_GE(f.slope, 1.8);
    EXPECT_LE(f.slope, 2.2);
}

TEST(CrankNicolson, ReferencePeakTime)
{
    std::vector<double> ts;
    for (double t = 4.0; t <= 6.5; t += 0.003)
        ts.push_back(t);
    const CnResult r = cn_evolve(ref_sys, CnConfig{}, {ref_sys.L}, ts);
    std::size_t best = 0;
    for (std::size_t i = 0; i < r.times.size(); ++i)
        if (std::norm(r.psi[0][i]) > std::norm(r.psi[0][best]))
            best = i;
    const Propagator P(ref_sys);
    const TimeDomainResonance res = find_time_domain_resonance(ref_sys.L, P);
    EXPECT_NEAR(r.times[best], res.t_max, 0.1);
}

TEST(CrankNicolson, Errors)
{
    CnConfig c;
    c.dx = 0.2;
    EXPECT_EQ(code_of([&] { cn_evolve(ref_sys, c, {2.0}, {1.0}); }), Errc::GridTooCoarse);
    c = CnConfig{};
    c.dt = 1e-3;
    EXPECT_EQ(code_of([&] { cn_evolve(ref_sys, c, {2.0}, {1.0}); }), Errc::GridTooCoarse);
    c = CnConfig{};
    c.x_min = -40;
    EXPECT_EQ(code_of([&] { cn_evolve(ref_sys, c, {2.0}, {30.0}); }), Errc::GridTooCoarse);
    EXPECT_EQ(code_of([&] { cn_evolve(ref_sys, CnConfig{}, {90.0}, {1.0}); }), Errc::XOutOfRange);
    c = CnConfig{};
    c.absorber_strength = -1.0;
    c.x_max = 30;
    c.right_absorber_width = 10;
    EXPECT_EQ(code_of([&] { cn_evolve(ref_sys, c, {2.0}, {0.5, 1.0, 1.5, 2.0}); }), Errc::AbsorberLeak);
}
