#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace shutter;

namespace {

SweepTable synthetic(const std::vector<double>& t)
{
    SweepTable tab;
    for (std::size_t i = 0; i < t.size(); ++i) {
        SweepRow r;
        r.independent = double(i);
        r.exists = !std::isnan(t[i]);
        r.t_max = t[i];
        tab.rows.push_back(r);
    }
    return tab;
}

} // namespace

TEST(Sweeps, PermutationInvariant)
{
    const BarrierSystem tmpl = make_system(0.3, 0.001, 4.0, 0.067);
    SweepOptions o;
    o.max_poles = 256;
    const SweepTable a = sweep_tmax_vs_L({3.5, 4.0, 5.0}, tmpl, o);
    const SweepTable b = sweep_tmax_vs_L({5.0, 3.5, 4.0, 5.0}, tmpl, o);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].independent, b.rows[i].independent);
        EXPECT_EQ(a.rows[i].t_max, b.rows[i].t_max);
        EXPECT_EQ(a.rows[i].omega_ratio, b.rows[i].omega_ratio);
    }
}

TEST(Sweeps, AlphaURegularity)
{
    // V -> 4V at fixed alpha, u and mass: lengths halve, times quarter
    const TimeDomainResonance a = resonance_at_alpha(3.0, 300, 0.3, 0.067);
    const TimeDomainResonance b = resonance_at_alpha(3.0, 300, 1.2, 0.067);
    ASSERT_TRUE(a.exists && b.exists);
    EXPECT_LE(std::abs(a.omega_ratio_at_peak - b.omega_ratio_at_peak), 1e-6);
    EXPECT_NEAR(b.t_max * 4.0, a.t_max, 1e-6 * a.t_max);
}

TEST(Sweeps, BasinDetection)
{
    const auto b = find_basin(synthetic({NAN, 9, 6, 5, 5.5, 7, 9}));
    ASSERT_TRUE(b);
    EXPECT_EQ(b->j, 3u);
    EXPECT_EQ(b->min_independent, 3.0);
    EXPECT_FALSE(find_basin(synthetic({1, 2, 3, 4})));
    EXPECT_FALSE(find_basin(synthetic({4, 3, 2, 1})));
}

TEST(Sweeps, LinearSuffix)
{
    const auto f = linear_suffix(synthetic({9, 5, 1, 2, 3, 4, 5, 6}));
    ASSERT_TRUE(f);
    EXPECT_EQ(f->first, 2u);
    EXPECT_NEAR(f->slope, 1.0, 1e-12);
    EXPECT_NEAR(f->r2, 1.0, 1e-12);
    const LinearFit g = least_squares({0, 1, 2, 3}, {1, 3, 5, 7});
    EXPECT_NEAR(g.slope, 2.0, 1e-14);
    EXPECT_NEAR(g.intercept, 1.0, 1e-14);
}

TEST(Sweeps, CriticalOpacityIsUnitPhaseLength)
{
    const double a = critical_opacity(300, 0.3, 0.067);
    const BarrierSystem s = system_from_alpha(a, 300, 0.3, 0.067);
    const double h = 1e-7;
    const double fd = std::arg(transmission_hat(s.k + h, s) / transmission_hat(s.k - h, s)) / (2 * h);
    EXPECT_NEAR(fd / s.L, 1.0, 1e-6);
    EXPECT_GT(a, 2.0);
    EXPECT_LT(a, 2.1);
    // independent of the reference height at fixed u
    EXPECT_NEAR(critical_opacity(300, 1.2, 0.067), a, 1e-8);
}

TEST(Sweeps, Errors)
{
    EXPECT_THROW(sweep_freq_vs_alpha({2.0}, 0.5, 0.3, 0.067), Error);
    EXPECT_THROW(sweep_freq_vs_x({-1.0}, make_system(0.3, 0.001, 4.0, 0.067)), Error);
}
