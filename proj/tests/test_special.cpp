#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace shutter;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(Faddeeva, MatchesHighPrecisionInUpperHalfPlane)
{
    double worst = 0;
    for (double x = -14.0; x <= 14.0; x += 0.37)
        for (double y : {0.0, 1e-3, 0.05, 0.3, 0.49, 0.51, 1.0, 2.5, 4.0, 6.0, 7.99, 8.01, 11.0, 20.0}) {
            const cplx z(x, y);
            worst = std::max(worst, rel(faddeeva(z), oracle::faddeeva(z)));
        }
    EXPECT_LE(worst, 1e-13);
}

TEST(Faddeeva, MatchesHighPrecisionInLowerHalfPlane)
{
    double worst = 0;
    for (double x = -5.0; x <= 5.0; x += 0.43)
        for (double y : {-0.2, -1.0, -2.5, -4.0}) {
            const cplx z(x, y);
            if (std::abs(z) > 10)
                continue;
            worst = std::max(worst, rel(faddeeva(z), oracle::faddeeva_series(z)));
        }
    EXPECT_LE(worst, 1e-12);
}

TEST(Faddeeva, ReflectionIdentity)
{
    for (double x = -6.0; x <= 6.0; x += 0.7)
        for (double y = -3.0; y <= 3.0; y += 0.6) {
            const cplx z(x, y);
            const cplx lhs = faddeeva(z) + faddeeva(-z);
            EXPECT_LE(std::abs(lhs - 2.0 * std::exp(-z * z)), 1e-12 * std::abs(std::exp(-z * z)) + 1e-14);
        }
}

TEST(Faddeeva, ContinuousAcrossRegionBoundaries)
{
    for (double r : {faddeeva_detail::r_series, faddeeva_detail::r_cfrac})
        for (double th = 0.05; th < pi; th += 0.2) {
            // each side of the seam against the reference at the same point
            for (double f : {1 - 1e-12, 1 + 1e-12}) {
                const cplx z = std::polar(r * f, th);
                EXPECT_LE(rel(faddeeva(z), oracle::faddeeva(z)), 1e-13) << "r=" << r << " th=" << th;
            }
        }
}

TEST(Faddeeva, BoundedInUpperHalfPlane)
{
    for (double x = -30; x <= 30; x += 0.9)
        for (double y = 0; y <= 30; y += 0.7)
            EXPECT_LE(std::abs(faddeeva(cplx(x, y))), 1.0 + 1e-15);
}

TEST(Faddeeva, DerivativeMatchesDifferenceQuotient)
{
    for (cplx z : {cplx(0.2, 0.1), cplx(1.5, 0.7), cplx(-3, 2), cplx(9, 1), cplx(2, -1)}) {
        const double h = 1e-5;
        const cplx fd = (faddeeva(z + h) - faddeeva(z - h)) / (2 * h);
        EXPECT_LE(rel(faddeeva_deriv(z), fd), 1e-8);
    }
}

TEST(Faddeeva, RejectsOverflowAndNonFinite)
{
    EXPECT_THROW(faddeeva(cplx(0, -40)), Error);
    EXPECT_THROW(faddeeva(cplx(std::nan(""), 0)), Error);
    try {
        faddeeva(cplx(0, -40));
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::Overflow);
    }
}

class MoshinskyTest : public ::testing::Test {
protected:
    BarrierSystem sys = make_system(0.3, 0.001, 4.0, 0.067);
};

TEST_F(MoshinskyTest, TimeDerivativeMatchesDifferenceQuotient)
{
    for (cplx q : {cplx(sys.k), cplx(-sys.k), cplx(0.8, -0.3), cplx(-0.8, -0.3), cplx(5, -1.2)})
        for (double x : {0.0, 1.0, 7.0})
            for (double t : {0.3, 2.0, 20.0}) {
                const double h = 1e-5 * t;
                const cplx fd = (moshinsky_M(x, q, t + h, sys) - moshinsky_M(x, q, t - h, sys)) / (2 * h);
                const cplx d = moshinsky_M_dt(x, q, t, sys);
                EXPECT_LE(std::abs(d - fd), 1e-6 * (std::abs(d) + std::abs(moshinsky_M(x, q, t, sys)) / t));
            }
}

TEST_F(MoshinskyTest, SolvesFreeSchrodingerEquation)
{
    const double hx = 1e-3;
    for (cplx q : {cplx(sys.k), cplx(1.1, -0.4), cplx(-2.0, -0.9)})
        for (double x : {0.5, 3.0, 10.0})
            for (double t : {0.5, 4.0, 25.0}) {
                const cplx m0 = moshinsky_M(x, q, t, sys);
                const cplx mxx = (moshinsky_M(x + hx, q, t, sys) - 2.0 * m0 + moshinsky_M(x - hx, q, t, sys)) / (hx * hx);
                const cplx lhs = cplx(0, 1) * moshinsky_M_dt(x, q, t, sys);
                const cplx rhs = -0.5 * sys.hm * mxx;
                EXPECT_LE(std::abs(lhs - rhs), 1e-5 * (std::abs(lhs) + std::abs(rhs) + 1e-12));
            }
}

TEST_F(MoshinskyTest, SumWithReflectedArgumentIsPlaneWave)
{
    for (cplx q : {cplx(sys.k), cplx(0.7, -0.2), cplx(3.0, -0.05)})
        for (double x : {0.0, 2.0, 9.0})
            for (double t : {0.1, 1.0, 10.0}) {
                const cplx plane = std::exp(cplx(0, 1) * (q * x - 0.5 * sys.hm * q * q * t));
                const cplx sum = moshinsky_M(x, q, t, sys) + moshinsky_M(-x, -q, t, sys);
                EXPECT_LE(std::abs(sum - plane), 1e-12 * std::max(1.0, std::abs(plane)));
            }
}

TEST_F(MoshinskyTest, LeadingAsymptoticTermAwayFromFront)
{
    // M -> K/(q - xi) ahead of the front and plane + K/(q - xi) behind it,
    // K = -e^{i phi} e^{i pi/4}/sqrt(2 pi hm t), xi = x/(hm t)
    const cplx q(sys.k);
    const double t = 1.0, hmt = sys.hm * t;
    for (double x : {-300.0, 400.0}) {
        const double xi = x / hmt;
        const cplx K = -std::polar(1.0, x * x / (2 * hmt)) * cplx(std::sqrt(0.5), std::sqrt(0.5)) / std::sqrt(2 * pi * hmt);
        const cplx lead = K / (q - xi);
        const cplx plane = x < 0 ? std::exp(cplx(0, 1) * (q * x - 0.5 * sys.hm * q * q * t)) : cplx(0);
        const cplx m = moshinsky_M(x, q, t, sys);
        EXPECT_LE(std::abs(m - plane - lead), 1e-3 * std::abs(lead)) << x;
    }
}

TEST_F(MoshinskyTest, RejectsNonPositiveTime)
{
    EXPECT_THROW(moshinsky_M(1.0, sys.k, 0.0, sys), Error);
    EXPECT_THROW(moshinsky_arg(1.0, sys.k, -1.0, sys), Error);
}
