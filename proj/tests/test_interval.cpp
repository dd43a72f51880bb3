#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "powexp/interval.hpp"

using namespace powexp;

namespace {

constexpr long kPrec = 96;

IvMp mk(double lo, double hi) {
    return IvMp(MpReal::from_double(lo, kPrec), MpReal::from_double(hi, kPrec));
}

double lo_d(const IvMp& a) { return mpfr_get_d(a.lo.raw(), MPFR_RNDD); }
double hi_d(const IvMp& a) { return mpfr_get_d(a.hi.raw(), MPFR_RNDU); }

// Containment check against a point sample computed at much higher precision.
void expect_contains(const IvMp& a, const MpReal& x) {
    ASSERT_FALSE(a.empty);
    EXPECT_LE(a.lo.cmp(x), 0) << iv_str(a) << " vs " << x.str();
    EXPECT_GE(a.hi.cmp(x), 0) << iv_str(a) << " vs " << x.str();
}

TEST(IntervalMp, AddSubMulDivBasics) {
    IvMp a = mk(1.0, 2.0), b = mk(3.0, 5.0);
    IvMp s = iv_add(a, b, kPrec);
    EXPECT_DOUBLE_EQ(lo_d(s), 4.0);
    EXPECT_DOUBLE_EQ(hi_d(s), 7.0);
    IvMp d = iv_sub(a, b, kPrec);
    EXPECT_DOUBLE_EQ(lo_d(d), -4.0);
    EXPECT_DOUBLE_EQ(hi_d(d), -1.0);
    IvMp m = iv_mul(mk(-2.0, 3.0), mk(-1.0, 4.0), kPrec);
    EXPECT_DOUBLE_EQ(lo_d(m), -8.0);
    EXPECT_DOUBLE_EQ(hi_d(m), 12.0);
    IvMp q = iv_div(mk(1.0, 2.0), mk(4.0, 8.0), kPrec);
    EXPECT_DOUBLE_EQ(lo_d(q), 0.125);
    EXPECT_DOUBLE_EQ(hi_d(q), 0.5);
}

TEST(IntervalMp, DivByZeroIntervalThrows) {
    EXPECT_THROW(iv_div(mk(1, 2), mk(-1, 1), kPrec), DomainError);
    EXPECT_THROW(iv_div(mk(1, 2), mk(0, 1), kPrec), DomainError);
    EXPECT_NO_THROW(iv_div(mk(1, 2), mk(0.5, 1), kPrec));
}

TEST(IntervalMp, SqrStraddleIsNonnegative) {
    IvMp s = iv_sqr(mk(-3.0, 2.0), kPrec);
    EXPECT_DOUBLE_EQ(lo_d(s), 0.0);
    EXPECT_DOUBLE_EQ(hi_d(s), 9.0);
    s = iv_sqr(mk(-3.0, -2.0), kPrec);
    EXPECT_DOUBLE_EQ(lo_d(s), 4.0);
    EXPECT_DOUBLE_EQ(hi_d(s), 9.0);
}

TEST(IntervalMp, LnDomain) {
    EXPECT_THROW(iv_ln(mk(-2.0, -1.0), kPrec), DomainError);
    EXPECT_THROW(iv_ln(mk(-1.0, 0.0), kPrec), DomainError);
    IvMp half_open = iv_ln(mk(0.0, 1.0), kPrec);
    EXPECT_TRUE(std::isinf(lo_d(half_open)));
    EXPECT_LT(lo_d(half_open), 0);
    EXPECT_GE(hi_d(half_open), 0.0);
    IvMp pos = iv_ln(mk(1.0, std::exp(1.0)), kPrec);
    EXPECT_LE(lo_d(pos), 0.0);
    EXPECT_GE(hi_d(pos), 0.9999999);
}

TEST(IntervalMp, ZeroPowerConvention) {
    // 0^0 = 1 and 0^y = 0 for y > 0; negative exponents over a base
    // interval touching zero are rejected.
    IvMp z = IvMp::point(MpReal::zero(kPrec));
    IvMp y0 = IvMp::point(MpReal::zero(kPrec));
    IvMp p = iv_pow(z, y0, kPrec);
    EXPECT_DOUBLE_EQ(lo_d(p), 1.0);
    EXPECT_DOUBLE_EQ(hi_d(p), 1.0);
    p = iv_pow(z, mk(1.0, 2.0), kPrec);
    EXPECT_DOUBLE_EQ(lo_d(p), 0.0);
    EXPECT_DOUBLE_EQ(hi_d(p), 0.0);
    p = iv_pow(z, mk(0.0, 2.0), kPrec);
    EXPECT_DOUBLE_EQ(lo_d(p), 0.0);
    EXPECT_DOUBLE_EQ(hi_d(p), 1.0);
    EXPECT_THROW(iv_pow(z, mk(-1.0, 1.0), kPrec), DomainError);
    EXPECT_THROW(iv_pow(mk(-1.0, 2.0), mk(1.0, 2.0), kPrec), DomainError);
}

TEST(IntervalMp, PowZeroBaseHull) {
    // [0, 2]^[1, 2] must cover both the zero-set value and e.g. 0.5^1 = 0.5
    // and 2^2 = 4.
    IvMp p = iv_pow(mk(0.0, 2.0), mk(1.0, 2.0), kPrec);
    EXPECT_LE(lo_d(p), 0.0);
    EXPECT_GE(hi_d(p), 4.0);
    expect_contains(p, MpReal::from_double(0.5, kPrec));
    // [0, 2]^[0, 2] additionally covers x^0 = 1 for x > 0.
    p = iv_pow(mk(0.0, 2.0), mk(0.0, 2.0), kPrec);
    expect_contains(p, MpReal::from_double(1.0, kPrec));
    EXPECT_GE(hi_d(p), 4.0);
}

TEST(IntervalMp, PowIntNegativeBase) {
    IvMp p = iv_pow_int(mk(-2.0, 1.5), 4, kPrec);
    EXPECT_DOUBLE_EQ(lo_d(p), 0.0);
    EXPECT_DOUBLE_EQ(hi_d(p), 16.0);
    p = iv_pow_int(mk(-2.0, 1.5), 3, kPrec);
    EXPECT_DOUBLE_EQ(lo_d(p), -8.0);
    EXPECT_DOUBLE_EQ(hi_d(p), 3.375);
    p = iv_pow_int(mk(2.0, 4.0), -2, kPrec);
    EXPECT_DOUBLE_EQ(lo_d(p), 0.0625);
    EXPECT_DOUBLE_EQ(hi_d(p), 0.25);
    p = iv_pow_int(mk(-3.0, -2.0), 2, kPrec);
    EXPECT_DOUBLE_EQ(lo_d(p), 4.0);
    EXPECT_DOUBLE_EQ(hi_d(p), 9.0);
}

TEST(IntervalMp, HullAndHelpers) {
    IvMp h = iv_hull(mk(1, 2), mk(4, 5));
    EXPECT_DOUBLE_EQ(lo_d(h), 1.0);
    EXPECT_DOUBLE_EQ(hi_d(h), 5.0);
    h = iv_hull(IvMp::make_empty(), mk(1, 2));
    EXPECT_DOUBLE_EQ(lo_d(h), 1.0);
    EXPECT_DOUBLE_EQ(hi_d(h), 2.0);
    EXPECT_DOUBLE_EQ(iv_width(mk(1, 4), kPrec).to_double(), 3.0);
    EXPECT_DOUBLE_EQ(iv_mid(mk(1, 4), kPrec).to_double(), 2.5);
    EXPECT_DOUBLE_EQ(iv_mag(mk(-5, 2), kPrec).to_double(), 5.0);
    EXPECT_TRUE(mk(1, 2).subset_of(mk(0, 3)));
    EXPECT_FALSE(mk(1, 4).subset_of(mk(0, 3)));
}

// Randomized containment: every op output must contain the op applied to
// points sampled inside the inputs, evaluated at 256-bit precision.
TEST(IntervalMp, RandomContainment) {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> U(0.01, 4.0);
    for (int it = 0; it < 400; ++it) {
        double a1 = U(rng), a2 = U(rng), b1 = U(rng), b2 = U(rng);
        IvMp A = mk(std::min(a1, a2), std::max(a1, a2));
        IvMp B = mk(std::min(b1, b2), std::max(b1, b2));
        std::uniform_real_distribution<double> ua(lo_d(A), hi_d(A));
        std::uniform_real_distribution<double> ub(lo_d(B), hi_d(B));
        double xa = ua(rng), xb = ub(rng);
        MpReal x = MpReal::from_double(xa, 256), y = MpReal::from_double(xb, 256);
        MpReal ref(256);

        mpfr_add(ref.raw(), x.raw(), y.raw(), MPFR_RNDN);
        expect_contains(iv_add(A, B, kPrec), ref);
        mpfr_sub(ref.raw(), x.raw(), y.raw(), MPFR_RNDN);
        expect_contains(iv_sub(A, B, kPrec), ref);
        mpfr_mul(ref.raw(), x.raw(), y.raw(), MPFR_RNDN);
        expect_contains(iv_mul(A, B, kPrec), ref);
        mpfr_div(ref.raw(), x.raw(), y.raw(), MPFR_RNDN);
        expect_contains(iv_div(A, B, kPrec), ref);
        mpfr_pow(ref.raw(), x.raw(), y.raw(), MPFR_RNDN);
        expect_contains(iv_pow(A, B, kPrec), ref);
        mpfr_log(ref.raw(), x.raw(), MPFR_RNDN);
        expect_contains(iv_ln(A, kPrec), ref);
        mpfr_exp(ref.raw(), x.raw(), MPFR_RNDN);
        expect_contains(iv_exp(A, kPrec), ref);
        mpfr_sqrt(ref.raw(), x.raw(), MPFR_RNDN);
        expect_contains(iv_sqrt(A, kPrec), ref);
    }
}

// Double backend: same containment property, checked against mpfr references.
TEST(IntervalD, RandomContainment) {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> U(0.01, 4.0);
    for (int it = 0; it < 400; ++it) {
        double a1 = U(rng), a2 = U(rng), b1 = U(rng), b2 = U(rng);
        IvD A(std::min(a1, a2), std::max(a1, a2));
        IvD B(std::min(b1, b2), std::max(b1, b2));
        std::uniform_real_distribution<double> ua(A.lo, A.hi);
        std::uniform_real_distribution<double> ub(B.lo, B.hi);
        double xa = ua(rng), xb = ub(rng);
        MpReal x = MpReal::from_double(xa, 256), y = MpReal::from_double(xb, 256);
        MpReal ref(256);
        auto chk = [&](const IvD& r) {
            ASSERT_FALSE(r.empty);
            EXPECT_GE(mpfr_cmp_d(ref.raw(), r.lo), 0);
            EXPECT_LE(mpfr_cmp_d(ref.raw(), r.hi), 0);
        };
        mpfr_add(ref.raw(), x.raw(), y.raw(), MPFR_RNDN);
        chk(iv_add(A, B, 0));
        mpfr_mul(ref.raw(), x.raw(), y.raw(), MPFR_RNDN);
        chk(iv_mul(A, B, 0));
        mpfr_div(ref.raw(), x.raw(), y.raw(), MPFR_RNDN);
        chk(iv_div(A, B, 0));
        mpfr_pow(ref.raw(), x.raw(), y.raw(), MPFR_RNDN);
        chk(iv_pow(A, B, 0));
        mpfr_log(ref.raw(), x.raw(), MPFR_RNDN);
        chk(iv_ln(A, 0));
        mpfr_exp(ref.raw(), x.raw(), MPFR_RNDN);
        chk(iv_exp(A, 0));
    }
}

TEST(Number, DecimalRoundTrip) {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        MpReal x = MpReal::from_double(U(rng), 96);
        MpReal back = MpReal::parse(x.str(), 96);
        EXPECT_EQ(x.cmp(back), 0) << x.str();
    }
    EXPECT_EQ(MpReal::parse("inf", 96).is_inf(), true);
    EXPECT_EQ(MpReal::parse("-inf", 96).sign(), -1);
    EXPECT_EQ(MpReal::zero(96).str(), "0");
}

TEST(Number, RatioDirectedRounding) {
    MpReal down = MpReal::from_ratio(1, 3, 96, MPFR_RNDD);
    MpReal up = MpReal::from_ratio(1, 3, 96, MPFR_RNDU);
    EXPECT_LT(down.cmp(up), 0);
    MpReal third256 = MpReal::from_ratio(1, 3, 256);
    EXPECT_LE(down.cmp(third256), 0);
    EXPECT_GE(up.cmp(third256), 0);
}

}  // namespace
