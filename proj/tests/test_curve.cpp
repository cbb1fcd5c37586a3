#include "bsdkit/curve.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bsdkit;

namespace {

HyperellipticCurve genus4() { return curve_new(qpoly({0, 2, 4, 2, 3, 4, 1, 1, 1}), qpoly({0, 0, 1, 0, 0, 1})); }
HyperellipticCurve genus5() { return curve_new(qpoly({0, 0, 1, 0, 1}), qpoly({1, 0, 0, 0, 1, 0, 1})); }

// Projective points of y^2 + h y = f over F_q by walking all (x, y), plus the
// points at infinity: Y^2 + h_{g+1} Y = f_{2g+2} on the chart at infinity.
std::uint64_t brute_count(const HyperellipticCurve& C, const FiniteField& F)
{
    FqTables T(F);
    auto hq = reduce_mod(C.h, T), fq = reduce_mod(C.f, T);
    std::uint64_t n = 0;
    for (std::uint32_t x = 0; x < T.q(); ++x) {
        Fq X(x, &T), hx = hq(X), fx = fq(X);
        for (std::uint32_t y = 0; y < T.q(); ++y) {
            Fq Y(y, &T);
            n += Y * Y + hx * Y - fx == Fq(0, &T);
        }
    }
    int g = C.genus;
    Fq hl(T.from_rational(C.h.coeff(g + 1, Rational(0))), &T), fl(T.from_rational(C.f.coeff(2 * g + 2, Rational(0))), &T);
    if (hl.v == 0 && fl.v == 0) {
        n += 1;  // single point (odd degree after reduction)
    } else {
        for (std::uint32_t y = 0; y < T.q(); ++y) {
            Fq Y(y, &T);
            n += Y * Y + hl * Y - fl == Fq(0, &T);
        }
    }
    return n;
}

}  // namespace

TEST(CurveNew, GenusTwoOdd)
{
    auto C = curve_new(qpoly({1, 0, 0, 0, 0, 1}), QPoly());
    EXPECT_EQ(C.genus, 2);
    EXPECT_EQ(C.parity, Parity::odd);
}

TEST(CurveNew, Genus4Discriminant)
{
    auto C = genus4();
    EXPECT_EQ(C.genus, 4);
    EXPECT_EQ(integer_discriminant(C), Integer(-1064000));
}

TEST(CurveNew, Genus5Discriminant)
{
    auto C = genus5();
    EXPECT_EQ(C.genus, 5);
    EXPECT_EQ(C.parity, Parity::even);
    EXPECT_EQ(integer_discriminant(C), Integer(116985856));
}

TEST(CurveNew, RejectsSingularAndSmallDegree)
{
    EXPECT_THROW(curve_new(qpoly({0, 0, 1, 1}), QPoly()), curve_error);  // x^2 (x + 1)
    EXPECT_THROW(curve_new(qpoly({1, 1}), QPoly()), curve_error);
    EXPECT_THROW(curve_new(QPoly(), QPoly()), curve_error);
}

TEST(CurveNew, EllipticDiscriminantNormalization)
{
    // -16 (4 a^3 + 27 b^2)
    for (auto [a, b] : std::vector<std::pair<long, long>>{{-1, 0}, {0, 1}, {2, -3}, {-7, 5}}) {
        auto C = curve_new(qpoly({b, a, 0, 1}), QPoly());
        EXPECT_EQ(C.disc, Rational(-16 * (4 * a * a * a + 27 * b * b)));
    }
}

TEST(CompleteSquare, IdentityWhenHZero)
{
    auto C = curve_new(qpoly({1, 0, 0, 0, 0, 1}), QPoly());
    auto D = complete_square(C);
    EXPECT_EQ(D.f, C.f);
    EXPECT_TRUE(D.h.zero());
}

TEST(CompleteSquare, Genus5Expansion)
{
    auto C = genus5();
    QPoly h = qpoly({1, 0, 0, 0, 1, 0, 1});
    auto D = complete_square(C);
    EXPECT_EQ(D.f, qpoly({0, 0, 1, 0, 1}) + Rational(1, 4) * (h * h));
    EXPECT_EQ(D.f.degree(), 12);
}

TEST(CompleteSquare, Genus4Degree) { EXPECT_EQ(complete_square(genus4()).f.degree(), 10); }

TEST(CompleteSquare, PreservesCountsAtOddGoodPrimes)
{
    auto C = genus4();
    auto D = complete_square(C);
    for (std::uint64_t p : {3, 11, 13})
        for (int m : {1, 2})
            EXPECT_EQ(point_count(C, ext_field(p, m)).N, point_count(D, ext_field(p, m)).N);
}

TEST(BadPrimes, EllipticPowerOfTwo)
{
    auto C = curve_new(qpoly({0, -1, 0, 1}), QPoly());
    EXPECT_EQ(integer_discriminant(C), Integer(64));
    EXPECT_EQ(bad_primes(C), std::vector<Integer>{2});
}

TEST(BadPrimes, Genus4) { EXPECT_EQ(bad_primes(genus4()), (std::vector<Integer>{2, 5, 7, 19})); }

TEST(BadPrimes, Genus5TrialDivision)
{
    // 116985856 by trial division
    std::vector<Integer> want;
    long n = 116985856;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) {
            want.emplace_back(d);
            while (n % d == 0)
                n /= d;
        }
    if (n > 1)
        want.emplace_back(n);
    EXPECT_EQ(bad_primes(genus5()), want);
}

TEST(PointCount, SmallEllipticCounts)
{
    auto A = curve_new(qpoly({1, 0, 0, 1}), QPoly());
    auto B = curve_new(qpoly({0, -1, 0, 1}), QPoly());
    EXPECT_EQ(point_count(A, ext_field(5, 1)).N, 6u);
    EXPECT_EQ(point_count(B, ext_field(3, 1)).N, 4u);
    EXPECT_EQ(point_count(A, ext_field(7, 1)).N, 12u);
    EXPECT_EQ(brute_count(A, ext_field(5, 1)), 6u);
    EXPECT_EQ(brute_count(B, ext_field(3, 1)), 4u);
    EXPECT_EQ(brute_count(A, ext_field(7, 1)), 12u);
}

TEST(PointCount, CharacterSumEqualsEnumeration)
{
    std::vector<HyperellipticCurve> curves{curve_new(qpoly({1, 0, 0, 0, 0, 1}), QPoly()),
                                           curve_new(qpoly({0, -1, 0, 1}), qpoly({1})), genus4(), genus5(),
                                           curve_new(qpoly({1, 2, 0, 3, 0, 1}), qpoly({0, 1, 1}))};
    for (auto& C : curves) {
        Integer d = integer_discriminant(C);
        for (std::uint64_t p : {2, 3, 5, 7})
            for (int m = 1; std::pow((double)p, m) <= 81; ++m) {
                if (d % p == 0)
                    continue;
                FiniteField F = ext_field(p, m);
                EXPECT_EQ(point_count(C, F).N, brute_count(C, F)) << "genus " << C.genus << " q=" << p << "^" << m;
            }
    }
}

TEST(PointCount, WeilBound)
{
    auto C = genus4();
    for (std::uint64_t p : {3, 11, 13, 17})
        for (int m = 1; m <= 3; ++m) {
            auto pc = point_count(C, ext_field(p, m));
            double q = (double)pc.q;
            EXPECT_LE(std::abs((double)pc.N - (q + 1)), 2 * 4 * std::sqrt(q));
        }
}

TEST(PointCount, BadPrimeRejected) { EXPECT_THROW(point_count(genus4(), ext_field(5, 1)), curve_error); }
