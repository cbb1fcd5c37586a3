#include "bsdkit/exactarith.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bsdkit;

namespace {

// Sylvester determinant by fraction-field elimination
Rational sylvester_resultant(const QPoly& a, const QPoly& b)
{
    int m = a.degree(), n = b.degree(), N = m + n;
    std::vector<std::vector<Rational>> S(N, std::vector<Rational>(N, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= m; ++j)
            S[i][i + j] = a.c[m - j];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= n; ++j)
            S[n + i][i + j] = b.c[n - j];
    Rational det = 1;
    for (int c = 0; c < N; ++c) {
        int piv = -1;
        for (int r = c; r < N; ++r)
            if (S[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0)
            return 0;
        if (piv != c) {
            std::swap(S[piv], S[c]);
            det = -det;
        }
        det *= S[c][c];
        for (int r = c + 1; r < N; ++r) {
            Rational f = S[r][c] / S[c][c];
            for (int k = c; k < N; ++k)
                S[r][k] -= f * S[c][k];
        }
    }
    return det;
}

Rational sylvester_discriminant(const QPoly& f)
{
    int n = f.degree();
    Rational r = sylvester_resultant(f, f.derivative()) / f.lead();
    return (n * (n - 1) / 2) % 2 ? Rational(-r) : r;
}

bool has_root_mod(const std::vector<std::uint64_t>& c, std::uint64_t p)
{
    for (std::uint64_t x = 0; x < p; ++x) {
        std::uint64_t v = 0;
        for (int i = (int)c.size() - 1; i >= 0; --i)
            v = (v * x + c[i]) % p;
        if (v == 0)
            return true;
    }
    return false;
}

}  // namespace

TEST(ExtField, F4Modulus)
{
    FiniteField F = ext_field(2, 2);
    EXPECT_EQ(F.modulus, (std::vector<std::uint64_t>{1, 1, 1}));
}

TEST(ExtField, PrimeFieldHasNoModulus)
{
    FiniteField F = ext_field(5, 1);
    EXPECT_TRUE(F.modulus.empty());
    EXPECT_EQ(F.q(), 5u);
}

TEST(ExtField, F9IsLexLeastIrreducible)
{
    // scan monic quadratics in the same order; first one without roots wins
    std::vector<std::uint64_t> want;
    for (std::uint64_t c0 = 0; c0 < 3 && want.empty(); ++c0)
        for (std::uint64_t c1 = 0; c1 < 3 && want.empty(); ++c1)
            if (!has_root_mod({c0, c1, 1}, 3))
                want = {c0, c1, 1};
    EXPECT_EQ(ext_field(3, 2).modulus, want);
}

TEST(ExtField, RejectsComposite) { EXPECT_THROW(ext_field(9, 1), arith_error); }

TEST(FqTables, LogTablesAgreeWithSchoolbookProduct)
{
    for (auto [p, m] : std::vector<std::pair<std::uint64_t, int>>{{2, 3}, {3, 2}, {5, 2}, {7, 1}}) {
        FiniteField F = ext_field(p, m);
        FqTables T(F);
        // schoolbook product of digit vectors reduced by the modulus
        auto digits = [&](std::uint32_t a) {
            std::vector<std::uint64_t> d(m);
            for (int i = 0; i < m; ++i, a /= p)
                d[i] = a % p;
            return d;
        };
        for (std::uint32_t a = 0; a < T.q(); ++a)
            for (std::uint32_t b = 0; b < T.q(); ++b) {
                auto da = digits(a), db = digits(b);
                std::vector<std::uint64_t> prod(2 * m, 0);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
                for (int k = 2 * m - 2; k >= m; --k) {
                    std::uint64_t c = prod[k];
                    prod[k] = 0;
                    for (int i = 0; i < m; ++i)
                        prod[k - m + i] = (prod[k - m + i] + (p - c) * F.modulus[i]) % p;
                }
                std::uint32_t want = 0, pw = 1;
                for (int i = 0; i < m; ++i, pw *= p)
                    want += (std::uint32_t)(prod[i] * pw);
                ASSERT_EQ(T.mul(a, b), want) << p << "^" << m << " " << a << "*" << b;
            }
    }
}

TEST(FqTables, HalfTheUnitsAreSquares)
{
    for (auto [p, m] : std::vector<std::pair<std::uint64_t, int>>{{3, 3}, {5, 3}, {7, 2}}) {
        FqTables T(ext_field(p, m));
        int sq = 0;
        for (std::uint32_t a = 1; a < T.q(); ++a)
            sq += T.chi(a) == 1;
        EXPECT_EQ((std::uint64_t)sq, (T.q() - 1) / 2);
    }
}

TEST(PolyDiscriminant, Quadratic) { EXPECT_EQ(poly_discriminant(qpoly({1, 0, 1})), Rational(-4)); }

TEST(PolyDiscriminant, DepressedCubic) { EXPECT_EQ(poly_discriminant(qpoly({0, -1, 0, 1})), Rational(4)); }

TEST(PolyDiscriminant, QuinticMatchesSylvester)
{
    QPoly f = qpoly({1, 0, 0, 0, 0, 1});
    EXPECT_EQ(poly_discriminant(f), sylvester_discriminant(f));
}

TEST(PolyDiscriminant, RandomPolynomialsMatchSylvester)
{
    std::mt19937 rng(7);
    for (int t = 0; t < 20; ++t) {
        int n = 3 + (int)(rng() % 6);
        std::vector<Rational> c;
        for (int i = 0; i < n; ++i)
            c.emplace_back((long)(rng() % 21) - 10, 1 + (long)(rng() % 3));
        c.emplace_back(1 + (long)(rng() % 4));
        QPoly f(c);
        EXPECT_EQ(poly_discriminant(f), sylvester_discriminant(f));
    }
}

TEST(RationalReconstruct, Half)
{
    auto q = rational_reconstruct(BigFloat("0.5"), 10, BigFloat("1e-9"));
    ASSERT_TRUE(q);
    EXPECT_EQ(*q, Rational(1, 2));
}

TEST(RationalReconstruct, Third)
{
    auto q = rational_reconstruct(BigFloat("0.3333333333"), 100, BigFloat("1e-6"));
    ASSERT_TRUE(q);
    EXPECT_EQ(*q, Rational(1, 3));
}

TEST(RationalReconstruct, PiHasNoSmallDenominator)
{
    // convergents 3, 22/7, 333/106: none with denominator <= 10 is within 1e-9
    EXPECT_FALSE(rational_reconstruct(BigFloat("3.14159265358979"), 10, BigFloat("1e-9")));
    auto q = rational_reconstruct(BigFloat("3.14159265358979"), 200, BigFloat("1e-6"));
    ASSERT_TRUE(q);
    EXPECT_EQ(*q, Rational(355, 113));
}

TEST(Integers, PrimalityMatchesTrialDivision)
{
    for (std::uint64_t n = 0; n < 3000; ++n) {
        bool want = n >= 2;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0)
                want = false;
        ASSERT_EQ(is_prime(n), want) << n;
    }
}

TEST(Integers, FactorGenus4Discriminant)
{
    Factorization f = factor_integer(Integer(1064000));
    EXPECT_EQ(f.cofactor, 1);
    std::map<Integer, int> got;
    for (auto& [p, e] : f.factors)
        got[p] = e;
    EXPECT_EQ(got, (std::map<Integer, int>{{2, 6}, {5, 3}, {7, 1}, {19, 1}}));
}

TEST(Integers, Valuation)
{
    EXPECT_EQ(valuation(Integer(1064000), Integer(2)), 6);
    EXPECT_EQ(valuation(Rational(3, 50), Integer(5)), -2);
}

TEST(BigComplexOps, SqrtOfNegative)
{
    precision_scope ps(40);
    BigComplex w = sqrt(BigComplex(BigFloat(-4), BigFloat(0)));
    EXPECT_LT(mp::abs(w.re), BigFloat("1e-35"));
    EXPECT_LT(mp::abs(w.im - 2), BigFloat("1e-35"));
}

TEST(Precision, ScopeRestores)
{
    unsigned before = working_digits();
    {
        precision_scope ps(80);
        EXPECT_EQ(working_digits(), 80u);
        BigFloat x = mp::sqrt(BigFloat(2));
        EXPECT_LT(mp::abs(x * x - 2), BigFloat("1e-75"));
    }
    EXPECT_EQ(working_digits(), before);
}

TEST(ParseRational, RoundTrip)
{
    EXPECT_EQ(parse_rational("-7/21"), Rational(-1, 3));
    EXPECT_EQ(rational_str(parse_rational("12")), "12");
    EXPECT_THROW(parse_rational("1/0"), arith_error);
}
