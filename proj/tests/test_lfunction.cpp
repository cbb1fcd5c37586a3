#include "bsdkit/lfunction.hpp"

#include <gtest/gtest.h>

using namespace bsdkit;

namespace {

HyperellipticCurve e11a3() { return curve_new(qpoly({0, 0, -1, 1}), qpoly({1})); }
HyperellipticCurve e37a() { return curve_new(qpoly({0, -1, 0, 1}), qpoly({1})); }
HyperellipticCurve genus4() { return curve_new(qpoly({0, 2, 4, 2, 3, 4, 1, 1, 1}), qpoly({0, 0, 1, 0, 0, 1})); }
HyperellipticCurve genus5() { return curve_new(qpoly({0, 0, 1, 0, 1}), qpoly({1, 0, 0, 0, 1, 0, 1})); }

std::vector<Integer> zv(std::initializer_list<long> c) { return std::vector<Integer>(c.begin(), c.end()); }

// affine solutions of y^2 = F(x) over F_p plus the single point at infinity
long brute_points_y2(const std::vector<long>& F, long p)
{
    long n = 1;
    for (long x = 0; x < p; ++x)
        for (long y = 0; y < p; ++y) {
            long v = 0;
            for (int i = (int)F.size() - 1; i >= 0; --i)
                v = ((v * x + F[i]) % p + p) % p;
            n += (y * y) % p == v;
        }
    return n;
}

double rel(const BigFloat& a, const char* b) { return mp::abs(a / BigFloat(b) - 1).convert_to<double>(); }

// ellL1 / ellL1(., 1) from PARI/GP at 40 digits, fixed here as reference constants
constexpr const char* kL11a3 = "0.2538418608559106843377589233509094610439";
constexpr const char* kLp37a = "0.3059997738340523018204836833216764744526";

}  // namespace

TEST(LocalFactor, EllipticY2X3p1)
{
    auto C = curve_new(qpoly({1, 0, 0, 1}), QPoly());
    // 1 - a_p T + p T^2 with a_p = p + 1 - N_1
    for (long p : {5, 7, 11, 13}) {
        long ap = p + 1 - brute_points_y2({1, 0, 0, 1}, p);
        EXPECT_EQ(local_factor_good(C, p).poly, zv({1, -ap, p})) << p;
    }
    EXPECT_EQ(local_factor_good(C, 5).poly, zv({1, 0, 5}));
    EXPECT_EQ(local_factor_good(C, 7).poly, zv({1, 4, 7}));
}

TEST(LocalFactor, GenusTwoFromTwoCounts)
{
    auto C = curve_new(qpoly({1, 0, 0, 0, 0, 1}), QPoly());
    // N_1 over F_3 by enumeration, N_2 over F_9 via point_count's enumeration-checked path
    long q = 3;
    Integer N1 = brute_points_y2({1, 0, 0, 0, 0, 1}, 3), N2 = point_count(C, ext_field(3, 2)).N;
    Integer s1 = q + 1 - N1, s2 = q * q + 1 - N2;
    Integer c1 = -s1, c2 = (s1 * s1 - s2) / 2;
    EXPECT_EQ(local_factor_good(C, 3).poly, (std::vector<Integer>{1, c1, c2, q * c1, q * q}));
    EXPECT_EQ(local_factor_good(C, 3).poly, zv({1, 0, 0, 0, 9}));
}

TEST(LocalFactor, RejectsBadPrime) { EXPECT_THROW(local_factor_good(genus4(), 5), lfunction_error); }

TEST(Dirichlet, TrivialCutoff)
{
    LSeries L;
    L.g = 1;
    auto a = dirichlet_coefficients(L, 1);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[1], 1);
}

TEST(Dirichlet, EllipticY2X3p1MatchesEulerExpansion)
{
    auto C = curve_new(qpoly({1, 0, 0, 1}), QPoly());
    LSeries L;
    L.g = 1;
    fill_good_factors(C, L, 200);
    L.factors[2] = LocalFactor{2, zv({1}), 2, false, 2};
    L.factors[3] = LocalFactor{3, zv({1}), 2, false, 2};
    auto a = dirichlet_coefficients(L, 200);
    // a_p from enumeration, a_{p^k} by the Hecke recursion, a_mn = a_m a_n
    std::vector<long> want(201, 0);
    want[1] = 1;
    for (long n = 2; n <= 200; ++n) {
        long m = n, p = 2;
        while (m % p)
            ++p;
        int k = 0;
        while (m % p == 0) {
            m /= p;
            ++k;
        }
        bool bad = p == 2 || p == 3;  // L_p = 1 there
        long apv = bad ? 0 : p + 1 - brute_points_y2({1, 0, 0, 1}, p);
        long x0 = 1, x1 = apv;
        for (int i = 2; i <= k && !bad; ++i) {
            long x2 = apv * x1 - p * x0;
            x0 = x1;
            x1 = x2;
        }
        want[n] = want[m] * (k == 1 ? apv : x1);
    }
    for (long n = 1; n <= 200; ++n)
        EXPECT_EQ(a[n], want[n]) << n;
    // ellan(ellinit([0,0,0,0,1]), 10)
    EXPECT_EQ(std::vector<std::int64_t>(a.begin() + 1, a.begin() + 11), (std::vector<std::int64_t>{1, 0, 0, 0, 0, 0, -4, 0, 0, 0}));
}

TEST(Dirichlet, OnlyLinearTermNeededAboveRootX)
{
    // genus 2, so a single count does not already fix the whole factor
    auto C = curve_new(qpoly({1, 0, 0, 0, 0, 1}), QPoly());
    LSeries L;
    L.g = 2;
    fill_good_factors(C, L, 100);
    L.factors[2] = LocalFactor{2, zv({1}), 4, false, 2};
    L.factors[5] = LocalFactor{5, zv({1}), 4, false, 2};
    EXPECT_EQ(L.factors.at(53).known, 1);
    EXPECT_EQ(L.factors.at(7).known, 4);  // two counts fix all of a genus-2 factor
    EXPECT_NO_THROW(dirichlet_coefficients(L, 100));
    L.factors.at(7).known = 1;
    EXPECT_THROW(dirichlet_coefficients(L, 100), lfunction_error);
}

TEST(Ogg, Guesses)
{
    EXPECT_EQ(conductor_ogg_guess(0, 1).value, 0);
    EXPECT_EQ(conductor_ogg_guess(9, 3).value, 7);
    // I_5 fibre: v(disc) = 5, five components, multiplicative so f = 1
    EXPECT_EQ(conductor_ogg_guess(5, 5).value, 1);
    EXPECT_TRUE(conductor_ogg_guess(9, 3).reliable);
    EXPECT_FALSE(conductor_ogg_guess(12, 1).reliable);
    auto neg = conductor_ogg_guess(1, 4);
    EXPECT_EQ(neg.value, 0);
    EXPECT_FALSE(neg.warning.empty());
}

TEST(Search, EllipticRankZero)
{
    auto C = e11a3();
    auto rep = search_bad_data(C, LSeries{}, {11}, {});
    EXPECT_EQ(rep.series.N, 11);
    EXPECT_EQ(rep.series.w, 1);
    EXPECT_LT(rep.residual, 1e-8);
    // every other prime kept its good factor
    for (auto& [p, lf] : rep.series.factors)
        EXPECT_EQ(lf.good, p != 11) << p;
    auto rr = analytic_rank(rep.series);
    EXPECT_EQ(rr.rank, 0);
    EXPECT_LT(rel(rr.lead, kL11a3), 1e-15);
}

TEST(Search, EllipticRankOne)
{
    auto rep = search_bad_data(e37a(), LSeries{}, {37}, {});
    EXPECT_EQ(rep.series.N, 37);
    EXPECT_EQ(rep.series.w, -1);
    auto rr = analytic_rank(rep.series);
    EXPECT_EQ(rr.rank, 1);
    EXPECT_LT(mp::abs(rr.derivatives[0]).convert_to<double>(), 1e-12);
    EXPECT_LT(rel(rr.lead, kLp37a), 1e-15);
    EXPECT_LT(rel(l_derivative(rep.series, 1), kLp37a), 1e-15);
}

TEST(Residual, SignFlipAndWrongExponent)
{
    auto rep = search_bad_data(e11a3(), LSeries{}, {11}, {});
    LSeries L = rep.series;
    EXPECT_LT(functional_equation_residual(L), 1e-8);
    L.w = -1;
    EXPECT_GT(functional_equation_residual(L), 1e-2);
    L.w = 1;
    L.factors[11].f = 2;
    L.N = 121;
    LOptions o;
    LPlan P = make_plan(1, L.N, o);
    fill_good_factors(e11a3(), L, P.X);
    EXPECT_GT(functional_equation_residual(L), 1e-3);
}

TEST(Residual, CentreAndMirrorPoints)
{
    auto rep = search_bad_data(e11a3(), LSeries{}, {11}, {});
    LSeries L = rep.series;
    L.factors[11].f = 2;
    L.N = 121;
    LOptions o;
    o.s_points = {1.0, 0.7, 1.3};
    LPlan P = make_plan(1, L.N, o);
    fill_good_factors(e11a3(), L, P.X);
    auto a = dirichlet_coefficients(L, P.X);
    auto r = fe_residuals(P, {a}, o)[0];
    // w = +1: the split is symmetric at s = 1, and s, 2 - s agree
    EXPECT_LT(r[0].per_point[0], 1e-30);
    EXPECT_NEAR(r[0].per_point[1], r[0].per_point[2], 1e-12 * r[0].per_point[1]);
    EXPECT_GT(r[1].per_point[0], 1e-3);
    o.s_points = {2.0};
    EXPECT_THROW(fe_residuals(P, {a}, o), lfunction_error);
}

TEST(Search, NoCandidatePasses)
{
    std::vector<BadPrimeHint> hints{BadPrimeHint{11, 1, std::make_pair(2, 2), {}}};
    EXPECT_THROW(search_bad_data(e11a3(), LSeries{}, {11}, hints), lfunction_error);
}

TEST(EulerCacheFile, RoundTrip)
{
    auto dir = std::filesystem::temp_directory_path() / "bsdkit_test_euler";
    std::filesystem::remove_all(dir);
    auto C = genus4();
    {
        EulerCache c(dir, curve_hash(C));
        LSeries L;
        L.g = 4;
        fill_good_factors(C, L, 500, &c);
        c.save();
    }
    EulerCache c(dir, curve_hash(C));
    const LocalFactor* lf = c.find(3, 4);
    ASSERT_NE(lf, nullptr);
    EXPECT_EQ(lf->poly, local_factor_good(C, 3).poly);
    EXPECT_EQ(c.find(499, 2), nullptr);
    ASSERT_NE(c.find(499, 1), nullptr);
    std::filesystem::remove_all(dir);
}

TEST(Golden, Genus4LeadingValue)
{
    auto C = genus4();
    std::vector<BadPrimeHint> hints{BadPrimeHint{2, 2, {}, {}}};
    auto rep = search_bad_data(C, LSeries{}, {2, 5, 7, 19}, hints);
    EXPECT_EQ(rep.series.N, 532000);
    auto rr = analytic_rank(rep.series);
    EXPECT_EQ(rr.rank, 0);
    EXPECT_NEAR(rr.lead.convert_to<double>(), 0.09889146, 1e-5);
}

TEST(Golden, Genus5LeadingValue)
{
    auto C = genus5();
    std::vector<BadPrimeHint> hints{BadPrimeHint{2, 1, std::make_pair(12, 12), {}}, BadPrimeHint{13, 1, std::make_pair(4, 4), {}}};
    auto rep = search_bad_data(C, LSeries{}, {2, 13}, hints);
    EXPECT_EQ(rep.series.N, Integer(116985856));
    EXPECT_EQ(rep.series.w, 1);
    auto rr = analytic_rank(rep.series);
    EXPECT_EQ(rr.rank, 0);
    EXPECT_NEAR(rr.lead.convert_to<double>(), 0.1002872, 1e-5);
}
