#include "bsdkit/periods.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bsdkit;

namespace {

HyperellipticCurve genus4() { return curve_new(qpoly({0, 2, 4, 2, 3, 4, 1, 1, 1}), qpoly({0, 0, 1, 0, 0, 1})); }
HyperellipticCurve genus5() { return curve_new(qpoly({0, 0, 1, 0, 1}), qpoly({1, 0, 0, 0, 1, 0, 1})); }

BigFloat agm(BigFloat a, BigFloat b)
{
    for (int i = 0; i < 200; ++i) {
        BigFloat an = (a + b) / 2, bn = mp::sqrt(a * b);
        a = an;
        b = bn;
    }
    return a;
}

double dist(const BigFloat& a, const BigFloat& b) { return mp::abs(a - b).convert_to<double>(); }

IMatrix sym_unit(int g, std::mt19937& rng)
{
    // product of the three elementary symplectic shapes, small entries
    const int n = 2 * g;
    IMatrix S(n, std::vector<long>(n, 0));
    for (int i = 0; i < n; ++i)
        S[i][i] = 1;
    for (int k = 0; k < 6; ++k) {
        IMatrix E(n, std::vector<long>(n, 0));
        for (int i = 0; i < n; ++i)
            E[i][i] = 1;
        int i = (int)(rng() % g), j = (int)(rng() % g);
        long c = (long)(rng() % 5) - 2;
        switch (rng() % 3) {
        case 0:  // [[I, B], [0, I]], B symmetric
            E[i][g + j] += c;
            if (i != j)
                E[j][g + i] += c;
            break;
        case 1:  // [[I, 0], [B, I]]
            E[g + i][j] += c;
            if (i != j)
                E[g + j][i] += c;
            break;
        default:  // [[A, 0], [0, A^-T]], A = I + c e_ij
            if (i == j)
                break;
            E[i][j] = c;
            E[g + j][g + i] = -c;
        }
        S = imat_mul(E, S);
    }
    return S;
}

}  // namespace

TEST(BranchPoints, SortedAndSeparated)
{
    precision_scope ps(30);
    auto B = branch_points(curve_new(qpoly({0, -1, 0, 1}), QPoly()), 30);
    ASSERT_EQ(B.roots.size(), 3u);
    EXPECT_TRUE(B.infinity);
    EXPECT_LT(dist(B.roots[0].re, BigFloat(-1)), 1e-25);
    EXPECT_LT(dist(B.roots[1].re, BigFloat(0)), 1e-25);
    EXPECT_LT(dist(B.roots[2].re, BigFloat(1)), 1e-25);
    EXPECT_LT(B.error_bound.convert_to<double>(), 1e-25);
    EXPECT_GT(B.separation.convert_to<double>(), 0.99);
}

TEST(BranchPoints, EvenDegreeHasNoBranchAtInfinity)
{
    auto B = branch_points(genus5(), 30);
    EXPECT_EQ(B.roots.size(), 12u);
    EXPECT_FALSE(B.infinity);
}

TEST(Homology, IntersectionIsUnimodularAndReduces)
{
    for (auto C : {genus4(), genus5(), curve_new(qpoly({1, 0, 0, 0, 0, 1}), QPoly())}) {
        auto B = branch_points(C, 30);
        auto H = homology_basis(B, C.genus);
        const auto J = standard_j(C.genus);
        EXPECT_EQ(detail::int_det(H.raw_intersection), 1);
        EXPECT_EQ(imat_mul(imat_mul(H.transform, H.raw_intersection), imat_transpose(H.transform)), J);
        // reversing the orientation negates the pairing; the reduction still lands on J
        IMatrix K = H.raw_intersection;
        for (auto& r : K)
            for (auto& x : r)
                x = -x;
        IMatrix S = symplectic_reduction(K);
        EXPECT_EQ(imat_mul(imat_mul(S, K), imat_transpose(S)), J);
    }
}

TEST(RealPeriod, EllipticAgmOracle)
{
    precision_scope ps(40);
    // y^2 = x^3 - x: roots -1 < 0 < 1, Omega = 2 pi / AGM(sqrt 2, 1)
    BigFloat want = 2 * big_pi() / agm(mp::sqrt(BigFloat(2)), BigFloat(1));
    BigFloat got = raw_real_period(curve_new(qpoly({0, -1, 0, 1}), QPoly()), 30);
    EXPECT_LT(dist(got, want), 1e-20);
    EXPECT_LT(dist(got, BigFloat("5.2441151085842396")), 1e-15);
}

TEST(RealPeriod, EllipticOneRealRoot)
{
    precision_scope ps(40);
    // y^2 + y = x^3 - x^2  <->  Y^2 = 4x^3 - 4x^2 + 1 with Y = 2y + 1.
    // For one real root e1 of x^3 - x^2 + 1/4 and the complex pair e2, conj e2:
    // Omega = pi / AGM(sqrt beta, sqrt((beta + e1 - Re e2) / 2)), beta = |e1 - e2|.
    auto B = branch_points(curve_new(qpoly({1, 0, -4, 4}), QPoly()), 40);
    BigComplex e1, e2;
    for (auto& r : B.roots)
        (mp::abs(r.im) < BigFloat("1e-30") ? e1 : e2) = r;
    BigFloat beta = abs(e1 - e2);
    BigFloat want = big_pi() / agm(mp::sqrt(beta), mp::sqrt((beta + e1.re - e2.re) / 2));
    BigFloat got = raw_real_period(curve_new(qpoly({0, 0, -1, 1}), qpoly({1})), 30);
    EXPECT_LT(dist(got, want), 1e-20);
    // PARI: E.omega[1] for [0,-1,1,0,0]
    EXPECT_LT(dist(got, BigFloat("6.346046521397767108443973083772736526097")), 1e-20);
}

TEST(PeriodMatrix, RiemannRelations)
{
    for (auto C : {genus4(), genus5(), curve_new(qpoly({1, 2, 0, 3, 0, 1}), qpoly({0, 1, 1}))}) {
        auto M = big_period_matrix(C, 30);
        EXPECT_LT(M.riemann1.convert_to<double>(), 1e-22);
        EXPECT_TRUE(M.riemann2);
        EXPECT_EQ(M.omega.size(), 2u * C.genus);
    }
}

TEST(PeriodMatrix, SymplecticChangeKeepsRealPeriod)
{
    precision_scope ps(40);
    auto C = curve_new(qpoly({1, 2, 0, 3, 0, 1}), qpoly({0, 1, 1}));
    auto M = big_period_matrix(C, 30);
    BigFloat base = raw_real_period(M);
    std::mt19937 rng(5);
    const auto J = standard_j(2);
    for (int t = 0; t < 10; ++t) {
        IMatrix S = sym_unit(2, rng);
        ASSERT_EQ(imat_mul(imat_mul(S, J), imat_transpose(S)), J);
        BigPeriodMatrix N = M;
        N.omega = detail::apply_transform(S, M.omega);
        EXPECT_LT(riemann_relations(N.omega, 2).first.convert_to<double>(), 1e-22);
        EXPECT_LT(dist(raw_real_period(N), base), 1e-20) << t;
    }
}

TEST(Covolume, GenusOneRows)
{
    precision_scope ps(30);
    CMatrix rows{{BigComplex(BigFloat("2.5"))}, {BigComplex(BigFloat("1.25"), BigFloat(3))}};
    auto cv = covolumes(rows, 1);
    ASSERT_EQ(cv.size(), 2u);
    EXPECT_LT(dist(cv[0].value, BigFloat(5)), 1e-25);
    EXPECT_LT(dist(cv[1].value, BigFloat("2.5")), 1e-25);
}

TEST(Covolume, SubsetCount)
{
    auto M = big_period_matrix(curve_new(qpoly({1, 0, 0, 0, 0, 1}), QPoly()), 20);
    EXPECT_EQ(covolumes(M).size(), 6u);
}

TEST(RealGcd, Examples)
{
    precision_scope ps(40);
    BigFloat tol("1e-20"), pi = big_pi();
    EXPECT_LT(dist(real_gcd({BigFloat(6), BigFloat(4)}, tol), BigFloat(2)), 1e-25);
    EXPECT_LT(dist(real_gcd({pi, 2 * pi, 3 * pi}, tol), pi), 1e-25);
    EXPECT_LT(dist(real_gcd({BigFloat(0), BigFloat(7)}, tol), BigFloat(7)), 1e-25);
    BigFloat phi = (1 + mp::sqrt(BigFloat(5))) / 2;
    EXPECT_THROW(real_gcd({BigFloat(1), phi}, tol), periods_error);
}

TEST(Golden, Genus4And5RawPeriods)
{
    EXPECT_NEAR(raw_real_period(genus4(), 30).convert_to<double>(), 178.0046, 1e-4);
    EXPECT_NEAR(raw_real_period(genus5(), 30).convert_to<double>(), 579.2589, 1e-4);
}
