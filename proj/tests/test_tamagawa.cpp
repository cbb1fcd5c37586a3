#include "bsdkit/tamagawa.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace bsdkit;

namespace {

// n-gon of -2 curves (n >= 3), two curves meeting twice (n = 2)
IntersectionData cycle(int n, std::vector<int> sigma = {})
{
    IntersectionData X;
    X.p = 3;
    X.M.assign(n, std::vector<Integer>(n, Integer(0)));
    for (int i = 0; i < n; ++i) {
        X.M[i][i] = -2;
        X.M[i][(i + 1) % n] += 1;
        X.M[(i + 1) % n][i] += 1;
    }
    X.d.assign(n, Integer(1));
    X.e.assign(n, Integer(1));
    if (sigma.empty()) {
        sigma.resize(n);
        std::iota(sigma.begin(), sigma.end(), 0);
    }
    X.sigma = sigma;
    for (int i = 0; i < n; ++i)
        X.names.push_back("G" + std::to_string(i));
    return X;
}

std::vector<int> reflection(int n)
{
    std::vector<int> s(n);
    for (int i = 0; i < n; ++i)
        s[i] = (n - i) % n;
    return s;
}

std::vector<int> rotation(int n)
{
    std::vector<int> s(n);
    for (int i = 0; i < n; ++i)
        s[i] = (i + 1) % n;
    return s;
}

}  // namespace

TEST(Smith, DiagonalDividesAndUnimodular)
{
    ZMatrix A{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}};
    auto S = smith_normal_form(A);
    EXPECT_EQ(zmul(zmul(S.P, A), S.Q), S.D);
    auto d = S.diagonal();
    // 2, 6, 12 for this matrix (classical example)
    EXPECT_EQ(d, (std::vector<Integer>{2, 6, 12}));
}

TEST(ComponentGroupCycle, SplitIsCyclicOfOrderN)
{
    for (int n = 2; n <= 12; ++n) {
        auto G = component_group(cycle(n));
        ASSERT_EQ(G.invariants.size(), 1u) << n;
        EXPECT_EQ(G.invariants[0], n);
        EXPECT_EQ(tamagawa_number(G), n);
        EXPECT_EQ(tamagawa_brute_force(G), n);
    }
}

TEST(ComponentGroupCycle, ReflectionFixesTwoTorsion)
{
    // Frobenius acts by -1 on Z/n: fixed points are the 2-torsion, gcd(2, n)
    for (int n = 2; n <= 12; ++n) {
        auto G = component_group(cycle(n, reflection(n)));
        EXPECT_EQ(tamagawa_number(G), std::gcd(2, n)) << n;
        EXPECT_EQ(tamagawa_brute_force(G), std::gcd(2, n)) << n;
    }
}

TEST(ComponentGroupCycle, RotationActsTrivially)
{
    for (int n = 3; n <= 12; ++n)
        EXPECT_EQ(tamagawa_number(cycle(n, rotation(n))), n) << n;
}

TEST(ComponentGroupOther, TypeIV)
{
    IntersectionData X;
    X.p = 5;
    X.M = {{-2, 1, 1}, {1, -2, 1}, {1, 1, -2}};
    X.d = X.e = {1, 1, 1};
    X.sigma = {0, 1, 2};
    X.names = {"A", "B", "C"};
    EXPECT_EQ(tamagawa_number(X), 3);
    X.sigma = {0, 2, 1};
    EXPECT_EQ(tamagawa_number(X), 1);
}

TEST(ComponentGroupOther, TypeI0StarWithMultiplicity)
{
    IntersectionData X;
    X.p = 3;
    X.M = {{-2, 1, 1, 1, 1}, {1, -2, 0, 0, 0}, {1, 0, -2, 0, 0}, {1, 0, 0, -2, 0}, {1, 0, 0, 0, -2}};
    X.d = {2, 1, 1, 1, 1};
    X.e = {1, 1, 1, 1, 1};
    X.sigma = {0, 1, 2, 3, 4};
    X.names = {"C", "L1", "L2", "L3", "L4"};
    auto G = component_group(X);
    EXPECT_EQ(G.invariants, (std::vector<Integer>{2, 2}));
    EXPECT_EQ(tamagawa_number(G), 4);
    // swapping two non-identity leaves fixes 2 of the 4 classes
    X.sigma = {0, 1, 2, 4, 3};
    EXPECT_EQ(tamagawa_number(X), 2);
    EXPECT_EQ(tamagawa_brute_force(component_group(X)), 2);
}

TEST(ComponentGroupOther, SingleComponentIsTrivial)
{
    IntersectionData X;
    X.M = {{0}};
    X.d = X.e = {1};
    X.sigma = {0};
    X.names = {"C"};
    EXPECT_EQ(component_group(X).order(), 1);
    EXPECT_EQ(tamagawa_number(X), 1);
}

TEST(Validation, Errors)
{
    auto X = cycle(4);
    X.M[0][1] = 2;
    EXPECT_THROW(validate_intersection_data(X), tamagawa_error);  // asymmetric
    X = cycle(4);
    X.M[0][0] = -3;
    EXPECT_THROW(validate_intersection_data(X), tamagawa_error);  // fibre . G_0 != 0
    X = cycle(4, {0, 0, 2, 3});
    EXPECT_THROW(validate_intersection_data(X), tamagawa_error);
    X = cycle(5, {0, 2, 1, 3, 4});
    EXPECT_THROW(validate_intersection_data(X), tamagawa_error);  // breaks the pairing
    X = cycle(3);
    X.d.pop_back();
    EXPECT_THROW(validate_intersection_data(X), tamagawa_error);
    X = cycle(3);
    X.d[0] = 0;
    EXPECT_THROW(validate_intersection_data(X), tamagawa_error);
}

TEST(ParseJson, DefaultsAndErrors)
{
    auto j = nlohmann::json::parse(R"({"schema": "bsdkit.intersection/1", "p": 7,
        "matrix": [[-2, 2], [2, -2]], "d": [1, 1], "e": [1, 1]})");
    auto X = parse_intersection(j);
    EXPECT_EQ(X.sigma, (std::vector<int>{0, 1}));
    EXPECT_EQ(tamagawa_number(X), 2);
    j["frobenius"] = {1, 0};
    EXPECT_EQ(tamagawa_number(parse_intersection(j)), 2);  // -1 = 1 on Z/2
    j["matrix"] = {{-2, 1}, {2, -2}};
    EXPECT_THROW(parse_intersection(j), tamagawa_error);
}

TEST(Golden, Genus4AtTwo)
{
    auto X = load_intersection(std::string(BSDKIT_DATA) + "/genus4/models/p2.intersection.json");
    EXPECT_EQ(X.p, 2u);
    EXPECT_EQ(tamagawa_number(X), 2);
}

TEST(Golden, Genus5Trivial)
{
    for (auto p : {"p2", "p13"}) {
        auto X = load_intersection(std::string(BSDKIT_DATA) + "/genus5/models/" + p + ".intersection.json");
        EXPECT_EQ(tamagawa_number(X), 1) << p;
    }
}
