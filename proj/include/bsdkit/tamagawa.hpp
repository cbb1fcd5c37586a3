#pragma once

#include "bsdkit/exactarith.hpp"

#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

namespace bsdkit {

struct tamagawa_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using ZMatrix = std::vector<std::vector<Integer>>;

struct IntersectionData {
    std::uint64_t p = 0;
    std::vector<std::string> names;
    ZMatrix M;                 // <G_j, G_i>
    std::vector<Integer> d, e;
    std::vector<int> sigma;    // Frobenius: G_i -> G_sigma[i]
    int size() const { return (int)M.size(); }
};

struct ComponentGroup {
    std::vector<Integer> invariants;   // nontrivial, each divides the next
    ZMatrix generators;                // in Z^I, one per invariant factor
    ZMatrix frobenius;                 // on the quotient, reduced mod invariants
    Integer order() const
    {
        Integer o = 1;
        for (auto& x : invariants)
            o *= x;
        return o;
    }
};

inline ZMatrix zidentity(int n)
{
    ZMatrix I(n, std::vector<Integer>(n, Integer(0)));
    for (int i = 0; i < n; ++i)
        I[i][i] = 1;
    return I;
}

inline ZMatrix zmul(const ZMatrix& A, const ZMatrix& B)
{
    if (A.empty() || B.empty())
        return ZMatrix(A.size(), std::vector<Integer>(B.empty() ? 0 : B[0].size(), Integer(0)));
    ZMatrix C(A.size(), std::vector<Integer>(B[0].size(), Integer(0)));
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t k = 0; k < B.size(); ++k)
            if (A[i][k] != 0)
                for (std::size_t j = 0; j < B[0].size(); ++j)
                    C[i][j] += A[i][k] * B[k][j];
    return C;
}

struct SmithForm {
    ZMatrix D, P, Q;   // P A Q = D, P and Q unimodular
    std::vector<Integer> diagonal() const
    {
        std::vector<Integer> v;
        for (std::size_t i = 0; i < std::min(D.size(), D.empty() ? 0 : D[0].size()); ++i)
            v.push_back(D[i][i]);
        return v;
    }
};

// Smith normal form by alternating row and column elimination.
inline SmithForm smith_normal_form(const ZMatrix& A)
{
    const int m = (int)A.size(), n = m ? (int)A[0].size() : 0;
    SmithForm S{A, zidentity(m), zidentity(n)};
    ZMatrix& D = S.D;
    auto row_op = [&](int i, int j, const Integer& q) {   // row i -= q row j
        for (int k = 0; k < n; ++k)
            D[i][k] -= q * D[j][k];
        for (int k = 0; k < m; ++k)
            S.P[i][k] -= q * S.P[j][k];
    };
    auto col_op = [&](int i, int j, const Integer& q) {   // col i -= q col j
        for (int k = 0; k < m; ++k)
            D[k][i] -= q * D[k][j];
        for (int k = 0; k < n; ++k)
            S.Q[k][i] -= q * S.Q[k][j];
    };
    auto swap_rows = [&](int i, int j) {
        std::swap(D[i], D[j]);
        std::swap(S.P[i], S.P[j]);
    };
    auto swap_cols = [&](int i, int j) {
        for (int k = 0; k < m; ++k)
            std::swap(D[k][i], D[k][j]);
        for (int k = 0; k < n; ++k)
            std::swap(S.Q[k][i], S.Q[k][j]);
    };
    for (int t = 0; t < std::min(m, n); ++t) {
        // smallest nonzero entry in the remaining block as pivot
        for (;;) {
            int pi = -1, pj = -1;
            for (int i = t; i < m; ++i)
                for (int j = t; j < n; ++j)
                    if (D[i][j] != 0 && (pi < 0 || mp::abs(D[i][j]) < mp::abs(D[pi][pj]))) {
                        pi = i;
                        pj = j;
                    }
            if (pi < 0)
                return S;
            swap_rows(t, pi);
            swap_cols(t, pj);
            bool clean = true;
            for (int i = t + 1; i < m; ++i)
                if (D[i][t] != 0) {
                    row_op(i, t, D[i][t] / D[t][t]);
                    if (D[i][t] != 0)
                        clean = false;
                }
            for (int j = t + 1; j < n; ++j)
                if (D[t][j] != 0) {
                    col_op(j, t, D[t][j] / D[t][t]);
                    if (D[t][j] != 0)
                        clean = false;
                }
            if (!clean)
                continue;
            // divisibility: pivot must divide the rest of the block
            int bi = -1;
            for (int i = t + 1; i < m && bi < 0; ++i)
                for (int j = t + 1; j < n; ++j)
                    if (D[i][j] % D[t][t] != 0) {
                        bi = i;
                        break;
                    }
            if (bi < 0)
                break;
            row_op(t, bi, Integer(-1));
        }
        if (D[t][t] < 0) {
            for (int k = 0; k < n; ++k)
                D[t][k] = -D[t][k];
            for (int k = 0; k < m; ++k)
                S.P[t][k] = -S.P[t][k];
        }
    }
    return S;
}

// Inverse of a unimodular integer matrix (exact, via rationals).
inline ZMatrix zinverse(const ZMatrix& A)
{
    const int n = (int)A.size();
    std::vector<std::vector<Rational>> M(n, std::vector<Rational>(2 * n, Rational(0)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            M[i][j] = A[i][j];
        M[i][n + i] = 1;
    }
    for (int c = 0; c < n; ++c) {
        int p = c;
        while (p < n && M[p][c] == 0)
            ++p;
        if (p == n)
            throw tamagawa_error("singular matrix");
        std::swap(M[p], M[c]);
        Rational inv = 1 / M[c][c];
        for (auto& x : M[c])
            x *= inv;
        for (int i = 0; i < n; ++i)
            if (i != c && M[i][c] != 0) {
                Rational f = M[i][c];
                for (int j = 0; j < 2 * n; ++j)
                    M[i][j] -= f * M[c][j];
            }
    }
    ZMatrix R(n, std::vector<Integer>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (mp::denominator(M[i][n + j]) != 1)
                throw tamagawa_error("matrix is not unimodular");
            R[i][j] = mp::numerator(M[i][n + j]);
        }
    return R;
}

inline void validate_intersection_data(const IntersectionData& X)
{
    const int n = X.size();
    if (n == 0)
        throw tamagawa_error("no components");
    for (auto& row : X.M)
        if ((int)row.size() != n)
            throw tamagawa_error("intersection matrix is not square");
    if ((int)X.d.size() != n || (int)X.e.size() != n || (int)X.sigma.size() != n)
        throw tamagawa_error("d, e and frobenius must have one entry per component");
    for (int i = 0; i < n; ++i) {
        if (X.d[i] < 1 || X.e[i] < 1)
            throw tamagawa_error("multiplicities must be positive");
        for (int j = 0; j < n; ++j) {
            if (X.M[i][j] != X.M[j][i])
                throw tamagawa_error("intersection matrix is not symmetric");
            if (X.M[j][i] % X.e[i] != 0)
                throw tamagawa_error("e_i does not divide <G_j, G_i>");
        }
    }
    for (int i = 0; i < n; ++i) {
        Integer s = 0;
        for (int j = 0; j < n; ++j)
            s += X.d[j] * X.e[j] * X.M[j][i];
        if (s != 0)
            throw tamagawa_error("fibre does not have self-intersection zero (column " + std::to_string(i) + ")");
    }
    std::vector<int> seen(n, 0);
    for (int i = 0; i < n; ++i) {
        int s = X.sigma[i];
        if (s < 0 || s >= n || seen[s]++)
            throw tamagawa_error("frobenius is not a permutation");
    }
    for (int i = 0; i < n; ++i) {
        int si = X.sigma[i];
        if (X.d[si] != X.d[i] || X.e[si] != X.e[i])
            throw tamagawa_error("frobenius does not preserve multiplicities");
        for (int j = 0; j < n; ++j)
            if (X.M[si][X.sigma[j]] != X.M[i][j])
                throw tamagawa_error("frobenius does not preserve the intersection pairing");
    }
}

namespace detail {

// Unimodular U with b U = (g, 0, ..., 0) for a row vector b.
inline ZMatrix row_kernel_transform(const std::vector<Integer>& b)
{
    const int n = (int)b.size();
    ZMatrix U = zidentity(n);
    std::vector<Integer> v(b);
    for (;;) {
        int piv = -1;
        for (int i = 0; i < n; ++i)
            if (v[i] != 0 && (piv < 0 || mp::abs(v[i]) < mp::abs(v[piv])))
                piv = i;
        if (piv < 0)
            break;
        bool done = true;
        for (int i = 0; i < n; ++i) {
            if (i == piv || v[i] == 0)
                continue;
            Integer q = v[i] / v[piv];
            v[i] -= q * v[piv];
            for (int k = 0; k < n; ++k)
                U[k][i] -= q * U[k][piv];
            if (v[i] != 0)
                done = false;
        }
        if (done) {
            if (piv != 0) {
                std::swap(v[0], v[piv]);
                for (int k = 0; k < n; ++k)
                    std::swap(U[k][0], U[k][piv]);
            }
            break;
        }
    }
    return U;
}

}  // namespace detail

// Phi = ker(beta) / im(alpha) with alpha(G_j) = sum_i e_i^-1 <G_j, G_i> G_i
// and beta(G_j) = d_j e_j.
inline ComponentGroup component_group(const IntersectionData& X)
{
    validate_intersection_data(X);
    const int n = X.size();
    ComponentGroup G;
    if (n == 1)
        return G;
    std::vector<Integer> b(n);
    for (int j = 0; j < n; ++j)
        b[j] = X.d[j] * X.e[j];
    ZMatrix U = detail::row_kernel_transform(b);
    ZMatrix Ui = zinverse(U);
    // columns alpha(G_j), then coordinates in the U basis
    ZMatrix A(n, std::vector<Integer>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A[i][j] = X.M[j][i] / X.e[i];
    ZMatrix C = zmul(Ui, A);
    for (int j = 0; j < n; ++j)
        if (C[0][j] != 0)
            throw tamagawa_error("image of alpha is not contained in ker beta");
    ZMatrix R(C.begin() + 1, C.end());   // (n-1) x n relations in ker-beta coordinates
    SmithForm S = smith_normal_form(R);
    auto diag = S.diagonal();
    for (auto& x : diag)
        if (x == 0)
            throw tamagawa_error("component group is infinite (degenerate intersection data)");
    ZMatrix Pi = zinverse(S.P);
    // Frobenius on ker beta coordinates: Ui Perm U, rows 1..n-1
    ZMatrix Perm(n, std::vector<Integer>(n, Integer(0)));
    for (int i = 0; i < n; ++i)
        Perm[X.sigma[i]][i] = 1;
    ZMatrix FK = zmul(zmul(Ui, Perm), U);
    for (int i = 1; i < n; ++i)
        if (FK[0][i] != 0)
            throw tamagawa_error("frobenius does not preserve ker beta");
    ZMatrix Fk(n - 1, std::vector<Integer>(n - 1));
    for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j < n - 1; ++j)
            Fk[i][j] = FK[i + 1][j + 1];
    // quotient coordinates y = P c
    ZMatrix Fq = zmul(zmul(S.P, Fk), Pi);
    // well defined: F maps relations to relations
    ZMatrix FR = zmul(zmul(S.P, Fk), R);
    for (std::size_t i = 0; i < diag.size(); ++i)
        for (int j = 0; j < n; ++j)
            if (FR[i][j] % diag[i] != 0)
                throw tamagawa_error("frobenius is not well defined on the component group");
    std::vector<int> keep;
    for (std::size_t i = 0; i < diag.size(); ++i)
        if (diag[i] != 1)
            keep.push_back((int)i);
    for (int i : keep) {
        G.invariants.push_back(diag[i]);
        std::vector<Integer> gen(n, Integer(0));
        for (int k = 0; k < n - 1; ++k)
            for (int r = 0; r < n; ++r)
                gen[r] += U[r][k + 1] * Pi[k][i];
        G.generators.push_back(gen);
    }
    for (int i : keep) {
        std::vector<Integer> row;
        for (int j : keep) {
            Integer v = Fq[i][j] % diag[i];
            if (v < 0)
                v += diag[i];
            row.push_back(v);
        }
        G.frobenius.push_back(row);
    }
    return G;
}

// Fixed points of Frobenius: |A / im(F - 1)| from the Smith form of [F - 1 | D].
inline Integer tamagawa_number(const ComponentGroup& G)
{
    const int k = (int)G.invariants.size();
    if (k == 0)
        return 1;
    ZMatrix B(k, std::vector<Integer>(2 * k, Integer(0)));
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j)
            B[i][j] = G.frobenius[i][j] - (i == j ? 1 : 0);
        B[i][k + i] = G.invariants[i];
    }
    Integer c = 1;
    for (auto& x : smith_normal_form(B).diagonal()) {
        if (x == 0)
            throw tamagawa_error("fixed-point count is not finite");
        c *= x;
    }
    return c;
}

inline Integer tamagawa_number(const IntersectionData& X) { return tamagawa_number(component_group(X)); }

// Oracle: enumerate the group, count Frobenius-fixed elements.
inline Integer tamagawa_brute_force(const ComponentGroup& G, std::uint64_t limit = 1000)
{
    const int k = (int)G.invariants.size();
    if (G.order() > limit)
        throw tamagawa_error("group too large for enumeration");
    std::vector<Integer> x(k, Integer(0));
    Integer fixed = 0;
    for (;;) {
        bool ok = true;
        for (int i = 0; i < k && ok; ++i) {
            Integer v = 0;
            for (int j = 0; j < k; ++j)
                v += G.frobenius[i][j] * x[j];
            v %= G.invariants[i];
            if (v < 0)
                v += G.invariants[i];
            ok = (v == x[i]);
        }
        if (ok)
            ++fixed;
        int i = 0;
        while (i < k && ++x[i] == G.invariants[i])
            x[i++] = 0;
        if (i == k)
            break;
    }
    return fixed;
}

inline IntersectionData parse_intersection(const nlohmann::json& j)
{
    IntersectionData X;
    X.p = j.value("p", (std::uint64_t)0);
    for (auto& row : j.at("matrix")) {
        std::vector<Integer> r;
        for (auto& v : row)
            r.emplace_back(v.get<long long>());
        X.M.push_back(r);
    }
    const int n = (int)X.M.size();
    for (auto& v : j.at("d"))
        X.d.emplace_back(v.get<long long>());
    for (auto& v : j.at("e"))
        X.e.emplace_back(v.get<long long>());
    if (j.contains("frobenius"))
        X.sigma = j["frobenius"].get<std::vector<int>>();
    else {
        X.sigma.resize(n);
        std::iota(X.sigma.begin(), X.sigma.end(), 0);
    }
    if (j.contains("components"))
        X.names = j["components"].get<std::vector<std::string>>();
    else
        for (int i = 0; i < n; ++i)
            X.names.push_back("G" + std::to_string(i));
    validate_intersection_data(X);
    return X;
}

inline IntersectionData load_intersection(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw tamagawa_error("cannot open intersection file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw tamagawa_error(path + ": " + e.what());
    }
    // standalone file, or embedded in a model file
    if (j.value("schema", "") == "bsdkit.model/1") {
        if (!j.contains("intersection"))
            throw tamagawa_error(path + ": model file has no intersection data");
        auto x = j["intersection"];
        x["p"] = j["p"];
        return parse_intersection(x);
    }
    if (j.value("schema", "") != "bsdkit.intersection/1")
        throw tamagawa_error(path + ": expected schema bsdkit.intersection/1");
    return parse_intersection(j);
}

}  // namespace bsdkit
