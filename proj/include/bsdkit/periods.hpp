#pragma once

#include "bsdkit/curve.hpp"

#include <array>
#include <cmath>
#include <ostream>

namespace bsdkit {

struct periods_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using CMatrix = std::vector<std::vector<BigComplex>>;
using IMatrix = std::vector<std::vector<long>>;

// Roots of F = f + h^2/4, sorted by (re, im).
struct BranchSet {
    std::vector<BigComplex> roots;
    BigComplex lead;          // leading coefficient of F
    BigFloat separation;      // min pairwise distance
    BigFloat error_bound;     // max inclusion radius
    bool infinity = false;    // odd degree: infinity is a branch point
    unsigned digits = 0;
};

// Loop around the straight segment roots[from] -> roots[to] on the sheet
// obtained by continuing sqrt(F / ((x-a)(x-b))) from x = a, times sign.
struct Cycle {
    int from = 0, to = 0;
    int sign = 1;
};

struct HomologyBasis {
    std::vector<Cycle> cycles;   // raw chain, 2g loops
    IMatrix raw_intersection;    // K
    IMatrix transform;           // S, with S K S^T = J
};

struct BigPeriodMatrix {
    int g = 0;
    CMatrix omega;               // 2g x g in the symplectic basis
    CMatrix raw;                 // 2g x g over the raw chain
    HomologyBasis basis;
    unsigned digits = 0;
    BigFloat quad_error;         // max node-doubling change
    BigFloat riemann1;           // max |Omega^T J Omega| / max|Omega|^2
    bool riemann2 = false;       // i Omega^T J conj(Omega) positive definite
};

namespace detail {

inline BigComplex horner(const std::vector<BigComplex>& c, const BigComplex& z)
{
    BigComplex v;
    for (std::size_t i = c.size(); i-- > 0;)
        v = v * z + c[i];
    return v;
}

inline std::vector<BigComplex> complex_coeffs(const QPoly& F)
{
    std::vector<BigComplex> c;
    for (auto& a : F.c)
        c.emplace_back(to_big(a));
    return c;
}

// Aberth-Ehrlich; returns false if it did not settle.
inline bool aberth(const std::vector<BigComplex>& c, std::vector<BigComplex>& z, int max_iter)
{
    const int n = (int)c.size() - 1;
    std::vector<BigComplex> dc;
    for (int i = 1; i <= n; ++i)
        dc.push_back(BigComplex(BigFloat(i)) * c[i]);
    // Cauchy radius for the starting circle
    BigFloat an = abs(c[n]), R = 0;
    for (int i = 0; i < n; ++i)
        R = std::max(R, abs(c[i]) / an);
    R = R + 1;
    z.assign(n, BigComplex());
    for (int k = 0; k < n; ++k)
        z[k] = polar(R / 2, (2 * big_pi() * k) / n + BigFloat("0.4"));
    BigFloat eps = pow10(-(long)working_digits() + 3);
    for (int it = 0; it < max_iter; ++it) {
        BigFloat worst = 0;
        for (int k = 0; k < n; ++k) {
            BigComplex p = horner(c, z[k]), dp = horner(dc, z[k]);
            if (is_zero(p))
                continue;
            BigComplex ratio = p / dp;
            BigComplex s;
            for (int j = 0; j < n; ++j)
                if (j != k)
                    s += BigComplex(1) / (z[k] - z[j]);
            BigComplex w = ratio / (BigComplex(1) - ratio * s);
            z[k] -= w;
            worst = std::max(worst, abs(w) / std::max(BigFloat(1), abs(z[k])));
        }
        if (worst < eps)
            return true;
    }
    return false;
}

}  // namespace detail

inline BranchSet branch_points(const HyperellipticCurve& C, unsigned digits = 0)
{
    if (C.disc == 0)
        throw periods_error("branch_points: singular curve");
    if (digits == 0)
        digits = working_digits();
    unsigned d = digits;
    for (int attempt = 0; attempt <= 3; ++attempt, d *= 2) {
        precision_scope ps(d + 10);
        auto c = detail::complex_coeffs(C.F);
        const int n = (int)c.size() - 1;
        std::vector<BigComplex> dc;
        for (int i = 1; i <= n; ++i)
            dc.push_back(BigComplex(BigFloat(i)) * c[i]);
        std::vector<BigComplex> z;
        if (!detail::aberth(c, z, 400 + 20 * (int)d))
            continue;
        // Newton polish, then inclusion radii n |F/F'|
        BigFloat bound = 0;
        for (auto& r : z) {
            for (int k = 0; k < 3; ++k) {
                BigComplex dp = detail::horner(dc, r);
                if (is_zero(dp))
                    break;
                r -= detail::horner(c, r) / dp;
            }
            BigComplex dp = detail::horner(dc, r);
            if (is_zero(dp))
                throw periods_error("branch_points: derivative vanishes at a root");
            bound = std::max(bound, BigFloat(n) * abs(detail::horner(c, r) / dp));
        }
        BigFloat sep = -1;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                BigFloat dd = abs(z[i] - z[j]);
                if (sep < 0 || dd < sep)
                    sep = dd;
            }
        if (!(sep > 10 * bound))
            continue;
        // ties in the real part: anything closer than the inclusion radius
        BigFloat tie = std::max(bound * 10, pow10(-(long)d / 2));
        std::sort(z.begin(), z.end(), [&](const BigComplex& a, const BigComplex& b) {
            if (mp::abs(a.re - b.re) > tie)
                return a.re < b.re;
            return a.im < b.im;
        });
        BranchSet B;
        for (auto& r : z)
            B.roots.push_back(BigComplex(at_prec(r.re, digits), at_prec(r.im, digits)));
        B.lead = BigComplex(at_prec(c[n].re, digits));
        B.separation = at_prec(sep, digits);
        B.error_bound = at_prec(bound, digits);
        B.infinity = (n % 2 == 1);
        B.digits = digits;
        return B;
    }
    throw periods_error("branch_points: roots not separated after 3 precision escalations");
}

namespace detail {

// sqrt(lead * prod_{e != a,b} (x - e)) along x = m + r u, continued from u = -1.
struct SegmentSheet {
    BigComplex m, r;
    std::vector<BigComplex> others;
    BigComplex lead;
    std::vector<BigFloat> grid_u;
    std::vector<BigComplex> grid_s;

    BigComplex square(const BigFloat& u) const
    {
        BigComplex x = m + r * u, v = lead;
        for (auto& e : others)
            v *= (x - e);
        return v;
    }
    static BigComplex closest(const BigComplex& s, const BigComplex& ref)
    {
        return norm2(s - ref) <= norm2(s + ref) ? s : -s;
    }

    SegmentSheet(const BranchSet& B, int ia, int ib)
    {
        const BigComplex& a = B.roots[ia];
        const BigComplex& b = B.roots[ib];
        m = BigComplex(BigFloat("0.5")) * (a + b);
        r = BigComplex(BigFloat("0.5")) * (b - a);
        lead = B.lead;
        BigFloat delta = -1;
        for (int k = 0; k < (int)B.roots.size(); ++k) {
            if (k == ia || k == ib)
                continue;
            others.push_back(B.roots[k]);
            // distance from root k to the segment
            BigComplex t = (B.roots[k] - m) / r;
            BigFloat u = std::clamp(t.re, BigFloat(-1), BigFloat(1));
            BigFloat dd = abs(B.roots[k] - (m + r * u));
            if (delta < 0 || dd < delta)
                delta = dd;
        }
        // step in u: quarter of the distance to the nearest other root
        BigFloat h = BigFloat(1) / 32;
        if (delta > 0)
            h = std::min(h, delta / (4 * abs(r)));
        long steps = (long)mp::ceil(BigFloat(2) / h).convert_to<double>();
        grid_u.reserve(steps + 1);
        grid_s.reserve(steps + 1);
        BigComplex prev = sqrt(square(BigFloat(-1)));
        for (long k = 0; k <= steps; ++k) {
            BigFloat u = BigFloat(-1) + BigFloat(2 * k) / steps;
            BigComplex s = closest(sqrt(square(u)), prev);
            grid_u.push_back(u);
            grid_s.push_back(s);
            prev = s;
        }
    }

    BigComplex at(const BigFloat& u) const
    {
        double t = ((u + 1) / 2).convert_to<double>() * (grid_u.size() - 1);
        long k = std::clamp((long)std::lround(t), 0L, (long)grid_u.size() - 1);
        return closest(sqrt(square(u)), grid_s[k]);
    }
    BigComplex start() const { return grid_s.front(); }
    BigComplex end() const { return grid_s.back(); }
};

// Loop integrals 2 * int_a^b x^j dx / (2 sqrt F), j = 0..g-1, with N
// Gauss-Chebyshev nodes: y = i r sqrt(1-u^2) S(u).
inline std::vector<BigComplex> chebyshev_loop(const SegmentSheet& S, int g, long N)
{
    std::vector<BigComplex> acc(g);
    BigFloat pi = big_pi();
    for (long k = 1; k <= N; ++k) {
        BigFloat u = mp::cos(BigFloat(2 * k - 1) * pi / (2 * N));
        BigComplex x = S.m + S.r * u;
        BigComplex w = BigComplex(1) / S.at(u);
        for (int j = 0; j < g; ++j) {
            acc[j] += w;
            w *= x;
        }
    }
    // 2 (loop) * 1/2 (dx / 2y) * (-i) * pi / N
    BigFloat scale = pi / N;
    for (auto& v : acc)
        v = BigComplex(v.im * scale, -v.re * scale);
    return acc;
}

}  // namespace detail

struct CycleIntegral {
    std::vector<BigComplex> values;  // j = 1..g
    BigFloat error;
    long nodes = 0;
};

// omega_j = x^(j-1) dx / (2y + h) = x^(j-1) dx / (2 sqrt F).
inline CycleIntegral integrate_cycle(const BranchSet& B, const Cycle& cyc, int g, long max_nodes = 1L << 15)
{
    int a = std::min(cyc.from, cyc.to), b = std::max(cyc.from, cyc.to);
    int sgn = cyc.sign * (cyc.from <= cyc.to ? 1 : -1);
    detail::SegmentSheet S(B, a, b);
    BigFloat tol = pow10(-(long)working_digits() + 10);
    long N = 32;
    auto prev = detail::chebyshev_loop(S, g, N);
    for (;;) {
        long N2 = N * 2;
        auto cur = detail::chebyshev_loop(S, g, N2);
        BigFloat diff = 0, scale = 0;
        for (int j = 0; j < g; ++j) {
            diff = std::max(diff, abs(cur[j] - prev[j]));
            scale = std::max(scale, abs(cur[j]));
        }
        N = N2;
        prev = cur;
        if (diff <= tol * std::max(scale, BigFloat(1))) {
            CycleIntegral out;
            for (auto& v : cur)
                out.values.push_back(sgn > 0 ? v : -v);
            out.error = diff;
            out.nodes = N;
            return out;
        }
        if (N >= max_nodes)
            throw periods_error("integrate_cycle: quadrature error " + big_str(diff, 5) + " above tolerance at " +
                                std::to_string(N) + " nodes");
    }
}

inline BigComplex integrate_differential(const BranchSet& B, const Cycle& cyc, int g, int j)
{
    if (j < 1 || j > g)
        throw periods_error("integrate_differential: j out of range");
    return integrate_cycle(B, cyc, g).values[j - 1];
}

inline IMatrix standard_j(int g)
{
    IMatrix J(2 * g, std::vector<long>(2 * g, 0));
    for (int i = 0; i < g; ++i) {
        J[i][g + i] = 1;
        J[g + i][i] = -1;
    }
    return J;
}

inline IMatrix imat_mul(const IMatrix& A, const IMatrix& B)
{
    IMatrix C(A.size(), std::vector<long>(B[0].size(), 0));
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t k = 0; k < B.size(); ++k)
            if (A[i][k])
                for (std::size_t j = 0; j < B[0].size(); ++j)
                    C[i][j] += A[i][k] * B[k][j];
    return C;
}

inline IMatrix imat_transpose(const IMatrix& A)
{
    IMatrix T(A[0].size(), std::vector<long>(A.size()));
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A[0].size(); ++j)
            T[j][i] = A[i][j];
    return T;
}

// Integer S with S K S^T = J for a unimodular skew K.
inline IMatrix symplectic_reduction(const IMatrix& K)
{
    const int n = (int)K.size();
    if (n % 2)
        throw periods_error("symplectic_reduction: odd dimension");
    const int g = n / 2;
    auto form = [&](const std::vector<long>& x, const std::vector<long>& y) {
        long s = 0;
        for (int i = 0; i < n; ++i)
            if (x[i])
                for (int j = 0; j < n; ++j)
                    s += x[i] * K[i][j] * y[j];
        return s;
    };
    std::vector<std::vector<long>> rest;
    for (int i = 0; i < n; ++i) {
        std::vector<long> e(n, 0);
        e[i] = 1;
        rest.push_back(e);
    }
    std::vector<std::vector<long>> A, Bv;
    while (!rest.empty()) {
        std::vector<long> a = rest.front();
        rest.erase(rest.begin());
        // Euclid on <a, v> until some partner pairs to +-1
        int partner = -1;
        for (int guard = 0; guard < 10000; ++guard) {
            int best = -1;
            long bv = 0;
            for (int k = 0; k < (int)rest.size(); ++k) {
                long v = form(a, rest[k]);
                if (v != 0 && (best < 0 || std::labs(v) < std::labs(bv))) {
                    best = k;
                    bv = v;
                }
            }
            if (best < 0)
                throw periods_error("intersection matrix is degenerate");
            if (std::labs(bv) == 1) {
                partner = best;
                break;
            }
            bool changed = false;
            for (int k = 0; k < (int)rest.size(); ++k) {
                if (k == best)
                    continue;
                long v = form(a, rest[k]);
                long q = v / bv;
                if (q) {
                    for (int i = 0; i < n; ++i)
                        rest[k][i] -= q * rest[best][i];
                    changed = true;
                }
            }
            if (!changed)
                throw periods_error("intersection matrix is not unimodular");
        }
        if (partner < 0)
            throw periods_error("symplectic_reduction did not terminate");
        std::vector<long> b = rest[partner];
        rest.erase(rest.begin() + partner);
        if (form(a, b) < 0)
            for (auto& x : b)
                x = -x;
        for (auto& v : rest) {
            long vb = form(v, b), va = form(v, a);
            for (int i = 0; i < n; ++i)
                v[i] = v[i] - vb * a[i] + va * b[i];
        }
        A.push_back(a);
        Bv.push_back(b);
    }
    IMatrix S;
    for (auto& a : A)
        S.push_back(a);
    for (auto& b : Bv)
        S.push_back(b);
    if (imat_mul(imat_mul(S, K), imat_transpose(S)) != standard_j(g))
        throw periods_error("symplectic_reduction: result is not J");
    return S;
}

namespace detail {

inline long int_det(IMatrix M)
{
    // fraction-free Bareiss
    const int n = (int)M.size();
    long sign = 1, prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (M[k][k] == 0) {
            int r = k + 1;
            while (r < n && M[r][k] == 0)
                ++r;
            if (r == n)
                return 0;
            std::swap(M[k], M[r]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / prev;
        prev = M[k][k];
    }
    return sign * M[n - 1][n - 1];
}

}  // namespace detail

// Chain of loops around consecutive sorted branch points; the sign of
// consecutive intersections comes from the sheets meeting at the shared
// branch point.
inline HomologyBasis homology_basis(const BranchSet& B, int g)
{
    if ((int)B.roots.size() < 2 * g + 1)
        throw periods_error("homology_basis: too few branch points");
    HomologyBasis H;
    std::vector<std::array<BigFloat, 2>> ends;
    for (int i = 0; i < 2 * g; ++i) {
        H.cycles.push_back({i, i + 1, 1});
        detail::SegmentSheet S(B, i, i + 1);
        BigComplex ir(-S.r.im, S.r.re);
        ends.push_back({arg(ir * S.start()), arg(ir * S.end())});
    }
    const int n = 2 * g;
    H.raw_intersection.assign(n, std::vector<long>(n, 0));
    for (int i = 0; i + 1 < n; ++i) {
        BigFloat s = mp::sin(ends[i + 1][0] - ends[i][1]);
        long k = s > 0 ? -1 : 1;
        H.raw_intersection[i][i + 1] = k;
        H.raw_intersection[i + 1][i] = -k;
    }
    if (detail::int_det(H.raw_intersection) != 1)
        throw periods_error("homology_basis: intersection matrix has determinant != 1");
    H.transform = symplectic_reduction(H.raw_intersection);
    return H;
}

namespace detail {

inline CMatrix apply_transform(const IMatrix& S, const CMatrix& M)
{
    CMatrix out(S.size(), std::vector<BigComplex>(M[0].size()));
    for (std::size_t i = 0; i < S.size(); ++i)
        for (std::size_t k = 0; k < S[i].size(); ++k)
            if (S[i][k])
                for (std::size_t j = 0; j < M[0].size(); ++j)
                    out[i][j] += BigComplex(BigFloat(S[i][k])) * M[k][j];
    return out;
}

// Hermitian positive definiteness by Cholesky.
inline bool positive_definite(CMatrix H)
{
    const int n = (int)H.size();
    for (int k = 0; k < n; ++k) {
        BigFloat d = H[k][k].re;
        for (int j = 0; j < k; ++j)
            d -= norm2(H[k][j]);
        if (!(d > 0))
            return false;
        BigFloat s = mp::sqrt(d);
        H[k][k] = BigComplex(s);
        for (int i = k + 1; i < n; ++i) {
            BigComplex v = H[i][k];
            for (int j = 0; j < k; ++j)
                v -= H[i][j] * conj(H[k][j]);
            H[i][k] = v * (BigFloat(1) / s);
        }
    }
    return true;
}

}  // namespace detail

struct RiemannCheck {
    BigFloat first;   // relative size of Omega^T J Omega
    bool second_pd = false;
    bool second_nd = false;
};

inline RiemannCheck riemann_relations(const CMatrix& Om, int g)
{
    RiemannCheck R;
    BigFloat scale = 0, worst = 0;
    for (auto& row : Om)
        for (auto& v : row)
            scale = std::max(scale, norm2(v));
    CMatrix H(g, std::vector<BigComplex>(g)), Hn(g, std::vector<BigComplex>(g));
    for (int j = 0; j < g; ++j)
        for (int k = 0; k < g; ++k) {
            BigComplex s, t;
            for (int i = 0; i < g; ++i) {
                s += Om[i][j] * Om[g + i][k] - Om[g + i][j] * Om[i][k];
                t += Om[i][j] * conj(Om[g + i][k]) - Om[g + i][j] * conj(Om[i][k]);
            }
            worst = std::max(worst, abs(s));
            H[j][k] = BigComplex(-t.im, t.re);   // i * t
            Hn[j][k] = -H[j][k];
        }
    R.first = scale > 0 ? worst / scale : worst;
    R.second_pd = detail::positive_definite(H);
    R.second_nd = detail::positive_definite(Hn);
    return R;
}

inline BigPeriodMatrix big_period_matrix(const HyperellipticCurve& C, unsigned digits = 0)
{
    if (digits == 0)
        digits = working_digits();
    precision_scope ps(digits + 10);
    const int g = C.genus;
    BranchSet B = branch_points(C, digits + 10);
    BigPeriodMatrix M;
    M.g = g;
    M.digits = digits;
    M.basis = homology_basis(B, g);
    M.quad_error = 0;
    for (auto& cyc : M.basis.cycles) {
        CycleIntegral ci = integrate_cycle(B, cyc, g);
        M.raw.push_back(ci.values);
        M.quad_error = std::max(M.quad_error, ci.error);
    }
    M.omega = detail::apply_transform(M.basis.transform, M.raw);
    RiemannCheck R = riemann_relations(M.omega, g);
    if (!R.second_pd && R.second_nd) {
        // chain oriented the other way round: flip the pairing
        for (auto& row : M.basis.raw_intersection)
            for (auto& x : row)
                x = -x;
        M.basis.transform = symplectic_reduction(M.basis.raw_intersection);
        M.omega = detail::apply_transform(M.basis.transform, M.raw);
        R = riemann_relations(M.omega, g);
    }
    M.riemann1 = R.first;
    M.riemann2 = R.second_pd;
    BigFloat tol = pow10(-(long)digits + 8);
    if (!(M.riemann1 < tol))
        throw periods_error("big_period_matrix: first Riemann relation off by " + big_str(M.riemann1, 5));
    if (!M.riemann2)
        throw periods_error("big_period_matrix: second Riemann relation fails");
    return M;
}

struct Covolume {
    std::vector<int> subset;
    BigFloat value;
};

inline BigFloat real_det(std::vector<std::vector<BigFloat>> A)
{
    const int n = (int)A.size();
    BigFloat det = 1;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (mp::abs(A[i][k]) > mp::abs(A[piv][k]))
                piv = i;
        if (A[piv][k] == 0)
            return 0;
        if (piv != k) {
            std::swap(A[piv], A[k]);
            det = -det;
        }
        det *= A[k][k];
        for (int i = k + 1; i < n; ++i) {
            BigFloat f = A[i][k] / A[k][k];
            for (int j = k; j < n; ++j)
                A[i][j] -= f * A[k][j];
        }
    }
    return det;
}

// P_I = |det(a_i + conj a_i)|, i in I, over all g-subsets of rows.
inline std::vector<Covolume> covolumes(const CMatrix& rows, int g)
{
    const int n = (int)rows.size();
    std::vector<Covolume> out;
    std::vector<int> I(g);
    for (int i = 0; i < g; ++i)
        I[i] = i;
    for (;;) {
        std::vector<std::vector<BigFloat>> A;
        for (int i : I) {
            std::vector<BigFloat> v;
            for (int j = 0; j < g; ++j)
                v.push_back(2 * rows[i][j].re);
            A.push_back(v);
        }
        out.push_back({I, mp::abs(real_det(A))});
        int k = g - 1;
        while (k >= 0 && I[k] == n - g + k)
            --k;
        if (k < 0)
            break;
        ++I[k];
        for (int j = k + 1; j < g; ++j)
            I[j] = I[j - 1] + 1;
    }
    return out;
}

inline std::vector<Covolume> covolumes(const BigPeriodMatrix& M) { return covolumes(M.omega, M.g); }

struct GcdResult {
    BigFloat value;
    BigFloat residue;     // largest residue discarded
    int iterations = 0;
};

// Euclid over the reals. A generator far below the inputs (ratio beyond
// tol^(-1/2)) means the values were not commensurable.
inline GcdResult real_gcd_detail(const std::vector<BigFloat>& values, const BigFloat& tol)
{
    GcdResult R;
    R.value = 0;
    R.residue = 0;
    BigFloat top = 0;
    for (auto& v : values) {
        if (v < 0)
            throw periods_error("real_gcd: negative input");
        top = std::max(top, v);
    }
    if (!(top > tol))
        throw periods_error("real_gcd: all inputs below tolerance");
    for (auto& v : values) {
        if (v <= tol) {
            R.residue = std::max(R.residue, v);
            continue;
        }
        if (R.value == 0) {
            R.value = v;
            continue;
        }
        BigFloat a = std::max(R.value, v), b = std::min(R.value, v);
        for (;;) {
            if (++R.iterations > 200)
                throw periods_error("real_gcd: no convergence within 200 iterations");
            BigFloat r = a - b * mp::floor(a / b);
            if (b - r <= tol)
                r = 0;
            if (r <= tol) {
                R.residue = std::max(R.residue, r);
                break;
            }
            a = b;
            b = r;
        }
        R.value = b;
    }
    if (R.value < top * mp::sqrt(tol))
        throw periods_error("real_gcd: no small generator (inputs incommensurable at this tolerance)");
    return R;
}

inline BigFloat real_gcd(const std::vector<BigFloat>& values, const BigFloat& tol)
{
    return real_gcd_detail(values, tol).value;
}

inline BigFloat default_gcd_tol(unsigned digits) { return pow10(-(long)digits / 2); }

inline BigFloat raw_real_period(const BigPeriodMatrix& M, std::ostream* log = nullptr)
{
    precision_scope ps(M.digits + 10);
    BigFloat tol = default_gcd_tol(M.digits);
    std::vector<BigFloat> vals;
    for (auto& c : covolumes(M)) {
        if (c.value <= tol) {
            if (log)
                *log << "zero covolume excluded for subset of size " << c.subset.size() << "\n";
            continue;
        }
        vals.push_back(c.value);
    }
    return at_prec(real_gcd(vals, tol), M.digits);
}

inline BigFloat raw_real_period(const HyperellipticCurve& C, unsigned digits = 0)
{
    if (digits == 0)
        digits = working_digits();
    return raw_real_period(big_period_matrix(C, digits));
}

}  // namespace bsdkit
