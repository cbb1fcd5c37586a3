#pragma once

#include "bsdkit/exactarith.hpp"

namespace bsdkit {

struct curve_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Parity { odd, even };

// y^2 + h(x) y = f(x) over Q.
struct HyperellipticCurve {
    QPoly f, h;
    int genus = 0;
    QPoly F;        // f + h^2/4, the completed square
    Rational disc;  // 2^(4g) disc(F)
    Parity parity = Parity::odd;

    // h^2 + 4f, integral when f and h are
    QPoly G() const { return Rational(4) * F; }
};

inline HyperellipticCurve curve_new(const QPoly& f, const QPoly& h)
{
    if (f.zero() && h.zero())
        throw curve_error("curve_new: f and h both zero");
    int d = std::max(f.degree(), h.zero() ? -1 : 2 * h.degree());
    if (d < 3)
        throw curve_error("curve_new: degree " + std::to_string(d) + " < 3");
    HyperellipticCurve C;
    C.f = f;
    C.h = h;
    C.genus = (d + 1) / 2 - 1;
    C.F = f + Rational(1, 4) * (h * h);
    int dF = C.F.degree();
    if (dF == 2 * C.genus + 1)
        C.parity = Parity::odd;
    else if (dF == 2 * C.genus + 2)
        C.parity = Parity::even;
    else
        throw curve_error("curve_new: completed square has degree " + std::to_string(dF) + ", expected 2g+1 or 2g+2");
    Rational dd = poly_discriminant(C.F);
    if (dd == 0)
        throw curve_error("curve_new: singular model (discriminant 0)");
    C.disc = Rational(Integer(mp::pow(Integer(2), 4 * C.genus))) * dd;
    return C;
}

inline HyperellipticCurve complete_square(const HyperellipticCurve& C) { return curve_new(C.F, QPoly()); }

// x -> x/u, y -> y/u^(g+1) with u the lcm of all denominators.
inline HyperellipticCurve integral_model(const HyperellipticCurve& C)
{
    Integer u = 1;
    for (auto& a : C.f.c)
        u = mp::lcm(u, mp::denominator(a));
    for (auto& a : C.h.c)
        u = mp::lcm(u, mp::denominator(a));
    if (u == 1)
        return C;
    int g = C.genus;
    std::vector<Rational> f2, h2;
    for (int i = 0; i <= C.f.degree(); ++i)
        f2.push_back(C.f.c[i] * Rational(mp::pow(u, 2 * g + 2 - i)));
    for (int i = 0; i <= C.h.degree(); ++i)
        h2.push_back(C.h.c[i] * Rational(mp::pow(u, g + 1 - i)));
    return curve_new(QPoly(f2), QPoly(h2));
}

inline bool is_integral(const HyperellipticCurve& C)
{
    for (auto& a : C.f.c)
        if (mp::denominator(a) != 1)
            return false;
    for (auto& a : C.h.c)
        if (mp::denominator(a) != 1)
            return false;
    return true;
}

inline Integer integer_discriminant(const HyperellipticCurve& C)
{
    HyperellipticCurve M = integral_model(C);
    if (mp::denominator(M.disc) != 1)
        throw curve_error("discriminant of the integral model is not integral");
    return mp::numerator(M.disc);
}

inline std::vector<Integer> bad_primes(const HyperellipticCurve& C, std::uint64_t trial_bound = 1000000)
{
    Factorization fz = factor_integer(integer_discriminant(C), trial_bound);
    if (fz.cofactor != 1)
        throw curve_error("bad_primes: unfactored cofactor " + fz.cofactor.str());
    std::vector<Integer> ps;
    for (auto& [p, e] : fz.factors)
        ps.push_back(p);
    std::sort(ps.begin(), ps.end());
    return ps;
}

inline bool is_good_prime(const HyperellipticCurve& C, std::uint64_t p)
{
    return integer_discriminant(C) % p != 0;
}

struct PointCount {
    std::uint64_t q = 0;
    std::uint64_t N = 0;
};

namespace detail {

// y^2 = G over F_p, p odd, deg G = 2g+2 slot (leading entry may vanish).
// Forward differences: deg additions per x.
inline std::uint64_t count_prime_field(const std::vector<std::uint32_t>& gc, std::uint64_t p)
{
    const int deg = (int)gc.size() - 1;
    std::vector<signed char> qr(p, -1);
    for (std::uint64_t y = 1; y < p; ++y)
        qr[(y * y) % p] = 1;
    qr[0] = 0;
    std::vector<std::uint64_t> diff(deg + 1);
    for (int k = 0; k <= deg; ++k) {
        std::uint64_t v = 0;
        for (int i = deg; i >= 0; --i)
            v = (v * ((std::uint64_t)k % p) + gc[i]) % p;
        diff[k] = v;
    }
    for (int k = 1; k <= deg; ++k)
        for (int j = deg; j >= k; --j)
            diff[j] = (diff[j] + p - diff[j - 1]) % p;
    std::int64_t s = 0;
    for (std::uint64_t x = 0; x < p; ++x) {
        s += 1 + qr[diff[0]];
        for (int j = 0; j < deg; ++j) {
            diff[j] += diff[j + 1];
            if (diff[j] >= p)
                diff[j] -= p;
        }
    }
    std::uint64_t lc = gc[deg];
    s += 1 + (lc == 0 ? 0 : qr[lc]);
    return (std::uint64_t)s;
}

// Number of points on the projective (weighted) model over F_q, singular
// or not. Needs an integral model at p.
inline std::uint64_t count_points_model(const HyperellipticCurve& C, const FqTables& T)
{
    const int g = C.genus;
    const std::uint64_t p = T.p(), q = T.q();
    std::uint64_t N = 0;
    if (p != 2) {
        QPoly G = C.G();
        int deg = 2 * g + 2;
        std::vector<std::uint32_t> gc(deg + 1, 0);
        for (int i = 0; i <= G.degree(); ++i)
            gc[i] = T.from_rational(G.c[i]);
        if (T.m() == 1)
            return count_prime_field(gc, p);
        std::int64_t s = 0;
        for (std::uint32_t x = 0; x < q; ++x) {
            std::uint32_t v = 0;
            for (int i = deg; i >= 0; --i)
                v = T.add(T.mul(v, x), gc[i]);
            s += 1 + T.chi(v);
        }
        return (std::uint64_t)s + 1 + T.chi(gc[deg]);
    }
    // characteristic 2: Artin-Schreier reduction y^2 + h y = f
    int df = 2 * g + 2, dh = g + 1;
    std::vector<std::uint32_t> fc(df + 1, 0), hc(dh + 1, 0);
    for (int i = 0; i <= C.f.degree(); ++i)
        fc[i] = T.from_rational(C.f.c[i]);
    for (int i = 0; i <= C.h.degree(); ++i)
        hc[i] = T.from_rational(C.h.c[i]);
    auto count_fibre = [&](std::uint32_t hv, std::uint32_t fv) -> std::uint64_t {
        if (hv == 0)
            return 1;  // y = sqrt(f)
        std::uint32_t ih = T.inv(hv);
        std::uint32_t z = T.mul(fv, T.mul(ih, ih));
        return T.trace(z) == 0 ? 2 : 0;
    };
    for (std::uint32_t x = 0; x < q; ++x) {
        std::uint32_t fv = 0, hv = 0;
        for (int i = df; i >= 0; --i)
            fv = T.add(T.mul(fv, x), fc[i]);
        for (int i = dh; i >= 0; --i)
            hv = T.add(T.mul(hv, x), hc[i]);
        N += count_fibre(hv, fv);
    }
    N += count_fibre(hc[dh], fc[df]);
    return N;
}

}  // namespace detail

inline PointCount point_count(const HyperellipticCurve& C, const FiniteField& F)
{
    for (const QPoly* P : {&C.f, &C.h})
        for (auto& a : P->c)
            if (mp::denominator(a) % F.p == 0)
                throw curve_error("point_count: model not integral at " + std::to_string(F.p));
    if (!is_good_prime(C, F.p))
        throw curve_error("point_count: bad prime " + std::to_string(F.p));
    FqTables T(F);
    PointCount pc{T.q(), detail::count_points_model(C, T)};
    // Weil: (N - q - 1)^2 <= 4 g^2 q
    Integer dev = Integer(pc.N) - Integer(pc.q) - 1;
    if (dev * dev > Integer(4) * C.genus * C.genus * pc.q)
        throw curve_error("point_count: Weil bound violated (counting bug)");
    return pc;
}

// Counts on the reduction at p, also at bad primes (singular fibre).
inline std::vector<std::uint64_t> fibre_counts(const HyperellipticCurve& C, std::uint64_t p, int max_m)
{
    std::vector<std::uint64_t> N;
    for (int m = 1; m <= max_m; ++m) {
        FqTables T(ext_field(p, m));
        N.push_back(detail::count_points_model(C, T));
    }
    return N;
}

// Newton's identities: power sums s_1..s_k of reciprocal roots -> first k
// coefficients of prod (1 - a_i T). Exact in Q, checked integral.
inline std::vector<Integer> newton_coefficients(const std::vector<Integer>& s)
{
    std::vector<Rational> c(s.size() + 1);
    c[0] = 1;
    for (std::size_t k = 1; k <= s.size(); ++k) {
        Rational acc = 0;
        for (std::size_t i = 1; i <= k; ++i)
            acc += c[k - i] * Rational(s[i - 1]);
        c[k] = -acc / Rational((long)k);
    }
    std::vector<Integer> out;
    for (auto& x : c) {
        if (mp::denominator(x) != 1)
            throw curve_error("Newton identities produced a non-integral coefficient");
        out.push_back(mp::numerator(x));
    }
    return out;
}

// L_p(T) at a good prime from N_1..N_g and self-reciprocity.
inline std::vector<Integer> frobenius_polynomial(const HyperellipticCurve& C, std::uint64_t p)
{
    if (!is_good_prime(C, p))
        throw curve_error("frobenius_polynomial: bad prime " + std::to_string(p));
    const int g = C.genus;
    std::vector<Integer> s;
    Integer q = 1;
    for (int m = 1; m <= g; ++m) {
        q *= p;
        PointCount pc = point_count(C, ext_field(p, m));
        s.push_back(q + 1 - Integer(pc.N));
    }
    std::vector<Integer> c = newton_coefficients(s);
    c.resize(2 * g + 1);
    for (int i = 0; i < g; ++i)
        c[2 * g - i] = mp::pow(Integer(p), g - i) * c[i];
    return c;
}

inline Integer eval_at_one(const std::vector<Integer>& c)
{
    Integer s = 0;
    for (auto& x : c)
        s += x;
    return s;
}

}  // namespace bsdkit
