#pragma once

#include "bsdkit/curve.hpp"

#include <cmath>
#include <map>
#include <random>
#include <set>

namespace bsdkit {

struct jacobian_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Odd-degree model over a field K: y^2 + h y = f, deg(h^2 + 4f) = 2g + 1.
template <class K>
struct JacobianModel {
    Poly<K> f, h;
    int g = 0;
    K one;
};

template <class K>
struct MumfordDivisor {
    Poly<K> u, v;
};

template <class K>
bool operator==(const MumfordDivisor<K>& a, const MumfordDivisor<K>& b) { return a.u == b.u && a.v == b.v; }
template <class K>
bool operator!=(const MumfordDivisor<K>& a, const MumfordDivisor<K>& b) { return !(a == b); }

template <class K>
MumfordDivisor<K> identity(const JacobianModel<K>& J)
{
    return {Poly<K>::constant(J.one), Poly<K>()};
}

template <class K>
bool is_identity(const MumfordDivisor<K>& D) { return D.u.degree() == 0; }

// u | v^2 + h v - f, u monic, deg v < deg u <= g
template <class K>
bool is_valid(const JacobianModel<K>& J, const MumfordDivisor<K>& D)
{
    if (D.u.zero() || !(D.u.lead() == J.one) || D.u.degree() > J.g)
        return false;
    if (!D.v.zero() && D.v.degree() >= D.u.degree())
        return false;
    return ((D.v * D.v + J.h * D.v - J.f) % D.u).zero();
}

inline JacobianModel<Rational> jacobian_model(const HyperellipticCurve& C)
{
    if (C.parity != Parity::odd)
        throw jacobian_error("Jacobian arithmetic needs an odd-degree model (rational Weierstrass point at infinity)");
    return {C.f, C.h, C.genus, Rational(1)};
}

inline JacobianModel<Fp> jacobian_model_mod(const HyperellipticCurve& C, std::uint64_t p)
{
    if (C.parity != Parity::odd)
        throw jacobian_error("Jacobian arithmetic needs an odd-degree model");
    return {reduce_mod(C.f, p), reduce_mod(C.h, p), C.genus, Fp(1, p)};
}

template <class K>
MumfordDivisor<K> cantor_neg(const JacobianModel<K>& J, const MumfordDivisor<K>& D)
{
    return {D.u, (-J.h - D.v) % D.u};
}

namespace detail {

template <class K>
MumfordDivisor<K> cantor_reduce(const JacobianModel<K>& J, Poly<K> u, Poly<K> v)
{
    v = v % u;
    while (u.degree() > J.g) {
        Poly<K> un = (J.f - v * J.h - v * v) / u;
        un = make_monic(un);
        v = (-J.h - v) % un;
        u = std::move(un);
    }
    return {make_monic(u), v};
}

}  // namespace detail

template <class K>
MumfordDivisor<K> cantor_add(const JacobianModel<K>& J, const MumfordDivisor<K>& a, const MumfordDivisor<K>& b)
{
    if (is_identity(a))
        return b;
    if (is_identity(b))
        return a;
    auto [d0, e1, e2] = poly_xgcd(a.u, b.u, J.one);
    Poly<K> w = a.v + b.v + J.h;
    auto [d, c1, c2] = poly_xgcd(d0, w, J.one);
    Poly<K> s1 = c1 * e1, s2 = c1 * e2;
    Poly<K> u = (a.u * b.u) / (d * d);
    Poly<K> num = s1 * a.u * b.v + s2 * b.u * a.v + c2 * (a.v * b.v + J.f);
    auto [v, rem] = divmod(num, d);
    if (!rem.zero())
        throw jacobian_error("cantor_add: composition not exact");
    return detail::cantor_reduce(J, u, v);
}

template <class K>
MumfordDivisor<K> cantor_mul(const JacobianModel<K>& J, Integer n, const MumfordDivisor<K>& D)
{
    MumfordDivisor<K> base = D;
    if (n < 0) {
        n = -n;
        base = cantor_neg(J, D);
    }
    MumfordDivisor<K> r = identity(J);
    while (n > 0) {
        if (n % 2 == 1)
            r = cantor_add(J, r, base);
        n /= 2;
        if (n > 0)
            base = cantor_add(J, base, base);
    }
    return r;
}

template <class K>
Integer divisor_order(const JacobianModel<K>& J, const MumfordDivisor<K>& D, const Integer& group_order)
{
    if (!is_identity(cantor_mul(J, group_order, D)))
        throw jacobian_error("divisor_order: " + group_order.str() + " does not annihilate the divisor");
    Factorization fz = factor_integer(group_order);
    if (fz.cofactor != 1)
        fz.factors.emplace_back(fz.cofactor, 1);
    Integer n = group_order;
    for (auto& [q, e] : fz.factors) {
        for (int i = 0; i < e; ++i) {
            if (!is_identity(cantor_mul(J, Integer(n / q), D)))
                break;
            n /= q;
        }
    }
    return n;
}

// Every reduced divisor over F_p (small p, g). The count is |J(F_p)|.
inline std::vector<MumfordDivisor<Fp>> enumerate_divisors(const JacobianModel<Fp>& J)
{
    const std::uint64_t p = J.one.p;
    std::vector<MumfordDivisor<Fp>> out;
    out.push_back(identity(J));
    for (int du = 1; du <= J.g; ++du) {
        std::uint64_t nu = 1;
        for (int i = 0; i < du; ++i)
            nu *= p;
        for (std::uint64_t ui = 0; ui < nu; ++ui) {
            std::vector<Fp> uc;
            std::uint64_t t = ui;
            for (int i = 0; i < du; ++i) {
                uc.push_back(Fp(t % p, p));
                t /= p;
            }
            uc.push_back(J.one);
            FpPoly u(uc);
            Poly<Fp> rhs = J.f % u, hu = J.h % u;
            for (std::uint64_t vi = 0; vi < nu; ++vi) {
                std::vector<Fp> vc;
                std::uint64_t s = vi;
                for (int i = 0; i < du; ++i) {
                    vc.push_back(Fp(s % p, p));
                    s /= p;
                }
                FpPoly v(vc);
                if (((v * v + hu * v - rhs) % u).zero())
                    out.push_back({u, v});
            }
        }
    }
    return out;
}

template <class K>
std::string divisor_key(const MumfordDivisor<K>& D, const std::function<std::string(const K&)>& fmt)
{
    return poly_str(D.u, fmt) + "|" + poly_str(D.v, fmt);
}

inline std::string divisor_key(const MumfordDivisor<Rational>& D)
{
    return divisor_key<Rational>(D, [](const Rational& a) { return rational_str(a); });
}

inline MumfordDivisor<Fp> reduce_divisor(const MumfordDivisor<Rational>& D, std::uint64_t p)
{
    for (auto* P : {&D.u, &D.v})
        for (auto& a : P->c)
            if (mp::denominator(a) % p == 0)
                throw jacobian_error("reduce_divisor: coefficient not p-integral");
    return {reduce_mod(D.u, p), reduce_mod(D.v, p)};
}

// ---------------------------------------------------------------------------
// Moving a rational Weierstrass point to infinity

struct OddModel {
    HyperellipticCurve curve;
    Rational root;  // x = root + 1/X
    bool moved = false;
};

// Rational roots of an integer-coefficient polynomial via the rational root test.
inline std::vector<Rational> rational_roots(const QPoly& f)
{
    auto [Z, D] = clear_denominators(f);
    std::vector<Rational> out;
    if (Z.zero())
        return out;
    int lo = 0;
    while (Z.c[lo] == 0)
        ++lo;
    if (lo > 0)
        out.push_back(Rational(0));
    auto divisors = [](Integer n) {
        n = mp::abs(n);
        std::vector<Integer> ds;
        Factorization fz = factor_integer(n);
        if (fz.cofactor != 1)
            fz.factors.emplace_back(fz.cofactor, 1);
        ds.push_back(1);
        for (auto& [q, e] : fz.factors) {
            std::size_t m = ds.size();
            Integer pk = 1;
            for (int k = 1; k <= e; ++k) {
                pk *= q;
                for (std::size_t i = 0; i < m; ++i)
                    ds.push_back(ds[i] * pk);
            }
        }
        return ds;
    };
    auto num = divisors(Z.c[lo]), den = divisors(Z.lead());
    std::set<Rational> seen;
    for (auto& a : num)
        for (auto& b : den)
            for (int sg : {1, -1}) {
                Rational r(Integer(sg * a), b);
                if (seen.count(r))
                    continue;
                seen.insert(r);
                if (f(r) == 0)
                    out.push_back(r);
            }
    std::sort(out.begin(), out.end());
    return out;
}

inline OddModel to_odd_model(const HyperellipticCurve& C)
{
    if (C.parity == Parity::odd)
        return {C, Rational(0), false};
    auto roots = rational_roots(C.F);
    if (roots.empty())
        throw jacobian_error("even model without a rational Weierstrass point: no odd model over Q");
    Rational a = roots.front();
    int g = C.genus;
    // x = a + 1/X: f*(X) = X^(2g+2) f(a + 1/X), h*(X) = X^(g+1) h(a + 1/X)
    auto transform = [&](const QPoly& p, int n) {
        QPoly lin({a, Rational(1)});
        // p(a + t), then reverse with weight n
        QPoly sh;
        for (int i = p.degree(); i >= 0; --i)
            sh = sh * lin + QPoly::constant(p.c[i]);
        std::vector<Rational> r(n + 1, Rational(0));
        for (int i = 0; i <= sh.degree(); ++i)
            r[n - i] = sh.c[i];
        return QPoly(r);
    };
    QPoly f2 = transform(C.f, 2 * g + 2), h2 = transform(C.h, g + 1);
    HyperellipticCurve D = integral_model(curve_new(f2, h2));
    if (D.parity != Parity::odd)
        throw jacobian_error("to_odd_model: transform did not produce an odd model");
    return {D, a, true};
}

// ---------------------------------------------------------------------------
// Point search

namespace detail {

// sqrt of a rational square, if it is one
inline std::optional<Rational> rational_sqrt(const Rational& q)
{
    if (q < 0)
        return std::nullopt;
    Integer n = mp::numerator(q), d = mp::denominator(q);
    if (!is_square(n) || !is_square(d))
        return std::nullopt;
    return Rational(Integer(mp::sqrt(n)), Integer(mp::sqrt(d)));
}

}  // namespace detail

// Degree-1 divisors from affine points of height <= bound, and degree-2
// divisors from monic irreducible integer u with |coefficients| <= bound
// whose roots carry a point over the quadratic field. Subsums are left to
// the caller's closure.
inline std::vector<MumfordDivisor<Rational>> rational_point_search(const HyperellipticCurve& C, int bound)
{
    JacobianModel<Rational> J = jacobian_model(C);
    std::vector<MumfordDivisor<Rational>> out{identity(J)};
    if (bound <= 0)
        return out;
    std::set<std::string> seen{divisor_key(out[0])};
    auto push = [&](const MumfordDivisor<Rational>& D) {
        if (!is_valid(J, D))
            throw jacobian_error("point search produced an invalid divisor");
        auto k = divisor_key(D);
        if (seen.insert(k).second)
            out.push_back(D);
    };
    QPoly G = C.G();
    std::set<Rational> xs;
    for (int b = 1; b <= bound; ++b)
        for (int a = -bound; a <= bound; ++a)
            if (std::gcd(a, b) == 1)
                xs.insert(Rational(a, b));
    for (auto& x : xs) {
        auto s = detail::rational_sqrt(G(x));
        if (!s)
            continue;
        Rational hx = C.h(x);
        for (int sg : {1, -1}) {
            Rational y = (Rational(sg) * *s - hx) / 2;
            push({QPoly({-x, Rational(1)}), QPoly::constant(y)});
        }
    }
    if (C.genus < 2)
        return out;
    // u = x^2 + c1 x + c0 irreducible; alpha = (-c1 + sqrt(D))/2
    for (int c1 = -bound; c1 <= bound; ++c1)
        for (int c0 = -bound; c0 <= bound; ++c0) {
            Integer disc = Integer(c1) * c1 - 4 * Integer(c0);
            if (disc >= 0 && is_square(disc))
                continue;
            Rational D(disc);
            // represent elements as X + Y sqrt(D); evaluate G at alpha
            Rational X = 0, Y = 0;
            Rational ar(-c1, 2), ai(1, 2);
            for (int i = G.degree(); i >= 0; --i) {
                Rational nX = X * ar + Y * ai * D + G.c[i];
                Rational nY = X * ai + Y * ar;
                X = nX;
                Y = nY;
            }
            auto n = detail::rational_sqrt(X * X - D * Y * Y);
            if (!n)
                continue;
            for (int sgn : {1, -1}) {
                auto a2 = detail::rational_sqrt((X + Rational(sgn) * *n) / 2);
                if (!a2 || *a2 == 0)
                    continue;
                Rational a = *a2, b = Y / (2 * a);
                // s(alpha) = a + b sqrt(D) with sqrt(D) = 2 alpha + c1
                // as a poly in x: (a + b c1) + 2b x
                for (int sg : {1, -1}) {
                    QPoly s({Rational(sg) * (a + b * c1), Rational(sg) * 2 * b});
                    QPoly u({Rational(c0), Rational(c1), Rational(1)});
                    QPoly v = (Rational(1, 2) * (s - C.h)) % u;
                    push({u, v});
                }
                break;
            }
        }
    return out;
}

// ---------------------------------------------------------------------------
// Torsion bounds

struct TorsionBounds {
    Integer lower = 1, upper = 0;
    std::vector<std::uint64_t> primes_used;
    std::vector<std::string> warnings;
    std::size_t closure_size = 1;
};

// Order of the subgroup generated by the torsion points among `gens`;
// closure capped at `cap` elements.
inline std::size_t subgroup_closure(const JacobianModel<Rational>& J, const std::vector<MumfordDivisor<Rational>>& gens,
                                    std::size_t cap = 100000)
{
    std::map<std::string, MumfordDivisor<Rational>> group;
    group.emplace(divisor_key(identity(J)), identity(J));
    for (auto& g : gens) {
        if (group.count(divisor_key(g)))
            continue;
        // add the cyclic subgroup <g> to the current group H: H + k g
        std::vector<MumfordDivisor<Rational>> H;
        for (auto& [k, D] : group)
            H.push_back(D);
        MumfordDivisor<Rational> m = g;
        while (!group.count(divisor_key(m))) {
            for (auto& D : H) {
                auto S = cantor_add(J, D, m);
                group.emplace(divisor_key(S), S);
                if (group.size() > cap)
                    throw jacobian_error("subgroup closure exceeds cap");
            }
            m = cantor_add(J, m, g);
        }
    }
    return group.size();
}

// Subgroup generated by searched points killed by `upper`. A good odd prime
// screens out non-torsion points before the exact check over Q.
inline std::size_t torsion_lower_bound(const HyperellipticCurve& C, const Integer& upper, int search_bound, std::size_t cap)
{
    JacobianModel<Rational> J = jacobian_model(C);
    std::uint64_t p = 3;
    while (!is_prime(p) || !is_good_prime(C, p))
        p += 2;
    JacobianModel<Fp> Jp = jacobian_model_mod(C, p);
    std::vector<MumfordDivisor<Rational>> tors;
    for (auto& D : rational_point_search(C, search_bound)) {
        if (is_identity(D))
            continue;
        bool integral = true;
        for (auto* P : {&D.u, &D.v})
            for (auto& a : P->c)
                if (mp::denominator(a) % p == 0)
                    integral = false;
        if (integral && !is_identity(cantor_mul(Jp, upper, reduce_divisor(D, p))))
            continue;
        if (is_identity(cantor_mul(J, upper, D)))
            tors.push_back(D);
    }
    return subgroup_closure(J, tors, cap);
}

// Odd good primes up to `bound` whose curve counts over F_{p^g} stay cheap
// (p^g <= field_limit); never fewer than two.
inline std::vector<std::uint64_t> torsion_primes(const HyperellipticCurve& C, std::uint64_t bound = 30,
                                                 double field_limit = 1 << 20)
{
    HyperellipticCurve M = integral_model(C);
    std::vector<std::uint64_t> ps;
    for (std::uint64_t p = 3; ps.size() < 2 || p <= bound; p += 2) {
        if (!is_prime(p) || !is_good_prime(M, p))
            continue;
        if (ps.size() >= 2 && std::pow((double)p, M.genus) > field_limit)
            break;
        ps.push_back(p);
    }
    return ps;
}

inline TorsionBounds torsion_bounds(const HyperellipticCurve& C, const std::vector<std::uint64_t>& primes, int search_bound,
                                    std::size_t cap = 100000)
{
    TorsionBounds tb;
    HyperellipticCurve M = integral_model(C);
    for (auto p : primes) {
        if (p == 2 || !is_good_prime(M, p))
            throw jacobian_error("torsion_bounds: prime " + std::to_string(p) + " is not good and odd");
        tb.upper = mp::gcd(tb.upper, eval_at_one(frobenius_polynomial(M, p)));
        tb.primes_used.push_back(p);
    }
    if (primes.size() < 2)
        tb.warnings.push_back("fewer than 2 primes: torsion upper bound unreliable");
    if (tb.upper == 0)
        return tb;
    HyperellipticCurve odd = C;
    if (C.parity != Parity::odd) {
        try {
            odd = to_odd_model(C).curve;
        } catch (const jacobian_error& e) {
            tb.warnings.push_back(std::string("no lower bound: ") + e.what());
            return tb;
        }
    }
    tb.closure_size = torsion_lower_bound(odd, tb.upper, search_bound, cap);
    tb.lower = tb.closure_size;
    if (tb.upper % tb.lower != 0)
        throw jacobian_error("torsion lower bound does not divide upper bound");
    return tb;
}

}  // namespace bsdkit
