#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/miller_rabin.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace bsdkit {

namespace mp = boost::multiprecision;

using Integer = mp::mpz_int;
using Rational = mp::mpq_rational;
// Dynamic precision, expression templates off so every temporary is
// created at the current default precision.
using BigFloat = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

struct arith_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Precision handling

inline unsigned working_digits() { return BigFloat::default_precision(); }

class precision_scope {
public:
    explicit precision_scope(unsigned digits10) : saved_(BigFloat::default_precision())
    {
        BigFloat::default_precision(digits10);
    }
    ~precision_scope() { BigFloat::default_precision(saved_); }
    precision_scope(const precision_scope&) = delete;
    precision_scope& operator=(const precision_scope&) = delete;

private:
    unsigned saved_;
};

inline BigFloat at_prec(const BigFloat& x, unsigned digits10) { return BigFloat(x, digits10); }
inline BigFloat at_working(const BigFloat& x) { return BigFloat(x, working_digits()); }

inline BigFloat to_big(const Rational& q)
{
    BigFloat r;
    r = q;
    return r;
}
inline BigFloat to_big(const Integer& z)
{
    BigFloat r;
    r = z;
    return r;
}
inline BigFloat to_big(long v) { return BigFloat(v); }

inline BigFloat big_pi()
{
    BigFloat r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}
inline BigFloat big_euler_gamma()
{
    BigFloat r;
    mpfr_const_euler(r.backend().data(), MPFR_RNDN);
    return r;
}
inline BigFloat big_zeta(unsigned long k)
{
    BigFloat r;
    mpfr_zeta_ui(r.backend().data(), k, MPFR_RNDN);
    return r;
}
inline BigFloat big_gamma(const BigFloat& x)
{
    BigFloat r;
    mpfr_gamma(r.backend().data(), x.backend().data(), MPFR_RNDN);
    return r;
}
inline BigFloat pow10(long e) { return mp::pow(BigFloat(10), e); }

// Scientific string with `digits` significant digits.
inline std::string big_str(const BigFloat& x, int digits = 20)
{
    return x.str(digits, std::ios_base::scientific);
}

// ---------------------------------------------------------------------------
// Rational / integer helpers

inline Rational parse_rational(const std::string& s)
{
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos)
            return Rational(Integer(s));
        Integer n(s.substr(0, slash)), d(s.substr(slash + 1));
        if (d == 0)
            throw arith_error("zero denominator in '" + s + "'");
        return Rational(n, d);
    } catch (const std::runtime_error&) {
        throw arith_error("not a rational number: '" + s + "'");
    }
}

inline std::string rational_str(const Rational& q)
{
    if (mp::denominator(q) == 1)
        return mp::numerator(q).str();
    return mp::numerator(q).str() + "/" + mp::denominator(q).str();
}

inline bool is_prime(const Integer& n)
{
    if (n < 2)
        return false;
    for (int sp : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n == sp)
            return true;
        if (n % sp == 0)
            return false;
    }
    return mp::miller_rabin_test(n, 30);
}
inline bool is_prime(std::uint64_t n) { return is_prime(Integer(n)); }

inline int valuation(Integer n, const Integer& p)
{
    if (n == 0)
        throw arith_error("valuation of zero");
    int v = 0;
    n = mp::abs(n);
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}
inline int valuation(const Rational& q, const Integer& p)
{
    return valuation(mp::numerator(q), p) - valuation(mp::denominator(q), p);
}

inline bool is_square(const Integer& n)
{
    if (n < 0)
        return false;
    Integer r = mp::sqrt(n);
    return r * r == n;
}

struct Factorization {
    std::vector<std::pair<Integer, int>> factors;
    Integer cofactor = 1;  // unfactored part (1 when complete)
};

// Trial division to `bound`, then a primality test on what is left.
inline Factorization factor_integer(Integer n, std::uint64_t bound = 1000000)
{
    Factorization F;
    n = mp::abs(n);
    if (n == 0)
        throw arith_error("cannot factor zero");
    for (std::uint64_t d = 2; d <= bound && Integer(d) * d <= n; d += (d == 2 ? 1 : 2)) {
        if (n % d == 0) {
            int e = 0;
            while (n % d == 0) {
                n /= d;
                ++e;
            }
            F.factors.push_back({Integer(d), e});
        }
    }
    if (n > 1) {
        if (is_prime(n))
            F.factors.push_back({n, 1});
        else
            F.cofactor = n;
    }
    return F;
}

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m)
{
    unsigned __int128 r = 1, x = b % m;
    while (e) {
        if (e & 1)
            r = r * x % m;
        x = x * x % m;
        e >>= 1;
    }
    return (std::uint64_t)r;
}

// ---------------------------------------------------------------------------
// Complex numbers at working precision

struct BigComplex {
    BigFloat re, im;
    BigComplex() : re(0), im(0) {}
    BigComplex(const BigFloat& r) : re(r), im(0) {}
    BigComplex(const BigFloat& r, const BigFloat& i) : re(r), im(i) {}
    BigComplex(long r) : re(r), im(0) {}

    BigComplex& operator+=(const BigComplex& o) { re += o.re; im += o.im; return *this; }
    BigComplex& operator-=(const BigComplex& o) { re -= o.re; im -= o.im; return *this; }
    BigComplex& operator*=(const BigComplex& o)
    {
        BigFloat r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    BigComplex& operator/=(const BigComplex& o)
    {
        BigFloat d = o.re * o.re + o.im * o.im;
        BigFloat r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = r;
        return *this;
    }
    BigComplex operator-() const { return BigComplex(-re, -im); }
};
inline BigComplex operator+(BigComplex a, const BigComplex& b) { return a += b; }
inline BigComplex operator-(BigComplex a, const BigComplex& b) { return a -= b; }
inline BigComplex operator*(BigComplex a, const BigComplex& b) { return a *= b; }
inline BigComplex operator/(BigComplex a, const BigComplex& b) { return a /= b; }
inline BigComplex operator*(const BigFloat& s, const BigComplex& a) { return BigComplex(s * a.re, s * a.im); }
inline BigComplex operator*(const BigComplex& a, const BigFloat& s) { return BigComplex(s * a.re, s * a.im); }
inline BigComplex conj(const BigComplex& a) { return BigComplex(a.re, -a.im); }
inline BigFloat norm2(const BigComplex& a) { return a.re * a.re + a.im * a.im; }
inline BigFloat abs(const BigComplex& a) { return mp::sqrt(norm2(a)); }
inline BigFloat arg(const BigComplex& a) { return mp::atan2(a.im, a.re); }
inline BigComplex polar(const BigFloat& r, const BigFloat& t) { return BigComplex(r * mp::cos(t), r * mp::sin(t)); }
inline BigComplex sqrt(const BigComplex& a)
{
    // principal branch, cut along the negative real axis
    BigFloat r = abs(a);
    if (r == 0)
        return BigComplex();
    BigFloat u = mp::sqrt((r + mp::abs(a.re)) / 2);
    if (a.re >= 0)
        return BigComplex(u, a.im / (2 * u));
    BigFloat v = a.im >= 0 ? u : BigFloat(-u);
    return BigComplex(mp::abs(a.im) / (2 * u), v);
}
inline BigComplex exp(const BigComplex& a) { return polar(mp::exp(a.re), a.im); }
inline BigComplex log(const BigComplex& a) { return BigComplex(mp::log(abs(a)), arg(a)); }

// ---------------------------------------------------------------------------
// Prime fields with the modulus carried by the element

struct Fp {
    std::uint64_t v = 0;
    std::uint64_t p = 2;
    Fp() = default;
    Fp(std::int64_t x, std::uint64_t pp) : p(pp)
    {
        std::int64_t r = x % (std::int64_t)pp;
        v = (std::uint64_t)(r < 0 ? r + (std::int64_t)pp : r);
    }
    static Fp raw(std::uint64_t x, std::uint64_t pp)
    {
        Fp a;
        a.v = x;
        a.p = pp;
        return a;
    }
    Fp inv() const
    {
        if (v == 0)
            throw arith_error("inverse of zero in F_p");
        return raw(powmod(v, p - 2, p), p);
    }
};
inline Fp operator+(const Fp& a, const Fp& b) { std::uint64_t s = a.v + b.v; return Fp::raw(s >= a.p ? s - a.p : s, a.p); }
inline Fp operator-(const Fp& a, const Fp& b) { return Fp::raw(a.v >= b.v ? a.v - b.v : a.v + a.p - b.v, a.p); }
inline Fp operator-(const Fp& a) { return Fp::raw(a.v ? a.p - a.v : 0, a.p); }
inline Fp operator*(const Fp& a, const Fp& b) { return Fp::raw((std::uint64_t)((unsigned __int128)a.v * b.v % a.p), a.p); }
inline Fp operator/(const Fp& a, const Fp& b) { return a * b.inv(); }
inline bool operator==(const Fp& a, const Fp& b) { return a.v == b.v; }
inline bool operator!=(const Fp& a, const Fp& b) { return a.v != b.v; }

inline Fp reduce_mod(const Rational& q, std::uint64_t p)
{
    Integer n = mp::numerator(q) % p, d = mp::denominator(q) % p;
    if (d == 0)
        throw arith_error("denominator divisible by p");
    return Fp(n.convert_to<std::int64_t>(), p) / Fp(d.convert_to<std::int64_t>(), p);
}

// ---------------------------------------------------------------------------
// Domain traits used by the generic polynomial code

inline bool is_zero(const Rational& a) { return a == 0; }
inline bool is_zero(const Integer& a) { return a == 0; }
inline bool is_zero(const BigFloat& a) { return a == 0; }
inline bool is_zero(const BigComplex& a) { return a.re == 0 && a.im == 0; }
inline bool is_zero(const Fp& a) { return a.v == 0; }

inline Rational zero_like(const Rational&) { return 0; }
inline Integer zero_like(const Integer&) { return 0; }
inline BigFloat zero_like(const BigFloat&) { return 0; }
inline BigComplex zero_like(const BigComplex&) { return BigComplex(); }
inline Fp zero_like(const Fp& a) { return Fp::raw(0, a.p); }
inline Rational one_like(const Rational&) { return 1; }
inline Integer one_like(const Integer&) { return 1; }
inline BigFloat one_like(const BigFloat&) { return 1; }
inline BigComplex one_like(const BigComplex&) { return BigComplex(1); }
inline Fp one_like(const Fp& a) { return Fp::raw(1 % a.p, a.p); }

// ---------------------------------------------------------------------------
// Univariate polynomials, coefficients stored low degree first

template <class T>
struct Poly {
    std::vector<T> c;

    Poly() = default;
    explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) { trim(); }
    static Poly constant(const T& a) { return Poly(std::vector<T>{a}); }
    // x^k with coefficient a
    static Poly monomial(const T& a, int k)
    {
        std::vector<T> v(k + 1, zero_like(a));
        v[k] = a;
        return Poly(std::move(v));
    }

    void trim()
    {
        while (!c.empty() && is_zero(c.back()))
            c.pop_back();
    }
    int degree() const { return (int)c.size() - 1; }
    bool zero() const { return c.empty(); }
    const T& lead() const
    {
        if (c.empty())
            throw arith_error("leading coefficient of zero polynomial");
        return c.back();
    }
    T coeff(int i, const T& proto) const { return i >= 0 && i < (int)c.size() ? c[i] : zero_like(proto); }

    template <class U>
    U operator()(const U& x) const
    {
        U r = zero_like(x);
        for (int i = degree(); i >= 0; --i)
            r = r * x + U(c[i]);
        return r;
    }
    Poly derivative() const
    {
        if (c.size() <= 1)
            return Poly();
        std::vector<T> d(c.size() - 1, zero_like(c[0]));
        for (std::size_t i = 1; i < c.size(); ++i) {
            T k = zero_like(c[0]);
            for (std::size_t j = 0; j < i; ++j)
                k = k + one_like(c[0]);
            d[i - 1] = c[i] * k;
        }
        return Poly(std::move(d));
    }
};

template <class T>
Poly<T> operator+(const Poly<T>& a, const Poly<T>& b)
{
    if (a.zero())
        return b;
    if (b.zero())
        return a;
    std::vector<T> r(std::max(a.c.size(), b.c.size()), zero_like(a.c[0]));
    for (std::size_t i = 0; i < a.c.size(); ++i)
        r[i] = r[i] + a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i)
        r[i] = r[i] + b.c[i];
    return Poly<T>(std::move(r));
}
template <class T>
Poly<T> operator-(const Poly<T>& a)
{
    Poly<T> r = a;
    for (auto& x : r.c)
        x = -x;
    return r;
}
template <class T>
Poly<T> operator-(const Poly<T>& a, const Poly<T>& b) { return a + (-b); }
template <class T>
Poly<T> operator*(const Poly<T>& a, const Poly<T>& b)
{
    if (a.zero() || b.zero())
        return Poly<T>();
    std::vector<T> r(a.c.size() + b.c.size() - 1, zero_like(a.c[0]));
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (is_zero(a.c[i]))
            continue;
        for (std::size_t j = 0; j < b.c.size(); ++j)
            r[i + j] = r[i + j] + a.c[i] * b.c[j];
    }
    return Poly<T>(std::move(r));
}
template <class T>
Poly<T> operator*(const T& s, const Poly<T>& a)
{
    Poly<T> r = a;
    for (auto& x : r.c)
        x = s * x;
    r.trim();
    return r;
}
template <class T>
bool operator==(const Poly<T>& a, const Poly<T>& b)
{
    if (a.c.size() != b.c.size())
        return false;
    for (std::size_t i = 0; i < a.c.size(); ++i)
        if (!(a.c[i] == b.c[i]))
            return false;
    return true;
}
template <class T>
bool operator!=(const Poly<T>& a, const Poly<T>& b) { return !(a == b); }

// Division with remainder over a field.
template <class T>
std::pair<Poly<T>, Poly<T>> divmod(const Poly<T>& a, const Poly<T>& b)
{
    if (b.zero())
        throw arith_error("polynomial division by zero");
    if (a.degree() < b.degree())
        return {Poly<T>(), a};
    std::vector<T> r = a.c;
    std::vector<T> q(a.c.size() - b.c.size() + 1, zero_like(a.c[0]));
    T il = one_like(b.lead()) / b.lead();
    for (int i = a.degree() - b.degree(); i >= 0; --i) {
        T t = r[i + b.degree()] * il;
        q[i] = t;
        if (is_zero(t))
            continue;
        for (int j = 0; j <= b.degree(); ++j)
            r[i + j] = r[i + j] - t * b.c[j];
    }
    r.resize(b.c.size() - 1, zero_like(a.c[0]));
    return {Poly<T>(std::move(q)), Poly<T>(std::move(r))};
}
template <class T>
Poly<T> operator%(const Poly<T>& a, const Poly<T>& b) { return divmod(a, b).second; }
template <class T>
Poly<T> operator/(const Poly<T>& a, const Poly<T>& b) { return divmod(a, b).first; }

template <class T>
Poly<T> make_monic(const Poly<T>& a)
{
    if (a.zero())
        return a;
    T il = one_like(a.lead()) / a.lead();
    return il * a;
}

template <class T>
Poly<T> poly_gcd(Poly<T> a, Poly<T> b)
{
    while (!b.zero()) {
        Poly<T> r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return make_monic(a);
}

// Extended gcd: returns (g, s, t) with s a + t b = g, g monic.
template <class T>
std::tuple<Poly<T>, Poly<T>, Poly<T>> poly_xgcd(const Poly<T>& a, const Poly<T>& b, const T& proto)
{
    Poly<T> r0 = a, r1 = b;
    Poly<T> s0 = Poly<T>::constant(one_like(proto)), s1;
    Poly<T> t0, t1 = Poly<T>::constant(one_like(proto));
    while (!r1.zero()) {
        auto [q, r] = divmod(r0, r1);
        r0 = std::move(r1);
        r1 = std::move(r);
        Poly<T> s2 = s0 - q * s1, t2 = t0 - q * t1;
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.zero())
        return {r0, s0, t0};
    T il = one_like(proto) / r0.lead();
    return {il * r0, il * s0, il * t0};
}

template <class T>
Poly<T> poly_pow_mod(Poly<T> base, Integer e, const Poly<T>& m, const T& proto)
{
    Poly<T> r = Poly<T>::constant(one_like(proto));
    base = base % m;
    while (e > 0) {
        if (e % 2 == 1)
            r = (r * base) % m;
        base = (base * base) % m;
        e /= 2;
    }
    return r;
}

template <class T>
std::string poly_str(const Poly<T>& a, const std::function<std::string(const T&)>& fmt, const std::string& var = "x")
{
    if (a.zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = a.degree(); i >= 0; --i) {
        if (is_zero(a.c[i]))
            continue;
        if (!first)
            os << " + ";
        first = false;
        os << "(" << fmt(a.c[i]) << ")";
        if (i >= 1)
            os << "*" << var;
        if (i >= 2)
            os << "^" << i;
    }
    return os.str();
}

using QPoly = Poly<Rational>;
using ZPoly = Poly<Integer>;
using FpPoly = Poly<Fp>;

inline QPoly qpoly(std::initializer_list<long> low_to_high)
{
    std::vector<Rational> v;
    for (long x : low_to_high)
        v.emplace_back(x);
    return QPoly(std::move(v));
}

inline FpPoly reduce_mod(const QPoly& f, std::uint64_t p)
{
    std::vector<Fp> v;
    for (auto& a : f.c)
        v.push_back(reduce_mod(a, p));
    return FpPoly(std::move(v));
}

// Common denominator D and integral F with f = F / D.
inline std::pair<ZPoly, Integer> clear_denominators(const QPoly& f)
{
    Integer D = 1;
    for (auto& a : f.c)
        D = mp::lcm(D, mp::denominator(a));
    std::vector<Integer> v;
    for (auto& a : f.c)
        v.push_back(mp::numerator(Rational(a * D)));
    return {ZPoly(std::move(v)), D};
}

inline Integer content(const ZPoly& f)
{
    Integer g = 0;
    for (auto& a : f.c)
        g = mp::gcd(g, a);
    return g;
}

// Pseudo-remainder: lc(b)^(deg a - deg b + 1) a = q b + r.
inline ZPoly pseudo_rem(ZPoly a, const ZPoly& b)
{
    int db = b.degree();
    Integer lb = b.lead();
    int e = a.degree() - db + 1;
    while (!a.zero() && a.degree() >= db) {
        Integer la = a.lead();
        int s = a.degree() - db;
        std::vector<Integer> r(a.c.size());
        for (std::size_t i = 0; i < a.c.size(); ++i)
            r[i] = a.c[i] * lb;
        for (int j = 0; j <= db; ++j)
            r[s + j] -= la * b.c[j];
        a = ZPoly(std::move(r));
        --e;
    }
    Integer m = mp::pow(lb, std::max(e, 0));
    for (auto& x : a.c)
        x *= m;
    return a;
}

// Resultant by the subresultant algorithm (exact divisions throughout).
inline Integer resultant(ZPoly A, ZPoly B)
{
    if (A.zero() || B.zero())
        return 0;
    Integer a = content(A), b = content(B);
    for (auto& x : A.c)
        x /= a;
    for (auto& x : B.c)
        x /= b;
    Integer g = 1, h = 1, t = mp::pow(a, B.degree()) * mp::pow(b, A.degree());
    int s = 1;
    if (A.degree() < B.degree()) {
        std::swap(A, B);
        if (A.degree() % 2 == 1 && B.degree() % 2 == 1)
            s = -s;
    }
    while (B.degree() > 0) {
        int delta = A.degree() - B.degree();
        if (A.degree() % 2 == 1 && B.degree() % 2 == 1)
            s = -s;
        ZPoly R = pseudo_rem(A, B);
        A = B;
        Integer div = g * mp::pow(h, delta);
        for (auto& x : R.c)
            x /= div;
        B = R;
        g = A.lead();
        // h <- g^delta / h^(delta-1)
        if (delta > 0)
            h = mp::pow(g, delta) / mp::pow(h, delta - 1);
        if (B.zero())
            return 0;
    }
    if (A.degree() == 0)
        return t;
    h = mp::pow(B.lead(), A.degree()) / mp::pow(h, A.degree() - 1);
    return s * t * h;
}

inline Rational poly_discriminant(const QPoly& f)
{
    int n = f.degree();
    if (n < 1)
        throw arith_error("discriminant needs degree >= 1");
    if (n == 1)
        return 1;
    auto [F, D] = clear_denominators(f);
    std::vector<Integer> d(F.c.size() - 1);
    for (std::size_t i = 1; i < F.c.size(); ++i)
        d[i - 1] = F.c[i] * (long)i;
    Integer res = resultant(F, ZPoly(std::move(d)));
    Rational disc = Rational(res, F.lead());
    if ((n * (n - 1) / 2) % 2 == 1)
        disc = -disc;
    // disc(F/D) = disc(F) / D^(2n-2)
    return disc / Rational(mp::pow(D, 2 * n - 2));
}

// ---------------------------------------------------------------------------
// Finite fields F_{p^m}

inline bool fp_irreducible(const FpPoly& f)
{
    int m = f.degree();
    if (m <= 0)
        return false;
    if (m == 1)
        return true;
    std::uint64_t p = f.lead().p;
    Fp one = Fp::raw(1, p);
    FpPoly x = FpPoly::monomial(one, 1);
    FpPoly xp = x;
    for (int k = 1; k <= m / 2; ++k) {
        xp = poly_pow_mod(xp, Integer(p), f, one);
        if (poly_gcd(xp - x, f).degree() > 0)
            return false;
    }
    return true;
}

struct FiniteField {
    std::uint64_t p = 2;
    int m = 1;
    std::vector<std::uint64_t> modulus;  // monic, low to high, empty when m = 1
    std::uint64_t q() const
    {
        std::uint64_t r = 1;
        for (int i = 0; i < m; ++i)
            r *= p;
        return r;
    }
};

// Lexicographically least monic irreducible modulus, ordering the
// coefficient vector (c_0, ..., c_{m-1}) with digits 0..p-1.
inline FiniteField ext_field(std::uint64_t p, int m)
{
    if (!is_prime(p))
        throw arith_error("ext_field: " + std::to_string(p) + " is not prime");
    if (m < 1)
        throw arith_error("ext_field: degree must be positive");
    FiniteField F;
    F.p = p;
    F.m = m;
    if (m == 1)
        return F;
    std::vector<std::uint64_t> digits(m, 0);
    for (;;) {
        std::vector<Fp> v;
        for (int i = 0; i < m; ++i)
            v.push_back(Fp::raw(digits[i], p));
        v.push_back(Fp::raw(1, p));
        FpPoly f(v);
        if (fp_irreducible(f)) {
            F.modulus.assign(digits.begin(), digits.end());
            F.modulus.push_back(1);
            return F;
        }
        // increment, most significant digit = c_0
        int i = m - 1;
        while (i >= 0 && ++digits[i] == p) {
            digits[i] = 0;
            --i;
        }
        if (i < 0)
            throw arith_error("no irreducible polynomial found");
    }
}

// Table-driven arithmetic in F_q; elements are base-p integers whose
// digits are polynomial coefficients modulo the field modulus.
class FqTables {
public:
    explicit FqTables(const FiniteField& F, std::uint64_t max_q = (1u << 24)) : F_(F)
    {
        q_ = F.q();
        if (q_ > max_q)
            throw arith_error("field too large for table arithmetic");
        pw_.assign(F.m + 1, 1);
        for (int i = 1; i <= F.m; ++i)
            pw_[i] = pw_[i - 1] * F.p;
        build();
    }
    std::uint64_t p() const { return F_.p; }
    int m() const { return F_.m; }
    std::uint64_t q() const { return q_; }
    const FiniteField& field() const { return F_; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const
    {
        if (F_.p == 2)
            return a ^ b;
        if (F_.m == 1) {
            std::uint64_t s = (std::uint64_t)a + b;
            return (std::uint32_t)(s >= F_.p ? s - F_.p : s);
        }
        std::uint32_t r = 0;
        for (int i = 0; i < F_.m; ++i) {
            std::uint64_t da = (a / pw_[i]) % F_.p, db = (b / pw_[i]) % F_.p;
            r += (std::uint32_t)(((da + db) % F_.p) * pw_[i]);
        }
        return r;
    }
    std::uint32_t neg(std::uint32_t a) const
    {
        if (F_.p == 2)
            return a;
        std::uint32_t r = 0;
        for (int i = 0; i < F_.m; ++i) {
            std::uint64_t da = (a / pw_[i]) % F_.p;
            r += (std::uint32_t)(((F_.p - da) % F_.p) * pw_[i]);
        }
        return r;
    }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add(a, neg(b)); }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const
    {
        if (a == 0 || b == 0)
            return 0;
        std::uint64_t e = (std::uint64_t)log_[a] + log_[b];
        if (e >= q_ - 1)
            e -= q_ - 1;
        return exp_[e];
    }
    std::uint32_t inv(std::uint32_t a) const
    {
        if (a == 0)
            throw arith_error("inverse of zero in F_q");
        return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
    }
    std::uint32_t from_int(std::int64_t v) const
    {
        std::int64_t r = v % (std::int64_t)F_.p;
        return (std::uint32_t)(r < 0 ? r + (std::int64_t)F_.p : r);
    }
    std::uint32_t from_rational(const Rational& a) const
    {
        Fp x = reduce_mod(a, F_.p);
        return (std::uint32_t)x.v;
    }
    // discrete log w.r.t. the table generator; undefined for 0
    std::uint32_t log(std::uint32_t a) const { return log_[a]; }
    // quadratic character (odd p): 1, -1, or 0
    int chi(std::uint32_t a) const
    {
        if (a == 0)
            return 0;
        return (log_[a] % 2 == 0) ? 1 : -1;
    }
    // absolute trace to F_p
    std::uint64_t trace(std::uint32_t a) const
    {
        std::uint64_t t = 0;
        for (int i = 0; i < F_.m; ++i)
            t += ((a / pw_[i]) % F_.p) * trace_basis_[i];
        return t % F_.p;
    }
    std::uint32_t generator() const { return q_ > 2 ? exp_[1] : 1; }

private:
    FiniteField F_;
    std::uint64_t q_ = 0;
    std::vector<std::uint64_t> pw_;
    std::vector<std::uint32_t> exp_, log_;
    std::vector<std::uint64_t> trace_basis_;

    // plain polynomial product modulo the field modulus
    std::uint32_t slow_mul(std::uint32_t a, std::uint32_t b) const
    {
        int m = F_.m;
        std::uint64_t p = F_.p;
        if (m == 1)
            return (std::uint32_t)((std::uint64_t)a * b % p);
        std::vector<std::uint64_t> da(m), db(m), r(2 * m - 1, 0);
        for (int i = 0; i < m; ++i) {
            da[i] = (a / pw_[i]) % p;
            db[i] = (b / pw_[i]) % p;
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                r[i + j] = (r[i + j] + da[i] * db[j]) % p;
        for (int k = 2 * m - 2; k >= m; --k) {
            std::uint64_t t = r[k];
            if (!t)
                continue;
            for (int j = 0; j <= m; ++j)
                r[k - m + j] = (r[k - m + j] + (p - t) * F_.modulus[j]) % p;
        }
        std::uint32_t out = 0;
        for (int i = 0; i < m; ++i)
            out += (std::uint32_t)(r[i] * pw_[i]);
        return out;
    }

    void build()
    {
        std::uint64_t n = q_ - 1;
        // prime divisors of q - 1 for the primitivity test
        std::vector<std::uint64_t> pf;
        {
            std::uint64_t t = n;
            for (std::uint64_t d = 2; d * d <= t; ++d)
                if (t % d == 0) {
                    pf.push_back(d);
                    while (t % d == 0)
                        t /= d;
                }
            if (t > 1)
                pf.push_back(t);
        }
        auto power = [&](std::uint32_t a, std::uint64_t e) {
            std::uint32_t r = 1;
            while (e) {
                if (e & 1)
                    r = slow_mul(r, a);
                a = slow_mul(a, a);
                e >>= 1;
            }
            return r;
        };
        std::uint32_t gen = 1;
        for (std::uint32_t cand = 1; cand < q_; ++cand) {
            bool ok = true;
            for (auto r : pf)
                if (power(cand, n / r) == 1) {
                    ok = false;
                    break;
                }
            if (ok) {
                gen = cand;
                break;
            }
        }
        exp_.assign(n, 0);
        log_.assign(q_, 0);
        std::uint32_t x = 1;
        for (std::uint64_t e = 0; e < n; ++e) {
            exp_[e] = x;
            log_[x] = (std::uint32_t)e;
            x = slow_mul(x, gen);
        }
        // trace of basis monomials 1, t, ..., t^{m-1}
        trace_basis_.assign(F_.m, 0);
        for (int i = 0; i < F_.m; ++i) {
            std::uint32_t a = (std::uint32_t)pw_[i];
            std::uint32_t s = 0, y = a;
            for (int k = 0; k < F_.m; ++k) {
                s = add(s, y);
                std::uint32_t z = 1;
                for (std::uint64_t j = 0; j < F_.p; ++j)
                    z = slow_mul(z, y);
                y = z;
            }
            trace_basis_[i] = s % F_.p;  // the trace lies in F_p: digit 0 only
        }
    }
};

// Element of a table-driven field, carrying its tables.
struct Fq {
    std::uint32_t v = 0;
    const FqTables* T = nullptr;
    Fq() = default;
    Fq(std::uint32_t x, const FqTables* t) : v(x), T(t) {}
    Fq inv() const { return Fq(T->inv(v), T); }
};
inline Fq operator+(const Fq& a, const Fq& b) { return Fq(a.T->add(a.v, b.v), a.T); }
inline Fq operator-(const Fq& a, const Fq& b) { return Fq(a.T->sub(a.v, b.v), a.T); }
inline Fq operator-(const Fq& a) { return Fq(a.T->neg(a.v), a.T); }
inline Fq operator*(const Fq& a, const Fq& b) { return Fq(a.T->mul(a.v, b.v), a.T); }
inline Fq operator/(const Fq& a, const Fq& b) { return a * b.inv(); }
inline bool operator==(const Fq& a, const Fq& b) { return a.v == b.v; }
inline bool operator!=(const Fq& a, const Fq& b) { return a.v != b.v; }
inline bool is_zero(const Fq& a) { return a.v == 0; }
inline Fq zero_like(const Fq& a) { return Fq(0, a.T); }
inline Fq one_like(const Fq& a) { return Fq(1, a.T); }

using FqPoly = Poly<Fq>;

inline FqPoly reduce_mod(const QPoly& f, const FqTables& T)
{
    std::vector<Fq> v;
    for (auto& a : f.c)
        v.emplace_back(T.from_rational(a), &T);
    return FqPoly(std::move(v));
}

// ---------------------------------------------------------------------------
// Rational reconstruction by continued fractions

inline std::optional<Rational> rational_reconstruct(const BigFloat& x, const Integer& max_den, const BigFloat& tol)
{
    if (max_den < 1 || tol <= 0)
        throw arith_error("rational_reconstruct: bad parameters");
    // convergents h/k
    Integer h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    BigFloat r = x;
    for (int it = 0; it < 200; ++it) {
        BigFloat fl = mp::floor(r);
        Integer a = fl.convert_to<Integer>();
        Integer h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (k2 > max_den)
            return std::nullopt;
        Rational cand(h2, k2);
        if (mp::abs(x - to_big(cand)) <= tol)
            return cand;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        BigFloat frac = r - fl;
        if (frac == 0)
            return std::nullopt;
        r = 1 / frac;
    }
    return std::nullopt;
}

}  // namespace bsdkit
