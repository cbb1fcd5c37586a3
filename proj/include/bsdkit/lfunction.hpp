#pragma once

#include "bsdkit/curve.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

namespace bsdkit {

struct lfunction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// L_p(T) = 1 + c_1 T + ... ; for good p only c_1..c_known may be stored
// (enough for the Dirichlet coefficients up to the cutoff).
struct LocalFactor {
    std::uint64_t p = 0;
    std::vector<Integer> poly;
    int known = 0;
    bool good = true;
    int f = 0;  // conductor exponent
};

struct LSeries {
    int g = 0;
    Integer N = 1;
    int w = 1;
    std::map<std::uint64_t, LocalFactor> factors;
    std::uint64_t cutoff = 0;  // factors present for every p <= cutoff
};

struct ConductorGuess {
    int value = 0;
    int v_disc = 0;
    int n_components = 1;
    bool reliable = true;
    std::string warning;
};

inline ConductorGuess conductor_ogg_guess(int v_disc, int n_components)
{
    if (v_disc < 0 || n_components < 1)
        throw lfunction_error("conductor_ogg_guess: need v >= 0 and n >= 1");
    ConductorGuess cg;
    cg.v_disc = v_disc;
    cg.n_components = n_components;
    cg.value = v_disc - n_components + 1;
    if (cg.value < 0) {
        cg.warning = "negative guess floored at 0";
        cg.value = 0;
    }
    cg.reliable = v_disc < 10;
    return cg;
}

// ---------------------------------------------------------------------------
// Good factors

namespace detail {

inline void check_weil(std::uint64_t N, const Integer& q, int g)
{
    Integer dev = Integer(N) - q - 1;
    if (dev * dev > Integer(4) * g * g * q)
        throw lfunction_error("Weil bound violated: counting bug");
}

// N_1..N_k on a good integral model; first coefficients of L_p by Newton.
inline LocalFactor good_factor(const HyperellipticCurve& C, std::uint64_t p, int need)
{
    const int g = C.genus;
    int k = (need < 0 || need >= g) ? g : need;
    std::vector<Integer> s;
    Integer q = 1;
    std::vector<std::uint32_t> gc;
    if (p != 2) {
        QPoly G = C.G();
        gc.assign(2 * g + 3, 0);
        for (int i = 0; i <= G.degree(); ++i)
            gc[i] = (std::uint32_t)reduce_mod(G.c[i], p).v;
    }
    for (int m = 1; m <= k; ++m) {
        q *= p;
        std::uint64_t N;
        if (m == 1 && p != 2)
            N = count_prime_field(gc, p);
        else {
            FqTables T(ext_field(p, m));
            N = count_points_model(C, T);
        }
        check_weil(N, q, g);
        s.push_back(q + 1 - Integer(N));
    }
    LocalFactor lf;
    lf.p = p;
    lf.good = true;
    lf.poly = newton_coefficients(s);
    if (k == g) {
        lf.poly.resize(2 * g + 1);
        for (int i = 0; i < g; ++i)
            lf.poly[2 * g - i] = mp::pow(Integer(p), g - i) * lf.poly[i];
        lf.known = 2 * g;
    } else {
        lf.known = k;
    }
    return lf;
}

inline int log_floor(std::uint64_t X, std::uint64_t p)
{
    int e = 0;
    std::uint64_t t = 1;
    while (t <= X / p) {
        t *= p;
        ++e;
    }
    return e;
}

}  // namespace detail

inline LocalFactor local_factor_good(const HyperellipticCurve& C, std::uint64_t p, int need = -1)
{
    if (!is_integral(C))
        throw lfunction_error("local_factor_good: integral model required");
    if (!is_good_prime(C, p))
        throw lfunction_error("local_factor_good: bad prime " + std::to_string(p));
    return detail::good_factor(C, p, need);
}

// Euler-factor cache: one JSON file per curve, records keyed by p.
class EulerCache {
public:
    EulerCache() = default;
    EulerCache(std::filesystem::path root, std::string curve_hash) : path_(std::move(root))
    {
        path_ /= curve_hash;
        path_ /= "euler.json";
        load();
    }
    static std::optional<std::filesystem::path> default_root()
    {
        if (const char* e = std::getenv("BSDKIT_CACHE"); e && *e)
            return std::filesystem::path(e);
        return std::nullopt;
    }
    bool enabled() const { return !path_.empty(); }
    const LocalFactor* find(std::uint64_t p, int need) const
    {
        auto it = rec_.find(p);
        if (it == rec_.end() || it->second.known < need)
            return nullptr;
        return &it->second;
    }
    void put(const LocalFactor& lf)
    {
        auto& r = rec_[lf.p];
        if (r.known < lf.known || r.p == 0) {
            r = lf;
            dirty_ = true;
        }
    }
    void save()
    {
        if (!enabled() || !dirty_)
            return;
        nlohmann::ordered_json j;
        j["schema"] = "bsdkit.euler/1";
        auto& arr = j["records"] = nlohmann::ordered_json::array();
        for (auto& [p, lf] : rec_) {
            nlohmann::ordered_json r;
            r["p"] = p;
            r["known"] = lf.known;
            std::vector<std::string> cs;
            for (auto& c : lf.poly)
                cs.push_back(c.str());
            r["coeffs"] = cs;
            arr.push_back(r);
        }
        std::filesystem::create_directories(path_.parent_path());
        auto tmp = path_;
        tmp += ".tmp";
        {
            std::ofstream os(tmp);
            if (!os)
                throw lfunction_error("cannot write cache " + tmp.string());
            os << j.dump() << "\n";
        }
        std::filesystem::rename(tmp, path_);
        dirty_ = false;
    }

private:
    std::filesystem::path path_;
    std::map<std::uint64_t, LocalFactor> rec_;
    bool dirty_ = false;

    void load()
    {
        std::ifstream is(path_);
        if (!is)
            return;
        auto j = nlohmann::json::parse(is, nullptr, false);
        if (j.is_discarded() || j.value("schema", "") != "bsdkit.euler/1")
            return;
        for (auto& r : j["records"]) {
            LocalFactor lf;
            lf.p = r["p"].get<std::uint64_t>();
            lf.known = r["known"].get<int>();
            for (auto& c : r["coeffs"])
                lf.poly.emplace_back(c.get<std::string>());
            rec_[lf.p] = lf;
        }
    }
};

inline std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string curve_hash(const HyperellipticCurve& C)
{
    std::string s = "f:";
    for (auto& a : C.f.c)
        s += rational_str(a) + ",";
    s += ";h:";
    for (auto& a : C.h.c)
        s += rational_str(a) + ",";
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(s);
    return os.str();
}

// Good factors for every good p <= X, each known to degree floor(log_p X).
inline void fill_good_factors(const HyperellipticCurve& C, LSeries& L, std::uint64_t X, EulerCache* cache = nullptr)
{
    HyperellipticCurve M = integral_model(C);
    Integer disc = integer_discriminant(M);
    L.g = M.genus;
    std::vector<char> sieve(X + 1, 1);
    for (std::uint64_t p = 2; p <= X; ++p) {
        if (!sieve[p])
            continue;
        for (std::uint64_t m = p * p; m <= X; m += p)
            sieve[m] = 0;
        if (disc % p == 0)
            continue;
        int need = std::min(detail::log_floor(X, p), 2 * M.genus);
        auto it = L.factors.find(p);
        if (it != L.factors.end() && it->second.known >= need)
            continue;
        if (cache) {
            if (auto* lf = cache->find(p, need)) {
                L.factors[p] = *lf;
                continue;
            }
        }
        LocalFactor lf = detail::good_factor(M, p, need);
        if (cache)
            cache->put(lf);
        L.factors[p] = std::move(lf);
    }
    L.cutoff = std::max(L.cutoff, X);
}

// a_1..a_X from the Euler product; a[0] unused.
inline std::vector<std::int64_t> dirichlet_coefficients(const LSeries& L, std::uint64_t X)
{
    std::vector<std::int64_t> a(X + 1, 0);
    if (X >= 1)
        a[1] = 1;
    std::vector<char> sieve(X + 1, 1);
    for (std::uint64_t p = 2; p <= X; ++p) {
        if (!sieve[p])
            continue;
        for (std::uint64_t m = p * p; m <= X; m += p)
            sieve[m] = 0;
        auto it = L.factors.find(p);
        if (it == L.factors.end())
            throw lfunction_error("dirichlet_coefficients: missing factor at p = " + std::to_string(p));
        const LocalFactor& lf = it->second;
        int e = detail::log_floor(X, p);
        if (lf.known < std::min(e, 2 * L.g) && lf.good)
            throw lfunction_error("dirichlet_coefficients: factor at p = " + std::to_string(p) + " known only to degree " +
                                  std::to_string(lf.known));
        // 1 / L_p(T) to degree e
        std::vector<std::int64_t> b(e + 1, 0);
        b[0] = 1;
        for (int n = 1; n <= e; ++n) {
            std::int64_t acc = 0;
            for (int i = 1; i <= n && i < (int)lf.poly.size(); ++i)
                acc += lf.poly[i].convert_to<std::int64_t>() * b[n - i];
            b[n] = -acc;
        }
        for (std::uint64_t m = X / p; m >= 1; --m) {
            if (a[m] == 0 || m % p == 0)
                continue;
            std::uint64_t pk = p;
            for (int k = 1; k <= e; ++k) {
                if (m > X / pk)
                    break;
                a[m * pk] += a[m] * b[k];
                if (pk > X / p)
                    break;
                pk *= p;
            }
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// Candidate bad factors

namespace detail {

inline std::vector<std::pair<FpPoly, int>> squarefree_parts(FpPoly f)
{
    // Yun over F_p (with the p-th power case)
    std::vector<std::pair<FpPoly, int>> out;
    const std::uint64_t p = f.lead().p;
    std::function<void(const FpPoly&, int)> rec = [&](FpPoly a, int mult) {
        if (a.degree() <= 0)
            return;
        FpPoly d = a.derivative();
        if (d.zero()) {
            // a = b(x^p)
            std::vector<Fp> bc;
            for (int i = 0; i <= a.degree(); i += (int)p)
                bc.push_back(a.c[i]);  // Frobenius is the identity on F_p
            rec(FpPoly(bc), mult * (int)p);
            return;
        }
        FpPoly c = poly_gcd(a, d);
        FpPoly w = a / c;
        int i = 1;
        while (w.degree() > 0) {
            FpPoly y = poly_gcd(w, c);
            FpPoly z = w / y;
            if (z.degree() > 0)
                out.emplace_back(make_monic(z), i * mult);
            w = y;
            c = c / y;
            ++i;
        }
        if (c.degree() > 0)
            rec(c, mult);
    };
    rec(make_monic(f), 1);
    // merge equal multiplicities
    std::map<int, FpPoly> by;
    for (auto& [q, e] : out) {
        auto it = by.find(e);
        if (it == by.end())
            by.emplace(e, q);
        else
            it->second = it->second * q;
    }
    std::vector<std::pair<FpPoly, int>> merged;
    for (auto& [e, q] : by)
        merged.emplace_back(q, e);
    return merged;
}

// Distinct-degree factorization of a squarefree monic polynomial.
inline std::vector<std::pair<FpPoly, int>> distinct_degree(FpPoly f)
{
    std::vector<std::pair<FpPoly, int>> out;
    const std::uint64_t p = f.lead().p;
    Fp one(1, p);
    FpPoly x({Fp(0, p), one});
    FpPoly h = x;
    for (int d = 1; 2 * d <= f.degree(); ++d) {
        h = poly_pow_mod(h, Integer(p), f, one);
        FpPoly gd = poly_gcd(f, h - x);
        if (gd.degree() > 0) {
            out.emplace_back(gd, d);
            f = f / gd;
            h = h % f;
        }
    }
    if (f.degree() > 0)
        out.emplace_back(make_monic(f), f.degree());
    return out;
}

// Reciprocal-root data (1 - eps T^d) for the Frobenius orbits of roots of
// a product of degree-d irreducibles; eps = quadratic character of c u(alpha).
inline std::vector<Integer> toric_from_roots(const FpPoly& gd, int d, const FpPoly& cu)
{
    const std::uint64_t p = gd.lead().p;
    std::vector<Integer> poly{1};
    FiniteField F = ext_field(p, d);
    if (F.q() > (1u << 22))
        throw lfunction_error("toric factor needs a field of size > 2^22");
    FqTables T(F);
    auto lift = [&](const FpPoly& a) {
        std::vector<Fq> v;
        for (auto& c : a.c)
            v.emplace_back(T.from_int((std::int64_t)c.v), &T);
        return FqPoly(v);
    };
    FqPoly G = lift(gd), U = lift(cu);
    int found = 0;
    for (std::uint32_t x = 0; x < T.q(); ++x) {
        Fq X(x, &T);
        if (!is_zero(G(X)))
            continue;
        ++found;
        int eps = T.chi(U(X).v);
        if (eps == 0)
            throw lfunction_error("toric factor: branch value vanishes");
        // each orbit has d roots; record once per orbit, at its least element
        std::uint32_t y = x, least = x;
        for (int i = 1; i < d; ++i) {
            Fq Y(y, &T);
            Fq Z = Y;
            for (std::uint64_t j = 1; j < p; ++j)
                Z = Z * Y;
            y = Z.v;
            least = std::min(least, y);
        }
        if (least != x)
            continue;
        std::vector<Integer> fac(d + 1, 0);
        fac[0] = 1;
        fac[d] = -eps;
        std::vector<Integer> r(poly.size() + d, 0);
        for (std::size_t i = 0; i < poly.size(); ++i)
            for (int j = 0; j <= d; ++j)
                r[i + j] += poly[i] * fac[j];
        poly = r;
    }
    if (found != gd.degree())
        throw lfunction_error("toric factor: root count mismatch");
    return poly;
}

inline std::vector<Integer> poly_mul_z(const std::vector<Integer>& a, const std::vector<Integer>& b)
{
    std::vector<Integer> r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] += a[i] * b[j];
    while (r.size() > 1 && r.back() == 0)
        r.pop_back();
    return r;
}

}  // namespace detail

// Odd p: abelian part from the normalization Y^2 = c u (u the odd-multiplicity
// part of G mod p), toric part (1 - eps T^d) from the even-multiplicity roots.
inline std::optional<std::vector<Integer>> fibre_candidate_odd(const HyperellipticCurve& C, std::uint64_t p)
{
    if (p == 2)
        return std::nullopt;
    HyperellipticCurve M = integral_model(C);
    const int g = M.genus;
    FpPoly G = reduce_mod(M.G(), p);
    if (G.zero())
        return std::nullopt;
    Fp c = G.lead();
    int e_inf = 2 * g + 2 - G.degree();
    Fp one(1, p);
    FpPoly u = FpPoly::constant(one);
    std::vector<Integer> toric{1};
    auto parts = detail::squarefree_parts(G);
    std::vector<std::pair<FpPoly, int>> even;
    for (auto& [q, e] : parts) {
        if (e % 2 == 1)
            u = u * q;
        if (e % 2 == 0)
            even.emplace_back(q, e);
    }
    FpPoly cu = c * u;
    for (auto& [q, e] : even)
        for (auto& [gd, d] : detail::distinct_degree(q))
            toric = detail::poly_mul_z(toric, detail::toric_from_roots(gd, d, cu));
    int chi_c = powmod(c.v, (p - 1) / 2, p) == 1 ? 1 : -1;
    if (e_inf >= 2 && e_inf % 2 == 0)
        toric = detail::poly_mul_z(toric, {Integer(1), Integer(-chi_c)});
    int B = u.degree() + (e_inf % 2);
    std::vector<Integer> ab{1};
    if (B >= 4) {
        std::vector<Rational> lc;
        for (auto& a : cu.c)
            lc.emplace_back(Integer(a.v));
        HyperellipticCurve N = curve_new(QPoly(lc), QPoly());
        ab = frobenius_polynomial(N, p);
    } else if (B == 0) {
        // two rational components when c is a square: divide by (1 - chi(c) T)
        // synthetic division by (1 - root T): q_i = sum_{j<=i} r_j root^{i-j}
        Integer root = chi_c;
        std::vector<Integer> qq(toric.size() - 1, 0);
        Integer acc = 0;
        for (std::size_t i = 0; i + 1 < toric.size(); ++i) {
            acc = acc * root + toric[i];
            qq[i] = acc;
        }
        if (acc * root + toric.back() != 0)
            return std::nullopt;
        toric = qq;
    }
    return detail::poly_mul_z(ab, toric);
}

// Any p: Newton on the point counts of the Weierstrass special fibre.
inline std::optional<std::vector<Integer>> fibre_candidate_counts(const HyperellipticCurve& C, std::uint64_t p)
{
    HyperellipticCurve M = integral_model(C);
    const int g = M.genus;
    int Mx = 0;
    std::uint64_t q = 1;
    while (Mx < 2 * g && q <= (1u << 20) / p) {
        q *= p;
        ++Mx;
    }
    if (Mx == 0)
        return std::nullopt;
    auto N = fibre_counts(M, p, Mx);
    std::vector<Integer> s;
    Integer pm = 1;
    for (int m = 1; m <= Mx; ++m) {
        pm *= p;
        s.push_back(pm + 1 - Integer(N[m - 1]));
    }
    std::vector<Integer> c;
    try {
        c = newton_coefficients(s);
    } catch (const curve_error&) {
        return std::nullopt;
    }
    int d = Mx;
    while (d > 0 && c[d] == 0)
        --d;
    if (d == Mx && Mx < 2 * g)
        return std::nullopt;
    c.resize(d + 1);
    return c;
}

// Weil-type bounds |c_k| <= C(d,k) p^(k/2), enumerated (degree <= max_deg).
inline std::vector<std::vector<Integer>> weil_bounded_polys(std::uint64_t p, int max_deg, std::size_t cap)
{
    std::vector<std::vector<Integer>> out;
    for (int d = 0; d <= max_deg; ++d) {
        std::vector<std::int64_t> bound(d + 1, 0);
        double binom = 1;
        for (int k = 1; k <= d; ++k) {
            binom = binom * (d - k + 1) / k;
            bound[k] = (std::int64_t)std::floor(binom * std::pow((double)p, k / 2.0) + 1e-9);
        }
        std::vector<std::int64_t> c(d + 1, 0);
        c[0] = 1;
        std::function<void(int)> rec = [&](int k) {
            if (out.size() > cap)
                throw lfunction_error("Weil-bounded enumeration exceeds cap");
            if (k > d) {
                if (d > 0 && c[d] == 0)
                    return;
                std::vector<Integer> v;
                for (auto x : c)
                    v.emplace_back(x);
                out.push_back(v);
                return;
            }
            for (std::int64_t x = -bound[k]; x <= bound[k]; ++x) {
                c[k] = x;
                rec(k + 1);
            }
        };
        rec(1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Inverse Mellin kernel of Gamma(s)^g

struct LOptions {
    int digits = 12;          // target accuracy of Lambda sums
    // split point and test points for the residual; s = 1 is blind to the
    // exponents when w = +1 (the split is symmetric there), so stay off-centre
    double t = 3.0;
    std::vector<double> s_points{0.2, 0.6, 1.3};
    std::uint64_t cutoff = 0;  // 0: from the conductor
    double cutoff_scale = 1.0;
    unsigned precision = 40;  // minimum working digits
    double accept = 1e-8;
};

namespace detail {

// log10 of the largest term x^m/(m!)^g, with polylog slack
inline double max_term_log10(double x, int g)
{
    double lx = std::log(std::max(x, 1e-300)), best = 0;
    for (int m = 0; m < 100000; ++m) {
        double v = m * lx - g * std::lgamma(m + 1.0);
        best = std::max(best, v);
        if (m > std::pow(x, 1.0 / g) + 2)
            break;
    }
    return best / std::log(10.0) + g * std::log10(4 + std::abs(lx));
}

inline int terms_needed(double x, int g, int R, double digits)
{
    double lx = std::log(std::max(x, 1e-300));
    double root = std::pow(std::max(x, 0.0), 1.0 / g);
    for (int m = 0;; ++m) {
        double v = (m + 1) * lx - g * std::lgamma(m + 2.0) + (g + R) * std::log(4 + std::abs(lx) + std::log(m + 2.0));
        if (m + 1 > root && v < -digits * std::log(10.0))
            return m + 2;
        if (m > 5000)
            throw lfunction_error("kernel series does not converge");
    }
}

class GammaKernel {
public:
    // G_{s0 + delta}(x) = sum_a delta^a out[a], a <= R (R > 0 needs s0 = 1)
    GammaKernel(int g, const BigFloat& s0, int R, int M) : g_(g), R_(R), M_(M), s0_(s0)
    {
        if (R > 0 && s0 != 1)
            throw lfunction_error("GammaKernel: derivatives only at s0 = 1");
        const BigFloat euler = big_euler_gamma();
        std::vector<BigFloat> zeta(g + 1, BigFloat(0));
        for (int k = 2; k <= g; ++k)
            zeta[k] = big_zeta(k);
        std::vector<BigFloat> harm(g + 1, BigFloat(0));
        B_.assign((std::size_t)(M + 1) * g * (R + 1), BigFloat(0));
        BigFloat fact = 1;
        for (int m = 0; m <= M; ++m) {
            if (m > 0) {
                fact *= m;
                BigFloat im = BigFloat(1) / m, pw = im;
                for (int k = 1; k <= g; ++k) {
                    harm[k] += pw;
                    pw *= im;
                }
            }
            // H_{m,j}: exp(g * S_m(eps)) to order g-1
            std::vector<BigFloat> S(g, BigFloat(0)), E(g, BigFloat(0));
            for (int k = 1; k < g; ++k) {
                BigFloat sk = (k == 1) ? BigFloat(-euler + harm[1]) : BigFloat(((k % 2 == 0) ? zeta[k] : BigFloat(-zeta[k])) + harm[k]);
                S[k] = g * sk / k;
            }
            E[0] = 1;
            for (int n = 1; n < g; ++n) {
                BigFloat acc = 0;
                for (int k = 1; k <= n; ++k)
                    acc += k * S[k] * E[n - k];
                E[n] = acc / n;
            }
            BigFloat pref = 1 / mp::pow(fact, g);
            if ((m * g) % 2 == 1)
                pref = -pref;
            BigFloat c0 = BigFloat(m) + s0;
            // K[a][r] = -(-1)^a C(a+r, a) / c0^(a+r+1)
            std::vector<BigFloat> ic(g + R + 1);
            ic[0] = 1;
            for (int i = 1; i <= g + R; ++i)
                ic[i] = ic[i - 1] / c0;
            BigFloat kfact = 1;
            for (int k = 0; k < g; ++k) {
                if (k > 0)
                    kfact *= k;
                for (int a = 0; a <= R; ++a) {
                    BigFloat acc = 0;
                    for (int j = 0; j <= g - 1 - k; ++j) {
                        int r = g - 1 - k - j;
                        BigFloat K = binom(a + r, a) * ic[a + r + 1];
                        if (a % 2 == 0)
                            K = -K;
                        acc += E[j] * K;
                    }
                    BigFloat v = pref * acc / kfact;
                    if (k % 2 == 1)
                        v = -v;
                    B(m, k, a) = v;
                }
            }
        }
        // pole at z = s0
        if (R == 0) {
            gs_ = {mp::pow(big_gamma(s0), g)};
        } else {
            std::vector<BigFloat> S(R + 1, BigFloat(0));
            S[1] = -g * euler;
            for (int k = 2; k <= R; ++k)
                S[k] = g * ((k % 2 == 0) ? big_zeta(k) : BigFloat(-big_zeta(k))) / k;
            gs_.assign(R + 1, BigFloat(0));
            gs_[0] = 1;
            for (int n = 1; n <= R; ++n) {
                BigFloat acc = 0;
                for (int k = 1; k <= n; ++k)
                    acc += k * S[k] * gs_[n - k];
                gs_[n] = acc / n;
            }
        }
    }

    int max_terms() const { return M_; }

    // L = log x supplied by the caller (shared across kernels)
    std::vector<BigFloat> eval(const BigFloat& x, const BigFloat& L, int Mx) const
    {
        if (Mx > M_)
            throw lfunction_error("GammaKernel: series truncation beyond table");
        std::vector<BigFloat> out(R_ + 1, BigFloat(0));
        for (int a = 0; a <= R_; ++a) {
            BigFloat acc = 0, Lk = 1;
            for (int k = 0; k < g_; ++k) {
                BigFloat q = 0;
                for (int m = Mx; m >= 0; --m)
                    q = q * x + B(m, k, a);
                acc += q * Lk;
                Lk *= L;
            }
            out[a] = acc;
        }
        if (R_ == 0) {
            out[0] += gs_[0] * mp::exp(-s0_ * L);
        } else {
            BigFloat ix = 1 / x, ml = 1;
            std::vector<BigFloat> el(R_ + 1);
            for (int a = 0; a <= R_; ++a) {
                el[a] = ml;
                ml = ml * (-L) / (a + 1);
            }
            for (int a = 0; a <= R_; ++a) {
                BigFloat acc = 0;
                for (int i = 0; i <= a; ++i)
                    acc += gs_[i] * el[a - i];
                out[a] += ix * acc;
            }
        }
        return out;
    }

private:
    int g_, R_, M_;
    BigFloat s0_;
    std::vector<BigFloat> B_, gs_;

    BigFloat& B(int m, int k, int a) { return B_[((std::size_t)m * g_ + k) * (R_ + 1) + a]; }
    const BigFloat& B(int m, int k, int a) const { return B_[((std::size_t)m * g_ + k) * (R_ + 1) + a]; }
    static BigFloat binom(int n, int k)
    {
        BigFloat r = 1;
        for (int i = 1; i <= k; ++i)
            r = r * (n - k + i) / i;
        return r;
    }
};

}  // namespace detail

// Evaluation plan for a conductor: A, cutoff, working digits, series length.
struct LPlan {
    int g = 0;
    Integer N;
    double A = 0;
    double x_max = 0;
    std::uint64_t X = 0;
    unsigned digits = 0;
    double abs_digits = 0;
    int M = 0;
};

inline LPlan make_plan(int g, const Integer& N, const LOptions& o)
{
    LPlan P;
    P.g = g;
    P.N = N;
    P.A = std::sqrt(N.convert_to<double>()) / std::pow(2 * M_PI, g);
    double t = std::max(o.t, 1.0 / o.t);
    // tail: exp(-g x^(1/g)) X^1.5 < 10^-(D+1), X = x A t
    auto ok = [&](double x) {
        double X = std::max(x * P.A * t, 2.0);
        return g * std::pow(x, 1.0 / g) >= (o.digits + 1) * std::log(10.0) + 1.5 * std::log(X);
    };
    double lo = 1, hi = 2;
    while (!ok(hi))
        hi *= 2;
    for (int i = 0; i < 60; ++i) {
        double mid = std::sqrt(lo * hi);
        (ok(mid) ? hi : lo) = mid;
    }
    P.X = (std::uint64_t)std::ceil(hi * P.A * t * o.cutoff_scale);
    if (o.cutoff)
        P.X = (std::uint64_t)std::ceil(o.cutoff * o.cutoff_scale);
    P.X = std::max<std::uint64_t>(P.X, 10);
    P.x_max = (double)P.X * t / P.A;
    P.abs_digits = o.digits + 6 + std::log10((double)P.X);
    P.digits = (unsigned)std::max<double>(o.precision, std::ceil(P.abs_digits + detail::max_term_log10(P.x_max, g) + 10));
    P.M = detail::terms_needed(P.x_max, g, 4, P.abs_digits) + 2;
    return P;
}

struct FEResidual {
    std::vector<double> per_point;
    double max = 0;
};

// Residual |Lambda_t(s) - Lambda_{1/t}(s)| (the split-point form of
// Lambda(s) = w Lambda(2 - s)) for several coefficient vectors and both signs.
inline std::vector<std::array<FEResidual, 2>> fe_residuals(const LPlan& P, const std::vector<std::vector<std::int64_t>>& coeffs,
                                                          const LOptions& o)
{
    for (double s : o.s_points)
        if (!(s > 0 && s < 2))
            throw lfunction_error("fe_residuals: test points must lie in (0, 2), where both Gamma kernels are regular");
    if (!(o.t > 0) || o.t == 1)
        throw lfunction_error("fe_residuals: split point must be positive and != 1");
    precision_scope ps(P.digits);
    const int g = P.g;
    const BigFloat t(o.t), A = mp::sqrt(to_big(P.N)) / mp::pow(2 * big_pi(), g);
    std::size_t ns = o.s_points.size(), nc = coeffs.size();
    std::vector<detail::GammaKernel> Ks, Kd;  // s and 2 - s
    for (double s : o.s_points) {
        BigFloat sb(s);
        Ks.emplace_back(g, sb, 0, P.M);
        Kd.emplace_back(g, BigFloat(2 - sb), 0, P.M);
    }
    // acc[c][s] = {P1, P2, Q1, Q2}
    std::vector<std::vector<std::array<BigFloat, 4>>> acc(nc, std::vector<std::array<BigFloat, 4>>(ns));
    for (auto& v : acc)
        for (auto& a : v)
            a.fill(BigFloat(0));
    std::vector<BigFloat> ts(ns), tsm2(ns), tms(ns), t2ms(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        BigFloat s(o.s_points[i]);
        ts[i] = mp::pow(t, s);
        tsm2[i] = mp::pow(t, s - 2);
        tms[i] = mp::pow(t, -s);
        t2ms[i] = mp::pow(t, 2 - s);
    }
    const std::uint64_t X = P.X;
    for (auto& c : coeffs)
        if (c.size() < X + 1)
            throw lfunction_error("fe_residuals: coefficient vector shorter than the cutoff");
    for (std::uint64_t n = 1; n <= X; ++n) {
        bool any = false;
        for (auto& c : coeffs)
            any |= c[n] != 0;
        if (!any)
            continue;
        BigFloat x1 = BigFloat(n) * t / A, x2 = BigFloat(n) / (t * A);
        BigFloat L1 = mp::log(x1), L2 = mp::log(x2);
        int M1 = std::min(P.M, detail::terms_needed(x1.convert_to<double>(), g, 0, P.abs_digits));
        int M2 = std::min(P.M, detail::terms_needed(x2.convert_to<double>(), g, 0, P.abs_digits));
        for (std::size_t i = 0; i < ns; ++i) {
            BigFloat gs1 = Ks[i].eval(x1, L1, M1)[0], gs2 = Ks[i].eval(x2, L2, M2)[0];
            BigFloat gd1, gd2;
            if (o.s_points[i] == 1.0) {
                gd1 = gs1;
                gd2 = gs2;
            } else {
                gd1 = Kd[i].eval(x1, L1, M1)[0];
                gd2 = Kd[i].eval(x2, L2, M2)[0];
            }
            BigFloat p1 = ts[i] * gs1, p2 = tsm2[i] * gd2, q1 = tms[i] * gs2, q2 = t2ms[i] * gd1;
            for (std::size_t c = 0; c < nc; ++c) {
                std::int64_t an = coeffs[c][n];
                if (an == 0)
                    continue;
                auto& a = acc[c][i];
                a[0] += an * p1;
                a[1] += an * p2;
                a[2] += an * q1;
                a[3] += an * q2;
            }
        }
    }
    std::vector<std::array<FEResidual, 2>> out(nc);
    for (std::size_t c = 0; c < nc; ++c)
        for (int wi = 0; wi < 2; ++wi) {
            int w = wi == 0 ? 1 : -1;
            FEResidual r;
            for (std::size_t i = 0; i < ns; ++i) {
                auto& a = acc[c][i];
                BigFloat d = mp::abs(a[0] + w * a[1] - a[2] - w * a[3]);
                r.per_point.push_back(d.convert_to<double>());
                r.max = std::max(r.max, r.per_point.back());
            }
            out[c][wi] = r;
        }
    return out;
}

inline double functional_equation_residual(const LSeries& L, const LOptions& o = {})
{
    LPlan P = make_plan(L.g, L.N, o);
    if (L.cutoff < P.X)
        throw lfunction_error("functional_equation_residual: factors known to " + std::to_string(L.cutoff) + " < cutoff " +
                              std::to_string(P.X));
    auto a = dirichlet_coefficients(L, P.X);
    auto r = fe_residuals(P, {a}, o);
    return r[0][L.w == 1 ? 0 : 1].max;
}

// Taylor coefficients of L(1 + delta) up to delta^R.
inline std::vector<BigFloat> l_taylor(const LSeries& L, int R, const LOptions& o = {})
{
    LPlan P = make_plan(L.g, L.N, o);
    if (L.cutoff < P.X)
        throw lfunction_error("l_taylor: factors known to " + std::to_string(L.cutoff) + " < cutoff " + std::to_string(P.X));
    auto a = dirichlet_coefficients(L, P.X);
    precision_scope ps(P.digits);
    const int g = L.g;
    const BigFloat A = mp::sqrt(to_big(L.N)) / mp::pow(2 * big_pi(), g);
    detail::GammaKernel K(g, BigFloat(1), R, P.M);
    std::vector<BigFloat> lam(R + 1, BigFloat(0));
    for (std::uint64_t n = 1; n <= P.X; ++n) {
        if (a[n] == 0)
            continue;
        BigFloat x = BigFloat(n) / A, Lx = mp::log(x);
        int Mx = std::min(P.M, detail::terms_needed(x.convert_to<double>(), g, R, P.abs_digits));
        auto v = K.eval(x, Lx, Mx);
        for (int r = 0; r <= R; ++r) {
            int sg = (r % 2 == 0) ? 1 : -1;
            if (1 + L.w * sg != 0)
                lam[r] += (1 + L.w * sg) * a[n] * v[r];
        }
    }
    // L = Lambda / (A^(1+d) Gamma(1+d)^g)
    std::vector<BigFloat> S(R + 1, BigFloat(0)), E(R + 1, BigFloat(0));
    if (R >= 1)
        S[1] = -mp::log(A) + g * big_euler_gamma();
    for (int k = 2; k <= R; ++k)
        S[k] = -g * ((k % 2 == 0) ? big_zeta(k) : BigFloat(-big_zeta(k))) / k;
    E[0] = 1;
    for (int n = 1; n <= R; ++n) {
        BigFloat acc = 0;
        for (int k = 1; k <= n; ++k)
            acc += k * S[k] * E[n - k];
        E[n] = acc / n;
    }
    std::vector<BigFloat> out(R + 1, BigFloat(0));
    for (int n = 0; n <= R; ++n) {
        BigFloat acc = 0;
        for (int i = 0; i <= n; ++i)
            acc += lam[i] * E[n - i];
        out[n] = acc / A;
    }
    return out;
}

inline BigFloat l_derivative(const LSeries& L, int r, const LOptions& o = {})
{
    auto c = l_taylor(L, r, o);
    BigFloat f = 1;
    for (int i = 2; i <= r; ++i)
        f *= i;
    return c[r] * f;
}

struct RankResult {
    int rank = 0;
    BigFloat lead;  // L^(r)(1) / r!
    std::vector<BigFloat> derivatives;
};

inline RankResult analytic_rank(const LSeries& L, double eps = 1e-4, int max_r = 4, const LOptions& o = {})
{
    auto c = l_taylor(L, max_r, o);
    RankResult rr;
    BigFloat f = 1;
    for (int r = 0; r <= max_r; ++r) {
        if (r > 1)
            f *= r;
        rr.derivatives.push_back(c[r] * f);
    }
    for (int r = 0; r <= max_r; ++r) {
        // odd sign kills even orders and conversely
        if ((L.w == -1) == (r % 2 == 0))
            continue;
        if (mp::abs(rr.derivatives[r]) > eps) {
            rr.rank = r;
            rr.lead = c[r];
            return rr;
        }
    }
    throw lfunction_error("analytic_rank: all derivatives up to order " + std::to_string(max_r) + " vanish numerically");
}

// ---------------------------------------------------------------------------
// Bad-data search

struct BadPrimeHint {
    std::uint64_t p = 0;
    int n_components = 1;
    std::optional<std::pair<int, int>> f_range;
    std::vector<std::vector<Integer>> candidates;  // replaces the fibre candidates when nonempty
};

struct SearchAttempt {
    std::map<std::uint64_t, int> f;
    std::map<std::uint64_t, std::vector<Integer>> factor;
    int w = 1;
    double residual = 0;
};

struct SearchReport {
    LSeries series;
    double residual = 0;
    std::vector<SearchAttempt> attempts;
    std::map<std::uint64_t, ConductorGuess> ogg;
    std::vector<std::string> notes;
};

namespace detail {

struct PrimeOption {
    std::vector<Integer> poly;
    int f;
};

inline std::string poly_z_str(const std::vector<Integer>& c)
{
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i)
        s += (i ? " " : "") + c[i].str();
    return "[" + s + "]";
}

}  // namespace detail

inline SearchReport search_bad_data(const HyperellipticCurve& C, LSeries good, const std::vector<std::uint64_t>& bad,
                                    const std::vector<BadPrimeHint>& hints, const LOptions& o = {},
                                    EulerCache* cache = nullptr, std::ostream* log = nullptr)
{
    HyperellipticCurve M = integral_model(C);
    const int g = M.genus;
    Integer disc = integer_discriminant(M);
    SearchReport rep;
    std::map<std::uint64_t, std::vector<detail::PrimeOption>> opts, wide;
    for (auto p : bad) {
        BadPrimeHint h;
        h.p = p;
        for (auto& x : hints)
            if (x.p == p)
                h = x;
        std::vector<std::vector<Integer>> cands = h.candidates;
        if (cands.empty()) {
            auto add = [&](std::optional<std::vector<Integer>> c) {
                if (c && std::find(cands.begin(), cands.end(), *c) == cands.end())
                    cands.push_back(*c);
            };
            if (p != 2)
                add(fibre_candidate_odd(M, p));
            add(fibre_candidate_counts(M, p));
        }
        if (cands.empty())
            throw lfunction_error("no candidate local factor at p = " + std::to_string(p));
        int v = valuation(disc, Integer(p));
        ConductorGuess og = conductor_ogg_guess(v, h.n_components);
        rep.ogg[p] = og;
        for (auto& c : cands) {
            int tame = 2 * g - ((int)c.size() - 1);
            int lo = tame, hi = tame;
            if (h.f_range) {
                lo = h.f_range->first;
                hi = h.f_range->second;
            } else if (p == 2) {
                lo = std::max(tame, og.value - 2);
                hi = std::min(v, og.value + 2);
            } else if (p <= (std::uint64_t)(2 * g + 1)) {
                hi = std::min(v, tame + 2);
            }
            for (int f = lo; f <= hi; ++f)
                opts[p].push_back({c, f});
            if (p == 2 && !h.f_range)
                for (int f = tame; f <= v; ++f)
                    if (f < lo || f > hi)
                        wide[p].push_back({c, f});
        }
        if (opts[p].empty())
            throw lfunction_error("empty exponent range at p = " + std::to_string(p));
    }
    auto run = [&](const std::map<std::uint64_t, std::vector<detail::PrimeOption>>& table) {
        // all combinations, grouped by conductor
        std::map<Integer, std::vector<std::map<std::uint64_t, detail::PrimeOption>>> byN;
        std::vector<std::map<std::uint64_t, detail::PrimeOption>> combos{{}};
        for (auto& [p, list] : table) {
            std::vector<std::map<std::uint64_t, detail::PrimeOption>> next;
            for (auto& cmb : combos)
                for (auto& op : list) {
                    auto c2 = cmb;
                    c2[p] = op;
                    next.push_back(c2);
                }
            combos = next;
        }
        for (auto& cmb : combos) {
            Integer N = 1;
            for (auto& [p, op] : cmb)
                N *= mp::pow(Integer(p), op.f);
            byN[N].push_back(cmb);
        }
        for (auto& [N, list] : byN) {
            LPlan P = make_plan(g, N, o);
            fill_good_factors(M, good, P.X, cache);
            std::vector<std::vector<std::int64_t>> coeffs;
            for (auto& cmb : list) {
                LSeries L = good;
                L.N = N;
                for (auto& [p, op] : cmb)
                    L.factors[p] = LocalFactor{p, op.poly, 2 * g, false, op.f};
                coeffs.push_back(dirichlet_coefficients(L, P.X));
            }
            auto t0 = std::chrono::steady_clock::now();
            auto res = fe_residuals(P, coeffs, o);
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            for (std::size_t i = 0; i < list.size(); ++i)
                for (int wi = 0; wi < 2; ++wi) {
                    SearchAttempt at;
                    for (auto& [p, op] : list[i]) {
                        at.f[p] = op.f;
                        at.factor[p] = op.poly;
                    }
                    at.w = wi == 0 ? 1 : -1;
                    at.residual = res[i][wi].max;
                    if (log) {
                        *log << "  N=" << N << " w=" << at.w;
                        for (auto& [p, f] : at.f)
                            *log << " f" << p << "=" << f << " L" << p << "=" << detail::poly_z_str(at.factor[p]);
                        *log << " X=" << P.X << " residual=" << at.residual << " (" << secs << " s)\n";
                    }
                    rep.attempts.push_back(at);
                }
        }
    };
    run(opts);
    auto passing = [&]() {
        std::vector<SearchAttempt> ok;
        for (auto& a : rep.attempts)
            if (a.residual < o.accept)
                ok.push_back(a);
        return ok;
    };
    auto ok = passing();
    if (ok.empty() && !wide.empty()) {
        rep.notes.push_back("no candidate within Ogg guess +-2 at p = 2; widened to [tame bound, v(disc)]");
        // only the new exponents at 2
        std::map<std::uint64_t, std::vector<detail::PrimeOption>> fresh = opts;
        fresh[2] = wide[2];
        run(fresh);
        ok = passing();
    }
    if (ok.empty()) {
        double best = 1e300;
        for (auto& a : rep.attempts)
            best = std::min(best, a.residual);
        std::ostringstream os;
        os << "search_bad_data: no candidate passes the functional equation (best residual " << best << ")";
        throw lfunction_error(os.str());
    }
    if (ok.size() > 1) {
        std::ostringstream os;
        os << "search_bad_data: ambiguous, " << ok.size() << " candidates pass:";
        for (auto& a : ok) {
            os << " {w=" << a.w;
            for (auto& [p, f] : a.f)
                os << " f" << p << "=" << f << " L" << p << "=" << detail::poly_z_str(a.factor[p]);
            os << " r=" << a.residual << "}";
        }
        throw lfunction_error(os.str());
    }
    LSeries L = good;
    L.N = 1;
    L.w = ok[0].w;
    for (auto& [p, f] : ok[0].f) {
        L.factors[p] = LocalFactor{p, ok[0].factor[p], 2 * g, false, f};
        L.N *= mp::pow(Integer(p), f);
    }
    rep.series = L;
    rep.residual = ok[0].residual;
    return rep;
}

}  // namespace bsdkit
