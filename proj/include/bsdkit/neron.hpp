#pragma once

#include "bsdkit/curve.hpp"

#include <climits>
#include <fstream>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

namespace bsdkit {

struct neron_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Sparse multivariate polynomials over Q

struct MPoly {
    int n = 0;
    std::map<std::vector<int>, Rational> t;

    MPoly() = default;
    explicit MPoly(int nv) : n(nv) {}
    static MPoly constant(int nv, const Rational& c)
    {
        MPoly r(nv);
        if (c != 0)
            r.t[std::vector<int>(nv, 0)] = c;
        return r;
    }
    static MPoly var(int nv, int i)
    {
        MPoly r(nv);
        std::vector<int> e(nv, 0);
        e[i] = 1;
        r.t[e] = 1;
        return r;
    }
    static MPoly monomial(const std::vector<int>& e, const Rational& c = 1)
    {
        MPoly r((int)e.size());
        if (c != 0)
            r.t[e] = c;
        return r;
    }
    bool zero() const { return t.empty(); }
    void add_term(const std::vector<int>& e, const Rational& c)
    {
        auto it = t.find(e);
        if (it == t.end()) {
            if (c != 0)
                t.emplace(e, c);
            return;
        }
        it->second += c;
        if (it->second == 0)
            t.erase(it);
    }
    MPoly& operator+=(const MPoly& o)
    {
        for (auto& [e, c] : o.t)
            add_term(e, c);
        return *this;
    }
    MPoly& operator-=(const MPoly& o)
    {
        for (auto& [e, c] : o.t)
            add_term(e, -c);
        return *this;
    }
    MPoly operator-() const
    {
        MPoly r(n);
        for (auto& [e, c] : t)
            r.t.emplace(e, -c);
        return r;
    }
};

inline MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
inline MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
inline MPoly operator*(const MPoly& a, const MPoly& b)
{
    MPoly r(std::max(a.n, b.n));
    for (auto& [ea, ca] : a.t)
        for (auto& [eb, cb] : b.t) {
            std::vector<int> e(ea);
            for (std::size_t i = 0; i < e.size(); ++i)
                e[i] += eb[i];
            r.add_term(e, ca * cb);
        }
    return r;
}
inline MPoly operator*(const Rational& s, const MPoly& a)
{
    MPoly r(a.n);
    if (s == 0)
        return r;
    for (auto& [e, c] : a.t)
        r.t.emplace(e, s * c);
    return r;
}
inline bool operator==(const MPoly& a, const MPoly& b) { return a.t == b.t; }

inline MPoly mpow(const MPoly& a, int k)
{
    MPoly r = MPoly::constant(a.n, 1);
    for (int i = 0; i < k; ++i)
        r = r * a;
    return r;
}

inline MPoly derivative(const MPoly& a, int i)
{
    MPoly r(a.n);
    for (auto& [e, c] : a.t) {
        if (e[i] == 0)
            continue;
        std::vector<int> f(e);
        f[i] -= 1;
        r.add_term(f, c * e[i]);
    }
    return r;
}

// Exact division, lex leading terms; nullopt if b does not divide a.
inline std::optional<MPoly> divide_exact(MPoly a, const MPoly& b)
{
    if (b.zero())
        throw neron_error("division by the zero polynomial");
    MPoly q(a.n);
    auto lb = *b.t.rbegin();
    for (int guard = 0; !a.zero(); ++guard) {
        if (guard > 100000)
            throw neron_error("divide_exact: runaway division");
        auto la = *a.t.rbegin();
        std::vector<int> e(la.first);
        for (std::size_t i = 0; i < e.size(); ++i) {
            e[i] -= lb.first[i];
            if (e[i] < 0)
                return std::nullopt;
        }
        MPoly m = MPoly::monomial(e, la.second / lb.second);
        q += m;
        a -= m * b;
    }
    return q;
}

// min p-adic valuation of the coefficients
inline int content_valuation(const MPoly& a, const Integer& p)
{
    int v = INT_MAX;
    for (auto& [e, c] : a.t)
        v = std::min(v, valuation(c, p));
    return v;
}

inline std::string mpoly_str(const MPoly& a, const std::vector<std::string>& vars)
{
    if (a.zero())
        return "0";
    std::string s;
    for (auto it = a.t.rbegin(); it != a.t.rend(); ++it) {
        std::string c = rational_str(it->second);
        if (!s.empty())
            s += (c[0] == '-') ? " - " : " + ";
        else if (c[0] == '-')
            s += "-";
        if (c[0] == '-')
            c = c.substr(1);
        std::string m;
        for (std::size_t i = 0; i < it->first.size(); ++i) {
            if (!it->first[i])
                continue;
            if (!m.empty())
                m += "*";
            m += vars[i];
            if (it->first[i] > 1)
                m += "^" + std::to_string(it->first[i]);
        }
        if (m.empty())
            s += c;
        else if (c == "1")
            s += m;
        else
            s += c + "*" + m;
    }
    return s;
}

// value at a point of F_q^n; coefficients must be p-integral
inline std::uint32_t mpoly_eval(const MPoly& a, const FqTables& T, const std::vector<std::uint32_t>& pt)
{
    std::uint32_t s = 0;
    for (auto& [e, c] : a.t) {
        std::uint32_t v = T.from_rational(c);
        for (std::size_t i = 0; i < e.size() && v; ++i)
            for (int k = 0; k < e[i]; ++k)
                v = T.mul(v, pt[i]);
        s = T.add(s, v);
    }
    return s;
}

// num / (x^mono * p^pk)
struct RatFun {
    MPoly num;
    std::vector<int> mono;
    int pk = 0;
};

// Cancel common monomial and p-power factors between num and den.
inline void normalize(RatFun& f, std::uint64_t p)
{
    if (f.num.zero())
        return;
    const int n = f.num.n;
    std::vector<int> lo(f.mono);
    for (auto& [e, c] : f.num.t)
        for (int i = 0; i < n; ++i)
            lo[i] = std::min(lo[i], e[i]);
    int k = std::min(f.pk, content_valuation(f.num, Integer(p)));
    if (k < 0)
        k = 0;
    MPoly r(n);
    Rational s = 1 / Rational(Integer(mp::pow(Integer(p), k)));
    for (auto& [e, c] : f.num.t) {
        std::vector<int> g(e);
        for (int i = 0; i < n; ++i)
            g[i] -= lo[i];
        r.t.emplace(g, c * s);
    }
    f.num = r;
    for (int i = 0; i < n; ++i)
        f.mono[i] -= lo[i];
    f.pk -= k;
}

// ---------------------------------------------------------------------------
// Model data

struct ModelSample {
    int m = 1;                           // field degree
    std::vector<std::uint32_t> coords;   // base-p digits over ext_field(p, m)
};

struct RegularModelChart {
    std::string name;
    std::vector<std::string> vars;
    std::vector<MPoly> eqs;
    RatFun x, y;       // hyperelliptic coordinates on the chart
    int dist = 0;      // index of the distinguished coordinate
};

struct FibreComponent {
    std::string name;
    int chart = 0;
    std::vector<MPoly> ideal;
    MPoly uniformizer;
    bool uniformizer_is_p = false;
    int d = 1, e = 1;
    std::vector<ModelSample> samples;
};

struct RegularModel {
    std::uint64_t p = 0;
    std::vector<RegularModelChart> charts;
    std::vector<FibreComponent> components;
};

namespace detail {

inline Rational json_rational(const nlohmann::json& j)
{
    if (j.is_string())
        return parse_rational(j.get<std::string>());
    if (j.is_number_integer())
        return Rational(j.get<long long>());
    throw neron_error("coefficient must be an integer or a rational string");
}

inline MPoly json_poly(const nlohmann::json& j, int n)
{
    MPoly r(n);
    if (j.is_number_integer() || j.is_string())
        return MPoly::constant(n, json_rational(j));
    if (!j.is_array())
        throw neron_error("polynomial must be a list of [monomial, coeff] terms");
    for (auto& term : j) {
        if (!term.is_array() || term.size() != 2 || !term[0].is_array())
            throw neron_error("bad polynomial term " + term.dump());
        std::vector<int> e = term[0].get<std::vector<int>>();
        if ((int)e.size() != n)
            throw neron_error("monomial " + term[0].dump() + " has wrong arity");
        for (int x : e)
            if (x < 0)
                throw neron_error("negative exponent in " + term[0].dump());
        r.add_term(e, json_rational(term[1]));
    }
    return r;
}

inline RatFun json_ratfun(const nlohmann::json& j, int n)
{
    RatFun f;
    f.num = json_poly(j.at("num"), n);
    f.mono.assign(n, 0);
    if (j.contains("den")) {
        auto& d = j["den"];
        if (d.contains("mono"))
            f.mono = d["mono"].get<std::vector<int>>();
        f.pk = d.value("pk", 0);
        if ((int)f.mono.size() != n)
            throw neron_error("denominator monomial has wrong arity");
    }
    return f;
}

inline void require_integral(const MPoly& a, std::uint64_t p, const std::string& what)
{
    for (auto& [e, c] : a.t)
        if (mp::denominator(c) % p == 0)
            throw neron_error(what + " has a coefficient that is not " + std::to_string(p) + "-integral");
}

inline std::size_t rank_mod(std::vector<std::vector<std::uint32_t>> A, const FqTables& T)
{
    std::size_t r = 0;
    const std::size_t rows = A.size(), cols = rows ? A[0].size() : 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && A[piv][c] == 0)
            ++piv;
        if (piv == rows)
            continue;
        std::swap(A[piv], A[r]);
        std::uint32_t inv = T.inv(A[r][c]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || A[i][c] == 0)
                continue;
            std::uint32_t f = T.mul(A[i][c], inv);
            for (std::size_t k = c; k < cols; ++k)
                A[i][k] = T.sub(A[i][k], T.mul(f, A[r][k]));
        }
        ++r;
    }
    return r;
}

// One table per field degree, built on demand.
class FieldCache {
public:
    explicit FieldCache(std::uint64_t p) : p_(p) {}
    const FqTables& get(int m)
    {
        auto it = t_.find(m);
        if (it == t_.end())
            it = t_.emplace(m, std::make_unique<FqTables>(ext_field(p_, m))).first;
        return *it->second;
    }

private:
    std::uint64_t p_;
    std::map<int, std::unique_ptr<FqTables>> t_;
};

}  // namespace detail

inline RegularModel parse_model(const nlohmann::json& j)
{
    RegularModel M;
    M.p = j.at("p").get<std::uint64_t>();
    if (!is_prime(M.p))
        throw neron_error("model p = " + std::to_string(M.p) + " is not prime");
    int ci = 0;
    for (auto& cj : j.at("charts")) {
        RegularModelChart ch;
        ch.name = cj.value("name", "chart" + std::to_string(ci));
        ch.vars = cj.at("vars").get<std::vector<std::string>>();
        const int n = (int)ch.vars.size();
        if (n < 2)
            throw neron_error(ch.name + ": need at least two variables");
        for (auto& e : cj.at("eqs"))
            ch.eqs.push_back(detail::json_poly(e, n));
        if ((int)ch.eqs.size() != n - 1)
            throw neron_error(ch.name + ": " + std::to_string(ch.eqs.size()) + " equations in " + std::to_string(n) +
                              " variables; a relative complete intersection needs " + std::to_string(n - 1));
        auto& tr = cj.at("transition");
        ch.x = detail::json_ratfun(tr.at("x"), n);
        ch.y = detail::json_ratfun(tr.at("y"), n);
        std::string dc = cj.at("dist_coord").get<std::string>();
        auto it = std::find(ch.vars.begin(), ch.vars.end(), dc);
        if (it == ch.vars.end())
            throw neron_error(ch.name + ": dist_coord " + dc + " is not a chart variable");
        ch.dist = (int)(it - ch.vars.begin());
        for (auto& g : ch.eqs)
            detail::require_integral(g, M.p, ch.name + " equation");
        M.charts.push_back(std::move(ch));
        ++ci;
    }
    int k = 0;
    for (auto& cj : j.at("components")) {
        FibreComponent F;
        F.chart = cj.at("chart").get<int>();
        if (F.chart < 0 || F.chart >= (int)M.charts.size())
            throw neron_error("component refers to missing chart " + std::to_string(F.chart));
        F.name = cj.value("name", "G" + std::to_string(k));
        const int n = (int)M.charts[F.chart].vars.size();
        for (auto& e : cj.value("ideal", nlohmann::json::array()))
            F.ideal.push_back(detail::json_poly(e, n));
        auto& u = cj.at("uniformizer");
        if ((u.is_string() && u.get<std::string>() == "p") || (u.is_number_integer() && u.get<long long>() == (long long)M.p))
            F.uniformizer_is_p = true;
        else
            F.uniformizer = detail::json_poly(u, n);
        F.d = cj.at("d").get<int>();
        F.e = cj.at("e").get<int>();
        if (F.d < 1 || F.e < 1)
            throw neron_error(F.name + ": multiplicities must be positive");
        if (F.uniformizer_is_p && F.d != 1)
            throw neron_error(F.name + ": p can only be a uniformizer on a reduced component");
        for (auto& s : cj.at("samples")) {
            ModelSample S;
            S.m = s.at(0).get<int>();
            S.coords = s.at(1).get<std::vector<std::uint32_t>>();
            if ((int)S.coords.size() != n)
                throw neron_error(F.name + ": sample has wrong arity");
            F.samples.push_back(S);
        }
        M.components.push_back(std::move(F));
        ++k;
    }
    return M;
}

// Sample points lie on the chart and on the component, the uniformizer
// vanishes there, and the fibre is smooth there (Jacobian rank n - 1).
inline void validate_model(const RegularModel& M)
{
    detail::FieldCache fc(M.p);
    std::map<std::string, std::pair<int, int>> mult;
    for (auto& F : M.components) {
        const auto& ch = M.charts[F.chart];
        const int n = (int)ch.vars.size();
        auto seen = mult.emplace(F.name, std::make_pair(F.d, F.e));
        if (!seen.second && seen.first->second != std::make_pair(F.d, F.e))
            throw neron_error(F.name + ": multiplicities differ between charts");
        if (F.samples.size() < 3)
            throw neron_error(F.name + ": at least 3 sample points required");
        for (auto& g : F.ideal)
            detail::require_integral(g, M.p, F.name + " ideal");
        if (!F.uniformizer_is_p)
            detail::require_integral(F.uniformizer, M.p, F.name + " uniformizer");
        for (auto& S : F.samples) {
            const FqTables& T = fc.get(S.m);
            for (auto c : S.coords)
                if (c >= T.q())
                    throw neron_error(F.name + ": sample coordinate outside F_q");
            for (auto& g : ch.eqs)
                if (mpoly_eval(g, T, S.coords) != 0)
                    throw neron_error(F.name + ": sample point is not on the chart");
            for (auto& g : F.ideal)
                if (mpoly_eval(g, T, S.coords) != 0)
                    throw neron_error(F.name + ": sample point is not on the component");
            if (!F.uniformizer_is_p && mpoly_eval(F.uniformizer, T, S.coords) != 0)
                throw neron_error(F.name + ": uniformizer does not vanish at a sample point");
            std::vector<std::vector<std::uint32_t>> Jm;
            for (auto& g : ch.eqs) {
                std::vector<std::uint32_t> row;
                for (int i = 0; i < n; ++i)
                    row.push_back(mpoly_eval(derivative(g, i), T, S.coords));
                Jm.push_back(row);
            }
            if ((int)detail::rank_mod(Jm, T) != n - 1)
                throw neron_error(F.name + ": Jacobian rank deficient at a sample point");
        }
    }
}

inline RegularModel load_model(const std::string& path, std::uint64_t p)
{
    std::ifstream in(path);
    if (!in)
        throw neron_error("cannot open model file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw neron_error(path + ": " + e.what());
    }
    if (j.value("schema", "") != "bsdkit.model/1")
        throw neron_error(path + ": expected schema bsdkit.model/1");
    RegularModel M = parse_model(j);
    if (M.p != p)
        throw neron_error(path + ": model is for p = " + std::to_string(M.p) + ", wanted " + std::to_string(p));
    validate_model(M);
    return M;
}

// ---------------------------------------------------------------------------
// Densities

namespace detail {

// general fraction a / b during the pullback
struct Frac {
    MPoly a, b;
};
inline Frac fmul(const Frac& x, const Frac& y) { return {x.a * y.a, x.b * y.b}; }
inline Frac fadd(const Frac& x, const Frac& y)
{
    if (x.b == y.b)
        return {x.a + y.a, x.b};
    return {x.a * y.b + y.a * x.b, x.b * y.b};
}
inline Frac fsub(const Frac& x, const Frac& y) { return fadd(x, {-y.a, y.b}); }
inline Frac from_ratfun(const RatFun& f, std::uint64_t p)
{
    Rational pp = Rational(Integer(mp::pow(Integer(p), f.pk)));
    return {f.num, MPoly::monomial(f.mono, pp)};
}
inline Frac fderiv(const Frac& f, int i)
{
    return {derivative(f.a, i) * f.b - f.a * derivative(f.b, i), f.b * f.b};
}

inline MPoly poly_det(std::vector<std::vector<MPoly>> A, int nv)
{
    const int n = (int)A.size();
    if (n == 0)
        return MPoly::constant(nv, 1);
    if (n == 1)
        return A[0][0];
    MPoly s(nv);
    for (int c = 0; c < n; ++c) {
        std::vector<std::vector<MPoly>> minor;
        for (int r = 1; r < n; ++r) {
            std::vector<MPoly> row;
            for (int k = 0; k < n; ++k)
                if (k != c)
                    row.push_back(A[r][k]);
            minor.push_back(row);
        }
        MPoly term = A[0][c] * poly_det(minor, nv);
        if (c % 2)
            s -= term;
        else
            s += term;
    }
    return s;
}

// b = c * x^mono * p^k * rest; returns (mono, k, c, rest)
struct SplitDen {
    std::vector<int> mono;
    int pk = 0;
    Rational unit = 1;
    MPoly rest;
};
inline SplitDen split_denominator(const MPoly& b, std::uint64_t p)
{
    SplitDen S;
    const int n = b.n;
    S.mono.assign(n, INT_MAX);
    for (auto& [e, c] : b.t)
        for (int i = 0; i < n; ++i)
            S.mono[i] = std::min(S.mono[i], e[i]);
    S.pk = content_valuation(b, p);
    // pull out the rational content too so rest is primitive
    Rational cont = 0;
    Integer num = 0, den = 1;
    for (auto& [e, c] : b.t) {
        num = mp::gcd(num, mp::numerator(c));
        den = mp::lcm(den, mp::denominator(c));
    }
    cont = Rational(num, den);
    Rational pp = Rational(Integer(mp::pow(Integer(p), std::abs(S.pk))));
    if (S.pk < 0)
        pp = 1 / pp;
    S.unit = cont / pp;
    S.rest = MPoly(n);
    for (auto& [e, c] : b.t) {
        std::vector<int> f(e);
        for (int i = 0; i < n; ++i)
            f[i] -= S.mono[i];
        S.rest.add_term(f, c / cont);
    }
    return S;
}

}  // namespace detail

// Density of x^(j-1) dx / (2y + h) on the chart for j = 1..g: the pullback
// written as f dx_n, times det(dg_i/dx_k) over the other coordinates.
inline std::vector<RatFun> standard_densities(const HyperellipticCurve& C, const RegularModelChart& ch, std::uint64_t p)
{
    using namespace detail;
    const int n = (int)ch.vars.size();
    std::vector<int> others;
    for (int i = 0; i < n; ++i)
        if (i != ch.dist)
            others.push_back(i);
    // Jacobian over the other coordinates and its adjugate
    std::vector<std::vector<MPoly>> Jm(n - 1, std::vector<MPoly>(n - 1));
    for (int r = 0; r < n - 1; ++r)
        for (int c = 0; c < n - 1; ++c)
            Jm[r][c] = derivative(ch.eqs[r], others[c]);
    MPoly det = poly_det(Jm, n);
    // moving dist to the last slot costs (n-1-dist) transpositions
    if ((n - 1 - ch.dist) % 2)
        det = -det;
    std::vector<std::vector<MPoly>> adj(n - 1, std::vector<MPoly>(n - 1, MPoly(n)));
    for (int r = 0; r < n - 1; ++r)
        for (int c = 0; c < n - 1; ++c) {
            std::vector<std::vector<MPoly>> minor;
            for (int i = 0; i < n - 1; ++i) {
                if (i == r)
                    continue;
                std::vector<MPoly> row;
                for (int k = 0; k < n - 1; ++k)
                    if (k != c)
                        row.push_back(Jm[i][k]);
                minor.push_back(row);
            }
            MPoly m = poly_det(minor, n);
            adj[c][r] = ((r + c) % 2) ? -m : m;
        }
    if ((n - 1 - ch.dist) % 2)
        for (auto& row : adj)
            for (auto& x : row)
                x = -x;
    MPoly one = MPoly::constant(n, 1);
    Frac X = from_ratfun(ch.x, p), Y = from_ratfun(ch.y, p);
    // det * dx/dx_n = det * X_n - grad' X . adj . v
    Frac dX = fmul({det, one}, fderiv(X, ch.dist));
    for (int a = 0; a < n - 1; ++a) {
        Frac Xa = fderiv(X, others[a]);
        if (Xa.a.zero())
            continue;
        MPoly s(n);
        for (int b = 0; b < n - 1; ++b)
            s += adj[a][b] * derivative(ch.eqs[b], ch.dist);
        dX = fsub(dX, fmul(Xa, {s, one}));
    }
    // 2Y + H(X)
    Frac H{MPoly(n), one};
    for (int i = C.h.degree(); i >= 0; --i)
        H = fadd(fmul(H, X), {MPoly::constant(n, C.h.c[i]), one});
    Frac W = fadd(fmul({MPoly::constant(n, 2), one}, Y), H);
    if (W.a.zero())
        throw neron_error(ch.name + ": 2y + h vanishes identically on the chart");
    std::vector<RatFun> out;
    Frac Xp{one, one};
    for (int j = 0; j < C.genus; ++j) {
        Frac d = fmul(Xp, dX);
        MPoly num = d.a * W.b, den = d.b * W.a;
        if (num.zero())
            throw neron_error(ch.name + ": dx_" + ch.vars[ch.dist] + " is degenerate; choose another distinguished coordinate");
        SplitDen S = split_denominator(den, p);
        auto q = divide_exact(num, S.rest);
        if (!q)
            throw neron_error(ch.name + ": density denominator is not a monomial times a power of p");
        RatFun r;
        r.num = (1 / S.unit) * *q;
        r.mono = S.mono;
        r.pk = S.pk;
        normalize(r, p);
        out.push_back(r);
        Xp = fmul(Xp, X);
    }
    return out;
}

// Rational combination of densities over a common denominator.
inline RatFun combine(const std::vector<RatFun>& D, const std::vector<Rational>& coeff, std::uint64_t p)
{
    const int n = D[0].num.n;
    RatFun r;
    r.mono.assign(n, 0);
    r.pk = INT_MIN;
    for (std::size_t j = 0; j < D.size(); ++j) {
        if (coeff[j] == 0)
            continue;
        for (int i = 0; i < n; ++i)
            r.mono[i] = std::max(r.mono[i], D[j].mono[i]);
        r.pk = std::max(r.pk, D[j].pk);
    }
    r.num = MPoly(n);
    if (r.pk == INT_MIN) {
        r.pk = 0;
        return r;
    }
    for (std::size_t j = 0; j < D.size(); ++j) {
        if (coeff[j] == 0)
            continue;
        std::vector<int> e(n);
        for (int i = 0; i < n; ++i)
            e[i] = r.mono[i] - D[j].mono[i];
        Rational s = coeff[j] * Rational(Integer(mp::pow(Integer(p), r.pk - D[j].pk)));
        r.num += MPoly::monomial(e, s) * D[j].num;
    }
    normalize(r, p);
    return r;
}

inline RatFun canonical_density(const HyperellipticCurve& C, const RegularModelChart& ch, std::uint64_t p,
                                const std::vector<Rational>& omega)
{
    return combine(standard_densities(C, ch, p), omega, p);
}

// ---------------------------------------------------------------------------
// Valuations along a component

constexpr int kValuationInfinity = INT_MAX / 4;

namespace detail {

// points of the component over F_{p^m}, up to a budget
inline std::optional<bool> witness_search(const MPoly& f, const RegularModelChart& ch, const FibreComponent& F,
                                          std::uint64_t p, FieldCache& fc, std::uint64_t budget = (1u << 21))
{
    const int n = (int)ch.vars.size();
    for (int m = 1; m <= 6; ++m) {
        const FqTables& T = fc.get(m);
        double cost = std::pow((double)T.q(), n);
        if (cost > (double)budget)
            return std::nullopt;
        std::vector<std::uint32_t> pt(n, 0);
        for (;;) {
            bool on = true;
            for (auto& g : ch.eqs)
                if (mpoly_eval(g, T, pt) != 0) {
                    on = false;
                    break;
                }
            if (on)
                for (auto& g : F.ideal)
                    if (mpoly_eval(g, T, pt) != 0) {
                        on = false;
                        break;
                    }
            if (on && !F.uniformizer_is_p && mpoly_eval(F.uniformizer, T, pt) != 0)
                on = false;
            if (on && mpoly_eval(f, T, pt) != 0)
                return true;
            int i = 0;
            while (i < n && ++pt[i] == T.q())
                pt[i++] = 0;
            if (i == n)
                break;
        }
    }
    (void)p;
    return std::nullopt;
}

}  // namespace detail

// v_G(f) for a polynomial: d * v_p(content) plus exact divisions by the
// uniformizer, with the cofactor witnessed nonzero at a point of G.
inline int poly_valuation(const MPoly& f, const RegularModel& M, const FibreComponent& F)
{
    if (f.zero())
        return kValuationInfinity;
    const auto& ch = M.charts[F.chart];
    Integer p(M.p);
    int a = content_valuation(f, p);
    Rational scale = Rational(Integer(mp::pow(p, std::abs(a))));
    MPoly g = (a >= 0 ? 1 / scale : scale) * f;
    int k = 0;
    if (!F.uniformizer_is_p) {
        for (;;) {
            auto q = divide_exact(g, F.uniformizer);
            if (!q)
                break;
            g = *q;
            if (++k > 64)
                throw neron_error(F.name + ": runaway division by the uniformizer");
        }
    }
    detail::FieldCache fc(M.p);
    for (auto& S : F.samples)
        if (mpoly_eval(g, fc.get(S.m), S.coords) != 0)
            return a * F.d + k;
    if (detail::witness_search(g, ch, F, M.p, fc))
        return a * F.d + k;
    throw neron_error(F.name + ": cannot decide valuation of " + mpoly_str(g, ch.vars) +
                      "; the model file needs more sample points");
}

inline int component_valuation(const RatFun& dens, const RegularModel& M, const FibreComponent& F)
{
    if (dens.num.zero())
        return kValuationInfinity;
    const auto& ch = M.charts[F.chart];
    const int n = (int)ch.vars.size();
    int v = poly_valuation(dens.num, M, F) - dens.pk * F.d;
    for (int i = 0; i < n; ++i)
        if (dens.mono[i])
            v -= dens.mono[i] * poly_valuation(MPoly::var(n, i), M, F);
    return v;
}

// ---------------------------------------------------------------------------
// Basis adjustment

struct PrimeAdjustment {
    std::uint64_t p = 0;
    int a = 0;   // Step 5 multiplications by p
    int b = 0;   // Step 6 divisions by p
    bool fast_path = false;
    bool model = false;
};

struct DifferentialBasis {
    int g = 0;
    std::vector<std::vector<Rational>> M;   // rows: current basis in terms of x^(j-1) dx / (2y + h)
    std::vector<PrimeAdjustment> primes;
    std::vector<std::string> notes;
    Rational W() const
    {
        Rational w = 1;
        for (auto& pa : primes) {
            Rational pp = Rational(Integer(mp::pow(Integer(pa.p), std::abs(pa.a - pa.b))));
            w *= (pa.a >= pa.b) ? pp : 1 / pp;
        }
        return w;
    }
};

inline Rational rational_det(std::vector<std::vector<Rational>> A)
{
    const int n = (int)A.size();
    Rational det = 1;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        while (piv < n && A[piv][k] == 0)
            ++piv;
        if (piv == n)
            return 0;
        if (piv != k) {
            std::swap(A[piv], A[k]);
            det = -det;
        }
        det *= A[k][k];
        for (int i = k + 1; i < n; ++i) {
            if (A[i][k] == 0)
                continue;
            Rational f = A[i][k] / A[k][k];
            for (int j = k; j < n; ++j)
                A[i][j] -= f * A[k][j];
        }
    }
    return det;
}

// p odd, p not dividing the leading coefficient, v_p(disc) <= 1.
inline bool regular_fast_path(const HyperellipticCurve& C, std::uint64_t p)
{
    if (p == 2)
        return false;
    HyperellipticCurve I = integral_model(C);
    QPoly G = I.G();
    Integer lc = mp::numerator(G.lead());
    if (lc % p == 0)
        return false;
    return valuation(integer_discriminant(C), Integer(p)) <= 1;
}

namespace detail {

struct ComponentDensities {
    const RegularModel* model;
    const FibreComponent* comp;
    std::vector<RatFun> dens;   // standard basis densities on the component's chart
};

inline int row_valuation(const ComponentDensities& cd, const std::vector<Rational>& row)
{
    return component_valuation(combine(cd.dens, row, cd.model->p), *cd.model, *cd.comp);
}

inline void check_det(const DifferentialBasis& B)
{
    Rational d = rational_det(B.M);
    if (d < 0)
        d = -d;
    if (d != B.W())
        throw neron_error("basis determinant " + rational_str(d) + " disagrees with the adjustment counters");
}

}  // namespace detail

// Steps 5 and 6 at one prime, on the shared basis.
inline PrimeAdjustment adjust_at_prime(const HyperellipticCurve& C, const RegularModel& M, DifferentialBasis& B,
                                       std::ostream* log = nullptr)
{
    const int g = C.genus;
    const std::uint64_t p = M.p;
    PrimeAdjustment pa;
    pa.p = p;
    pa.model = true;
    std::vector<detail::ComponentDensities> cds;
    std::map<int, std::vector<RatFun>> per_chart;
    for (auto& F : M.components) {
        auto it = per_chart.find(F.chart);
        if (it == per_chart.end())
            it = per_chart.emplace(F.chart, standard_densities(C, M.charts[F.chart], p)).first;
        cds.push_back({&M, &F, it->second});
    }
    B.primes.push_back(pa);
    auto& cur = B.primes.back();
    Rational P(Integer(p), 1);
    // Step 5: clear poles
    for (int iter = 0;; ++iter) {
        if (iter >= 64)
            throw neron_error("adjust_basis: no fixed point after 64 iterations at p = " + std::to_string(p));
        bool changed = false;
        for (int i = 0; i < g; ++i)
            for (auto& cd : cds)
                if (detail::row_valuation(cd, B.M[i]) < 0) {
                    for (auto& x : B.M[i])
                        x *= P;
                    ++cur.a;
                    changed = true;
                    detail::check_det(B);
                    break;
                }
        if (!changed)
            break;
    }
    // Step 6: combinations vanishing on the whole special fibre
    std::uint64_t scan = 1;
    for (int i = 0; i < g; ++i)
        scan *= p;
    if (scan > 200000 && log)
        *log << "adjust_basis: scanning " << scan << " combinations at p = " << p << "\n";
    for (int iter = 0;; ++iter) {
        if (iter >= 64)
            throw neron_error("adjust_basis: no fixed point after 64 iterations at p = " + std::to_string(p));
        bool changed = false;
        std::vector<std::uint64_t> c(g, 0);
        for (std::uint64_t idx = 1; idx < scan && !changed; ++idx) {
            std::uint64_t t = idx;
            for (int i = 0; i < g; ++i) {
                c[i] = t % p;
                t /= p;
            }
            int lead = 0;
            while (c[lead] == 0)
                ++lead;
            if (c[lead] != 1)
                continue;   // scalar multiples give the same test
            std::vector<Rational> row(g, Rational(0));
            for (int i = 0; i < g; ++i)
                if (c[i])
                    for (int j = 0; j < g; ++j)
                        row[j] += Rational((long)c[i]) * B.M[i][j];
            bool all = true;
            for (auto& cd : cds)
                if (detail::row_valuation(cd, row) < 1) {
                    all = false;
                    break;
                }
            if (!all)
                continue;
            for (auto& x : row)
                x /= P;
            B.M[lead] = row;
            ++cur.b;
            changed = true;
            detail::check_det(B);
        }
        if (!changed)
            break;
    }
    if (log)
        *log << "p = " << p << ": a = " << cur.a << ", b = " << cur.b << "\n";
    return cur;
}

inline DifferentialBasis identity_basis(int g)
{
    DifferentialBasis B;
    B.g = g;
    B.M.assign(g, std::vector<Rational>(g, Rational(0)));
    for (int i = 0; i < g; ++i)
        B.M[i][i] = 1;
    return B;
}

// models: prime -> model data. Bad primes outside the fast path need a model.
inline DifferentialBasis adjust_basis(const HyperellipticCurve& C, const std::vector<std::uint64_t>& bad,
                                      const std::map<std::uint64_t, RegularModel>& models, std::ostream* log = nullptr)
{
    DifferentialBasis B = identity_basis(C.genus);
    for (auto p : bad) {
        auto it = models.find(p);
        if (it != models.end()) {
            adjust_at_prime(C, it->second, B, log);
            continue;
        }
        if (!regular_fast_path(C, p))
            throw neron_error("no regular-model data for p = " + std::to_string(p) +
                              " and the Weierstrass model is not known to be regular there");
        PrimeAdjustment pa;
        pa.p = p;
        pa.fast_path = true;
        B.primes.push_back(pa);
        B.notes.push_back("p = " + std::to_string(p) + ": Weierstrass model regular with integral fibre, no adjustment");
    }
    return B;
}

inline BigFloat corrected_real_period(const BigFloat& raw, const DifferentialBasis& B)
{
    return to_big(B.W()) * raw;
}

}  // namespace bsdkit
