#pragma once

#include "bsdkit/curve.hpp"
#include "bsdkit/jacobian.hpp"
#include "bsdkit/lfunction.hpp"
#include "bsdkit/neron.hpp"
#include "bsdkit/periods.hpp"
#include "bsdkit/shacheck.hpp"
#include "bsdkit/tamagawa.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>

#include <unistd.h>

namespace bsdkit {

struct pipeline_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Curve files
//
// {"schema": "bsdkit.curve/1", "name": "...", "f": [c0, c1, ...], "h": [...],
//  "hints": {"2": {"n_components": 2, "f_range": [a, b], "candidates": [[1, ...]]}}}
// Coefficients low to high, integers or "num/den" strings.

struct CurveInput {
    std::string name;
    HyperellipticCurve curve;
    std::vector<BadPrimeHint> hints;
};

namespace detail {

inline QPoly json_qpoly(const nlohmann::json& a)
{
    std::vector<Rational> c;
    for (auto& v : a) {
        if (v.is_string())
            c.push_back(parse_rational(v.get<std::string>()));
        else if (v.is_number_integer())
            c.emplace_back(v.get<long long>());
        else
            throw pipeline_error("curve coefficient must be an integer or a rational string");
    }
    return QPoly(c);
}

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw pipeline_error("cannot open " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::string hex64(std::uint64_t h)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace detail

inline CurveInput parse_curve(const nlohmann::json& j)
{
    if (j.value("schema", "") != "bsdkit.curve/1")
        throw pipeline_error("curve file: expected schema bsdkit.curve/1");
    CurveInput in;
    in.name = j.value("name", "");
    QPoly f = detail::json_qpoly(j.at("f"));
    QPoly h = j.contains("h") ? detail::json_qpoly(j["h"]) : QPoly();
    in.curve = curve_new(f, h);
    if (j.contains("hints"))
        for (auto& [key, v] : j["hints"].items()) {
            BadPrimeHint bh;
            bh.p = std::stoull(key);
            bh.n_components = v.value("n_components", 0);
            if (v.contains("f_range"))
                bh.f_range = std::make_pair(v["f_range"][0].get<int>(), v["f_range"][1].get<int>());
            if (v.contains("candidates"))
                for (auto& c : v["candidates"]) {
                    std::vector<Integer> poly;
                    for (auto& x : c)
                        poly.emplace_back(x.get<long long>());
                    bh.candidates.push_back(poly);
                }
            in.hints.push_back(bh);
        }
    return in;
}

inline CurveInput load_curve(const std::string& path)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw pipeline_error(path + ": " + e.what());
    }
    return parse_curve(j);
}

// ---------------------------------------------------------------------------
// Config and stage cache

struct VerifyConfig {
    std::string curve_path;
    std::string models_dir;
    unsigned precision = 40;
    std::optional<std::uint64_t> lcutoff;
    double cutoff_scale = 1.0;
    std::optional<std::string> regulator;   // decimal string
    std::optional<Integer> torsion;
    int search_bound = 4;
    std::uint64_t torsion_prime_bound = 30;
    double residual_accept = 1e-8;
    double rank_eps = 1e-4;
    double square_tol = 1e-6;
    long max_den = 10000;
    std::optional<std::filesystem::path> cache_root;   // defaults to BSDKIT_CACHE
    std::ostream* log = nullptr;

    LOptions lopts() const
    {
        LOptions o;
        o.precision = precision;
        o.cutoff = lcutoff.value_or(0);
        o.cutoff_scale = cutoff_scale;
        o.accept = residual_accept;
        return o;
    }
};

// One JSON file per (curve hash, stage, precision, cutoff). Writes go through
// a temporary file and rename, so readers never see a partial record.
class StageCache {
public:
    StageCache() = default;
    StageCache(const std::filesystem::path& root, const std::string& hash, const VerifyConfig& cfg)
        : dir_(root / hash)
    {
        std::ostringstream os;
        os << "p" << cfg.precision << "-x";
        if (cfg.lcutoff)
            os << *cfg.lcutoff;
        else
            os << "auto";
        if (cfg.cutoff_scale != 1.0)
            os << "s" << cfg.cutoff_scale;
        key_ = os.str();
    }
    bool enabled() const { return !dir_.empty(); }
    std::filesystem::path path(const std::string& stage) const { return dir_ / ("stage-" + stage + "-" + key_ + ".json"); }
    std::optional<ojson> get(const std::string& stage) const
    {
        if (!enabled())
            return std::nullopt;
        std::ifstream in(path(stage));
        if (!in)
            return std::nullopt;
        auto j = ojson::parse(in, nullptr, false);
        if (j.is_discarded() || j.value("schema", "") != "bsdkit.stage/1" || j.value("stage", "") != stage)
            return std::nullopt;
        return j["data"];
    }
    void put(const std::string& stage, const ojson& data) const
    {
        if (!enabled())
            return;
        ojson j;
        j["schema"] = "bsdkit.stage/1";
        j["stage"] = stage;
        j["data"] = data;
        std::filesystem::create_directories(dir_);
        auto tmp = path(stage);
        tmp += ".tmp." + std::to_string(::getpid());
        {
            std::ofstream os(tmp);
            if (!os)
                throw pipeline_error("cannot write cache " + tmp.string());
            os << j.dump() << "\n";
        }
        std::filesystem::rename(tmp, path(stage));
    }

private:
    std::filesystem::path dir_;
    std::string key_;
};

// ---------------------------------------------------------------------------
// Report

struct TamagawaEntry {
    Integer c = 1;
    std::string source;       // intersection | single_component | fast_path
    std::vector<Integer> invariants;
    std::string data_hash;
};

struct BSDReport {
    ojson json;                                       // canonical, reproducible
    std::vector<std::pair<std::string, double>> timings;
    ShaClass verdict = ShaClass::neither;

    int exit_code() const { return verdict == ShaClass::neither ? 1 : 0; }
};

namespace detail {

inline ojson tagged(ojson v, const char* prov)
{
    ojson t;
    t["value"] = std::move(v);
    t["provenance"] = prov;
    return t;
}

inline std::vector<std::string> zvec_str(const std::vector<Integer>& c)
{
    std::vector<std::string> s;
    for (auto& x : c)
        s.push_back(x.str());
    return s;
}

inline std::vector<Integer> zvec_parse(const ojson& a)
{
    std::vector<Integer> c;
    for (auto& x : a)
        c.emplace_back(x.get<std::string>());
    return c;
}

inline std::vector<std::string> qvec_str(const QPoly& f)
{
    std::vector<std::string> s;
    for (auto& x : f.c)
        s.push_back(rational_str(x));
    return s;
}

inline BigFloat parse_big(const ojson& v) { return BigFloat(v.get<std::string>()); }

inline std::filesystem::path model_path(const std::string& dir, std::uint64_t p)
{
    return std::filesystem::path(dir) / ("p" + std::to_string(p) + ".json");
}

inline std::filesystem::path intersection_path(const std::string& dir, std::uint64_t p)
{
    return std::filesystem::path(dir) / ("p" + std::to_string(p) + ".intersection.json");
}

inline int distinct_components(const RegularModel& M)
{
    std::set<std::string> s;
    for (auto& c : M.components)
        s.insert(c.name);
    return (int)s.size();
}

class Stopwatch {
public:
    explicit Stopwatch(std::vector<std::pair<std::string, double>>& out, std::string name)
        : out_(out), name_(std::move(name)), t0_(std::chrono::steady_clock::now())
    {
    }
    ~Stopwatch()
    {
        out_.emplace_back(name_, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count());
    }

private:
    std::vector<std::pair<std::string, double>>& out_;
    std::string name_;
    std::chrono::steady_clock::time_point t0_;
};

}  // namespace detail

// Rebuild the accepted L-series of a finished run (good factors recomputed).
inline LSeries accepted_series(const HyperellipticCurve& C, const ojson& lstage, const LOptions& o,
                               EulerCache* cache = nullptr)
{
    HyperellipticCurve M = integral_model(C);
    LSeries L;
    L.g = M.genus;
    L.N = Integer(lstage.at("conductor").get<std::string>());
    L.w = lstage.at("sign").get<int>();
    LPlan P = make_plan(L.g, L.N, o);
    fill_good_factors(M, L, P.X, cache);
    for (auto& [key, v] : lstage.at("bad_factors").items()) {
        std::uint64_t p = std::stoull(key);
        L.factors[p] = LocalFactor{p, detail::zvec_parse(v.at("poly")), 2 * L.g, false, v.at("f").get<int>()};
    }
    return L;
}

namespace detail {

inline ojson lfunction_stage(const CurveInput& in, const std::vector<std::uint64_t>& bad,
                             const std::map<std::uint64_t, RegularModel>& models, const VerifyConfig& cfg,
                             EulerCache* euler)
{
    const HyperellipticCurve& C = in.curve;
    LOptions o = cfg.lopts();
    std::vector<BadPrimeHint> hints = in.hints;
    for (auto p : bad) {
        auto it = std::find_if(hints.begin(), hints.end(), [&](const BadPrimeHint& h) { return h.p == p; });
        if (it == hints.end()) {
            BadPrimeHint h;
            h.p = p;
            h.n_components = 0;   // filled from the model below
            hints.push_back(h);
            it = hints.end() - 1;
        }
        if (it->n_components < 1) {
            auto m = models.find(p);
            it->n_components = m == models.end() ? 1 : distinct_components(m->second);
        }
    }
    LSeries good;
    good.g = C.genus;
    SearchReport sr = search_bad_data(C, good, bad, hints, o, euler, cfg.log);
    LSeries L = sr.series;
    RankResult rr = analytic_rank(L, cfg.rank_eps, 4, o);
    if (euler)
        euler->save();
    ojson j;
    j["conductor"] = L.N.str();
    j["sign"] = L.w;
    j["cutoff"] = make_plan(L.g, L.N, o).X;
    std::ostringstream res;
    res << std::setprecision(6) << sr.residual;
    j["residual"] = res.str();
    ojson bf = ojson::object();
    for (auto p : bad) {
        auto& lf = L.factors.at(p);
        ojson e;
        e["f"] = lf.f;
        e["poly"] = zvec_str(lf.poly);
        e["ogg_guess"] = sr.ogg[p].value;
        e["ogg_reliable"] = sr.ogg[p].reliable;
        bf[std::to_string(p)] = e;
    }
    j["bad_factors"] = bf;
    j["attempts"] = sr.attempts.size();
    j["notes"] = sr.notes;
    j["rank"] = rr.rank;
    j["lead"] = big_str(rr.lead, 20);
    std::vector<std::string> ders;
    for (auto& d : rr.derivatives)
        ders.push_back(big_str(d, 12));
    j["derivatives"] = ders;
    return j;
}

inline ojson periods_stage(const HyperellipticCurve& C, unsigned precision)
{
    precision_scope ps(precision + 10);
    BigPeriodMatrix M = big_period_matrix(C, precision);
    std::ostringstream log;
    BigFloat raw = raw_real_period(M, &log);
    ojson j;
    j["raw"] = big_str(raw, (int)precision);
    j["riemann_first"] = big_str(M.riemann1, 3);
    j["riemann_positive"] = M.riemann2;
    j["quadrature_change"] = big_str(M.quad_error, 3);
    return j;
}

inline ojson jacobian_stage(const HyperellipticCurve& C, const VerifyConfig& cfg)
{
    TorsionBounds tb = torsion_bounds(C, torsion_primes(C, cfg.torsion_prime_bound), cfg.search_bound);
    ojson j;
    j["upper"] = tb.upper.str();
    j["lower"] = tb.lower.str();
    j["primes"] = tb.primes_used;
    j["warnings"] = tb.warnings;
    return j;
}

}  // namespace detail

inline BSDReport run_verify(const VerifyConfig& cfg)
{
    BSDReport rep;
    auto& T = rep.timings;
    CurveInput in;
    std::vector<std::uint64_t> bad;
    std::map<std::uint64_t, RegularModel> models;
    std::map<std::uint64_t, std::string> model_hash;
    std::string hash;
    {
        detail::Stopwatch sw(T, "curve");
        in = load_curve(cfg.curve_path);
        for (auto& p : bad_primes(in.curve))
            bad.push_back(p.convert_to<std::uint64_t>());
        hash = curve_hash(in.curve);
        // every bad prime needs model data unless the Weierstrass model is already regular there
        std::vector<std::uint64_t> missing;
        for (auto p : bad) {
            auto mp_ = detail::model_path(cfg.models_dir, p);
            if (std::filesystem::exists(mp_)) {
                models[p] = load_model(mp_.string(), p);
                model_hash[p] = detail::hex64(fnv1a(detail::read_file(mp_)));
            } else if (!regular_fast_path(in.curve, p)) {
                missing.push_back(p);
            }
        }
        if (!missing.empty()) {
            std::string s;
            for (auto p : missing)
                s += (s.empty() ? "" : ", ") + std::to_string(p);
            throw pipeline_error("missing regular-model data for bad prime(s) p = " + s + " (expected " +
                                 detail::model_path(cfg.models_dir, missing.front()).string() + ")");
        }
    }
    std::optional<std::filesystem::path> root = cfg.cache_root ? cfg.cache_root : EulerCache::default_root();
    StageCache cache = root ? StageCache(*root, hash, cfg) : StageCache();
    EulerCache euler = root ? EulerCache(*root, hash) : EulerCache();
    auto cached = [&](const std::string& stage, auto compute) {
        if (auto j = cache.get(stage))
            return *j;
        ojson j = compute();
        cache.put(stage, j);
        return j;
    };

    ojson L, P, J;
    {
        detail::Stopwatch sw(T, "lfunction");
        L = cached("lfunction", [&] { return detail::lfunction_stage(in, bad, models, cfg, euler.enabled() ? &euler : nullptr); });
    }
    {
        detail::Stopwatch sw(T, "periods");
        P = cached("periods", [&] { return detail::periods_stage(in.curve, cfg.precision); });
    }
    precision_scope ps(cfg.precision + 10);
    DifferentialBasis B;
    {
        detail::Stopwatch sw(T, "neron");
        B = adjust_basis(in.curve, bad, models, cfg.log);
    }
    std::map<std::uint64_t, TamagawaEntry> tam;
    {
        detail::Stopwatch sw(T, "tamagawa");
        for (auto p : bad) {
            TamagawaEntry te;
            auto ip = detail::intersection_path(cfg.models_dir, p);
            auto m = models.find(p);
            if (std::filesystem::exists(ip)) {
                IntersectionData X = load_intersection(ip.string());
                if (X.p != 0 && X.p != p)
                    throw pipeline_error(ip.string() + ": intersection data is for p = " + std::to_string(X.p));
                ComponentGroup G = component_group(X);
                te.c = tamagawa_number(G);
                te.invariants = G.invariants;
                te.source = "intersection";
                te.data_hash = detail::hex64(fnv1a(detail::read_file(ip)));
            } else if (m != models.end() && detail::distinct_components(m->second) == 1) {
                te.source = "single_component";
                te.data_hash = model_hash[p];
            } else if (m == models.end()) {
                te.source = "fast_path";
            } else {
                throw pipeline_error("model at p = " + std::to_string(p) +
                                     " has several fibre components but no intersection file " + ip.string());
            }
            tam[p] = te;
        }
    }
    {
        detail::Stopwatch sw(T, "jacobian");
        J = cached("jacobian", [&] { return detail::jacobian_stage(in.curve, cfg); });
    }

    // assemble
    ojson warnings = ojson::array();
    BSDTerms terms;
    terms.r = L["rank"].get<int>();
    terms.lead = detail::parse_big(L["lead"]);
    BigFloat raw = detail::parse_big(P["raw"]);
    terms.P = corrected_real_period(raw, B);
    const char* reg_prov = "computed";
    if (terms.r == 0) {
        terms.R = 1;
        if (cfg.regulator)
            warnings.push_back("regulator override ignored at analytic rank 0");
    } else {
        if (!cfg.regulator)
            throw pipeline_error("analytic rank " + std::to_string(terms.r) + " needs --regulator");
        terms.R = BigFloat(*cfg.regulator);
        reg_prov = "assumed";
    }
    for (auto& [p, te] : tam)
        terms.c[p] = te.c;
    Integer upper(J["upper"].get<std::string>()), lower(J["lower"].get<std::string>());
    const char* tors_prov = "computed";
    if (cfg.torsion) {
        terms.torsion = *cfg.torsion;
        tors_prov = "assumed";
        if (upper != 0 && upper % terms.torsion != 0)
            warnings.push_back("torsion override " + terms.torsion.str() + " does not divide the upper bound " + upper.str());
        if (terms.torsion % lower != 0)
            warnings.push_back("torsion override " + terms.torsion.str() + " is not a multiple of the found subgroup order " +
                               lower.str());
    } else {
        terms.torsion = lower;
        if (lower != upper)
            warnings.push_back("torsion taken as the found subgroup order " + lower.str() + "; upper bound is " + upper.str());
    }
    for (auto& w : J["warnings"])
        warnings.push_back(w);
    ojson notes = L["notes"];
    for (auto& n : B.notes)
        notes.push_back(n);

    BigFloat sha;
    ShaVerdict v;
    ojson S;
    {
        detail::Stopwatch sw(T, "shacheck");
        sha = bsd_sha(terms);
        S["value"] = big_str(sha, 16);
        try {
            v = square_or_twice_square(sha, BigFloat(cfg.square_tol), Integer(cfg.max_den));
            S["nearest_rational"] = rational_str(v.q);
            S["class"] = to_string(v.cls);
            rep.verdict = v.cls;
        } catch (const shacheck_error& e) {
            S["nearest_rational"] = nullptr;
            S["class"] = "neither";
            warnings.push_back(e.what());
            rep.verdict = ShaClass::neither;
        }
        S["integer_distance"] = big_str(mp::abs(sha - mp::round(sha)), 3);
    }

    ojson& R = rep.json;
    R["schema"] = "bsdkit.report/1";
    ojson c;
    c["name"] = in.name;
    c["f"] = detail::qvec_str(in.curve.f);
    c["h"] = detail::qvec_str(in.curve.h);
    c["genus"] = in.curve.genus;
    c["parity"] = in.curve.parity == Parity::odd ? "odd" : "even";
    c["hash"] = hash;
    c["discriminant"] = integer_discriminant(in.curve).str();
    c["bad_primes"] = bad;
    R["curve"] = c;
    ojson cf;
    cf["precision"] = cfg.precision;
    cf["lcutoff"] = cfg.lcutoff ? ojson(*cfg.lcutoff) : ojson(nullptr);
    cf["cutoff_scale"] = cfg.cutoff_scale;
    cf["search_bound"] = cfg.search_bound;
    cf["residual_accept"] = cfg.residual_accept;
    cf["square_tol"] = cfg.square_tol;
    R["config"] = cf;

    ojson t;
    t["r"] = detail::tagged(terms.r, "computed");
    t["lim"] = detail::tagged(L["lead"], "computed");
    t["P_A"] = detail::tagged(big_str(terms.P, (int)cfg.precision), "computed");
    t["R_A"] = detail::tagged(cfg.regulator && terms.r > 0 ? ojson(*cfg.regulator) : ojson("1"), reg_prov);
    ojson cp = ojson::object();
    for (auto& [p, te] : tam) {
        ojson e = detail::tagged(te.c.str(), "computed");
        e["source"] = te.source;
        e["invariants"] = detail::zvec_str(te.invariants);
        e["data_hash"] = te.data_hash.empty() ? ojson(nullptr) : ojson(te.data_hash);
        cp[std::to_string(p)] = e;
    }
    t["c_p"] = cp;
    ojson tor = detail::tagged(terms.torsion.str(), tors_prov);
    tor["lower"] = lower.str();
    tor["upper"] = upper.str();
    tor["primes"] = J["primes"];
    t["tors"] = tor;
    R["terms"] = t;

    R["lfunction"] = L;
    ojson pe;
    pe["raw"] = P["raw"];
    pe["W"] = rational_str(B.W());
    ojson adj = ojson::object();
    for (auto& pa : B.primes) {
        ojson e;
        e["a"] = pa.a;
        e["b"] = pa.b;
        e["mode"] = pa.fast_path ? "fast_path" : "model";
        if (model_hash.count(pa.p))
            e["model_hash"] = model_hash[pa.p];
        adj[std::to_string(pa.p)] = e;
    }
    pe["adjustments"] = adj;
    pe["riemann_first"] = P["riemann_first"];
    pe["riemann_positive"] = P["riemann_positive"];
    R["periods"] = pe;
    R["sha"] = S;
    bool overrides = cfg.torsion.has_value() || (cfg.regulator.has_value() && terms.r > 0);
    R["fully_computed"] = !overrides;
    R["warnings"] = warnings;
    R["notes"] = notes;
    return rep;
}

// ---------------------------------------------------------------------------
// Output

inline std::string report_table(const BSDReport& rep)
{
    const ojson& R = rep.json;
    const ojson& t = R["terms"];
    std::ostringstream os;
    auto mark = [](const ojson& v) { return v["provenance"] == "computed" ? std::string() : std::string("*"); };
    std::string cps;
    for (auto& [p, e] : t["c_p"].items())
        cps += (cps.empty() ? "" : ",") + p + ":" + e["value"].get<std::string>();
    std::string name = R["curve"]["name"].get<std::string>();
    if (name.empty())
        name = R["curve"]["hash"].get<std::string>();
    os << std::left << std::setw(14) << "curve" << std::setw(3) << "g" << std::setw(3) << "r" << std::setw(16) << "lim"
       << std::setw(18) << "P_A" << std::setw(6) << "R_A" << std::setw(20) << "c_p" << std::setw(7) << "tors"
       << "|Sha|_an\n";
    auto shortnum = [](const std::string& s, int d) {
        BigFloat x(s);
        std::ostringstream o;
        o << std::setprecision(d) << x.convert_to<double>();
        return o.str();
    };
    os << std::left << std::setw(14) << name << std::setw(3) << R["curve"]["genus"].get<int>() << std::setw(3)
       << t["r"]["value"].get<int>() << std::setw(16) << shortnum(t["lim"]["value"].get<std::string>(), 10)
       << std::setw(18) << shortnum(t["P_A"]["value"].get<std::string>(), 12) << std::setw(6)
       << (t["R_A"]["value"].get<std::string>() + mark(t["R_A"])) << std::setw(20) << cps << std::setw(7)
       << (t["tors"]["value"].get<std::string>() + mark(t["tors"])) << R["sha"]["value"].get<std::string>() << "\n";
    os << "verdict: " << R["sha"]["class"].get<std::string>();
    if (!R["sha"]["nearest_rational"].is_null())
        os << " (nearest rational " << R["sha"]["nearest_rational"].get<std::string>() << ")";
    os << "\n";
    os << "conductor " << R["lfunction"]["conductor"].get<std::string>() << ", sign " << R["lfunction"]["sign"].get<int>()
       << ", functional-equation residual " << R["lfunction"]["residual"].get<std::string>() << "\n";
    if (!R["fully_computed"].get<bool>())
        os << "* assumed (override)\n";
    for (auto& w : R["warnings"])
        os << "warning: " << w.get<std::string>() << "\n";
    if (!rep.timings.empty()) {
        os << "stage times:";
        for (auto& [s, sec] : rep.timings)
            os << " " << s << "=" << std::fixed << std::setprecision(2) << sec << "s";
        os << "\n";
    }
    return os.str();
}

// format: "json" or "table"; path "-" is stdout.
inline void emit_report(const BSDReport& rep, const std::string& format, const std::string& path)
{
    std::string text;
    if (format == "json")
        text = rep.json.dump(2) + "\n";
    else if (format == "table")
        text = report_table(rep);
    else
        throw pipeline_error("unknown report format '" + format + "'");
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw pipeline_error("cannot write report to " + path);
    os << text;
    if (!os)
        throw pipeline_error("write failed for " + path);
}

inline BSDReport report_from_json(const std::string& text)
{
    BSDReport rep;
    rep.json = ojson::parse(text);
    if (rep.json.value("schema", "") != "bsdkit.report/1")
        throw pipeline_error("expected schema bsdkit.report/1");
    std::string cls = rep.json["sha"]["class"].get<std::string>();
    rep.verdict = cls == "square" ? ShaClass::square : cls == "twice_square" ? ShaClass::twice_square : ShaClass::neither;
    return rep;
}

}  // namespace bsdkit
