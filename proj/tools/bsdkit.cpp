#include "bsdkit/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace bsdkit;

namespace {

int run_verify_cmd(VerifyConfig cfg, const std::string& json_out, bool quiet, bool verbose, const std::string& torsion)
{
    if (!torsion.empty())
        cfg.torsion = Integer(torsion);
    if (verbose)
        cfg.log = &std::cerr;
    BSDReport rep = run_verify(cfg);
    if (!json_out.empty())
        emit_report(rep, "json", json_out);
    if (!quiet && json_out != "-")
        emit_report(rep, "table", "-");
    return rep.exit_code();
}

int run_lfactor(const std::string& curve_path, std::uint64_t p)
{
    CurveInput in = load_curve(curve_path);
    HyperellipticCurve M = integral_model(in.curve);
    if (!is_prime(p))
        throw std::runtime_error(std::to_string(p) + " is not prime");
    ojson j;
    j["schema"] = "bsdkit.lfactor/1";
    j["p"] = p;
    auto strs = [](const std::vector<Integer>& c) {
        std::vector<std::string> s;
        for (auto& x : c)
            s.push_back(x.str());
        return s;
    };
    if (is_good_prime(M, p)) {
        j["reduction"] = "good";
        j["poly"] = strs(frobenius_polynomial(M, p));
    } else {
        j["reduction"] = "bad";
        ojson cands = ojson::array();
        if (p != 2)
            if (auto c = fibre_candidate_odd(M, p))
                cands.push_back(strs(*c));
        if (auto c = fibre_candidate_counts(M, p))
            if (std::find(cands.begin(), cands.end(), ojson(strs(*c))) == cands.end())
                cands.push_back(strs(*c));
        j["candidates"] = cands;
        int v = valuation(integer_discriminant(M), Integer(p));
        ConductorGuess og = conductor_ogg_guess(v, 1);
        j["v_disc"] = v;
        j["ogg_guess_one_component"] = og.value;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_periods(const std::string& curve_path, unsigned precision)
{
    CurveInput in = load_curve(curve_path);
    precision_scope ps(precision + 10);
    BigPeriodMatrix M = big_period_matrix(in.curve, precision);
    BigFloat raw = raw_real_period(M);
    ojson j;
    j["schema"] = "bsdkit.periods/1";
    j["genus"] = M.g;
    j["precision"] = precision;
    j["raw_real_period"] = big_str(raw, (int)precision);
    j["riemann_first"] = big_str(M.riemann1, 3);
    j["riemann_positive"] = M.riemann2;
    ojson rows = ojson::array();
    for (auto& row : M.omega) {
        ojson r = ojson::array();
        for (auto& z : row)
            r.push_back({big_str(z.re, (int)precision), big_str(z.im, (int)precision)});
        rows.push_back(r);
    }
    j["omega"] = rows;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_tamagawa(const std::string& path)
{
    IntersectionData X = load_intersection(path);
    ComponentGroup G = component_group(X);
    ojson j;
    j["schema"] = "bsdkit.tamagawa/1";
    j["p"] = X.p;
    std::vector<std::string> inv;
    for (auto& x : G.invariants)
        inv.push_back(x.str());
    j["invariants"] = inv;
    j["group_order"] = G.order().str();
    j["c"] = tamagawa_number(G).str();
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_sha_check(const std::string& value, double tol, long max_den)
{
    precision_scope ps(50);
    ShaVerdict v = square_or_twice_square(BigFloat(value), BigFloat(tol), Integer(max_den));
    ojson j;
    j["schema"] = "bsdkit.shacheck/1";
    j["value"] = value;
    j["nearest_rational"] = rational_str(v.q);
    j["class"] = to_string(v.cls);
    j["integer_distance"] = big_str(v.int_distance, 3);
    std::cout << j.dump(2) << "\n";
    return v.cls == ShaClass::neither ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"bsdkit: BSD checks for Jacobians of hyperelliptic curves"};
    app.require_subcommand(1);

    VerifyConfig cfg;
    std::string json_out, torsion;
    bool quiet = false, verbose = false;
    auto* verify = app.add_subcommand("verify", "run the full pipeline on a curve file");
    verify->add_option("curve", cfg.curve_path, "curve JSON")->required()->check(CLI::ExistingFile);
    verify->add_option("--models", cfg.models_dir, "directory with p<N>.json and p<N>.intersection.json")->required();
    verify->add_option("--precision", cfg.precision, "working decimal digits")->capture_default_str();
    verify->add_option("--regulator", cfg.regulator, "regulator for rank >= 1 (assumed)");
    verify->add_option("--torsion", torsion, "torsion order override (assumed)");
    verify->add_option("--lcutoff", cfg.lcutoff, "Dirichlet coefficient cutoff");
    verify->add_option("--cutoff-scale", cfg.cutoff_scale, "multiply the cutoff")->capture_default_str();
    verify->add_option("--search-bound", cfg.search_bound, "height bound for the torsion point search")->capture_default_str();
    verify->add_option("--json", json_out, "write the JSON report here ('-' for stdout)");
    verify->add_flag("-q,--quiet", quiet, "no table");
    verify->add_flag("-v,--verbose", verbose, "log search attempts to stderr");

    std::string curve_path;
    std::uint64_t prime = 0;
    auto* lfactor = app.add_subcommand("lfactor", "local L-factor (good p) or candidates (bad p)");
    lfactor->add_option("curve", curve_path)->required()->check(CLI::ExistingFile);
    lfactor->add_option("--prime,-p", prime)->required();

    unsigned precision = 40;
    auto* periods = app.add_subcommand("periods", "period matrix and raw real period");
    periods->add_option("curve", curve_path)->required()->check(CLI::ExistingFile);
    periods->add_option("--precision", precision)->capture_default_str();

    std::string file;
    auto* tamagawa = app.add_subcommand("tamagawa", "component group and Tamagawa number from intersection data");
    tamagawa->add_option("file", file)->required()->check(CLI::ExistingFile);

    std::string value;
    double tol = 1e-6;
    long max_den = 10000;
    auto* sha = app.add_subcommand("sha-check", "classify a value as square, twice a square, or neither");
    sha->add_option("value", value)->required();
    sha->add_option("--tol", tol)->capture_default_str();
    sha->add_option("--max-den", max_den)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help exits 0; usage errors share the runtime error code
        return app.exit(e) == 0 ? 0 : 2;
    }
    try {
        if (verify->parsed())
            return run_verify_cmd(cfg, json_out, quiet, verbose, torsion);
        if (lfactor->parsed())
            return run_lfactor(curve_path, prime);
        if (periods->parsed())
            return run_periods(curve_path, precision);
        if (tamagawa->parsed())
            return run_tamagawa(file);
        if (sha->parsed())
            return run_sha_check(value, tol, max_den);
    } catch (const std::exception& e) {
        std::cerr << "bsdkit: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
