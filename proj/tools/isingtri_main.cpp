// Command line front end: exact series tables, the brute-force map counter,
// critical constants, peeling simulation, and the scaling experiments.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "isingtri/coefficients.hpp"
#include "isingtri/constants.hpp"
#include "isingtri/enumerate.hpp"
#include "isingtri/peeling.hpp"
#include "isingtri/scaling.hpp"
#include "isingtri/series_engine.hpp"

using namespace isingtri;
namespace C = isingtri::constants;

namespace {

int digits_from_env(int fallback) {
    if (const char* env = std::getenv("ISINGTRI_DIGITS")) {
        int d = std::atoi(env);
        if (d > 0) return d;
    }
    return fallback;
}

std::string real_str(const Real& x, int digits) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

Real resolve_nu(const std::string& s) {
    if (s == "nu_c" || s == "critical") return C::nu_c();
    return Real(s);
}

coeffs::CoefficientTables tables_for(const Real& nu, const std::string& cache_dir) {
    bool critical = abs(nu - C::nu_c()) < Real("1e-12");
    Real nu_eff = critical ? C::nu_c() : nu;
    std::cerr << "loading coefficient tables for nu = " << (double)nu_eff
              << " (builds on first use; this can take a few minutes)\n";
    return coeffs::load_or_build(nu_eff, coeffs::production_options(critical), cache_dir);
}

int cmd_tables_build(std::size_t order, const std::string& out) {
    auto table = series::extend_table(series::PartitionTable(std::max<std::size_t>(order, 64)),
                                      order);
    std::ofstream os(out);
    if (!os) throw io_error("cannot write " + out);
    series::save_table(table, os);
    std::cout << "wrote order-" << order << " table to " << out << "\n";
    return 0;
}

int cmd_tables_verify(const std::string& in, std::size_t order) {
    std::ifstream is(in);
    if (!is) throw io_error("cannot read " + in);
    auto table = series::load_table(is);
    if (order > table.max_order()) {
        std::cout << "table only reaches order " << table.max_order() << "\n";
        return 1;
    }
    auto rep = series::check_master_equation(table, order);
    std::cout << "functional equation residuals through order " << order << ": "
              << rep.max_abs_eq_dobrushin.str() << " (dobrushin), "
              << rep.max_abs_eq_mono.str() << " (monochromatic)\n";
    std::cout << (rep.exact_zero() ? "verified: residual exactly zero\n"
                                   : "FAILED: nonzero residual\n");
    return rep.exact_zero() ? 0 : 1;
}

int cmd_tables_boltzmann(const std::string& nu_s, std::size_t kmax, std::size_t pmax,
                         const std::string& out) {
    Real nu = resolve_nu(nu_s);
    bool critical = abs(nu - C::nu_c()) < Real("1e-12");
    coeffs::BuildOptions opt = coeffs::production_options(critical);
    opt.k_max = kmax;
    opt.zeta_size = pmax;
    auto t = coeffs::build_tables(critical ? C::nu_c() : nu, opt);
    coeffs::save_tables(t, out);
    std::cout << "wrote coefficient tables (k_cut=" << t.k_cut << ", zeta " << t.zmax << "x"
              << t.zmax << ", hash " << std::hex << t.content_hash() << std::dec << ") to "
              << out << "\n";
    return 0;
}

int cmd_oracle_count(std::size_t p, std::size_t q, std::size_t edges) {
    auto stats = enumerate::z_oracle_stats(p, q, edges);
    nlohmann::ordered_json j;
    j["p"] = p;
    j["q"] = q;
    j["edges"] = edges;
    j["maps"] = stats.maps;
    nlohmann::json coeffs_json = nlohmann::json::array();
    for (const auto& c : stats.weight.c) coeffs_json.push_back(c.str());
    j["coefficients"] = coeffs_json; // index = power of nu
    j["polynomial"] = stats.weight.to_string();
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_constants(const std::string& nu_s, bool as_json, int digits) {
    Real nu = resolve_nu(nu_s);
    bool critical = abs(nu - C::nu_c()) < Real("1e-12");
    if (critical) nu = C::nu_c();

    std::vector<std::pair<std::string, Real>> vals;
    vals.emplace_back("nu", nu);
    vals.emplace_back("nu_c", C::nu_c());
    vals.emplace_back("S_c", C::S_c());
    vals.emplace_back("S_perc", C::S_perc());
    vals.emplace_back("S", C::S_of_nu(nu));
    vals.emplace_back("T_c", C::T_crit(C::S_of_nu(nu)));
    vals.emplace_back("t_c", C::t_c_of_nu(nu));
    vals.emplace_back("u_c", C::u_c_of_nu(nu));
    vals.emplace_back("t_c/u_c", C::t_c_of_nu(nu) / C::u_c_of_nu(nu));
    vals.emplace_back("Z0(u_c)", C::Z0_at_uc(nu));
    vals.emplace_back("z_{1,0}(t_c)", C::z10_at_tc(nu));
    vals.emplace_back("normalization", C::p_infinity_normalization(nu));
    if (nu > 1) vals.emplace_back("drift", C::drift(nu));
    if (critical) {
        vals.emplace_back("mu", C::mu());
        vals.emplace_back("a0", C::a0());
        vals.emplace_back("A(u_c)", C::A_at_uc());
        vals.emplace_back("b", C::b_signed());
        vals.emplace_back("u3", C::u3());
        vals.emplace_back("c(1)", C::c_lambda(Real(1), C::Regime::critical));
        vals.emplace_back("c_inf(1)", C::c_infinity(Real(1)));
        vals.emplace_back("c_tilde_inf", C::c_tilde_infinity());
        vals.emplace_back("tail_exponent", Real(7) / 3);
    } else {
        vals.emplace_back("b_hat(S)", C::b_hat(C::S_of_nu(nu)));
        vals.emplace_back("tail_exponent", Real(5) / 2);
    }

    if (as_json) {
        nlohmann::ordered_json j;
        j["digits"] = digits;
        for (const auto& [k, v] : vals) j[k] = real_str(v, digits);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "working precision: " << std::numeric_limits<Real>::digits10
                  << " digits, printing " << digits << "\n";
        for (const auto& [k, v] : vals)
            std::cout << "  " << k << " = " << real_str(v, digits) << "\n";
    }
    return 0;
}

int cmd_simulate(const std::string& regime_s, std::int64_t p, std::int64_t q,
                 const std::string& nu_s, std::uint64_t runs, const std::string& stop,
                 std::uint64_t steps, std::uint64_t seed, const std::string& out,
                 const std::string& cache_dir) {
    Real nu = resolve_nu(nu_s);
    peel::RegimeTag regime;
    if (regime_s == "finite") regime = peel::RegimeTag::finite;
    else if (regime_s == "halfplane") regime = peel::RegimeTag::halfplane;
    else if (regime_s == "mono") regime = peel::RegimeTag::mono;
    else if (regime_s == "fullplane") regime = peel::RegimeTag::fullplane;
    else throw domain_error("unknown regime " + regime_s);

    peel::PeelingContext ctx(tables_for(nu, cache_dir));
    peel::RunSpec spec;
    spec.regime = regime;
    spec.p = p;
    spec.q = q;
    spec.nu = (double)nu;
    spec.seed = seed;
    spec.max_steps = steps;
    if (!stop.empty()) {
        if (stop.rfind("Tm=", 0) != 0) throw domain_error("--stop expects Tm=M");
        spec.t_m_targets = {std::atoll(stop.c_str() + 3)};
        spec.stop_at_first_tm = true;
    }

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty() && out != "-") {
        file.open(out);
        if (!file) throw io_error("cannot write " + out);
        os = &file;
    }
    for (std::uint64_t i = 0; i < runs; ++i) {
        spec.stream = i;
        auto tr = peel::run(ctx, spec);
        (*os) << peel::trace_to_jsonl(tr) << "\n";
    }
    return 0;
}

int cmd_scaling(const std::string& what, const std::string& nu_s, std::int64_t p,
                std::int64_t q, double lambda, std::int64_t m, std::uint64_t runs,
                std::uint64_t n1, std::uint64_t seed, const std::string& out,
                const std::string& cache_dir) {
    Real nu = resolve_nu(nu_s);
    peel::PeelingContext ctx(tables_for(nu, cache_dir));
    scaling::ScalingReport rep;
    if (what == "hitting") {
        if (q < 0 && lambda > 0) q = (std::int64_t)(lambda * (double)p);
        rep = q >= 0 ? scaling::hitting_time_experiment_diagonal(ctx, p, q, m, runs, seed)
                     : scaling::hitting_time_experiment_halfplane(ctx, p, m, runs, seed);
    } else if (what == "interface") {
        if (q < 0 && lambda > 0) q = (std::int64_t)(lambda * (double)p);
        rep = q >= 0 ? scaling::interface_experiment_diagonal(ctx, p, q, runs, seed)
                     : scaling::interface_experiment_halfplane(ctx, p, runs, seed);
    } else if (what == "hull") {
        auto res = scaling::hull_experiment(ctx, runs, seed);
        rep = res.report;
    } else if (what == "drift") {
        auto res = scaling::drift_experiment(ctx, runs, seed);
        rep = res.report;
    } else if (what == "stable") {
        rep = scaling::stable_selfsimilarity_test(ctx, n1, runs, seed);
    } else {
        throw domain_error("unknown experiment " + what);
    }

    if (out.empty() || out == "-") {
        std::cout << rep.to_json() << "\n";
    } else {
        std::ofstream os(out);
        if (!os) throw io_error("cannot write " + out);
        os << rep.to_json() << "\n";
        std::ofstream csv(out + ".csv");
        csv << rep.cdf_csv();
        std::cout << "wrote " << out << " and " << out << ".csv (ks=" << rep.ks
                  << ", exponent=" << rep.fitted_exponent << ", pass=" << rep.pass << ")\n";
    }
    return rep.pass || rep.ks < 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ising triangulation toolkit: exact partition tables, critical constants, "
                 "peeling simulation and scaling experiments"};
    app.set_config("--config", "", "key=value config file mirroring the flags");
    std::string cache_dir = coeffs::default_cache_dir();
    app.add_option("--cache", cache_dir, "coefficient table cache directory")
        ->envname("ISINGTRI_CACHE_DIR");

    int rc = 1;

    // tables
    auto* tables = app.add_subcommand("tables", "exact and numeric coefficient tables");
    {
        auto* build = tables->add_subcommand("build", "build the exact partition table");
        static std::size_t order = 12;
        static std::string out = "partition.json";
        build->add_option("--order", order, "t-order")->required();
        build->add_option("--out", out, "output file")->required();
        build->callback([&] { rc = cmd_tables_build(order, out); });

        auto* verify = tables->add_subcommand("verify", "check a table file");
        static std::string in;
        static std::size_t vorder = 6;
        verify->add_option("--in", in)->required();
        verify->add_option("--order", vorder)->required();
        verify->callback([&] { rc = cmd_tables_verify(in, vorder); });

        auto* boltz = tables->add_subcommand("boltzmann", "numeric tables at criticality");
        static std::string nu_s = "nu_c";
        static std::size_t kmax = 100000, pmax = 600;
        static std::string bout = "coeffs.tbl";
        boltz->add_option("--nu", nu_s);
        boltz->add_option("--kmax", kmax, "w/a/sigma length");
        boltz->add_option("--pmax", pmax, "bivariate table size");
        boltz->add_option("--out", bout)->required();
        boltz->callback([&] { rc = cmd_tables_boltzmann(nu_s, kmax, pmax, bout); });
    }

    // oracle
    auto* oracle = app.add_subcommand("oracle", "brute-force map enumeration");
    {
        auto* count = oracle->add_subcommand("count", "spin-weighted count at fixed size");
        static std::size_t p = 1, q = 1, edges = 1;
        count->add_option("--p", p)->required();
        count->add_option("--q", q)->required();
        count->add_option("--edges", edges)->required();
        count->callback([&] { rc = cmd_oracle_count(p, q, edges); });
    }

    // constants
    {
        auto* cst = app.add_subcommand("constants", "critical line and expansion constants");
        static std::string nu_s = "nu_c";
        static bool as_json = false;
        static int digits = digits_from_env(60);
        cst->add_option("--nu", nu_s);
        cst->add_flag("--json", as_json);
        cst->add_option("--digits", digits, "printed digits (<= 110)");
        cst->callback([&] { rc = cmd_constants(nu_s, as_json, std::min(digits, 110)); });
    }

    // simulate
    {
        auto* sim = app.add_subcommand("simulate", "peeling runs as JSON lines");
        static std::string regime = "halfplane", nu_s = "nu_c", stop, out = "-";
        static std::int64_t p = 0, q = 0;
        static std::uint64_t runs = 1, seed = 0, steps = 100000000;
        sim->add_option("--regime", regime, "finite|halfplane|mono|fullplane")->required();
        sim->add_option("--p", p);
        sim->add_option("--q", q);
        sim->add_option("--nu", nu_s);
        sim->add_option("--runs", runs);
        sim->add_option("--stop", stop, "Tm=M stops at the hitting time");
        sim->add_option("--steps", steps, "step budget per run");
        sim->add_option("--seed", seed);
        sim->add_option("--out", out, "output file, - for stdout");
        sim->callback(
            [&] { rc = cmd_simulate(regime, p, q, nu_s, runs, stop, steps, seed, out, cache_dir); });
    }

    // scaling
    {
        auto* sc = app.add_subcommand("scaling", "desk-scale limit-law experiments");
        static std::string what, nu_s = "nu_c", out = "report.json";
        static std::int64_t p = 200, q = -1, m = 10;
        static double lambda = 0;
        static std::uint64_t runs = 100000, seed = 0, n1 = 10000;
        sc->add_option("experiment", what, "hitting|interface|hull|drift|stable")->required();
        sc->add_option("--nu", nu_s);
        sc->add_option("--p", p);
        sc->add_option("--q", q);
        sc->add_option("--lambda", lambda);
        sc->add_option("--m", m);
        sc->add_option("--runs", runs);
        sc->add_option("--n1", n1, "base length for the stable test");
        sc->add_option("--seed", seed);
        sc->add_option("--out", out);
        sc->callback([&] {
            rc = cmd_scaling(what, nu_s, p, q, lambda, m, runs, n1, seed, out, cache_dir);
        });
    }

    app.require_subcommand(1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
