// Command-line front end: eigen / eval / verify / ring / roots.
//
// Output contracts: JSON carries a top-level "schema": "sphfun/1"; CSV uses
// '.' decimals, '\n' endings, 17 significant digits.  All commands are
// deterministic for fixed flags; worker count (SPHFUN_THREADS) never changes
// bytes, only wall time.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sphfun/eigensolver.hpp"
#include "sphfun/evaluator.hpp"
#include "sphfun/jsonio.hpp"
#include "sphfun/oracle.hpp"
#include "sphfun/parallel.hpp"
#include "sphfun/polyroots.hpp"
#include "sphfun/powersolver.hpp"
#include "sphfun/ring.hpp"
#include "sphfun/series_eval.hpp"

namespace {

using sphfun::json;

void emit(const json& j) {
    std::fputs(j.dump(2).c_str(), stdout);
    std::fputc('\n', stdout);
}

void emit_error(bool json_errors, const std::string& type, const std::string& msg) {
    if (json_errors) {
        json j{{"schema", sphfun::kSchema},
               {"error", json{{"type", type}, {"message", msg}}}};
        std::fputs(j.dump(2).c_str(), stderr);
        std::fputc('\n', stderr);
    } else {
        std::fprintf(stderr, "error: %s\n", msg.c_str());
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sphfun::validation_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw sphfun::validation_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

// --config support: flags from a JSON object {"m": 2, "p": 1, ...} are
// injected before the explicit command-line flags, which therefore win.
std::vector<std::string> inject_config(const std::vector<std::string>& args) {
    std::string path;
    size_t at = 0;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            at = i;
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            at = i;
            break;
        }
    }
    if (path.empty()) return args;
    const json cfg = load_json_file(path);
    if (!cfg.is_object())
        throw sphfun::validation_error("config file must hold a JSON object");
    std::vector<std::string> out(args.begin(), args.begin() + std::min(at, args.size()));
    // config flags go at the subcommand position so later flags override
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        if (it.value().is_boolean()) {
            if (it.value().get<bool>()) out.push_back("--" + it.key());
            continue;
        }
        out.push_back("--" + it.key());
        out.push_back(it.value().is_string() ? it.value().get<std::string>()
                                             : it.value().dump());
    }
    out.insert(out.end(), args.begin() + std::min(at, args.size()), args.end());
    return out;
}

json solution_json(const sphfun::EigenSolution& sol, const std::string& method) {
    const sphfun::SpectralParams& sp = sol.params();
    json coeffs;
    if (std::holds_alternative<sphfun::TrigSeriesRep>(sol.rep))
        coeffs = std::get<sphfun::TrigSeriesRep>(sol.rep).right_coeffs;
    else
        coeffs = std::get<sphfun::PowerSeriesRep>(sol.rep).coeffs;
    return json{{"schema", sphfun::kSchema},
                {"lambda", sol.lambda},
                {"k", sp.k},
                {"m", sp.m},
                {"p", sp.p},
                {"a", sp.a},
                {"residual", sol.diagnostics.residual_max},
                {"N", sol.diagnostics.N_used},
                {"method", method},
                {"coeffs", coeffs},
                {"solution", sol}};
}

sphfun::EigenSolution solve_with_method(const sphfun::SpectralParams& sp,
                                        const std::string& method) {
    if (method == "power") {
        if (sp.a != 0.0)
            throw sphfun::validation_error("--method power requires a = 0");
        const sphfun::Parity parity =
            (sp.k % 2 == 0) ? sphfun::Parity::even : sphfun::Parity::odd;
        return sphfun::power_find_eigenvalue(sp.m, sp.p, parity, sp.k, sp.tol, sp.N);
    }
    if (method != "jaffe")
        throw sphfun::validation_error("--method must be jaffe or power");
    return sphfun::solve_eigen(sp);
}

sphfun::PointVal eval_solution(const sphfun::EigenSolution& sol, double xi) {
    if (std::holds_alternative<sphfun::TrigSeriesRep>(sol.rep))
        return sphfun::eval_trig_rep(std::get<sphfun::TrigSeriesRep>(sol.rep), xi);
    return sphfun::eval_power_rep(std::get<sphfun::PowerSeriesRep>(sol.rep), xi);
}

struct VerifyCase {
    int m = 0, k = 0;
    double p = 1.0, a = 0.0;
};

json verify_one(const VerifyCase& c) {
    json row{{"m", c.m}, {"k", c.k}, {"p", c.p}, {"a", c.a}};
    try {
        const sphfun::SpectralParams sp{c.m, c.k, c.p, c.a, 1e-10, 0};
        const sphfun::EigenSolution sol = sphfun::solve_eigen(sp);
        const double lo = sphfun::shoot_refine_near(c.m, c.p, c.a, sol.lambda);
        const double delta = std::abs(sol.lambda - lo);
        const bool pass = delta <= 1e-6 * (1.0 + std::abs(sol.lambda)) &&
                          sol.diagnostics.residual_max < 1e-6 &&
                          sol.node_count == c.k && sol.diagnostics.converged;
        row["lambda_series"] = sol.lambda;
        row["lambda_oracle"] = lo;
        row["delta"] = delta;
        row["residual"] = sol.diagnostics.residual_max;
        row["node_count"] = sol.node_count;
        row["pass"] = pass;
    } catch (const std::exception& e) {
        row["pass"] = false;
        row["error"] = std::string(e.what());
    }
    return row;
}

int cmd_verify_report(const std::vector<json>& rows) {
    int failed = 0;
    for (const json& r : rows)
        if (!r.at("pass").get<bool>()) ++failed;
    json rep{{"schema", sphfun::kSchema},
             {"cases", rows},
             {"passed", int(rows.size()) - failed},
             {"failed", failed},
             {"pass", failed == 0}};
    emit(rep);
    return failed == 0 ? 0 : 1;
}

int run(std::vector<std::string> args, bool json_errors) {
    CLI::App app{"square-integrable spheroidal eigenfunctions on the whole real axis"};
    app.require_subcommand(1);

    // eigen
    auto* eigen = app.add_subcommand("eigen", "solve one (m, k, p, a) eigenpair");
    int e_m = 0, e_k = 0, e_N = 0;
    double e_p = 0.0, e_a = 0.0, e_tol = 1e-10;
    std::string e_method = "jaffe", e_config;
    eigen->add_option("--m", e_m, "azimuthal index")->required();
    eigen->add_option("--k", e_k, "node count")->required();
    eigen->add_option("--p", e_p, "energy-like parameter")->required();
    eigen->add_option("--a", e_a, "charge parameter");
    eigen->add_option("--tol", e_tol, "eigenvalue tolerance");
    eigen->add_option("--N", e_N, "truncation order (0 = auto)");
    eigen->add_option("--method", e_method, "jaffe | power");
    eigen->add_option("--config", e_config, "JSON config mirroring flag names");
    eigen->add_flag("--json-errors", "machine-readable errors");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a stored solution on a grid");
    std::string v_solution, v_grid, v_config;
    eval->add_option("--solution", v_solution, "solution JSON file")->required();
    eval->add_option("--grid", v_grid, "start:stop:count")->required();
    eval->add_option("--config", v_config, "JSON config mirroring flag names");
    eval->add_flag("--json-errors", "machine-readable errors");

    // verify
    auto* verify = app.add_subcommand("verify", "cross-check series against the ODE oracle");
    bool f_matrix = false;
    int f_m = 0, f_k = 0;
    double f_p = 0.0, f_a = 0.0;
    std::string f_solution, f_config;
    verify->add_flag("--matrix", f_matrix, "run the default verification matrix");
    verify->add_option("--m", f_m, "azimuthal index");
    verify->add_option("--k", f_k, "node count");
    verify->add_option("--p", f_p, "energy-like parameter");
    verify->add_option("--a", f_a, "charge parameter");
    verify->add_option("--solution", f_solution, "verify a stored solution file");
    verify->add_option("--config", f_config, "JSON config mirroring flag names");
    verify->add_flag("--json-errors", "machine-readable errors");

    // ring
    auto* ring = app.add_subcommand("ring", "finite-depth spheroidal ring spectrum");
    int r_m = 0;
    double r_U0 = 0.0, r_xi0 = 0.0, r_R = 0.0, r_lambda = 0.0;
    double r_Emin = 0.0, r_Emax = 0.0, r_tol = 1e-10;
    std::string r_config;
    ring->add_option("--m", r_m, "azimuthal index")->required();
    ring->add_option("--U0", r_U0, "well depth")->required();
    ring->add_option("--xi0", r_xi0, "well boundary")->required();
    ring->add_option("--R", r_R, "focal size")->required();
    ring->add_option("--lambda", r_lambda, "separation constant")->required();
    ring->add_option("--E-min", r_Emin, "scan range lower end")->required();
    ring->add_option("--E-max", r_Emax, "scan range upper end")->required();
    ring->add_option("--tol", r_tol, "level tolerance");
    ring->add_option("--config", r_config, "JSON config mirroring flag names");
    ring->add_flag("--json-errors", "machine-readable errors");

    // roots
    auto* roots = app.add_subcommand("roots", "characteristic root diagnostics");
    int t_m = 0, t_n = 0;
    double t_p = 0.0, t_a = 0.0, t_lambda = 0.0;
    std::string t_family = "quartic", t_parity = "even", t_config;
    roots->add_option("--m", t_m, "azimuthal index")->required();
    roots->add_option("--p", t_p, "energy-like parameter")->required();
    roots->add_option("--a", t_a, "charge parameter");
    roots->add_option("--lambda", t_lambda, "eigenvalue parameter")->required();
    roots->add_option("--n", t_n, "recurrence row index")->required();
    roots->add_option("--family", t_family, "quartic | cubic");
    roots->add_option("--parity", t_parity, "even | odd (cubic family)");
    roots->add_option("--config", t_config, "JSON config mirroring flag names");
    roots->add_flag("--json-errors", "machine-readable errors");

    for (CLI::App* sub : {eigen, eval, verify, ring, roots})
        for (auto* opt : sub->get_options())
            opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    args = inject_config(args);
    std::vector<const char*> argv;
    argv.push_back("sphfun");
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        if (json_errors)
            emit_error(true, "usage", e.what());
        else
            app.exit(e);
        return 2;
    }

    if (eigen->parsed()) {
        const sphfun::SpectralParams sp{e_m, e_k, e_p, e_a, e_tol, e_N};
        const sphfun::EigenSolution sol = solve_with_method(sp, e_method);
        emit(solution_json(sol, e_method));
        return 0;
    }

    if (eval->parsed()) {
        json j = load_json_file(v_solution);
        if (j.contains("solution")) j = j.at("solution");
        sphfun::EigenSolution sol;
        try {
            sol = j.get<sphfun::EigenSolution>();
        } catch (const std::exception& e) {
            throw sphfun::validation_error("malformed solution file: " +
                                           std::string(e.what()));
        }
        double start = 0.0, stop = 0.0;
        long count = 0;
        {
            std::istringstream is(v_grid);
            std::string f1, f2, f3;
            if (!std::getline(is, f1, ':') || !std::getline(is, f2, ':') ||
                !std::getline(is, f3))
                throw sphfun::validation_error("--grid must be start:stop:count");
            try {
                start = std::stod(f1);
                stop = std::stod(f2);
                count = std::stol(f3);
            } catch (const std::exception&) {
                throw sphfun::validation_error("--grid must be start:stop:count");
            }
            if (count < 1) throw sphfun::validation_error("grid count must be >= 1");
        }
        std::fputs("xi,X,dX\n", stdout);
        for (long i = 0; i < count; ++i) {
            const double xi =
                (count == 1) ? start
                             : start + (stop - start) * double(i) / double(count - 1);
            const sphfun::PointVal pv = eval_solution(sol, xi);
            std::printf("%.17g,%.17g,%.17g\n", xi, pv.x, pv.dx);
        }
        return 0;
    }

    if (verify->parsed()) {
        if (!f_solution.empty()) {
            json j = load_json_file(f_solution);
            if (j.contains("solution")) j = j.at("solution");
            sphfun::EigenSolution sol;
            try {
                sol = j.get<sphfun::EigenSolution>();
            } catch (const std::exception& e) {
                throw sphfun::validation_error("malformed solution file: " +
                                               std::string(e.what()));
            }
            const sphfun::SpectralParams& sp = sol.params();
            json row{{"m", sp.m}, {"k", sp.k}, {"p", sp.p}, {"a", sp.a}};
            const double lo =
                sphfun::shoot_refine_near(sp.m, sp.p, sp.a, sol.lambda);
            const double delta = std::abs(sol.lambda - lo);
            const sphfun::AxisEquation eq{sol.lambda, sp.m, sp.p, sp.a};
            const double residual = sphfun::series_residual_max(
                [&](double xi) { return eval_solution(sol, xi); },
                [&](double xi) { return eq.bracket(xi); }, -10.0, 10.0);
            const bool pass = delta <= 1e-6 * (1.0 + std::abs(sol.lambda)) &&
                              residual < 1e-6;
            row["lambda_series"] = sol.lambda;
            row["lambda_oracle"] = lo;
            row["delta"] = delta;
            row["residual"] = residual;
            row["pass"] = pass;
            return cmd_verify_report({row});
        }
        std::vector<VerifyCase> cases;
        if (f_matrix || verify->count("--m") == 0) {
            for (int m : {0, 1, 2})
                for (int k : {0, 1, 2, 3})
                    for (double p : {0.5, 1.0, 2.0})
                        for (double a : {0.0, 0.1, 1.0})
                            cases.push_back({m, k, p, a});
        } else {
            cases.push_back({f_m, f_k, f_p, f_a});
        }
        const std::vector<json> rows = sphfun::parallel_map(
            int(cases.size()), [&](int i) { return verify_one(cases[size_t(i)]); });
        return cmd_verify_report(rows);
    }

    if (ring->parsed()) {
        sphfun::RingConfig rc;
        rc.m = r_m;
        rc.U0 = r_U0;
        rc.xi0 = r_xi0;
        rc.R = r_R;
        rc.lambda = r_lambda;
        rc.E_min = r_Emin;
        rc.E_max = r_Emax;
        rc.tol = r_tol;
        const std::vector<sphfun::RingLevel> levels = sphfun::ring_spectrum(rc);
        json jl = json::array();
        for (const auto& lv : levels)
            jl.push_back(json{{"E", lv.E},
                              {"s", lv.s},
                              {"parity", lv.parity},
                              {"mismatch", lv.mismatch}});
        json out{{"schema", sphfun::kSchema},
                 {"config", rc},
                 {"levels", jl},
                 {"scan_diagnostics",
                  json{{"scan_points", 401},
                       {"parities", json::array({"even", "odd"})},
                       {"levels_found", int(levels.size())}}}};
        emit(out);
        return 0;
    }

    if (roots->parsed()) {
        if (t_n < 1) throw sphfun::validation_error("n must be >= 1");
        json out{{"schema", sphfun::kSchema}, {"family", t_family}, {"n", t_n}};
        std::vector<sphfun::cplx> rts;
        if (t_family == "quartic") {
            const sphfun::FiveTermTable T =
                sphfun::five_term_table(t_m, t_p, t_a, t_lambda);
            rts = sphfun::quartic_roots(T, t_n);
            out["n0"] = sphfun::n0_threshold(t_m, t_p, t_a);
        } else if (t_family == "cubic") {
            sphfun::Parity parity;
            if (t_parity == "even") {
                parity = sphfun::Parity::even;
            } else if (t_parity == "odd") {
                parity = sphfun::Parity::odd;
            } else {
                throw sphfun::validation_error("--parity must be even or odd");
            }
            const sphfun::FourTermTable T =
                sphfun::four_term_table(t_m, t_p, t_lambda, parity);
            rts = sphfun::cubic_roots(T, t_n);
        } else {
            throw sphfun::validation_error("--family must be quartic or cubic");
        }
        json jr = json::array(), jm = json::array();
        int inside = 0;
        for (const auto& z : rts) {
            jr.push_back(z);
            jm.push_back(std::abs(z));
            if (std::abs(z) < 1.0) ++inside;
        }
        out["roots"] = jr;
        out["moduli"] = jm;
        out["inside_unit_circle"] = inside;
        out["outside_unit_circle"] = int(rts.size()) - inside;
        emit(out);
        return 0;
    }

    throw sphfun::validation_error("no subcommand given");
}

} // namespace

int main(int argc, char** argv) {
    bool json_errors = false;
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
        if (args.back() == "--json-errors") json_errors = true;
    }
    try {
        (void)sphfun::thread_budget(); // validate SPHFUN_THREADS up front
        return run(std::move(args), json_errors);
    } catch (const sphfun::validation_error& e) {
        emit_error(json_errors, "validation", e.what());
        return 2;
    } catch (const sphfun::convergence_error& e) {
        emit_error(json_errors, "convergence", e.what());
        return 3;
    } catch (const sphfun::numeric_error& e) {
        emit_error(json_errors, "numeric", e.what());
        return 3;
    } catch (const std::exception& e) {
        emit_error(json_errors, "internal", e.what());
        return 3;
    }
}
