// Command-line surface for the beta-RWRE toolkit: rate-function queries,
// duality lookups, stationary-field dumps, path simulation, the variance
// identity, exponent scans, Busemann sampling, and the selftest suites.
//
// Exit codes: 0 success, 2 validation error, 3 numeric failure,
// 4 selftest/acceptance failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "betawalk/duality.hpp"
#include "betawalk/experiments.hpp"
#include "betawalk/report_io.hpp"
#include "betawalk/rng.hpp"
#include "betawalk/specfun.hpp"
#include "betawalk/stationary_env.hpp"
#include "betawalk/walk_engine.hpp"

namespace {

using betawalk::ExperimentReport;
using betawalk::ModelParams;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Shared option state
// ---------------------------------------------------------------------------

struct Options {
    double alpha = 1.0, beta = 1.0;
    double xi1 = std::nan("");
    double lambda = std::nan("");
    double tilt = std::nan("");
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string output;
    std::string format = "json";
    int threads = 0;
    long m = 64, n = 64;
    long steps = 256;
    long replicas = 200;
    long samples = 10000;
    long big_n = 256;
    std::vector<long> n_list;
    bool quick = false;
    bool off_characteristic = false;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--alpha", o.alpha, "Beta parameter alpha > 0");
    cmd->add_option("--beta", o.beta, "Beta parameter beta > 0");
    cmd->add_option("--seed", o.seed, "64-bit seed (default: random, always recorded)");
    cmd->add_option("--output,-o", o.output, "Output file path");
    cmd->add_option("--format", o.format, "Output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--threads", o.threads,
                    "Worker threads (default: BETAWALK_THREADS or machine parallelism)");
}

// Resolved configuration echoed to the manifest; feeding it back through
// --config reproduces the run.
ordered_json resolved_config(const std::string& command, const Options& o) {
    ordered_json cfg;
    cfg["command"] = command;
    cfg["alpha"] = o.alpha;
    cfg["beta"] = o.beta;
    if (!std::isnan(o.xi1)) cfg["xi1"] = o.xi1;
    if (!std::isnan(o.lambda)) cfg["lambda"] = o.lambda;
    if (!std::isnan(o.tilt)) cfg["tilt"] = o.tilt;
    cfg["seed"] = o.seed;
    if (!o.output.empty()) cfg["output"] = o.output;
    cfg["format"] = o.format;
    if (o.threads > 0) cfg["threads"] = o.threads;
    return cfg;
}

// ---------------------------------------------------------------------------
// JSON config file -> injected command-line flags (explicit flags win)
// ---------------------------------------------------------------------------

std::vector<std::string> config_to_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open config file: " + path);
    ordered_json cfg;
    try {
        in >> cfg;
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--config", std::string("invalid JSON: ") + e.what());
    }
    std::vector<std::string> args;
    for (const auto& [key, value] : cfg.items()) {
        if (key == "command") continue;  // the subcommand comes from argv
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back("--" + key);
        } else if (value.is_array()) {
            std::string list;
            for (const auto& v : value) {
                if (!list.empty()) list += ',';
                list += v.dump();
            }
            args.push_back("--" + key);
            args.push_back(list);
        } else if (value.is_string()) {
            args.push_back("--" + key);
            args.push_back(value.get<std::string>());
        } else {
            args.push_back("--" + key);
            args.push_back(value.is_number_float()
                               ? betawalk::format_double(value.get<double>())
                               : value.dump());
        }
    }
    return args;
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

void emit(const ExperimentReport& report, const Options& o, const std::string& command) {
    const std::string payload = o.format == "csv" ? betawalk::report_to_csv(report)
                                                  : betawalk::report_to_json(report);
    if (!o.output.empty()) {
        betawalk::write_text_file(o.output, payload);
        betawalk::write_manifest(o.output, resolved_config(command, o).dump(), o.seed,
                                 report.runtime_seconds);
    }
    std::cout << payload;
}

void emit_json_object(const ordered_json& j, const Options& o, const std::string& command,
                      double wall_seconds) {
    const std::string payload = j.dump(2) + "\n";
    if (!o.output.empty()) {
        betawalk::write_text_file(o.output, payload);
        betawalk::write_manifest(o.output, resolved_config(command, o).dump(), o.seed,
                                 wall_seconds);
    }
    std::cout << payload;
}

const char* branch_label(betawalk::Branch b) {
    switch (b) {
        case betawalk::Branch::RightOfLLN: return "right";
        case betawalk::Branch::LeftOfLLN: return "left";
        default: return "at_lln";
    }
}

// ---------------------------------------------------------------------------
// Command bodies
// ---------------------------------------------------------------------------

int run_rate(Options& o) {
    const ModelParams params(o.alpha, o.beta);
    if (std::isnan(o.xi1)) throw CLI::ValidationError("rate", "requires --xi1");
    const betawalk::Velocity xi(o.xi1);
    const betawalk::DualPoint dual = betawalk::lambda_of_xi(params, xi);
    ordered_json j;
    j["alpha"] = o.alpha;
    j["beta"] = o.beta;
    j["xi1"] = o.xi1;
    j["iq"] = betawalk::rate_iq(params, xi);
    j["ia"] = betawalk::rate_ia(params, xi);
    j["lambda"] = dual.lambda;
    j["branch"] = branch_label(dual.branch);
    emit_json_object(j, o, "rate", 0.0);
    return 0;
}

int run_dual(Options& o) {
    const ModelParams params(o.alpha, o.beta);
    const int given = (!std::isnan(o.xi1)) + (!std::isnan(o.lambda)) + (!std::isnan(o.tilt));
    if (given != 1)
        throw CLI::ValidationError("dual", "requires exactly one of --xi1 / --lambda / --tilt");
    betawalk::DualPoint dual;
    if (!std::isnan(o.xi1)) {
        dual = betawalk::lambda_of_xi(params, betawalk::Velocity(o.xi1));
    } else if (!std::isnan(o.lambda)) {
        dual.lambda = o.lambda;
        dual.branch = betawalk::Branch::RightOfLLN;
        dual.xi = betawalk::xi_of_lambda(params, o.lambda, dual.branch);
    } else {
        dual = betawalk::lambda_of_tilt(params, o.tilt);
    }
    const double tilt = dual.tilt ? *dual.tilt
                                  : (std::isinf(dual.lambda)
                                         ? 0.0
                                         : betawalk::polygamma(0, o.alpha + o.beta + dual.lambda) -
                                               betawalk::polygamma(0, dual.lambda));
    ordered_json j;
    j["alpha"] = o.alpha;
    j["beta"] = o.beta;
    j["xi1"] = dual.xi.xi1;
    j["lambda"] = std::isinf(dual.lambda) ? ordered_json() : ordered_json(dual.lambda);
    j["branch"] = branch_label(dual.branch);
    j["tilt"] = tilt;
    j["iq"] = betawalk::rate_iq(params, dual.xi);
    j["ia"] = betawalk::rate_ia(params, dual.xi);
    j["iq_star"] = betawalk::iq_star(params, tilt);
    emit_json_object(j, o, "dual", 0.0);
    return 0;
}

int run_stationary(Options& o) {
    const ModelParams params(o.alpha, o.beta);
    if (std::isnan(o.lambda)) throw CLI::ValidationError("stationary", "requires --lambda");
    if (o.output.empty()) throw CLI::ValidationError("stationary", "requires --output");
    const auto t0 = std::chrono::steady_clock::now();
    const betawalk::StationaryField field = betawalk::build_stationary(
        params, o.lambda, betawalk::Branch::RightOfLLN, o.m, o.n, o.seed);
    betawalk::dump_field(field, o.output);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Options with_dims = o;
    ordered_json cfg = resolved_config("stationary", with_dims);
    cfg["m"] = o.m;
    cfg["n"] = o.n;
    betawalk::write_manifest(o.output, cfg.dump(), o.seed, wall);
    ordered_json j;
    j["output"] = o.output;
    j["m"] = o.m;
    j["n"] = o.n;
    j["lambda"] = o.lambda;
    j["clamp_count"] = field.clamp_count;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_simulate(Options& o) {
    const ModelParams params(o.alpha, o.beta);
    if (std::isnan(o.lambda) == std::isnan(o.xi1))
        throw CLI::ValidationError("simulate", "requires exactly one of --lambda / --xi1");
    double lambda = o.lambda;
    ModelParams pars = params;
    if (!std::isnan(o.xi1)) {
        const betawalk::DualPoint dual = betawalk::lambda_of_xi(params, betawalk::Velocity(o.xi1));
        lambda = dual.lambda;
        if (dual.branch == betawalk::Branch::LeftOfLLN) pars = params.swapped();
    }
    const auto t0 = std::chrono::steady_clock::now();
    betawalk::StreamingBuilder sb(pars, lambda, o.seed);
    betawalk::RngStream path(o.seed, 0);
    ExperimentReport rep;
    rep.name = "simulate";
    rep.params = params;
    rep.lambda = lambda;
    rep.seed = o.seed;
    rep.version = betawalk::kVersion;
    rep.n_replicas = 1;
    rep.table_columns = {"step", "i", "j"};
    long i = 0, j = 0;
    rep.table_rows.push_back({0.0, 0.0, 0.0});
    for (long step = 0; step < o.steps; ++step) {
        sb.ensure(i, j);
        if (path.next_u01() < sb.pi_e1_last())
            ++i;
        else
            ++j;
        rep.table_rows.push_back({static_cast<double>(step + 1), static_cast<double>(i),
                                  static_cast<double>(j)});
    }
    rep.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(rep, o, "simulate");
    return 0;
}

int run_variance_id(Options& o) {
    const ModelParams params(o.alpha, o.beta);
    if (std::isnan(o.lambda)) throw CLI::ValidationError("variance-id", "requires --lambda");
    const ExperimentReport rep = betawalk::variance_identity_experiment(
        params, o.lambda, o.big_n, o.replicas, o.seed);
    emit(rep, o, "variance-id");
    return 0;
}

int run_exponent(Options& o) {
    const ModelParams params(o.alpha, o.beta);
    if (o.n_list.empty()) throw CLI::ValidationError("exponent", "requires --n-list");
    if (std::isnan(o.lambda) == std::isnan(o.xi1))
        throw CLI::ValidationError("exponent", "requires exactly one of --lambda / --xi1");
    ExperimentReport rep;
    if (!std::isnan(o.xi1)) {
        rep = betawalk::wandering_experiment(params, o.xi1, o.n_list, o.replicas, o.seed);
    } else {
        rep = betawalk::log_rho_variance_scan(params, o.lambda, o.n_list, o.replicas, o.seed,
                                              o.off_characteristic);
    }
    emit(rep, o, "exponent");
    return 0;
}

int run_busemann(Options& o) {
    const ModelParams params(o.alpha, o.beta);
    if (std::isnan(o.lambda)) throw CLI::ValidationError("busemann", "requires --lambda");
    const auto t0 = std::chrono::steady_clock::now();
    const betawalk::Velocity xi =
        betawalk::xi_of_lambda(params, o.lambda, betawalk::Branch::RightOfLLN);
    const long zi = std::max(1L, static_cast<long>(std::floor(o.big_n * xi.xi1)));
    const long zj = std::max(1L, static_cast<long>(std::floor(o.big_n * xi.xi2())));
    std::vector<double> samples(o.replicas);
    betawalk::parallel_for(o.replicas, [&](long r) {
        const betawalk::EnvField env =
            betawalk::sample_env(params, zi, zj, betawalk::replica_seed(o.seed, r));
        samples[r] = std::exp(
            betawalk::busemann_estimate(env, {0, 0}, {1, 0}, {zi, zj}));
    });
    ExperimentReport rep;
    rep.name = "busemann";
    rep.params = params;
    rep.lambda = o.lambda;
    rep.xi1 = xi.xi1;
    rep.seed = o.seed;
    rep.version = betawalk::kVersion;
    rep.n_replicas = o.replicas;
    const auto [mean, se] = betawalk::mean_and_se(samples);
    rep.estimates.push_back({"mean_exp_busemann", mean, se});
    rep.estimates.push_back({"limit_mean", o.alpha + o.lambda == 0.0
                                               ? 0.0
                                               : (o.alpha + o.lambda) /
                                                     (o.alpha + o.lambda + o.beta),
                             0.0});
    if (o.replicas >= 8) {
        const double a = o.alpha + o.lambda, b = o.beta;
        const betawalk::KsResult ks = betawalk::ks_test(
            samples, [a, b](double x) {
                return betawalk::beta_cdf(std::clamp(x, 1e-300, 1.0 - 1e-16), a, b);
            });
        rep.tests.push_back({"exp_busemann_vs_beta", ks.n, ks.statistic, ks.p_value,
                             ks.p_value > 1e-3});
    }
    rep.table_columns = {"replica", "exp_busemann"};
    for (long r = 0; r < o.replicas; ++r)
        rep.table_rows.push_back({static_cast<double>(r), samples[r]});
    rep.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(rep, o, "busemann");
    return 0;
}

// ---------------------------------------------------------------------------
// Selftest
// ---------------------------------------------------------------------------

int run_selftest(Options& o) {
    const std::uint64_t seed = o.seed;
    int failures = 0;
    const auto check = [&](const std::string& name, bool ok) {
        std::cout << "[selftest] " << name << ": " << (ok ? "ok" : "FAIL") << "\n";
        if (!ok) ++failures;
    };

    // Involution identities on random triples.
    {
        double worst = 0.0;
        for (long k = 0; k < 100000; ++k) {
            const std::uint64_t sk = betawalk::replica_seed(seed, k);
            const double u = betawalk::beta_inv_cdf(
                betawalk::uniform_site(sk, betawalk::RngRole::Generic, 0, 0), 2.0, 1.0);
            const double v = 1.0 / betawalk::beta_inv_cdf(
                betawalk::uniform_site(sk, betawalk::RngRole::Generic, 1, 0), 1.0, 1.0);
            const double w = betawalk::uniform_site(sk, betawalk::RngRole::Generic, 2, 0);
            const auto [u2, v2, w2] = betawalk::involution_flip(u, v, w);
            const auto [u3, v3, w3] = betawalk::involution_flip(u2, v2, w2);
            worst = std::max({worst, std::fabs(u3 - u), std::fabs(v3 - v),
                              std::fabs(w3 - w), std::fabs(w / u2 + (1.0 - w) / v2 - 1.0)});
        }
        check("involution", worst <= 1e-10);
    }

    const ModelParams params(1.0, 1.0);
    const betawalk::StationaryField field = betawalk::build_stationary(
        params, 1.0, betawalk::Branch::RightOfLLN, 64, 64, seed);

    // Harmonicity of rho against omega^lambda and pcheck.
    {
        double worst = 0.0;
        for (long j = 0; j < 64; ++j)
            for (long i = 0; i < 64; ++i) {
                const double w = field.omega_at(i, j);
                worst = std::max(worst, std::fabs(w / field.rho_h_at(i, j) +
                                                  (1.0 - w) / field.rho_v_at(i, j) - 1.0));
            }
        for (long j = 1; j <= 64; ++j)
            for (long i = 1; i <= 64; ++i) {
                const double w = field.pcheck_at(i, j);
                worst = std::max(worst, std::fabs(w / field.rho_h_at(i - 1, j) +
                                                  (1.0 - w) / field.rho_v_at(i, j - 1) - 1.0));
            }
        check("harmonicity", worst <= 1e-12);
    }

    // Cocycle plaquette closure.
    {
        double worst = 0.0;
        for (long j = 0; j < 64; ++j)
            for (long i = 0; i < 64; ++i)
                worst = std::max(worst,
                                 std::fabs(field.rho_h_at(i, j) * field.rho_v_at(i + 1, j) /
                                               (field.rho_v_at(i, j) * field.rho_h_at(i, j + 1)) -
                                           1.0));
        check("cocycle", worst <= 1e-10);
    }

    // Polymer recursion reproduces the cocycle exactly.
    {
        const std::vector<double> log_z = betawalk::polymer_partition(field);
        double worst = 0.0;
        for (long j = 0; j <= 64; j += 8)
            for (long i = 0; i <= 64; i += 8)
                worst = std::max(worst, std::fabs(log_z[static_cast<std::size_t>(j) * 65 + i] -
                                                  betawalk::log_rho_point(field, {0, 0}, {i, j})));
        check("polymer_oracle", worst <= 1e-8);
    }

    // Polygamma recurrence.
    {
        double worst = 0.0;
        for (int n = 0; n <= 4; ++n)
            for (double x : {0.3, 0.7, 1.5, 3.2, 7.7, 25.0}) {
                // psi_n(x+1) - psi_n(x) = (-1)^n n! / x^{n+1}
                const double sign = (n % 2 == 0) ? 1.0 : -1.0;
                double fact = 1.0;
                for (int k = 1; k <= n; ++k) fact *= k;
                const double term = sign * fact * std::pow(x, -(n + 1.0));
                const double resid =
                    betawalk::polygamma(n, x + 1.0) - betawalk::polygamma(n, x) - term;
                worst = std::max(worst, std::fabs(resid) / std::max(1.0, std::fabs(term)));
            }
        check("polygamma", worst <= 1e-10);
    }

    if (!o.quick) {
        const ExperimentReport var_rep =
            betawalk::variance_identity_experiment(params, 1.0, 32, 400, seed);
        check("variance_identity", var_rep.ok);
        const ExperimentReport suite = betawalk::distribution_suite(params, 1.0, 2000, seed);
        check("distribution_suite", suite.ok);
    }

    std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
    return failures == 0 ? 0 : 4;
}

}  // namespace

// ---------------------------------------------------------------------------
// main
// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    // Extract --config first and splice its flags in ahead of the explicit
    // command line, so explicitly given flags win.
    std::vector<std::string> args;
    std::string config_path;
    for (int k = 1; k < argc; ++k) {
        const std::string a = argv[k];
        if (a == "--config") {
            if (k + 1 >= argc) {
                std::cerr << "error: --config needs a path\n";
                return 2;
            }
            config_path = argv[++k];
        } else if (a.rfind("--config=", 0) == 0) {
            config_path = a.substr(9);
        } else {
            args.push_back(a);
        }
    }

    Options o;
    CLI::App app{"beta random walk in random environment: exact solvability toolkit"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    CLI::App* c_rate = app.add_subcommand("rate", "Quenched/averaged rate functions at xi");
    c_rate->add_option("--xi1", o.xi1, "Velocity component xi1 in (0,1)");
    CLI::App* c_dual = app.add_subcommand("dual", "Duality lookup from xi1, lambda, or tilt");
    c_dual->add_option("--xi1", o.xi1, "Velocity component xi1 in (0,1)");
    c_dual->add_option("--lambda", o.lambda, "Doob parameter lambda > 0");
    c_dual->add_option("--tilt", o.tilt, "Tilt t = psi0(alpha+beta+lambda) - psi0(lambda)");
    CLI::App* c_stat = app.add_subcommand("stationary", "Build and dump a stationary field");
    c_stat->add_option("--lambda", o.lambda, "Doob parameter lambda > 0");
    c_stat->add_option("--m", o.m, "Field width (cells)");
    c_stat->add_option("--n", o.n, "Field height (cells)");
    CLI::App* c_sim = app.add_subcommand("simulate", "Sample a forward Doob path");
    c_sim->add_option("--lambda", o.lambda, "Doob parameter lambda > 0");
    c_sim->add_option("--xi1", o.xi1, "Velocity component xi1 in (0,1)");
    c_sim->add_option("--steps", o.steps, "Number of steps");
    CLI::App* c_var = app.add_subcommand("variance-id", "Variance identity experiment");
    c_var->add_option("--lambda", o.lambda, "Doob parameter lambda > 0");
    c_var->add_option("--n-scale,--big-n", o.big_n, "Endpoint scale N");
    c_var->add_option("--replicas", o.replicas, "Monte Carlo replicas");
    CLI::App* c_exp = app.add_subcommand("exponent", "Fluctuation-exponent scan");
    c_exp->add_option("--xi1", o.xi1, "Wandering scan at velocity xi1");
    c_exp->add_option("--lambda", o.lambda, "log-rho variance scan at lambda");
    c_exp->add_option("--n-list", o.n_list, "Comma-separated N values")->delimiter(',');
    c_exp->add_option("--replicas", o.replicas, "Monte Carlo replicas");
    c_exp->add_flag("--off-characteristic", o.off_characteristic,
                    "Shift the endpoint off the characteristic ray");
    CLI::App* c_bus = app.add_subcommand("busemann", "Finite-N Busemann samples");
    c_bus->add_option("--lambda", o.lambda, "Doob parameter lambda > 0");
    c_bus->add_option("--n-scale,--big-n", o.big_n, "Lattice scale N");
    c_bus->add_option("--replicas", o.replicas, "Independent environments");
    CLI::App* c_self = app.add_subcommand("selftest", "Exact-identity and statistics suites");
    c_self->add_flag("--quick", o.quick, "Exact identities only (< 60 s)");

    for (CLI::App* cmd : {c_rate, c_dual, c_stat, c_sim, c_var, c_exp, c_bus, c_self})
        add_common(cmd, o);

    // Splice config flags between the subcommand name and the explicit flags.
    std::vector<std::string> final_args;
    try {
        if (!config_path.empty()) {
            const std::vector<std::string> cfg_args = config_to_args(config_path);
            if (!args.empty()) {
                final_args.push_back(args.front());
                final_args.insert(final_args.end(), cfg_args.begin(), cfg_args.end());
                final_args.insert(final_args.end(), args.begin() + 1, args.end());
            } else {
                final_args = cfg_args;
            }
        } else {
            final_args = args;
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    std::vector<const char*> cargv;
    cargv.push_back(argv[0]);
    for (const auto& a : final_args) cargv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    // A seed is always present and always recorded, never silent.
    for (CLI::App* cmd : {c_rate, c_dual, c_stat, c_sim, c_var, c_exp, c_bus, c_self})
        if (cmd->parsed() && cmd->count("--seed") > 0) o.seed_given = true;
    if (!o.seed_given) {
        std::random_device rd;
        o.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        std::cerr << "seed (drawn): " << o.seed << "\n";
    }
    betawalk::set_default_threads(o.threads);

    try {
        if (c_rate->parsed()) return run_rate(o);
        if (c_dual->parsed()) return run_dual(o);
        if (c_stat->parsed()) return run_stationary(o);
        if (c_sim->parsed()) return run_simulate(o);
        if (c_var->parsed()) return run_variance_id(o);
        if (c_exp->parsed()) return run_exponent(o);
        if (c_bus->parsed()) return run_busemann(o);
        if (c_self->parsed()) return run_selftest(o);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
