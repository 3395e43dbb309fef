// Command-line front end: solve, verify-tree, verify-bounds, horizon,
// compare-oracle, evaluate. Exit codes: 0 pass, 1 validation failure,
// 2 runtime failure.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qpbbm/bounds.hpp"
#include "qpbbm/combinatorics.hpp"
#include "qpbbm/config.hpp"
#include "qpbbm/io.hpp"
#include "qpbbm/oracle.hpp"
#include "qpbbm/picard.hpp"

namespace {

using nlohmann::json;
using namespace qpbbm;

struct CommonFlags {
    std::string config_file;
    int p = 2;
    int nu = 1;
    int radius = 3;
    std::string omega_csv;
    std::string profile = "exp";
    double amp = 1.0;
    double rate = 1.0;
    double T = -1.0;
    int steps = 128;
    int max_iters = 25;
    std::string quad = "trapezoid";
    double tol = 1e-10;
    std::uint64_t seed = 1;
    bool override_horizon = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_file, "JSON config file (overridden by flags)");
    cmd->add_option("--p", f.p, "nonlinearity exponent p >= 2");
    cmd->add_option("--nu", f.nu, "lattice dimension nu >= 1");
    cmd->add_option("--radius", f.radius, "l1 truncation radius N");
    cmd->add_option("--omega", f.omega_csv, "wave vector, comma list; tokens may be sqrtK or piOverK");
    cmd->add_option("--profile", f.profile, "decay profile: exp | poly");
    cmd->add_option("--amp", f.amp, "envelope amplitude (A)");
    cmd->add_option("--rate", f.rate, "envelope rate (rho or r)");
    cmd->add_option("--T", f.T, "time horizon (default: guaranteed horizon)");
    cmd->add_option("--steps", f.steps, "time grid steps M");
    cmd->add_option("--max-iters", f.max_iters, "Picard iteration cap K");
    cmd->add_option("--quad", f.quad, "quadrature: trapezoid | simpson");
    cmd->add_option("--tol", f.tol, "fixed-point tolerance");
    cmd->add_option("--seed", f.seed, "phase seed for initial data");
    cmd->add_flag("--override-horizon", f.override_horizon, "allow T beyond the guaranteed horizon");
}

/// defaults < config file < command-line flags.
SolverConfig build_config(const CLI::App* cmd, CommonFlags& f) {
    SolverConfig cfg;
    std::uint64_t file_seed = f.seed;
    if (!f.config_file.empty()) {
        std::ifstream is(f.config_file);
        if (!is) throw std::invalid_argument("cannot open config file " + f.config_file);
        json j;
        is >> j;
        apply_config_json(cfg, file_seed, j);
    }
    f.seed = cmd->count("--seed") ? f.seed : file_seed;
    auto flag = [&](const char* name) { return cmd->count(name) > 0; };
    const bool have_file = !f.config_file.empty();
    if (flag("--p") || !have_file) cfg.p = f.p;
    if (flag("--nu") || !have_file) cfg.nu = f.nu;
    if (flag("--radius") || !have_file) cfg.trunc_radius = f.radius;
    if (flag("--profile") || !have_file) cfg.profile.kind = parse_profile_kind(f.profile);
    if (flag("--amp") || !have_file) cfg.profile.amp = f.amp;
    if (flag("--rate") || !have_file) cfg.profile.rate = f.rate;
    if (flag("--T")) cfg.time_horizon = f.T;
    if (flag("--steps") || !have_file) cfg.time_steps = f.steps;
    if (flag("--max-iters") || !have_file) cfg.max_iters = f.max_iters;
    if (flag("--quad") || !have_file) cfg.quad_rule = parse_quad_rule(f.quad);
    if (flag("--tol") || !have_file) cfg.tol_fixed_point = f.tol;
    if (flag("--override-horizon")) cfg.override_horizon = true;
    if (flag("--omega"))
        cfg.omega = FrequencyVector(parse_omega_list(f.omega_csv));
    else if (!have_file || cfg.omega.nu() != cfg.nu)
        cfg.omega = default_omega(cfg.nu);
    cfg.validate();
    if (has_numerical_resonance(cfg.trunc(), cfg.omega))
        std::cerr << "warning: some nonzero <n> vanishes to machine precision on the truncation;"
                     " the wave vector may be resonant\n";
    return cfg;
}

json diagnostics_json(const SolveResult& res) {
    json iters = json::array();
    for (const IterateDiagnostics& d : res.iterates)
        iters.push_back({{"k", d.k},
                         {"sup_diff", d.sup_diff},
                         {"theory_bound", d.theory_bound},
                         {"envelope_ratio", d.envelope_ratio},
                         {"truncation_mass", d.truncation_mass}});
    return {{"iterates", iters},
            {"converged", res.converged},
            {"iterations", res.iterations},
            {"residual", res.residual},
            {"truncation_mass", res.truncation_mass},
            {"init_within_envelope", res.init_within_envelope},
            {"envelope_ok", res.envelope_ok}};
}

void write_manifest(const std::string& path, const SolverConfig& cfg, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
    json digests = json::object();
    for (const std::string& f : outputs) digests[f] = file_digest(f);
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    json manifest = {{"config", config_to_json(cfg, seed)},
                     {"version", kVersion},
                     {"seed", seed},
                     {"timestamp_unix_ms",
                      std::chrono::duration_cast<std::chrono::milliseconds>(now).count()},
                     {"output_digests", digests}};
    std::ofstream os(path);
    os << manifest.dump(2) << "\n";
}

int cmd_solve(const CLI::App* cmd, CommonFlags& f, const std::string& out_path) {
    const SolverConfig cfg = build_config(cmd, f);
    const CoeffField init = make_initial(cfg.profile, cfg.p, cfg.trunc(), f.seed);
    const SolveResult res = solve(cfg, init);
    if (!res.init_within_envelope) std::cerr << "warning: initial data violates the profile envelope\n";

    std::vector<std::string> outputs;
    {
        std::ofstream os(out_path);
        if (!os) throw std::runtime_error("cannot open output file " + out_path);
        write_solution_csv(os, res.solution);
        outputs.push_back(out_path);
    }
    const std::string diag_path = out_path + ".diagnostics.json";
    {
        std::ofstream os(diag_path);
        os << diagnostics_json(res).dump(2) << "\n";
        outputs.push_back(diag_path);
    }
    write_manifest(out_path + ".manifest.json", cfg, f.seed, outputs);
    std::cout << diagnostics_json(res).dump(2) << "\n";
    return res.envelope_ok ? 0 : 2;
}

int cmd_verify_tree(int k, int p, double flat) {
    const std::vector<TreeNodePtr> nodes = enumerate_tree(k, p);
    bool identities_ok = true;
    for (const TreeNodePtr& node : nodes) {
        const TreeStats s = stats(*node, p);
        // alpha = beta + 1/(p-1), exactly; and integer slot count.
        if (!(s.sigma == Rational(s.ell) + Rational(1, p - 1))) identities_ok = false;
    }
    const double diamond = diamond_sum(k, p, flat);

    // Cross-check the tree formula against a small Picard run.
    SolverConfig cfg;
    cfg.p = p;
    cfg.nu = 1;
    cfg.trunc_radius = 2;
    cfg.omega = default_omega(1);
    cfg.profile = {DecayProfile::Kind::Exponential, 1.0, 1.0};
    cfg.time_steps = 256;
    cfg.validate();
    const CoeffField init = make_initial(cfg.profile, p, cfg.trunc(), 1);
    TimeGridField iterate = picard_initial_guess(init, cfg);
    for (int j = 0; j < k; ++j) iterate = picard_step(iterate, init, cfg);
    double max_dev = 0.0;
    for (const MultiIndex& n : enumerate_lattice(cfg.trunc())) {
        const ExpPoly exact = tree_expansion(k, n, init, cfg.omega, p, cfg.trunc());
        for (size_t m = 0; m < iterate.times.size(); ++m)
            max_dev = std::max(max_dev, std::abs(exact.eval(iterate.times[m]) - iterate.frames[m].at(n)));
    }

    json rep = {{"k", k},
                {"p", p},
                {"node_count", node_count(k, p)},
                {"identity_checks", identities_ok},
                {"diamond_value", diamond},
                {"max_abs_deviation_vs_picard", max_dev}};
    std::cout << rep.dump(2) << "\n";
    return identities_ok ? 0 : 2;
}

int cmd_verify_bounds() {
    bool ok = true;
    json checks = json::array();
    auto record = [&](const std::string& name, bool pass, double value) {
        checks.push_back({{"check", name}, {"pass", pass}, {"value", value}});
        ok = ok && pass;
    };

    {
        bool pass = true;
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> sdist(1.01, 50.0);
        for (int i = 0; i < 100; ++i) {
            const double s = sdist(rng);
            if (zeta_partial(s, 1e-6) > 1.0 + 1.0 / (s - 1.0) + 1e-6) pass = false;
        }
        record("zeta <= 1 + 1/(s-1) on random s-grid", pass, 0.0);
    }
    {
        bool pass = true;
        double worst = 0.0;
        for (int i = 1; i <= 1000; ++i) {
            const double rho = i / 1000.0;
            worst = std::max(worst, exp_sum_1d(rho) * rho);
            if (exp_sum_1d(rho) * rho > 3.0) pass = false;
        }
        record("exp_sum_1d(rho)*rho <= 3 on (0,1]", pass, worst);
    }
    {
        bool pass = true;
        for (int nu : {1, 2, 3})
            for (double s : {8.0, 12.0, 16.0})
                if (H_partial(s, nu, 60) > b_frak(s, nu)) pass = false;
        record("H(s;nu) partial sums <= b(s;nu)", pass, 0.0);
    }
    {
        const ProbeReport probes = inequality_probes(100000, 7);
        record("mean-value inequality probe", probes.max_mie_violation <= 1e-12, probes.max_mie_violation);
        record("generalized Bernoulli probe", probes.max_gbi_violation <= 1e-12, probes.max_gbi_violation);
    }
    std::cout << json{{"checks", checks}, {"pass", ok}}.dump(2) << "\n";
    return ok ? 0 : 2;
}

int cmd_horizon(const CLI::App* cmd, CommonFlags& f, double target_T) {
    DecayProfile profile{parse_profile_kind(f.profile), f.amp, f.rate};
    const HorizonReport rep = horizon(f.p, profile, f.nu);
    json out = {{"p", rep.p},
                {"nu", rep.nu},
                {"profile", f.profile},
                {"amp", profile.amp},
                {"rate", profile.rate},
                {"horizon", rep.horizon},
                {"constant_B", rep.constant_B}};
    if (cmd->count("--target-T") > 0)
        out["max_amp_for_target_T"] = max_amp_for_horizon(f.p, profile, f.nu, target_T);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_compare_oracle(const CLI::App* cmd, CommonFlags& f) {
    const SolverConfig cfg = build_config(cmd, f);
    const CoeffField init = make_initial(cfg.profile, cfg.p, cfg.trunc(), f.seed);
    const SolveResult picard = solve(cfg, init);
    const TimeGridField rk =
        rk4_integrate(init, cfg.time_horizon, cfg.time_steps, cfg.omega, cfg.p, cfg.trunc());
    const TimeGridField rk2 =
        rk4_integrate(init, cfg.time_horizon, 2 * cfg.time_steps, cfg.omega, cfg.p, cfg.trunc());

    json per_time = json::array();
    for (size_t m = 0; m < rk.frames.size(); ++m)
        per_time.push_back(sup_distance(picard.solution.frames[m], rk.frames[m]));
    double rk_self = 0.0;
    for (size_t m = 0; m < rk.frames.size(); ++m)
        rk_self = std::max(rk_self, sup_distance(rk.frames[m], rk2.frames[2 * m]));

    json rep = {{"sup_distance", sup_distance(picard.solution, rk)},
                {"per_time_distance", per_time},
                {"rk_self_refinement", rk_self},
                {"picard_residual", picard.residual}};
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_evaluate(const std::string& solution_path, int x_samples, int t_index,
                 const std::string& omega_csv, double x_min, double x_max, const std::string& out_path) {
    std::ifstream is(solution_path);
    if (!is) throw std::invalid_argument("cannot open solution file " + solution_path);
    const TimeGridField grid = read_solution_csv(is);
    if (t_index < 0 || t_index >= static_cast<int>(grid.frames.size()))
        throw std::invalid_argument("t-index " + std::to_string(t_index) + " out of range [0, " +
                                    std::to_string(grid.frames.size() - 1) + "]");
    if (x_samples < 1) throw std::invalid_argument("x-samples >= 1 required");
    const FrequencyVector omega(parse_omega_list(omega_csv));
    const CoeffField& frame = grid.frames[static_cast<size_t>(t_index)];

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot open output file " + out_path);
        os = &file;
    }
    *os << "x,re,im\n";
    for (int i = 0; i < x_samples; ++i) {
        const double x = x_samples == 1 ? x_min : x_min + (x_max - x_min) * i / (x_samples - 1);
        const Complex u = evaluate_u(frame, omega, x);
        *os << format_double(x) << "," << format_double(u.real()) << "," << format_double(u.imag()) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral Picard solver and verification suite for gBBM with quasi-periodic data"};
    app.require_subcommand(1);

    CommonFlags f;
    std::string out_path = "solution.csv";

    CLI::App* solve_cmd = app.add_subcommand("solve", "run the Picard solver");
    add_common_flags(solve_cmd, f);
    solve_cmd->add_option("--out", out_path, "solution CSV path");

    int tree_k = 2, tree_p = 2;
    double tree_flat = 0.25;
    CLI::App* tree_cmd = app.add_subcommand("verify-tree", "combinatorial-tree identities and Picard cross-check");
    tree_cmd->add_option("--k", tree_k, "tree depth");
    tree_cmd->add_option("--p", tree_p, "nonlinearity exponent");
    tree_cmd->add_option("--flat", tree_flat, "weight parameter for the diamond sum");

    app.add_subcommand("verify-bounds", "analytic inequality battery");

    double target_T = 0.0;
    CLI::App* horizon_cmd = app.add_subcommand("horizon", "guaranteed horizon and decay constant");
    add_common_flags(horizon_cmd, f);
    horizon_cmd->add_option("--target-T", target_T, "also report the maximal amplitude reaching this horizon");

    CLI::App* compare_cmd = app.add_subcommand("compare-oracle", "Picard vs RK4 cross-validation");
    add_common_flags(compare_cmd, f);

    std::string solution_path, eval_omega = "1", eval_out;
    int x_samples = 64, t_index = 0;
    double x_min = 0.0, x_max = 2.0 * std::numbers::pi;
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "sample u(t, x) from a solution CSV");
    eval_cmd->add_option("--solution", solution_path, "solution CSV file")->required();
    eval_cmd->add_option("--x-samples", x_samples, "number of x samples");
    eval_cmd->add_option("--t-index", t_index, "time frame index");
    eval_cmd->add_option("--omega", eval_omega, "wave vector used to produce the solution");
    eval_cmd->add_option("--x-min", x_min, "left end of the x grid");
    eval_cmd->add_option("--x-max", x_max, "right end of the x grid");
    eval_cmd->add_option("--out", eval_out, "output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
        if (solve_cmd->parsed()) return cmd_solve(solve_cmd, f, out_path);
        if (tree_cmd->parsed()) return cmd_verify_tree(tree_k, tree_p, tree_flat);
        if (app.get_subcommand("verify-bounds")->parsed()) return cmd_verify_bounds();
        if (horizon_cmd->parsed()) return cmd_horizon(horizon_cmd, f, target_T);
        if (compare_cmd->parsed()) return cmd_compare_oracle(compare_cmd, f);
        if (eval_cmd->parsed())
            return cmd_evaluate(solution_path, x_samples, t_index, eval_omega, x_min, x_max, eval_out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::out_of_range& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
