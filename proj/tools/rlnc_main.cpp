// Command-line front end: single bound/simulation evaluations, experiment
// sweeps with CSV/JSONL output, MSE post-processing, and the three-matrix
// shared-rows example.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rlnc/bounds.hpp"
#include "rlnc/gf.hpp"
#include "rlnc/harness.hpp"
#include "rlnc/rankprob.hpp"
#include "rlnc/sim.hpp"

namespace {

using namespace rlnc;

std::uint64_t effective_seed(std::uint64_t flag_seed) {
    // RLNC_SEED, when set, overrides the flag.
    if (const char* env = std::getenv("RLNC_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::invalid_argument("RLNC_SEED is not an integer: " + std::string(env));
        }
    }
    return flag_seed;
}

Variant parse_variant_flag(const std::string& s) {
    if (s == "systematic") return Variant::systematic;
    if (s == "non-systematic" || s == "nonsystematic" || s == "non_systematic") {
        return Variant::non_systematic;
    }
    throw CLI::ValidationError("--variant", "expected non-systematic or systematic");
}

SweepPath parse_path_flag(const std::string& s) {
    if (s == "naive") return SweepPath::naive;
    if (s == "order_free") return SweepPath::order_free;
    if (s == "homogeneous") return SweepPath::homogeneous;
    throw CLI::ValidationError("--path", "expected naive, order_free or homogeneous");
}

int cmd_bound(int N, int K, std::int64_t q, int L, const std::string& eps,
              const std::string& variant, const std::string& method,
              const std::string& path, int threads) {
    const CodeSpec code{N, K, q, parse_variant_flag(variant)};
    const NetworkSpec net = EpsSpec::parse(eps).resolve(L);
    if (method == "product") {
        std::printf("product %.12g\n", product_bound(code, net));
    } else if (method == "exact2") {
        if (L != 2) throw std::invalid_argument("exact2 requires --L 2");
        std::printf("exact2 %.12g\n", two_user_exact(code, net.eps[0], net.eps[1]));
    } else if (method == "theorem1") {
        BoundResult r;
        if (path == "auto") {
            r = multicast_bound(code, net);
        } else {
            r = multicast_bound(code, net, parse_path_flag(path), threads);
        }
        std::printf("%s %.12g terms=%llu\n", r.method.c_str(), r.value,
                    (unsigned long long)r.terms_evaluated);
    } else {
        throw std::invalid_argument("unknown method: " + method);
    }
    return 0;
}

int cmd_simulate(int N, int K, std::int64_t q, int L, const std::string& eps,
                 const std::string& variant, std::int64_t trials, std::uint64_t seed,
                 int threads, bool check_invariants) {
    const CodeSpec code{N, K, q, parse_variant_flag(variant)};
    const NetworkSpec net = EpsSpec::parse(eps).resolve(L);
    SimOptions opts;
    opts.threads = threads;
    opts.check_invariants = check_invariants;
    const Estimate est = simulate_multicast(code, net, trials, effective_seed(seed), opts);
    std::printf("sim_mean %.12g\nsim_halfwidth %.12g\ntrials %lld\n", est.mean,
                est.half_width, (long long)est.trials);
    return 0;
}

int cmd_sweep(const std::string& preset, const std::string& config_path,
              std::optional<std::int64_t> trials, std::optional<std::uint64_t> seed,
              const std::string& out, const std::string& format, int threads) {
    std::vector<ExperimentConfig> configs;
    if (!config_path.empty()) {
        configs = load_configs(config_path);
    } else if (preset == "default") {
        configs = default_preset();
    } else if (!preset.empty()) {
        throw std::invalid_argument("unknown preset: " + preset);
    } else {
        throw std::invalid_argument("sweep needs --preset or --config");
    }
    for (auto& c : configs) {
        if (trials) c.trials = *trials;
        if (seed) c.seed = *seed;
        c.seed = effective_seed(c.seed);
        c.threads = threads;
    }
    const auto rows = run_sweeps(configs);
    write_results(rows, out, format);
    std::printf("wrote %zu rows to %s (%s)\n", rows.size(), out.c_str(), format.c_str());
    return 0;
}

int cmd_mse(const std::string& in_path) {
    const auto rows = read_results(in_path);
    const auto entries = mse_report(rows);
    std::fputs(format_mse_table(entries).c_str(), stdout);
    return 0;
}

int cmd_example2(std::int64_t trials, std::uint64_t seed) {
    // Three 6x5 binary matrices: 4 rows shared by all, plus one extra shared
    // row per pair. Analytical lower bounds vs. the simulated ensemble.
    JointRankQuery query;
    query.rows = {6, 6, 6};
    query.common_rows = 4;
    query.cols = 5;
    query.q = 2;
    const double independent = joint_full_rank_product_bound(query);
    const double shared = joint_full_rank_bound(query);
    const Field f(1);
    const Estimate est =
        simulate_correlated_ensemble(3, 4, 1, 6, 5, f, trials, effective_seed(seed));
    std::printf("independent_bound %.4f\n", independent);
    std::printf("shared_rows_bound %.4f\n", shared);
    std::printf("simulated %.4f +- %.4f (%lld trials)\n", est.mean, est.half_width,
                (long long)est.trials);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lower bounds and Monte Carlo validation for RLNC multicast delivery"};
    app.require_subcommand(1);

    int N = 10, K = 5, L = 2, threads = 0;
    std::int64_t q = 2;
    std::string eps = "0.01";
    std::string variant = "non-systematic";
    std::string method = "theorem1";
    std::string path = "auto";
    std::int64_t trials = 100000;
    std::uint64_t seed = 1;

    auto* bound = app.add_subcommand("bound", "evaluate one analytical bound");
    bound->add_option("--N", N, "coded transmissions");
    bound->add_option("--K", K, "source packets");
    bound->add_option("--q", q, "field size");
    bound->add_option("--L", L, "number of users");
    bound->add_option("--eps", eps, "erasure prob: scalar, comma list, or linspace:lo:hi");
    bound->add_option("--variant", variant, "non-systematic | systematic");
    bound->add_option("--method", method, "product | theorem1 | exact2");
    bound->add_option("--path", path, "theorem1 sweep: auto | naive | order_free | homogeneous");
    bound->add_option("--threads", threads, "0 = all cores");

    auto* simulate = app.add_subcommand("simulate", "run one Monte Carlo estimate");
    bool check_invariants = false;
    simulate->add_option("--N", N, "coded transmissions");
    simulate->add_option("--K", K, "source packets");
    simulate->add_option("--q", q, "field size (2, 4, 16, 256)");
    simulate->add_option("--L", L, "number of users");
    simulate->add_option("--eps", eps, "erasure prob: scalar, comma list, or linspace:lo:hi");
    simulate->add_option("--variant", variant, "non-systematic | systematic");
    simulate->add_option("--trials", trials, "Monte Carlo trials");
    simulate->add_option("--seed", seed, "RNG seed (RLNC_SEED env overrides)");
    simulate->add_option("--threads", threads, "0 = all cores");
    simulate->add_flag("--check-invariants", check_invariants,
                       "assert per-trial structural identities (serial)");

    auto* sweep = app.add_subcommand("sweep", "run an experiment grid");
    std::string preset, config_path, out = "sweep", format = "both";
    std::int64_t sweep_trials = -1;
    std::int64_t sweep_seed = -1;
    sweep->add_option("--preset", preset, "built-in grid: default");
    sweep->add_option("--config", config_path, "JSON config with a 'sweeps' array");
    sweep->add_option("--trials", sweep_trials, "override trials for all sweeps");
    sweep->add_option("--seed", sweep_seed, "override seed for all sweeps");
    sweep->add_option("--out", out, "output path stem");
    sweep->add_option("--format", format, "csv | jsonl | both");
    sweep->add_option("--threads", threads, "0 = all cores");

    auto* mse_cmd = app.add_subcommand("mse", "aggregate bound-vs-simulation gaps");
    std::string in_path;
    mse_cmd->add_option("--in", in_path, "sweep output (.csv or .jsonl)")->required();

    auto* example2 = app.add_subcommand("example2", "three matrices with shared rows");
    std::int64_t ex_trials = 10000;
    example2->add_option("--trials", ex_trials, "Monte Carlo trials");
    example2->add_option("--seed", seed, "RNG seed (RLNC_SEED env overrides)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bound->parsed()) {
            return cmd_bound(N, K, q, L, eps, variant, method, path, threads);
        }
        if (simulate->parsed()) {
            return cmd_simulate(N, K, q, L, eps, variant, trials, seed, threads,
                                check_invariants);
        }
        if (sweep->parsed()) {
            return cmd_sweep(preset, config_path,
                             sweep_trials < 0 ? std::nullopt
                                              : std::optional<std::int64_t>(sweep_trials),
                             sweep_seed < 0 ? std::nullopt
                                            : std::optional<std::uint64_t>(sweep_seed),
                             out, format, threads);
        }
        if (mse_cmd->parsed()) {
            return cmd_mse(in_path);
        }
        if (example2->parsed()) {
            return cmd_example2(ex_trials, seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
