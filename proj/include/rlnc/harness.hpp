#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rlnc/bounds.hpp"

namespace rlnc {

// Per-user erasure probabilities evenly spaced over [lo, hi].
NetworkSpec heterogeneous_epsilons(int users, double lo, double hi);

// Erasure-probability column as written to result files: a single value, an
// explicit per-user list, or a linspace over [lo, hi].
struct EpsSpec {
    enum class Mode { scalar, list, linspace };
    Mode mode = Mode::scalar;
    double lo = 0.0, hi = 0.0;          // linspace
    std::vector<double> values;         // scalar (size 1) or list

    static EpsSpec scalar(double v);
    static EpsSpec list(std::vector<double> v);
    static EpsSpec linspace(double lo, double hi);
    static EpsSpec parse(const std::string& text);
    std::string to_string() const;
    NetworkSpec resolve(int users) const;
};

// One sweep: fixed (K, q, variant, eps), user counts from L_values, N from
// [N_lo, N_hi], one simulated estimate and the selected bounds per grid point.
struct ExperimentConfig {
    std::vector<int> L_values;
    int K = 0;
    std::int64_t q = 2;
    Variant variant = Variant::non_systematic;
    EpsSpec eps;
    int N_lo = -1, N_hi = -1;  // both -1: defaults to [K, K + 10]
    std::int64_t trials = 100000;
    std::uint64_t seed = 1;
    std::vector<std::string> methods;  // subset of {product, theorem1, exact2}
    int threads = 0;
    void validate() const;
    int n_lo() const { return N_lo < 0 ? K : N_lo; }
    int n_hi() const { return N_hi < 0 ? K + 10 : N_hi; }
};

struct ResultRow {
    int L = 0, K = 0, N = 0;
    std::int64_t q = 2;
    Variant variant = Variant::non_systematic;
    std::string eps_spec;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    // method name -> bound value; NaN marks "not applicable"
    std::vector<std::pair<std::string, double>> bounds;
    double sim_mean = 0.0;
    double sim_halfwidth = 0.0;

    double bound(const std::string& method) const;  // NaN if absent
    // Signed bound minus simulation; <= 0 up to noise for a valid lower bound.
    double gap(const std::string& method) const;
};

// Evaluates the grid. Rows come back in deterministic grid order (L outer, N
// inner) regardless of how the work was scheduled.
std::vector<ResultRow> run_sweep(const ExperimentConfig& config);
std::vector<ResultRow> run_sweeps(const std::vector<ExperimentConfig>& configs);

// Fixed column order; unknown methods are merged in first-seen order.
void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void write_jsonl(const std::vector<ResultRow>& rows, std::ostream& out);
void write_results(const std::vector<ResultRow>& rows, const std::string& path_stem,
                   const std::string& format);  // csv | jsonl | both
std::vector<ResultRow> read_results(const std::string& path);

struct MseEntry {
    int L = 0, K = 0;
    std::int64_t q = 2;
    Variant variant = Variant::non_systematic;
    std::string eps_spec;
    std::string method;
    double value = 0.0;  // mean squared bound-vs-simulation gap over the N sweep
    int points = 0;
};

// Groups rows by (L, K, q, variant, eps_spec) and aggregates each method's
// squared gap over the N sweep. Throws if a group's N values do not form a
// contiguous run.
std::vector<MseEntry> mse_report(const std::vector<ResultRow>& rows);
std::string format_mse_table(const std::vector<MseEntry>& entries);

// Built-in experiment grid covering every variant, field size, user count,
// and erasure profile the acceptance suite evaluates.
std::vector<ExperimentConfig> default_preset();

// JSON config: {"sweeps": [{...}, ...]}
std::vector<ExperimentConfig> parse_configs(const std::string& json_text);
std::vector<ExperimentConfig> load_configs(const std::string& path);

}  // namespace rlnc
