#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rlnc/bounds.hpp"
#include "rlnc/gf.hpp"

namespace rlnc {

// Monte Carlo estimate with a 95% normal-approximation half-width.
struct Estimate {
    double mean = 0.0;
    std::int64_t trials = 0;
    double half_width = 0.0;
};
Estimate estimate_from_counts(std::int64_t successes, std::int64_t trials);

struct SimOptions {
    int threads = 0;              // 0 = all available, 1 = serial reference
    bool check_invariants = false;  // recompute and assert per-trial identities
};

// Packet-overlap census of one trial: reception mask per user (bit k set =
// packet k received), at most 16 users.
struct ReceptionStats {
    std::vector<int> per_user;                     // packets received by user j
    int common_all = 0;                            // received by every user
    std::map<std::uint32_t, std::int64_t> subset_only;  // user-subset mask ->
                                                        // packets received by
                                                        // exactly that subset
                                                        // (2 <= |subset| < L)
    int received_by_none = 0;
};
ReceptionStats reception_stats(std::span<const std::uint64_t> user_masks, int total);

struct TrialOutcome {
    bool success = false;
    std::vector<int> user_rank;
    std::vector<std::uint64_t> user_mask;
};

// One fully deterministic trial of the multicast channel: a fresh coefficient
// matrix, independent per-user erasures, rank checks. Identical output for a
// given (seed, trial) regardless of batching.
TrialOutcome simulate_trial(const CodeSpec& code, const NetworkSpec& net,
                            std::uint64_t seed, std::int64_t trial);

// Fraction of trials in which every user decodes. N, K <= 64.
Estimate simulate_multicast(const CodeSpec& code, const NetworkSpec& net,
                            std::int64_t trials, std::uint64_t seed,
                            const SimOptions& opts = {});
// Plain serial loop; same counts as simulate_multicast with any thread count.
Estimate simulate_multicast_serial(const CodeSpec& code, const NetworkSpec& net,
                                   std::int64_t trials, std::uint64_t seed,
                                   const SimOptions& opts = {});

// Ensemble of L random matrices sharing structured rows: rows_all rows common
// to every matrix, rows_pair rows for each unordered pair of matrices, and
// independent rows filling up to rows_total. Estimates P(all have rank cols).
Estimate simulate_correlated_ensemble(int matrices, int rows_all, int rows_pair,
                                      int rows_total, int cols, const Field& f,
                                      std::int64_t trials, std::uint64_t seed,
                                      const SimOptions& opts = {});

}  // namespace rlnc
