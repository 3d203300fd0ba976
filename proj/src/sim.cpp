#include "rlnc/sim.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "rlnc/rng.hpp"

namespace rlnc {

namespace {

Field field_for_q(std::int64_t q) {
    switch (q) {
        case 2: return Field(1);
        case 4: return Field(2);
        case 16: return Field(4);
        case 256: return Field(8);
        default:
            throw std::invalid_argument("simulator supports q in {2, 4, 16, 256}");
    }
}

void check_sim_specs(const CodeSpec& code, const NetworkSpec& net) {
    code.validate();
    net.validate();
    if (code.N > 64 || code.K > 64) {
        throw std::invalid_argument("simulator supports N, K <= 64");
    }
}

struct TrialWork {
    std::vector<std::uint64_t> coeff_bits;  // q == 2: one word per packet
    std::vector<std::uint8_t> coeff_bytes;  // q > 2: K bytes per packet
    std::vector<std::uint64_t> masks;
    std::vector<int> ranks;
};

// One trial. All randomness is consumed up front in a fixed order, so the
// outcome depends only on (seed, trial). full_eval computes every user's rank
// instead of stopping at the first failure.
bool run_trial(const CodeSpec& code, const Field& f,
               std::span<const std::uint64_t> thresholds, std::uint64_t seed,
               std::int64_t trial, TrialWork& w, bool full_eval) {
    const int N = code.N, K = code.K, L = int(thresholds.size());
    const int deg = f.extension_degree();
    const bool systematic = code.variant == Variant::systematic;
    CounterRng rng(seed, std::uint64_t(trial), 0);

    if (deg == 1) {
        w.coeff_bits.resize(N);
        for (int k = 0; k < N; ++k) {
            w.coeff_bits[k] =
                (systematic && k < K) ? (1ull << k) : rng.next_bits(K);
        }
    } else {
        w.coeff_bytes.resize(std::size_t(N) * K);
        for (int k = 0; k < N; ++k) {
            std::uint8_t* row = w.coeff_bytes.data() + std::size_t(k) * K;
            if (systematic && k < K) {
                std::fill(row, row + K, 0);
                row[k] = 1;
            } else {
                for (int c = 0; c < K; ++c) row[c] = std::uint8_t(rng.next_bits(deg));
            }
        }
    }

    w.masks.assign(L, 0);
    for (int j = 0; j < L; ++j) {
        for (int k = 0; k < N; ++k) {
            if (!rng.bernoulli(thresholds[j])) w.masks[j] |= 1ull << k;
        }
    }

    w.ranks.assign(L, 0);
    bool ok = true;
    if (deg == 1) {
        Gf2RankTracker tr(K);
        for (int j = 0; j < L; ++j) {
            if (!full_eval && !ok) break;
            tr.reset();
            if (!full_eval && std::popcount(w.masks[j]) < K) {
                ok = false;
                continue;
            }
            for (int k = 0; k < N && tr.rank() < K; ++k) {
                if ((w.masks[j] >> k) & 1u) tr.add_row(w.coeff_bits[k]);
            }
            w.ranks[j] = tr.rank();
            ok = ok && tr.rank() == K;
        }
    } else {
        GfqRankTracker tr(K, f);
        for (int j = 0; j < L; ++j) {
            if (!full_eval && !ok) break;
            tr.reset();
            if (!full_eval && std::popcount(w.masks[j]) < K) {
                ok = false;
                continue;
            }
            for (int k = 0; k < N && tr.rank() < K; ++k) {
                if ((w.masks[j] >> k) & 1u) {
                    tr.add_row(w.coeff_bytes.data() + std::size_t(k) * K);
                }
            }
            w.ranks[j] = tr.rank();
            ok = ok && tr.rank() == K;
        }
    }
    return ok;
}

void check_trial_invariants(const CodeSpec& code, const TrialWork& w) {
    // Census identities, and for systematic codes the rank floor implied by
    // received systematic packets.
    ReceptionStats stats = reception_stats(w.masks, code.N);
    for (std::size_t j = 0; j < w.masks.size(); ++j) {
        if (stats.per_user[j] != std::popcount(w.masks[j])) {
            throw std::logic_error("per-user census mismatch");
        }
        const int cap = std::min(stats.per_user[j], code.K);
        if (w.ranks[j] > cap) throw std::logic_error("rank exceeds received rows");
        if (code.variant == Variant::systematic) {
            const std::uint64_t sys_mask =
                code.K == 64 ? ~0ull : ((1ull << code.K) - 1);
            if (w.ranks[j] < std::popcount(w.masks[j] & sys_mask)) {
                throw std::logic_error("rank below received systematic packets");
            }
        }
    }
}

std::vector<std::uint64_t> erasure_thresholds(const NetworkSpec& net) {
    std::vector<std::uint64_t> t(net.eps.size());
    for (std::size_t j = 0; j < net.eps.size(); ++j) {
        t[j] = CounterRng::bernoulli_threshold(net.eps[j]);
    }
    return t;
}

}  // namespace

Estimate estimate_from_counts(std::int64_t successes, std::int64_t trials) {
    if (trials < 1 || successes < 0 || successes > trials) {
        throw std::invalid_argument("bad success/trial counts");
    }
    const double mean = double(successes) / double(trials);
    double hw = 1.96 * std::sqrt(mean * (1.0 - mean) / double(trials));
    if (successes == 0 || successes == trials) {
        // The normal approximation collapses to width zero here, which would
        // claim certainty after finitely many trials. Fall back to the
        // rule-of-three 95% bound for an event never (or always) observed.
        hw = 3.0 / double(trials);
    }
    return Estimate{mean, trials, hw};
}

ReceptionStats reception_stats(std::span<const std::uint64_t> user_masks, int total) {
    const int L = int(user_masks.size());
    if (L < 1 || L > 16) throw std::invalid_argument("census supports 1..16 users");
    if (total < 0 || total > 64) throw std::invalid_argument("census supports 0..64 packets");

    ReceptionStats s;
    s.per_user.assign(L, 0);
    std::vector<int> single(L, 0);
    const std::uint64_t pkt_mask = total == 64 ? ~0ull : ((1ull << total) - 1);
    for (int j = 0; j < L; ++j) s.per_user[j] = std::popcount(user_masks[j] & pkt_mask);

    long long weighted_subsets = 0;
    for (int k = 0; k < total; ++k) {
        std::uint32_t pattern = 0;
        for (int j = 0; j < L; ++j) {
            if ((user_masks[j] >> k) & 1u) pattern |= 1u << j;
        }
        const int pc = std::popcount(pattern);
        if (pc == L) {
            ++s.common_all;
        } else if (pc == 0) {
            ++s.received_by_none;
        } else if (pc == 1) {
            ++single[std::countr_zero(pattern)];
        } else {
            ++s.subset_only[pattern];
            weighted_subsets += pc - 1;
        }
    }

    // Every packet lands in exactly one census class; cross-check the
    // inclusion-exclusion identity relating the classes.
    long long sum_m = 0;
    for (int m : s.per_user) sum_m += m;
    const long long expect_none =
        total - sum_m + (long long)(L - 1) * s.common_all + weighted_subsets;
    if (expect_none != s.received_by_none) {
        throw std::logic_error("reception census identity violated");
    }
    for (int j = 0; j < L; ++j) {
        long long mj = s.common_all + single[j];
        for (const auto& [pattern, count] : s.subset_only) {
            if ((pattern >> j) & 1u) mj += count;
        }
        if (mj != s.per_user[j]) throw std::logic_error("per-user census identity violated");
    }
    return s;
}

TrialOutcome simulate_trial(const CodeSpec& code, const NetworkSpec& net,
                            std::uint64_t seed, std::int64_t trial) {
    check_sim_specs(code, net);
    const Field f = field_for_q(code.q);
    const auto thresholds = erasure_thresholds(net);
    TrialWork w;
    TrialOutcome out;
    out.success = run_trial(code, f, thresholds, seed, trial, w, /*full_eval=*/true);
    out.user_rank = w.ranks;
    out.user_mask = w.masks;
    return out;
}

namespace {

Estimate simulate_loop(const CodeSpec& code, const NetworkSpec& net, std::int64_t trials,
                       std::uint64_t seed, const SimOptions& opts, int threads) {
    check_sim_specs(code, net);
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (opts.check_invariants && net.users() > 16) {
        throw std::invalid_argument("invariant checking supports at most 16 users");
    }
    const Field f = field_for_q(code.q);
    const auto thresholds = erasure_thresholds(net);
    const bool full_eval = opts.check_invariants;

    std::int64_t successes = 0;
    if (threads == 1) {
        TrialWork w;
        for (std::int64_t t = 0; t < trials; ++t) {
            const bool ok = run_trial(code, f, thresholds, seed, t, w, full_eval);
            if (opts.check_invariants) check_trial_invariants(code, w);
            successes += ok ? 1 : 0;
        }
    } else {
#pragma omp parallel num_threads(threads)
        {
            TrialWork w;
#pragma omp for schedule(static) reduction(+ : successes)
            for (std::int64_t t = 0; t < trials; ++t) {
                successes += run_trial(code, f, thresholds, seed, t, w, full_eval) ? 1 : 0;
            }
        }
    }
    return estimate_from_counts(successes, trials);
}

}  // namespace

Estimate simulate_multicast(const CodeSpec& code, const NetworkSpec& net,
                            std::int64_t trials, std::uint64_t seed,
                            const SimOptions& opts) {
    int threads = opts.threads == 0 ? omp_get_max_threads() : opts.threads;
    if (threads < 1) throw std::invalid_argument("bad thread count");
    // Invariant checking throws from inside the trial loop; keep that serial.
    if (opts.check_invariants) threads = 1;
    return simulate_loop(code, net, trials, seed, opts, threads);
}

Estimate simulate_multicast_serial(const CodeSpec& code, const NetworkSpec& net,
                                   std::int64_t trials, std::uint64_t seed,
                                   const SimOptions& opts) {
    return simulate_loop(code, net, trials, seed, opts, 1);
}

Estimate simulate_correlated_ensemble(int matrices, int rows_all, int rows_pair,
                                      int rows_total, int cols, const Field& f,
                                      std::int64_t trials, std::uint64_t seed,
                                      const SimOptions& opts) {
    if (matrices < 1 || matrices > 16) {
        throw std::invalid_argument("ensemble supports 1..16 matrices");
    }
    if (rows_all < 0 || rows_pair < 0 || cols < 0 || rows_total < 0) {
        throw std::invalid_argument("negative ensemble shape");
    }
    const int pair_per_matrix = (matrices - 1) * rows_pair;
    const int indep = rows_total - rows_all - pair_per_matrix;
    if (indep < 0) {
        throw std::invalid_argument("shared rows exceed the per-matrix row budget");
    }
    if (f.extension_degree() == 1 && cols > 64) {
        throw std::invalid_argument("binary ensemble supports cols <= 64");
    }
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");

    const int L = matrices;
    const int npairs = L * (L - 1) / 2;
    const int deg = f.extension_degree();

    const auto run_one = [&](std::int64_t trial, std::vector<std::uint64_t>& bits,
                             std::vector<std::uint8_t>& bytes) {
        CounterRng rng(seed, std::uint64_t(trial), 1);
        // Draw order: rows shared by all, pair rows in lexicographic pair
        // order, then each matrix's own rows.
        const int total_rows = rows_all + npairs * rows_pair + L * indep;
        if (deg == 1) {
            bits.resize(total_rows);
            for (int r = 0; r < total_rows; ++r) bits[r] = rng.next_bits(cols);
        } else {
            bytes.resize(std::size_t(total_rows) * cols);
            for (std::size_t i = 0; i < bytes.size(); ++i) {
                bytes[i] = std::uint8_t(rng.next_bits(deg));
            }
        }
        const auto pair_index = [L](int a, int b) {
            // lexicographic rank of (a, b), a < b
            return a * (2 * L - a - 1) / 2 + (b - a - 1);
        };
        bool ok = true;
        Gf2RankTracker tr2(deg == 1 ? cols : 0);
        GfqRankTracker trq(deg == 1 ? 0 : cols, f);
        for (int j = 0; j < L && ok; ++j) {
            const auto feed = [&](int row_idx) {
                if (deg == 1) {
                    tr2.add_row(bits[row_idx]);
                } else {
                    trq.add_row(bytes.data() + std::size_t(row_idx) * cols);
                }
            };
            tr2.reset();
            trq.reset();
            for (int r = 0; r < rows_all; ++r) feed(r);
            for (int other = 0; other < L; ++other) {
                if (other == j) continue;
                const int p = pair_index(std::min(j, other), std::max(j, other));
                for (int r = 0; r < rows_pair; ++r) feed(rows_all + p * rows_pair + r);
            }
            const int own = rows_all + npairs * rows_pair + j * indep;
            for (int r = 0; r < indep; ++r) feed(own + r);
            ok = (deg == 1 ? tr2.rank() : trq.rank()) == cols;
        }
        return ok;
    };

    int threads = opts.threads == 0 ? omp_get_max_threads() : opts.threads;
    if (threads < 1) throw std::invalid_argument("bad thread count");
    std::int64_t successes = 0;
    if (threads == 1) {
        std::vector<std::uint64_t> bits;
        std::vector<std::uint8_t> bytes;
        for (std::int64_t t = 0; t < trials; ++t) successes += run_one(t, bits, bytes) ? 1 : 0;
    } else {
#pragma omp parallel num_threads(threads)
        {
            std::vector<std::uint64_t> bits;
            std::vector<std::uint8_t> bytes;
#pragma omp for schedule(static) reduction(+ : successes)
            for (std::int64_t t = 0; t < trials; ++t) {
                successes += run_one(t, bits, bytes) ? 1 : 0;
            }
        }
    }
    return estimate_from_counts(successes, trials);
}

}  // namespace rlnc
