#include "oracles.hpp"

#include <bit>
#include <stdexcept>

#include "rlnc/rankprob.hpp"

namespace rlnc::testing {

int oracle_rank_gf2(const std::vector<std::uint64_t>& rows, int cols) {
    const int n = int(rows.size());
    if (n > 16) throw std::invalid_argument("oracle rank supports <= 16 rows");
    const std::uint64_t mask = cols >= 64 ? ~0ull : ((1ull << cols) - 1);
    int best = 0;
    for (std::uint32_t subset = 0; subset < (1u << n); ++subset) {
        const int size = std::popcount(subset);
        if (size <= best) continue;
        bool independent = true;
        // Check every nonempty combination drawn from the subset.
        for (std::uint32_t combo = subset; combo; combo = (combo - 1) & subset) {
            std::uint64_t acc = 0;
            for (int r = 0; r < n; ++r) {
                if ((combo >> r) & 1u) acc ^= rows[r] & mask;
            }
            if (acc == 0) {
                independent = false;
                break;
            }
        }
        if (independent) best = size;
    }
    return best;
}

std::vector<long long> gf2_rank_distribution(int rows, int cols) {
    if (rows < 0 || cols < 0 || rows * cols > 20) {
        throw std::invalid_argument("rank distribution oracle supports rows*cols <= 20");
    }
    std::vector<long long> counts(std::min(rows, cols) + 1, 0);
    const std::uint64_t total = 1ull << (rows * cols);
    std::vector<std::uint64_t> r(rows);
    for (std::uint64_t bits = 0; bits < total; ++bits) {
        for (int i = 0; i < rows; ++i) {
            r[i] = (bits >> (i * cols)) & ((1ull << cols) - 1);
        }
        ++counts[oracle_rank_gf2(r, cols)];
    }
    if (rows == 0 || cols == 0) counts[0] = 1;
    return counts;
}

std::map<std::vector<int>, long long> oracle_reception_counts(int users, int total) {
    if (users < 1 || users > 3 || total < 0 || total > 8) {
        throw std::invalid_argument("reception census oracle supports L <= 3, N <= 8");
    }
    const int patterns = 1 << users;
    const std::uint32_t full = patterns - 1;
    std::map<std::vector<int>, long long> counts;
    std::vector<int> digit(total, 0);
    std::vector<int> key(users + 1);
    for (;;) {
        std::fill(key.begin(), key.end(), 0);
        for (int k = 0; k < total; ++k) {
            const std::uint32_t p = std::uint32_t(digit[k]);
            for (int j = 0; j < users; ++j) key[j] += (p >> j) & 1u;
            if (p == full) ++key[users];
        }
        ++counts[key];
        int i = 0;
        while (i < total && digit[i] == patterns - 1) {
            digit[i] = 0;
            ++i;
        }
        if (i == total) break;
        ++digit[i];
    }
    return counts;
}

double oracle_multicast_bound_direct(const CodeSpec& code, const NetworkSpec& net) {
    code.validate();
    net.validate();
    const int L = net.users(), N = code.N;
    if (L * N > 20) {
        throw std::invalid_argument("direct bound oracle supports users*packets <= 20");
    }
    const int patterns = 1 << L;
    const std::uint32_t full = patterns - 1;

    std::vector<double> pattern_weight(patterns);
    for (int p = 0; p < patterns; ++p) {
        double w = 1.0;
        for (int j = 0; j < L; ++j) {
            w *= ((p >> j) & 1) ? (1.0 - net.eps[j]) : net.eps[j];
        }
        pattern_weight[p] = w;
    }

    std::map<std::vector<int>, double> rank_bound_cache;
    std::vector<int> digit(N, 0);
    double sum = 0.0;
    for (;;) {
        double w = 1.0;
        std::vector<int> key(L + 1, 0);
        for (int k = 0; k < N; ++k) {
            w *= pattern_weight[digit[k]];
            const std::uint32_t p = std::uint32_t(digit[k]);
            for (int j = 0; j < L; ++j) key[j] += (p >> j) & 1u;
            if (p == full) ++key[L];
        }
        if (w > 0.0) {
            auto it = rank_bound_cache.find(key);
            if (it == rank_bound_cache.end()) {
                JointRankQuery query;
                query.rows.assign(key.begin(), key.end() - 1);
                query.common_rows = key[L];
                query.cols = code.K;
                query.q = code.q;
                it = rank_bound_cache.emplace(key, joint_full_rank_bound(query)).first;
            }
            sum += w * it->second;
        }
        int i = 0;
        while (i < N && digit[i] == patterns - 1) {
            digit[i] = 0;
            ++i;
        }
        if (i == N) break;
        ++digit[i];
    }
    return sum;
}

}  // namespace rlnc::testing
