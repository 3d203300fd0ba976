#pragma once

#include <cstdint>
#include <vector>

namespace rlnc {

// Probability that a uniform random rows x cols matrix over GF(q) has full
// column rank. Exact for q a power of two while the leading power stays in
// normal double range; switches to log2 accumulation beyond that.
double full_rank_prob(int rows, int cols, std::int64_t q);

// Probability that a uniform random rows x cols matrix over GF(q) has rank
// exactly r. Values below 1e-300 are clamped to 0.
double rank_prob(int r, int rows, int cols, std::int64_t q);

// Joint decodability of L matrices that share common_rows identical uniform
// rows; the remaining rows[j] - common_rows rows of each matrix are drawn
// independently. cols is the decoding threshold.
struct JointRankQuery {
    std::vector<int> rows;  // one entry per matrix, each >= common_rows
    int common_rows = 0;
    int cols = 0;
    std::int64_t q = 2;
};

// Baseline: treat the matrices as fully independent (common rows ignored).
double joint_full_rank_product_bound(const JointRankQuery& query);

// Lower bound that conditions on the rank of the shared block: for each
// achievable shared rank i, all matrices must complete the remaining cols - i
// dimensions from their private rows.
double joint_full_rank_bound(const JointRankQuery& query);

// Dense tables for one (max_rows, cols, q) workload; the sweep kernels index
// these in their inner loops.
class RankProbTables {
public:
    RankProbTables(int max_rows, int cols, std::int64_t q);

    // full_rank_prob(m, k) for m <= max_rows, k <= cols
    double full_rank(int m, int k) const { return fr_[std::size_t(m) * (cols_ + 1) + k]; }
    // rank_prob(r, m, cols) for m <= max_rows, r <= cols
    double rank_exactly(int m, int r) const { return rp_[std::size_t(m) * (cols_ + 1) + r]; }

    int max_rows() const { return max_rows_; }
    int cols() const { return cols_; }

private:
    int max_rows_, cols_;
    std::vector<double> fr_;
    std::vector<double> rp_;
};

}  // namespace rlnc
