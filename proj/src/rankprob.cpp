#include "rlnc/rankprob.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace rlnc {

namespace {

void check_q(std::int64_t q) {
    if (q < 2) throw std::invalid_argument("field size must be >= 2");
}

// q^(-e) for e >= 0. For q = 2^w this is a single ldexp, hence exact down to
// the subnormal range; other q go through exp2/log2.
double neg_pow(std::int64_t q, std::int64_t e) {
    if (e == 0) return 1.0;
    if ((q & (q - 1)) == 0) {
        const int wq = std::bit_width(std::uint64_t(q)) - 1;
        const std::int64_t x = wq * e;
        if (x > 1100) return 0.0;
        return std::ldexp(1.0, -int(x));
    }
    return std::exp2(-double(e) * std::log2(double(q)));
}

}  // namespace

double full_rank_prob(int rows, int cols, std::int64_t q) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix shape");
    check_q(q);
    if (cols == 0) return 1.0;
    if (rows < cols) return 0.0;
    double p = 1.0;
    for (int i = 0; i < cols; ++i) p *= 1.0 - neg_pow(q, rows - i);
    return p;
}

double rank_prob(int r, int rows, int cols, std::int64_t q) {
    if (r < 0 || rows < 0 || cols < 0) throw std::invalid_argument("negative rank query");
    check_q(q);
    if (r > rows || r > cols) return 0.0;

    const long long lead = (long long)(rows - r) * (cols - r);
    const double log2q = std::log2(double(q));
    if (double(lead) * log2q > 1000.0) {
        // The direct product would underflow its leading factor; assemble the
        // value in log2 space instead. All remaining factors are in (1/2, 1].
        double lv = -double(lead) * log2q;
        for (int l = 0; l < r; ++l) {
            lv += std::log2(1.0 - neg_pow(q, rows - l));
            lv += std::log2(1.0 - neg_pow(q, cols - l));
            lv -= std::log2(1.0 - neg_pow(q, r - l));
        }
        const double v = std::exp2(lv);
        return v < 1e-300 ? 0.0 : v;
    }

    // Single final division keeps the small power-of-two cases exact.
    double num = neg_pow(q, lead);
    double den = 1.0;
    for (int l = 0; l < r; ++l) {
        num *= 1.0 - neg_pow(q, rows - l);
        num *= 1.0 - neg_pow(q, cols - l);
        den *= 1.0 - neg_pow(q, r - l);
    }
    const double v = num / den;
    return v < 1e-300 ? 0.0 : v;
}

namespace {

void check_joint(const JointRankQuery& query) {
    if (query.rows.empty()) throw std::invalid_argument("joint query needs >= 1 matrix");
    if (query.common_rows < 0 || query.cols < 0) {
        throw std::invalid_argument("negative joint query");
    }
    check_q(query.q);
    for (int rj : query.rows) {
        if (rj < 0) throw std::invalid_argument("negative row count");
    }
}

}  // namespace

double joint_full_rank_product_bound(const JointRankQuery& query) {
    check_joint(query);
    double p = 1.0;
    for (int rj : query.rows) p *= full_rank_prob(rj, query.cols, query.q);
    return p;
}

double joint_full_rank_bound(const JointRankQuery& query) {
    check_joint(query);
    int min_rows = query.rows[0];
    for (int rj : query.rows) min_rows = std::min(min_rows, rj);
    if (query.common_rows > min_rows) {
        throw std::invalid_argument("common rows exceed a matrix row count");
    }

    const int lo = std::max(0, query.cols - min_rows + query.common_rows);
    const int hi = std::min(query.common_rows, query.cols);
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) {
        double t = rank_prob(i, query.common_rows, query.cols, query.q);
        if (t == 0.0) continue;
        for (int rj : query.rows) {
            t *= full_rank_prob(rj - query.common_rows, query.cols - i, query.q);
        }
        sum += t;
    }
    return std::min(sum, 1.0);
}

RankProbTables::RankProbTables(int max_rows, int cols, std::int64_t q)
    : max_rows_(max_rows), cols_(cols) {
    if (max_rows < 0 || cols < 0) throw std::invalid_argument("negative table shape");
    check_q(q);
    fr_.resize(std::size_t(max_rows + 1) * (cols + 1));
    rp_.resize(std::size_t(max_rows + 1) * (cols + 1));
    for (int m = 0; m <= max_rows; ++m) {
        for (int k = 0; k <= cols; ++k) {
            fr_[std::size_t(m) * (cols + 1) + k] = full_rank_prob(m, k, q);
            rp_[std::size_t(m) * (cols + 1) + k] = rank_prob(k, m, cols, q);
        }
    }
}

}  // namespace rlnc
