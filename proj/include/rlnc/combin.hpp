#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <span>
#include <vector>

namespace rlnc {

// Counting is exact: the inclusion-exclusion alternating sums below cancel
// catastrophically in double precision for larger N.
using BigCount = boost::multiprecision::cpp_int;

// Binomial coefficient; 0 outside 0 <= k <= n.
BigCount binom(long long n, long long k);

// Pascal-triangle cache for n <= n_max.
class BinomTable {
public:
    explicit BinomTable(int n_max);
    const BigCount& at(int n, int k) const;
    int n_max() const { return n_max_; }

private:
    int n_max_;
    std::vector<BigCount> c_;  // (n_max+1)^2, zero outside range
};

// Inclusive range of "received by every user" counts compatible with given
// per-user reception counts out of total packets.
struct CommonRange {
    int lo;
    int hi;
    bool empty() const { return lo > hi; }
};
CommonRange feasible_common_range(std::span<const int> received, int total);

// Number of ways to pick, per user j, a set of received[j] packets out of
// total such that exactly `common` packets are picked by all users.
// Inclusion-exclusion over the packets shared beyond the common core.
BigCount reception_arrangements(std::span<const int> received, int common, int total);
BigCount reception_arrangements(std::span<const int> received, int common, int total,
                                const BinomTable& binoms);

// Non-decreasing L-tuples with values in [lo, hi], streamed in lexicographic
// order. Total count is C(hi - lo + L, L).
class CountTupleStream {
public:
    CountTupleStream(int lo, int hi, int length);
    // Writes the next tuple into out; false once exhausted.
    bool next(std::vector<int>& out);
    static BigCount count(int lo, int hi, int length);

private:
    int lo_, hi_, len_;
    std::vector<int> cur_;
    bool started_ = false;
    bool done_ = false;
};

// Number of distinct orderings of the tuple: len! / prod(multiplicity!).
BigCount permutation_count(std::span<const int> tuple);

}  // namespace rlnc
