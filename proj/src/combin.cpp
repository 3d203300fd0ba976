#include "rlnc/combin.hpp"

#include <algorithm>
#include <stdexcept>

namespace rlnc {

BigCount binom(long long n, long long k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigCount r = 1;
    for (long long i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;  // exact: r is C(n-k+i, i) after this step
    }
    return r;
}

BinomTable::BinomTable(int n_max) : n_max_(n_max) {
    if (n_max < 0) throw std::invalid_argument("negative binomial table size");
    c_.assign(std::size_t(n_max + 1) * (n_max + 1), 0);
    for (int n = 0; n <= n_max; ++n) {
        c_[std::size_t(n) * (n_max + 1)] = 1;
        for (int k = 1; k <= n; ++k) {
            c_[std::size_t(n) * (n_max + 1) + k] =
                c_[std::size_t(n - 1) * (n_max + 1) + k - 1] +
                (k <= n - 1 ? c_[std::size_t(n - 1) * (n_max + 1) + k] : 0);
        }
    }
}

const BigCount& BinomTable::at(int n, int k) const {
    static const BigCount zero = 0;
    if (n < 0 || n > n_max_ || k < 0 || k > n) return zero;
    return c_[std::size_t(n) * (n_max_ + 1) + k];
}

CommonRange feasible_common_range(std::span<const int> received, int total) {
    if (received.empty()) throw std::invalid_argument("empty reception tuple");
    if (total < 0) throw std::invalid_argument("negative packet count");
    long long sum = 0;
    int mn = received[0];
    for (int m : received) {
        if (m < 0 || m > total) throw std::invalid_argument("reception count out of range");
        sum += m;
        mn = std::min(mn, m);
    }
    const long long users = (long long)received.size();
    // Union bound on the packets missed by at least one user.
    const long long lo = std::max<long long>(0, sum - (users - 1) * total);
    return CommonRange{int(lo), mn};
}

BigCount reception_arrangements(std::span<const int> received, int common, int total) {
    BinomTable binoms(total);
    return reception_arrangements(received, common, total, binoms);
}

BigCount reception_arrangements(std::span<const int> received, int common, int total,
                                const BinomTable& binoms) {
    if (received.empty()) throw std::invalid_argument("empty reception tuple");
    int mn = received[0], mx = received[0];
    for (int m : received) {
        mn = std::min(mn, m);
        mx = std::max(mx, m);
    }
    if (common < 0 || common > mn || mx > total) {
        throw std::invalid_argument("arrangement query out of range");
    }
    if (binoms.n_max() < total) throw std::invalid_argument("binomial table too small");

    // Choose the common core, then subtract arrangements whose overlap exceeds
    // it: l extra packets forced into everyone's selection.
    BigCount sum = 0;
    for (int l = 0; l <= mn - common; ++l) {
        BigCount term = binoms.at(total - common, l);
        for (int m : received) {
            term *= binoms.at(total - common - l, m - common - l);
            if (term == 0) break;
        }
        if (l & 1) {
            sum -= term;
        } else {
            sum += term;
        }
    }
    return binoms.at(total, common) * sum;
}

CountTupleStream::CountTupleStream(int lo, int hi, int length)
    : lo_(lo), hi_(hi), len_(length) {
    if (length < 1) throw std::invalid_argument("tuple length must be >= 1");
    if (lo > hi) throw std::invalid_argument("empty tuple value range");
    cur_.assign(len_, lo_);
}

bool CountTupleStream::next(std::vector<int>& out) {
    if (done_) return false;
    if (!started_) {
        started_ = true;
        out = cur_;
        return true;
    }
    int i = len_ - 1;
    while (i >= 0 && cur_[i] == hi_) --i;
    if (i < 0) {
        done_ = true;
        return false;
    }
    const int v = cur_[i] + 1;
    for (int j = i; j < len_; ++j) cur_[j] = v;
    out = cur_;
    return true;
}

BigCount CountTupleStream::count(int lo, int hi, int length) {
    if (length < 1 || lo > hi) return 0;
    // Stars and bars: multisets of size `length` from hi - lo + 1 values.
    return binom((long long)(hi - lo) + length, length);
}

BigCount permutation_count(std::span<const int> tuple) {
    if (tuple.empty()) throw std::invalid_argument("empty tuple");
    std::vector<int> s(tuple.begin(), tuple.end());
    std::sort(s.begin(), s.end());
    BigCount r = 1;
    for (std::size_t i = 1; i <= s.size(); ++i) r *= i;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i;
        BigCount f = 1;
        while (j < s.size() && s[j] == s[i]) {
            ++j;
            f *= j - i;
        }
        r /= f;
        i = j;
    }
    return r;
}

}  // namespace rlnc
