#pragma once

#include <cstdint>

namespace rlnc {

// Philox4x32-10 counter-based generator. Each (seed, trial, stream) triple
// names an independent random stream, so Monte Carlo trials can be evaluated
// in any order, on any number of threads, with identical draws.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint32_t stream) {
        key_[0] = std::uint32_t(seed);
        key_[1] = std::uint32_t(seed >> 32);
        ctr_[1] = std::uint32_t(trial);
        ctr_[2] = std::uint32_t(trial >> 32);
        ctr_[3] = stream;
    }

    std::uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        return lo | (std::uint64_t(next_u32()) << 32);
    }

    // Low n uniform bits, n in [0, 64]. Draws are carved out of buffered
    // 32-bit words; leftover bits are kept for the next call.
    std::uint64_t next_bits(int n) {
        std::uint64_t out = 0;
        int got = 0;
        while (got < n) {
            if (bit_count_ == 0) {
                bit_buf_ = next_u32();
                bit_count_ = 32;
            }
            const int take = std::min(n - got, bit_count_);
            out |= (bit_buf_ & ((take == 64 ? 0 : (1ull << take)) - 1)) << got;
            bit_buf_ >>= take;
            bit_count_ -= take;
            got += take;
        }
        return out;
    }

    // threshold in [0, 2^32]; true with probability threshold / 2^32.
    bool bernoulli(std::uint64_t threshold) { return std::uint64_t(next_u32()) < threshold; }

    // p in [0, 1] mapped onto [0, 2^32]; exact at the endpoints.
    static std::uint64_t bernoulli_threshold(double p) {
        if (p <= 0.0) return 0;
        if (p >= 1.0) return 1ull << 32;
        return std::uint64_t(p * 4294967296.0);
    }

private:
    void refill() {
        std::uint32_t c0 = block_++, c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(0xD2511F53u) * c0;
            const std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * c2;
            const std::uint32_t h0 = std::uint32_t(p0 >> 32), l0 = std::uint32_t(p0);
            const std::uint32_t h1 = std::uint32_t(p1 >> 32), l1 = std::uint32_t(p1);
            c0 = h1 ^ c1 ^ k0;
            c1 = l1;
            c2 = h0 ^ c3 ^ k1;
            c3 = l0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_[0] = c0;
        buf_[1] = c1;
        buf_[2] = c2;
        buf_[3] = c3;
        pos_ = 0;
    }

    std::uint32_t key_[2];
    std::uint32_t ctr_[4] = {0, 0, 0, 0};  // ctr_[0] is the block counter
    std::uint32_t block_ = 0;
    std::uint32_t buf_[4] = {0, 0, 0, 0};
    int pos_ = 4;
    std::uint64_t bit_buf_ = 0;
    int bit_count_ = 0;
};

// SplitMix64 step; used to derive independent sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace rlnc
