#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rlnc {

enum class Variant { non_systematic, systematic };

// Code parameters: K source packets, N coded transmissions, coefficients
// drawn uniformly from GF(q). The systematic variant sends the K source
// packets verbatim before the N - K coded ones.
struct CodeSpec {
    int N = 0;
    int K = 0;
    std::int64_t q = 2;
    Variant variant = Variant::non_systematic;
    void validate() const;
};

// Independent per-user packet erasure probabilities; size is the user count.
struct NetworkSpec {
    std::vector<double> eps;
    int users() const { return int(eps.size()); }
    bool homogeneous() const;
    void validate() const;
};

// How the sweep over reception-count tuples is organized. All three evaluate
// the same sum; order_free and homogeneous fold the L! orderings of each
// sorted tuple into one weight.
enum class SweepPath { naive, order_free, homogeneous };

struct BoundResult {
    double value = 0.0;
    std::string method;
    std::uint64_t terms_evaluated = 0;
};

// Probability a single user decodes: receives >= K of N packets with a full
// rank coefficient matrix.
double ptp_nonsystematic(const CodeSpec& code, double eps);
double ptp_systematic(const CodeSpec& code, double eps);
double ptp(const CodeSpec& code, double eps);  // dispatch on variant

// Exact two-user delivery probability (non-systematic): conditions on the
// overlap of the two reception sets, under which the joint rank factorizes.
double two_user_exact(const CodeSpec& code, double eps1, double eps2);

// Product of per-user decode probabilities; a lower bound because decode
// events are positively associated through the shared coefficient matrix.
double product_bound(const CodeSpec& code, const NetworkSpec& net);

// Main lower bound on P(all users decode), non-systematic variant: sums over
// reception-count tuples, and within each tuple over the common-to-all count,
// bounding the joint rank term by its shared-block factorization.
BoundResult multicast_bound(const CodeSpec& code, const NetworkSpec& net);
BoundResult multicast_bound(const CodeSpec& code, const NetworkSpec& net, SweepPath path,
                            int threads);

// Probability that user j receives exactly received[j] of the total packets,
// for all j. Zero-probability edge cases follow the 0^0 = 1 convention.
double reception_weight(std::span<const int> received, int total, const NetworkSpec& net);

// Mean squared difference of two equal-length series.
double mse(std::span<const double> a, std::span<const double> b);

}  // namespace rlnc
