#include "rlnc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <omp.h>

#include "rlnc/combin.hpp"
#include "rlnc/rankprob.hpp"

namespace rlnc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// base^e in log2 space with the 0^0 = 1 convention.
double log2_pow(double base, long long e) {
    if (e == 0) return 0.0;
    if (base == 0.0) return kNegInf;
    return double(e) * std::log2(base);
}

double log2_big(const BigCount& v) {
    // v > 0. Shift down to <= 53 bits so the conversion is exact.
    const unsigned b = boost::multiprecision::msb(v);
    if (b <= 52) return std::log2(v.convert_to<double>());
    const BigCount shifted = v >> (b - 52);
    return std::log2(shifted.convert_to<double>()) + double(b - 52);
}

double clamp01_checked(double v, const char* what) {
    if (v < -1e-9 || v > 1.0 + 1e-9) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s: accumulated value %.17g out of [0,1]", what, v);
        throw std::logic_error(buf);
    }
    return std::clamp(v, 0.0, 1.0);
}

// Compensated (Neumaier) accumulation; partial sums are combined in a fixed
// order so results do not depend on the thread count.
struct NeumaierAcc {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

double pow0(double base, long long e) {
    if (e == 0) return 1.0;
    return std::pow(base, double(e));
}

int resolve_threads(int threads) {
    if (threads < 0) throw std::invalid_argument("negative thread count");
    return threads == 0 ? omp_get_max_threads() : threads;
}

}  // namespace

void CodeSpec::validate() const {
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    if (N < K) throw std::invalid_argument("N must be >= K");
    if (q < 2) throw std::invalid_argument("q must be >= 2");
}

bool NetworkSpec::homogeneous() const {
    for (double e : eps) {
        if (e != eps[0]) return false;
    }
    return true;
}

void NetworkSpec::validate() const {
    if (eps.empty()) throw std::invalid_argument("network needs >= 1 user");
    for (double e : eps) {
        if (!(e >= 0.0 && e <= 1.0)) {
            throw std::invalid_argument("erasure probability outside [0,1]");
        }
    }
}

double ptp_nonsystematic(const CodeSpec& code, double eps) {
    code.validate();
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("eps outside [0,1]");
    BinomTable binoms(code.N);
    NeumaierAcc acc;
    for (int m = code.K; m <= code.N; ++m) {
        const double pmf = binoms.at(code.N, m).convert_to<double>() * pow0(1.0 - eps, m) *
                           pow0(eps, code.N - m);
        if (pmf == 0.0) continue;
        acc.add(pmf * full_rank_prob(m, code.K, code.q));
    }
    return clamp01_checked(acc.value(), "ptp_nonsystematic");
}

double ptp_systematic(const CodeSpec& code, double eps) {
    code.validate();
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("eps outside [0,1]");
    BinomTable binoms(code.N);
    NeumaierAcc acc;
    // Split the m received packets into h systematic + (m - h) coded; decoding
    // needs the coded part to cover the remaining K - h dimensions.
    for (int m = code.K; m <= code.N; ++m) {
        const double pw = pow0(1.0 - eps, m) * pow0(eps, code.N - m);
        if (pw == 0.0) continue;
        const int h_lo = std::max(0, m - (code.N - code.K));
        const int h_hi = std::min(code.K, m);
        double inner = 0.0;
        for (int h = h_lo; h <= h_hi; ++h) {
            inner += binoms.at(code.K, h).convert_to<double>() *
                     binoms.at(code.N - code.K, m - h).convert_to<double>() *
                     full_rank_prob(m - h, code.K - h, code.q);
        }
        acc.add(pw * inner);
    }
    return clamp01_checked(acc.value(), "ptp_systematic");
}

double ptp(const CodeSpec& code, double eps) {
    return code.variant == Variant::systematic ? ptp_systematic(code, eps)
                                               : ptp_nonsystematic(code, eps);
}

double product_bound(const CodeSpec& code, const NetworkSpec& net) {
    code.validate();
    net.validate();
    double p = 1.0;
    for (double e : net.eps) p *= ptp(code, e);
    return p;
}

double two_user_exact(const CodeSpec& code, double eps1, double eps2) {
    code.validate();
    if (code.variant != Variant::non_systematic) {
        throw std::invalid_argument("two_user_exact covers the non-systematic variant");
    }
    if (!(eps1 >= 0.0 && eps1 <= 1.0) || !(eps2 >= 0.0 && eps2 <= 1.0)) {
        throw std::invalid_argument("eps outside [0,1]");
    }
    const int N = code.N, K = code.K;
    BinomTable binoms(N);
    RankProbTables tables(N, K, code.q);

    std::vector<double> pmf1(N + 1), pmf2(N + 1), cn(N + 1);
    for (int m = 0; m <= N; ++m) {
        cn[m] = binoms.at(N, m).convert_to<double>();
        pmf1[m] = cn[m] * pow0(1.0 - eps1, m) * pow0(eps1, N - m);
        pmf2[m] = cn[m] * pow0(1.0 - eps2, m) * pow0(eps2, N - m);
    }

    NeumaierAcc acc;
    for (int m1 = K; m1 <= N; ++m1) {
        for (int m2 = K; m2 <= N; ++m2) {
            const double pm = pmf1[m1] * pmf2[m2];
            if (pm == 0.0) continue;
            const int mn = std::min(m1, m2);
            double inner = 0.0;
            // Overlap of the two reception sets is hypergeometric; given the
            // overlap, the joint rank event factorizes over the shared block.
            for (int mu = std::max(0, m1 + m2 - N); mu <= mn; ++mu) {
                const double hyp = binoms.at(m1, mu).convert_to<double>() *
                                   binoms.at(N - m1, m2 - mu).convert_to<double>() / cn[m2];
                const int i_lo = std::max(0, K - mn + mu);
                const int i_hi = std::min(mu, K);
                double joint = 0.0;
                for (int i = i_lo; i <= i_hi; ++i) {
                    joint += tables.rank_exactly(mu, i) * tables.full_rank(m1 - mu, K - i) *
                             tables.full_rank(m2 - mu, K - i);
                }
                inner += hyp * joint;
            }
            acc.add(pm * inner);
        }
    }
    return clamp01_checked(acc.value(), "two_user_exact");
}

double reception_weight(std::span<const int> received, int total, const NetworkSpec& net) {
    net.validate();
    if (int(received.size()) != net.users()) {
        throw std::invalid_argument("tuple length != user count");
    }
    if (total < 0) throw std::invalid_argument("negative packet count");
    double lv = 0.0;
    for (int j = 0; j < net.users(); ++j) {
        if (received[j] < 0 || received[j] > total) {
            throw std::invalid_argument("reception count out of range");
        }
        lv += log2_pow(1.0 - net.eps[j], received[j]);
        lv += log2_pow(net.eps[j], total - received[j]);
    }
    return lv == kNegInf ? 0.0 : std::exp2(lv);
}

double mse(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("mse needs equal nonempty series");
    }
    NeumaierAcc acc;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc.add(d * d);
    }
    return acc.value() / double(a.size());
}

namespace {

// Shared per-call state for the tuple sweep.
struct SweepContext {
    int N, K, L;
    std::int64_t q;
    const NetworkSpec* net;
    BinomTable binoms;
    RankProbTables tables;
    // Per user, per value v in [K..N]: log2 and linear forms of
    // (1-eps)^v * eps^(N-v).
    std::vector<double> log2_phi;
    std::vector<double> lin_phi;

    SweepContext(const CodeSpec& code, const NetworkSpec& network)
        : N(code.N),
          K(code.K),
          L(network.users()),
          q(code.q),
          net(&network),
          binoms(code.N),
          tables(code.N, code.K, code.q) {
        const int vals = N - K + 1;
        log2_phi.resize(std::size_t(L) * vals);
        lin_phi.resize(std::size_t(L) * vals);
        for (int j = 0; j < L; ++j) {
            for (int v = K; v <= N; ++v) {
                const double lv = log2_pow(1.0 - net->eps[j], v) +
                                  log2_pow(net->eps[j], N - v);
                log2_phi[std::size_t(j) * vals + (v - K)] = lv;
                lin_phi[std::size_t(j) * vals + (v - K)] =
                    lv == kNegInf ? 0.0 : std::exp2(lv);
            }
        }
    }

    double log2_phi_at(int j, int v) const {
        return log2_phi[std::size_t(j) * (N - K + 1) + (v - K)];
    }
    double lin_phi_at(int j, int v) const {
        return lin_phi[std::size_t(j) * (N - K + 1) + (v - K)];
    }
};

// Per-thread scratch buffers.
struct SweepScratch {
    std::vector<double> terms;
    std::vector<double> fnorm;    // L x L normalized permanent input
    std::vector<double> permdp;   // 2^L subset table for the permanent
    std::vector<int> tuple;
};

// Sum over the common-to-all count of (arrangement count) x (joint rank
// bound), folded with the tuple weight in log2 space. Terms are summed in
// ascending magnitude.
double tuple_inner_sum(const SweepContext& cx, std::span<const int> received,
                       double weight_log2, SweepScratch& ws, std::uint64_t& terms) {
    if (weight_log2 == kNegInf) return 0.0;
    const CommonRange range = feasible_common_range(received, cx.N);
    int min_m = received[0];
    for (int m : received) min_m = std::min(min_m, m);

    ws.terms.clear();
    for (int mu = range.lo; mu <= range.hi; ++mu) {
        ++terms;
        const int i_lo = std::max(0, cx.K - min_m + mu);
        const int i_hi = std::min(mu, cx.K);
        double joint = 0.0;
        for (int i = i_lo; i <= i_hi; ++i) {
            double t = cx.tables.rank_exactly(mu, i);
            if (t == 0.0) continue;
            for (int m : received) t *= cx.tables.full_rank(m - mu, cx.K - i);
            joint += t;
        }
        if (joint <= 0.0) continue;
        const BigCount count = reception_arrangements(received, mu, cx.N, cx.binoms);
        if (count == 0) continue;
        ws.terms.push_back(std::exp2(log2_big(count) + std::log2(joint) + weight_log2));
    }
    std::sort(ws.terms.begin(), ws.terms.end());
    double s = 0.0;
    for (double t : ws.terms) s += t;
    return s;
}

// log2 of the summed tuple weight over all distinct assignments of the
// sorted tuple's values to users. The permanent of F[j][i] = lin_phi(j,
// tuple[i]) runs over all L! column permutations, which revisits an
// assignment once per permutation of equal values; dividing by the product
// of the multiplicity factorials leaves each assignment counted once.
// The permanent is evaluated by the subset-sum recurrence rather than
// Ryser's formula: every addition is of nonnegative terms, so tuples whose
// weights span hundreds of orders of magnitude cannot cancel. Rows are
// scaled to max 1 and the scale is restored in log2 space.
double log2_permanent_weight(const SweepContext& cx, std::span<const int> tuple,
                             SweepScratch& ws) {
    const int L = cx.L;
    ws.fnorm.resize(std::size_t(L) * L);
    double log2_scale = 0.0;
    for (int j = 0; j < L; ++j) {
        double mx = 0.0;
        for (int i = 0; i < L; ++i) {
            const double v = cx.lin_phi_at(j, tuple[i]);
            ws.fnorm[std::size_t(j) * L + i] = v;
            mx = std::max(mx, v);
        }
        if (mx == 0.0) return kNegInf;  // some user cannot hit any count in the tuple
        log2_scale += std::log2(mx);
        for (int i = 0; i < L; ++i) ws.fnorm[std::size_t(j) * L + i] /= mx;
    }

    // dp[S] = permanent of rows 0..popcount(S)-1 against the column set S.
    ws.permdp.assign(std::size_t(1) << L, 0.0);
    ws.permdp[0] = 1.0;
    for (std::uint32_t s = 1; s < (1u << L); ++s) {
        const std::size_t row = std::size_t(std::popcount(s)) - 1;
        double acc = 0.0;
        for (std::uint32_t rem = s; rem != 0; rem &= rem - 1) {
            const int col = std::countr_zero(rem);
            const double a = ws.fnorm[row * L + col];
            if (a != 0.0) acc += a * ws.permdp[s ^ (1u << col)];
        }
        ws.permdp[s] = acc;
    }
    const double perm = ws.permdp[(std::size_t(1) << L) - 1];
    if (perm <= 0.0) return kNegInf;

    double log2_dups = 0.0;  // sum of log2(mult_v!) over repeated values
    for (int i = 1, run = 1; i < L; ++i) {
        if (tuple[i] == tuple[i - 1]) {
            ++run;
            log2_dups += std::log2(double(run));
        } else {
            run = 1;
        }
    }
    return std::log2(perm) + log2_scale - log2_dups;
}

enum class TupleWeight { permanent, symmetric };

// One partition of the sweep: all non-decreasing tuples with first element v.
void sweep_partition(const SweepContext& cx, int v, TupleWeight mode, NeumaierAcc& acc,
                     std::uint64_t& terms, SweepScratch& ws) {
    ws.tuple.assign(cx.L, v);
    const auto handle = [&](std::span<const int> tuple) {
        double w;
        if (mode == TupleWeight::permanent) {
            w = log2_permanent_weight(cx, tuple, ws);
        } else {
            long long sum = 0;
            for (int m : tuple) sum += m;
            const BigCount orderings = permutation_count(tuple);
            w = log2_big(orderings) + log2_pow(1.0 - cx.net->eps[0], sum) +
                log2_pow(cx.net->eps[0], (long long)cx.L * cx.N - sum);
        }
        if (w != kNegInf) acc.add(tuple_inner_sum(cx, tuple, w, ws, terms));
    };

    if (cx.L == 1) {
        handle(ws.tuple);
        return;
    }
    CountTupleStream rest(v, cx.N, cx.L - 1);
    std::vector<int> suffix;
    while (rest.next(suffix)) {
        std::copy(suffix.begin(), suffix.end(), ws.tuple.begin() + 1);
        handle(ws.tuple);
    }
}

BoundResult sweep_order_free(const SweepContext& cx, TupleWeight mode, int threads) {
    const int parts = cx.N - cx.K + 1;
    std::vector<double> part_value(parts, 0.0);
    std::vector<std::uint64_t> part_terms(parts, 0);

    const int nt = resolve_threads(threads);
    if (nt == 1) {
        SweepScratch ws;
        for (int p = 0; p < parts; ++p) {
            NeumaierAcc acc;
            sweep_partition(cx, cx.K + p, mode, acc, part_terms[p], ws);
            part_value[p] = acc.value();
        }
    } else {
#pragma omp parallel num_threads(nt)
        {
            SweepScratch ws;
#pragma omp for schedule(dynamic)
            for (int p = 0; p < parts; ++p) {
                NeumaierAcc acc;
                sweep_partition(cx, cx.K + p, mode, acc, part_terms[p], ws);
                part_value[p] = acc.value();
            }
        }
    }

    NeumaierAcc total;
    std::uint64_t terms = 0;
    for (int p = 0; p < parts; ++p) {
        total.add(part_value[p]);
        terms += part_terms[p];
    }
    return BoundResult{total.value(), "", terms};
}

BoundResult sweep_naive(const SweepContext& cx) {
    NeumaierAcc acc;
    std::uint64_t terms = 0;
    SweepScratch ws;
    std::vector<int> m(cx.L, cx.K);
    for (;;) {
        double w = 0.0;
        for (int j = 0; j < cx.L; ++j) w += cx.log2_phi_at(j, m[j]);
        if (w != kNegInf) acc.add(tuple_inner_sum(cx, m, w, ws, terms));
        int i = cx.L - 1;
        while (i >= 0 && m[i] == cx.N) {
            m[i] = cx.K;
            --i;
        }
        if (i < 0) break;
        ++m[i];
    }
    return BoundResult{acc.value(), "", terms};
}

}  // namespace

BoundResult multicast_bound(const CodeSpec& code, const NetworkSpec& net, SweepPath path,
                            int threads) {
    code.validate();
    net.validate();
    if (code.variant != Variant::non_systematic) {
        throw std::invalid_argument(
            "multicast_bound covers the non-systematic variant; use product_bound for "
            "systematic codes");
    }
    if (path == SweepPath::homogeneous && !net.homogeneous()) {
        throw std::invalid_argument("homogeneous path requires equal erasure probabilities");
    }
    if (path == SweepPath::order_free && net.users() > 20) {
        // The per-tuple permanent is 2^L work; beyond this the sweep is
        // infeasible anyway.
        throw std::invalid_argument("order-free path supports at most 20 users");
    }

    SweepContext cx(code, net);
    BoundResult r;
    const char* name;
    switch (path) {
        case SweepPath::naive:
            r = sweep_naive(cx);
            name = "theorem1:naive";
            break;
        case SweepPath::order_free:
            r = sweep_order_free(cx, TupleWeight::permanent, threads);
            name = "theorem1:order_free";
            break;
        default:
            r = sweep_order_free(cx, TupleWeight::symmetric, threads);
            name = "theorem1:homogeneous";
            break;
    }
    r.method = name;
    r.value = clamp01_checked(r.value, r.method.c_str());
    return r;
}

BoundResult multicast_bound(const CodeSpec& code, const NetworkSpec& net) {
    net.validate();
    return multicast_bound(
        code, net, net.homogeneous() ? SweepPath::homogeneous : SweepPath::order_free, 0);
}

}  // namespace rlnc
