#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "rlnc/bounds.hpp"
#include "rlnc/combin.hpp"
#include "rlnc/rankprob.hpp"

using namespace rlnc;

namespace {

CodeSpec code_of(int N, int K, std::int64_t q, Variant v = Variant::non_systematic) {
    CodeSpec c;
    c.N = N;
    c.K = K;
    c.q = q;
    c.variant = v;
    return c;
}

NetworkSpec net_of(std::vector<double> eps) {
    NetworkSpec n;
    n.eps = std::move(eps);
    return n;
}

// Single-user decode probability by enumerating every reception subset. Slow
// but structurally independent of the m-sweep formulas.
double ptp_by_subsets(int N, int K, std::int64_t q, double eps, Variant v) {
    double total = 0.0;
    for (std::uint32_t s = 0; s < (1u << N); ++s) {
        double p = 1.0;
        int sys = 0, coded = 0;
        for (int i = 0; i < N; ++i) {
            const bool got = (s >> i) & 1u;
            p *= got ? (1.0 - eps) : eps;
            if (got) {
                if (v == Variant::systematic && i < K) {
                    ++sys;
                } else {
                    ++coded;
                }
            }
        }
        const int missing = (v == Variant::systematic) ? K - sys : K;
        total += p * full_rank_prob(coded, missing, q);
    }
    return total;
}

}  // namespace

TEST_CASE("code and network validation") {
    CHECK_THROWS_AS(code_of(1, 2, 2).validate(), std::invalid_argument);   // N < K
    CHECK_THROWS_AS(code_of(2, 0, 2).validate(), std::invalid_argument);   // K < 1
    CHECK_THROWS_AS(code_of(2, 2, 1).validate(), std::invalid_argument);   // q < 2
    CHECK_NOTHROW(code_of(2, 2, 2).validate());
    CHECK_THROWS_AS(net_of({}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(net_of({0.5, 1.2}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(net_of({-0.1}).validate(), std::invalid_argument);
    CHECK_NOTHROW(net_of({0.0, 1.0, 0.5}).validate());
    CHECK(net_of({0.2, 0.2}).homogeneous());
    CHECK(!net_of({0.2, 0.3}).homogeneous());
}

TEST_CASE("point-to-point fixed values") {
    CHECK(ptp_nonsystematic(code_of(2, 2, 2), 0.0) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(ptp_nonsystematic(code_of(9, 4, 2), 1.0) == 0.0);
    CHECK(ptp_nonsystematic(code_of(5, 5, 256), 0.0) ==
          doctest::Approx(full_rank_prob(5, 5, 256)).epsilon(1e-15));
    CHECK(ptp_nonsystematic(code_of(5, 5, 256), 0.0) == doctest::Approx(0.99606).epsilon(1e-4));

    CHECK(ptp_systematic(code_of(9, 4, 2), 0.0) == 1.0);
    for (double eps : {0.0, 0.1, 0.37, 1.0}) {
        CHECK(ptp_systematic(code_of(5, 5, 2), eps) ==
              doctest::Approx(std::pow(1.0 - eps, 5)).epsilon(1e-12));
    }
    CHECK(ptp_systematic(code_of(9, 4, 2), 1.0) == 0.0);

    CHECK_THROWS_AS(ptp_nonsystematic(code_of(2, 2, 2), 1.5), std::invalid_argument);
    CHECK_THROWS_AS(ptp_systematic(code_of(2, 2, 2), -0.1), std::invalid_argument);
}

TEST_CASE("point-to-point formulas match subset enumeration") {
    for (std::int64_t q : {2, 4}) {
        for (int K = 1; K <= 3; ++K) {
            for (int N = K; N <= K + 4; ++N) {
                for (double eps : {0.0, 0.15, 0.5, 0.9}) {
                    CHECK(ptp_nonsystematic(code_of(N, K, q), eps) ==
                          doctest::Approx(ptp_by_subsets(N, K, q, eps, Variant::non_systematic))
                              .epsilon(1e-12));
                    CHECK(ptp_systematic(code_of(N, K, q, Variant::systematic), eps) ==
                          doctest::Approx(ptp_by_subsets(N, K, q, eps, Variant::systematic))
                              .epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("ptp dispatches on the variant") {
    const double eps = 0.2;
    CHECK(ptp(code_of(7, 5, 2), eps) == ptp_nonsystematic(code_of(7, 5, 2), eps));
    CHECK(ptp(code_of(7, 5, 2, Variant::systematic), eps) ==
          ptp_systematic(code_of(7, 5, 2, Variant::systematic), eps));
}

TEST_CASE("point-to-point is non-decreasing in N") {
    for (std::int64_t q : {2, 256}) {
        for (int K : {5, 10}) {
            for (double eps : {0.01, 0.1}) {
                double prev_n = 0.0, prev_s = 0.0;
                for (int N = K; N <= K + 10; ++N) {
                    const double pn = ptp_nonsystematic(code_of(N, K, q), eps);
                    const double ps = ptp_systematic(code_of(N, K, q, Variant::systematic), eps);
                    CHECK(pn >= prev_n - 1e-15);
                    CHECK(ps >= prev_s - 1e-15);
                    prev_n = pn;
                    prev_s = ps;
                }
            }
        }
    }
}

TEST_CASE("two_user_exact fixed values") {
    CHECK(two_user_exact(code_of(6, 3, 2), 1.0, 0.2) == 0.0);
    CHECK(two_user_exact(code_of(6, 3, 2), 0.2, 1.0) == 0.0);
    for (std::int64_t q : {2, 16}) {
        for (int K : {1, 3, 5}) {
            // both users receive the identical K x K matrix
            CHECK(two_user_exact(code_of(K, K, q), 0.0, 0.0) ==
                  doctest::Approx(full_rank_prob(K, K, q)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(two_user_exact(code_of(6, 3, 2, Variant::systematic), 0.1, 0.1),
                    std::invalid_argument);
}

TEST_CASE("two_user_exact equals the two-user sweep bound") {
    for (std::int64_t q : {2, 256}) {
        for (double e1 : {0.01, 0.1}) {
            for (double e2 : {0.01, 0.3}) {
                for (int N : {5, 9, 12}) {
                    const CodeSpec code = code_of(N, 5, q);
                    const double exact = two_user_exact(code, e1, e2);
                    const BoundResult b = multicast_bound(code, net_of({e1, e2}));
                    CHECK(std::abs(b.value - exact) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("product_bound fixed values") {
    CHECK(product_bound(code_of(8, 5, 2, Variant::systematic), net_of({0.0, 0.0, 0.0})) == 1.0);
    const CodeSpec c = code_of(8, 5, 2);
    CHECK(product_bound(c, net_of({0.17})) == doctest::Approx(ptp(c, 0.17)).epsilon(1e-15));
    const double p1 = ptp(c, 0.1), p2 = ptp(c, 0.2);
    CHECK(product_bound(c, net_of({0.1, 0.2})) == doctest::Approx(p1 * p2).epsilon(1e-14));
}

TEST_CASE("multicast_bound single user reduces to the exact point-to-point value") {
    for (int N : {5, 8, 15}) {
        const CodeSpec c = code_of(N, 5, 2);
        for (double eps : {0.0, 0.01, 0.4}) {
            const BoundResult b = multicast_bound(c, net_of({eps}));
            CHECK(std::abs(b.value - ptp_nonsystematic(c, eps)) <= 1e-12);
        }
    }
}

TEST_CASE("all sweep paths agree and match the direct assignment oracle") {
    const CodeSpec code = code_of(5, 3, 2);
    const NetworkSpec net = net_of({0.2, 0.2, 0.2});
    const BoundResult naive = multicast_bound(code, net, SweepPath::naive, 1);
    const BoundResult order_free = multicast_bound(code, net, SweepPath::order_free, 1);
    const BoundResult homogeneous = multicast_bound(code, net, SweepPath::homogeneous, 1);
    CHECK(std::abs(naive.value - order_free.value) <= 1e-10);
    CHECK(std::abs(naive.value - homogeneous.value) <= 1e-10);
    CHECK(naive.terms_evaluated >= order_free.terms_evaluated);
    CHECK(order_free.terms_evaluated == homogeneous.terms_evaluated);
    CHECK(naive.method == "theorem1:naive");
    CHECK(order_free.method == "theorem1:order_free");
    CHECK(homogeneous.method == "theorem1:homogeneous");

    const double direct = testing::oracle_multicast_bound_direct(code, net);
    CHECK(order_free.value == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("heterogeneous sweeps match the direct assignment oracle") {
    struct Case {
        int N, K;
        std::int64_t q;
        std::vector<double> eps;
    };
    const std::vector<Case> cases = {
        {4, 2, 2, {0.3, 0.05}},
        {4, 2, 4, {0.25, 0.1, 0.4}},
        {3, 1, 2, {0.5, 0.2, 0.1, 0.35}},
        {6, 2, 2, {0.15, 0.3, 0.45}},
    };
    for (const auto& c : cases) {
        const CodeSpec code = code_of(c.N, c.K, c.q);
        const NetworkSpec net = net_of(c.eps);
        const double direct = testing::oracle_multicast_bound_direct(code, net);
        const BoundResult naive = multicast_bound(code, net, SweepPath::naive, 1);
        const BoundResult order_free = multicast_bound(code, net, SweepPath::order_free, 1);
        CHECK(naive.value == doctest::Approx(direct).epsilon(1e-10));
        CHECK(order_free.value == doctest::Approx(direct).epsilon(1e-10));
        CHECK(std::abs(naive.value - order_free.value) <= 1e-10);
    }
}

TEST_CASE("bound ordering and sandwich on a small grid") {
    for (std::int64_t q : {2, 4}) {
        for (int K : {2, 3}) {
            for (int L : {1, 2, 3}) {
                for (int N = K; N <= K + 4; ++N) {
                    for (double eps : {0.01, 0.3}) {
                        const CodeSpec code = code_of(N, K, q);
                        const NetworkSpec net = net_of(std::vector<double>(L, eps));
                        const double prod = product_bound(code, net);
                        const BoundResult b = multicast_bound(code, net);
                        CHECK(b.value >= 0.0);
                        CHECK(b.value <= 1.0);
                        CHECK(prod <= b.value + 1e-12);
                        CHECK(b.value <= ptp_nonsystematic(code, eps) + 1e-12);
                    }
                }
            }
        }
    }
    // heterogeneous sandwich: cannot beat the best single user
    const CodeSpec code = code_of(7, 4, 2);
    const NetworkSpec net = net_of({0.05, 0.2, 0.35});
    const BoundResult b = multicast_bound(code, net);
    double best = 1.0;
    for (double e : net.eps) best = std::min(best, ptp_nonsystematic(code, e));
    CHECK(b.value <= best + 1e-12);
    CHECK(product_bound(code, net) <= b.value + 1e-12);
}

TEST_CASE("degenerate collapse at eps = 0 and N = K") {
    for (std::int64_t q : {2, 16}) {
        for (int K : {1, 4}) {
            const NetworkSpec net = net_of(std::vector<double>(3, 0.0));
            const double fr = full_rank_prob(K, K, q);
            const BoundResult b = multicast_bound(code_of(K, K, q), net);
            CHECK(b.value == doctest::Approx(fr).epsilon(1e-12));
            CHECK(product_bound(code_of(K, K, q, Variant::systematic), net) == 1.0);
        }
    }
}

TEST_CASE("default path selection and input validation") {
    CHECK(multicast_bound(code_of(6, 3, 2), net_of({0.1, 0.1})).method ==
          "theorem1:homogeneous");
    CHECK(multicast_bound(code_of(6, 3, 2), net_of({0.1, 0.2})).method ==
          "theorem1:order_free");
    CHECK_THROWS_AS(
        multicast_bound(code_of(6, 3, 2), net_of({0.1, 0.2}), SweepPath::homogeneous, 1),
        std::invalid_argument);
    CHECK_THROWS_AS(multicast_bound(code_of(6, 3, 2, Variant::systematic), net_of({0.1})),
                    std::invalid_argument);
}

TEST_CASE("bound stays clamped near certainty") {
    const BoundResult b = multicast_bound(code_of(12, 1, 2), net_of({1e-6, 1e-6, 1e-6}));
    CHECK(b.value <= 1.0);
    // Even at full reception a K=1 code misses with rate q^-N per user.
    CHECK(b.value > 0.999);
}

TEST_CASE("repeated evaluation is bitwise reproducible") {
    const CodeSpec code = code_of(9, 4, 2);
    const NetworkSpec net = net_of({0.07, 0.19, 0.31});
    const BoundResult a = multicast_bound(code, net);
    const BoundResult b = multicast_bound(code, net);
    CHECK(a.value == b.value);
    CHECK(a.terms_evaluated == b.terms_evaluated);
}

TEST_CASE("reception_weight fixed values") {
    CHECK(reception_weight(std::vector<int>{2, 2}, 2, net_of({0.0, 0.0})) == 1.0);
    CHECK(reception_weight(std::vector<int>{1, 2}, 2, net_of({0.0, 0.0})) == 0.0);
    CHECK(reception_weight(std::vector<int>{1}, 2, net_of({0.1})) ==
          doctest::Approx(0.09).epsilon(1e-14));
    CHECK(reception_weight(std::vector<int>{0, 2}, 2, net_of({1.0, 0.0})) == 1.0);
    CHECK_THROWS_AS(reception_weight(std::vector<int>{1}, 2, net_of({0.1, 0.2})),
                    std::invalid_argument);
    CHECK_THROWS_AS(reception_weight(std::vector<int>{3}, 2, net_of({0.1})),
                    std::invalid_argument);
}

TEST_CASE("reception pmf machinery normalizes to one") {
    BinomTable binoms(10);
    for (int L = 1; L <= 3; ++L) {
        for (int N : {1, 4, 10}) {
            std::vector<double> eps;
            for (int j = 0; j < L; ++j) eps.push_back(0.05 + 0.3 * j);
            const NetworkSpec net = net_of(eps);
            std::vector<int> m(L, 0);
            double total = 0.0;
            for (;;) {
                double count = 1.0;
                for (int mj : m) count *= binoms.at(N, mj).convert_to<double>();
                total += count * reception_weight(m, N, net);
                int idx = L - 1;
                while (idx >= 0 && m[idx] == N) m[idx--] = 0;
                if (idx < 0) break;
                ++m[idx];
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("mse fixed values") {
    const std::vector<double> a = {0.3, 0.5, 0.9};
    CHECK(mse(a, a) == 0.0);
    CHECK(mse(std::vector<double>{0.0}, std::vector<double>{1.0}) == 1.0);
    CHECK(mse(std::vector<double>{0.1, 0.2}, std::vector<double>{0.2, 0.4}) ==
          doctest::Approx(0.025).epsilon(1e-15));
    CHECK_THROWS_AS(mse(std::vector<double>{0.1}, std::vector<double>{0.1, 0.2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(mse(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}
