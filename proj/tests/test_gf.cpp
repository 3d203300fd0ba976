#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "rlnc/gf.hpp"

using namespace rlnc;

TEST_CASE("field construction validates degree and polynomial") {
    CHECK_NOTHROW(Field(1));
    CHECK_NOTHROW(Field(2));
    CHECK_NOTHROW(Field(4));
    CHECK_NOTHROW(Field(8));
    CHECK_THROWS_AS(Field(3), std::invalid_argument);
    CHECK_THROWS_AS(Field(16), std::invalid_argument);
    // wrong degree
    CHECK_THROWS_AS(Field(8, 0x7), std::invalid_argument);
    // x^8 + x + 1 is reducible
    CHECK_THROWS_AS(Field(8, 0x103), std::invalid_argument);
    // the AES polynomial x^8 + x^4 + x^3 + x + 1 is a fine alternative
    CHECK_NOTHROW(Field(8, 0x11B));
}

TEST_CASE("field_mul basics") {
    const Field f1(1);
    CHECK(field_mul(1, 1, f1) == 1);
    CHECK(field_mul(0, 1, f1) == 0);

    const Field f8(8, 0x11D);
    CHECK(field_mul(0x02, 0x80, f8) == 0x1D);  // x * x^7 = x^8 = x^4+x^3+x^2+1
    CHECK(field_mul(0x00, 0xAB, f8) == 0x00);
    CHECK(field_mul(0x01, 0xAB, f8) == 0xAB);

    const Field f4(4);
    CHECK_THROWS_AS(field_mul(16, 1, f4), std::invalid_argument);
    CHECK_THROWS_AS(field_inv(16, f4), std::invalid_argument);
}

TEST_CASE("multiplication forms an abelian group on nonzero elements") {
    for (int w : {2, 4, 8}) {
        const Field f(w);
        const int q = f.size();
        for (int a = 0; a < q; ++a) {
            for (int b = 0; b < q; ++b) {
                CHECK(f.mul(std::uint8_t(a), std::uint8_t(b)) ==
                      f.mul(std::uint8_t(b), std::uint8_t(a)));
            }
        }
        // each nonzero row is a permutation of the field (latin square)
        for (int a = 1; a < q; ++a) {
            std::vector<bool> seen(q, false);
            for (int b = 0; b < q; ++b) {
                const int p = f.mul(std::uint8_t(a), std::uint8_t(b));
                CHECK(!seen[p]);
                seen[p] = true;
            }
        }
    }
}

TEST_CASE("field_inv is the multiplicative inverse everywhere") {
    for (int w : {1, 2, 4, 8}) {
        const Field f(w);
        for (int a = 1; a < f.size(); ++a) {
            CHECK(f.mul(std::uint8_t(a), f.inv(std::uint8_t(a))) == 1);
        }
        CHECK_THROWS_AS(field_inv(0, f), std::domain_error);
    }
}

namespace {

FieldMatrix from_rows(const std::vector<std::vector<int>>& rows, const Field& f) {
    const int r = int(rows.size());
    const int c = r ? int(rows[0].size()) : 0;
    FieldMatrix m(r, c, f);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) m.set(i, j, std::uint8_t(rows[i][j]));
    }
    return m;
}

}  // namespace

TEST_CASE("matrix_rank on fixed instances") {
    const Field f2(1);
    for (int k : {1, 3, 7, 64}) {
        FieldMatrix id(k, k, f2);
        for (int i = 0; i < k; ++i) id.set(i, i, 1);
        CHECK(matrix_rank(id, f2) == k);
    }
    CHECK(matrix_rank(FieldMatrix(4, 5, f2), f2) == 0);  // all zero
    CHECK(matrix_rank(FieldMatrix(0, 5, f2), f2) == 0);
    CHECK(matrix_rank(FieldMatrix(5, 0, f2), f2) == 0);
    CHECK(matrix_rank(from_rows({{1, 1}, {1, 1}}, f2), f2) == 1);

    const Field f256(8);
    FieldMatrix id(3, 3, f256);
    for (int i = 0; i < 3; ++i) id.set(i, i, 1);
    CHECK(matrix_rank(id, f256) == 3);
    // (3,6) would be dependent: 3*inv(2)*4 = 3*2 = 6 carry-less, so use (3,5)
    CHECK(matrix_rank(from_rows({{2, 4}, {3, 6}}, f256), f256) == 1);
    CHECK(matrix_rank(from_rows({{2, 4}, {3, 5}}, f256), f256) == 2);

    CHECK_THROWS_AS(matrix_rank(FieldMatrix(2, 2, f2), f256), std::invalid_argument);
}

TEST_CASE("matrix entry validation") {
    const Field f2(1);
    FieldMatrix m(2, 2, f2);
    CHECK_THROWS_AS(m.set(0, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(m.set(2, 0, 1), std::out_of_range);
    CHECK_THROWS_AS(m.get(0, 2), std::out_of_range);
}

TEST_CASE("rank matches the exhaustive independence oracle for all small binary matrices") {
    const Field f2(1);
    for (int rows = 0; rows <= 4; ++rows) {
        for (int cols = 0; cols <= 4; ++cols) {
            const std::uint64_t total = 1ull << (rows * cols);
            std::vector<std::uint64_t> r(rows);
            for (std::uint64_t bits = 0; bits < total; ++bits) {
                FieldMatrix m(rows, cols, f2);
                for (int i = 0; i < rows; ++i) {
                    r[i] = (bits >> (i * cols)) & ((1ull << cols) - 1);
                    for (int j = 0; j < cols; ++j) {
                        if ((r[i] >> j) & 1u) m.set(i, j, 1);
                    }
                }
                REQUIRE(matrix_rank(m, f2) == testing::oracle_rank_gf2(r, cols));
            }
        }
    }
}

TEST_CASE("rank is invariant under row permutation and nonzero row scaling") {
    std::mt19937 gen(42);
    for (int w : {1, 4, 8}) {
        const Field f(w);
        std::uniform_int_distribution<int> elem(0, f.size() - 1);
        std::uniform_int_distribution<int> nonzero(1, f.size() - 1);
        for (int it = 0; it < 50; ++it) {
            const int rows = 1 + int(gen() % 6), cols = 1 + int(gen() % 6);
            FieldMatrix m(rows, cols, f);
            for (int i = 0; i < rows; ++i) {
                for (int j = 0; j < cols; ++j) m.set(i, j, std::uint8_t(elem(gen)));
            }
            const int base = matrix_rank(m, f);

            std::vector<int> perm(rows);
            for (int i = 0; i < rows; ++i) perm[i] = i;
            std::shuffle(perm.begin(), perm.end(), gen);
            FieldMatrix shuffled(rows, cols, f);
            for (int i = 0; i < rows; ++i) {
                const std::uint8_t scale = std::uint8_t(nonzero(gen));
                for (int j = 0; j < cols; ++j) {
                    shuffled.set(i, j, f.mul(scale, m.get(perm[i], j)));
                }
            }
            CHECK(matrix_rank(shuffled, f) == base);

            FieldMatrix t(cols, rows, f);
            for (int i = 0; i < rows; ++i) {
                for (int j = 0; j < cols; ++j) t.set(j, i, m.get(i, j));
            }
            CHECK(matrix_rank(t, f) == base);
        }
    }
}

TEST_CASE("wide binary matrices exercise the multi-word row path") {
    const Field f2(1);
    // 100 columns: identity-like staircase has full row rank
    FieldMatrix m(20, 100, f2);
    for (int i = 0; i < 20; ++i) {
        m.set(i, i * 5, 1);
        m.set(i, 99, 1);
    }
    CHECK(matrix_rank(m, f2) == 20);
    // duplicate every row: rank unchanged
    FieldMatrix d(40, 100, f2);
    for (int i = 0; i < 40; ++i) {
        const int src = i % 20;
        d.set(i, src * 5, 1);
        d.set(i, 99, 1);
    }
    CHECK(matrix_rank(d, f2) == 20);
}

TEST_CASE("rank trackers agree with matrix_rank") {
    std::mt19937 gen(7);
    const Field f2(1);
    for (int it = 0; it < 200; ++it) {
        const int rows = 1 + int(gen() % 8), cols = 1 + int(gen() % 12);
        Gf2RankTracker tr(cols);
        FieldMatrix m(rows, cols, f2);
        int increments = 0;
        for (int i = 0; i < rows; ++i) {
            const std::uint64_t row = gen() & ((1ull << cols) - 1);
            increments += tr.add_row(row) ? 1 : 0;
            for (int j = 0; j < cols; ++j) {
                if ((row >> j) & 1u) m.set(i, j, 1);
            }
        }
        CHECK(tr.rank() == matrix_rank(m, f2));
        CHECK(tr.rank() == increments);
    }

    const Field f16(4);
    std::uniform_int_distribution<int> elem(0, 15);
    for (int it = 0; it < 200; ++it) {
        const int rows = 1 + int(gen() % 8), cols = 1 + int(gen() % 6);
        GfqRankTracker tr(cols, f16);
        FieldMatrix m(rows, cols, f16);
        std::vector<std::uint8_t> row(cols);
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                row[j] = std::uint8_t(elem(gen));
                m.set(i, j, row[j]);
            }
            tr.add_row(row.data());
        }
        CHECK(tr.rank() == matrix_rank(m, f16));
    }
}
