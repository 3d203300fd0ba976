#pragma once

#include <cstdint>
#include <vector>

namespace rlnc {

// Binary extension field GF(2^w), w in {1,2,4,8}, with full multiplication and
// inverse tables. The reduction polynomial is validated for degree and
// irreducibility at construction.
class Field {
public:
    explicit Field(int extension_degree);
    Field(int extension_degree, std::uint32_t reduction_polynomial);

    int extension_degree() const { return w_; }
    int size() const { return q_; }  // q = 2^w
    std::uint32_t reduction_polynomial() const { return poly_; }

    std::uint8_t add(std::uint8_t a, std::uint8_t b) const { return a ^ b; }
    std::uint8_t mul(std::uint8_t a, std::uint8_t b) const {
        return mul_[std::size_t(a) * q_ + b];
    }
    // Multiplicative inverse; a must be nonzero.
    std::uint8_t inv(std::uint8_t a) const;

    // Row of the multiplication table for a fixed factor. Hot loops index it
    // directly instead of paying two-operand address math per element.
    const std::uint8_t* mul_row(std::uint8_t c) const {
        return mul_.data() + std::size_t(c) * q_;
    }

    static std::uint32_t default_polynomial(int extension_degree);

private:
    int w_;
    int q_;
    std::uint32_t poly_;
    std::vector<std::uint8_t> mul_;  // q*q, row-major
    std::vector<std::uint8_t> inv_;  // q, entry 0 unused
};

// Range-checked entry points; Field::mul/inv skip the checks.
std::uint8_t field_mul(std::uint8_t a, std::uint8_t b, const Field& f);
std::uint8_t field_inv(std::uint8_t a, const Field& f);

// Dense matrix over GF(2^w). GF(2) rows are bit-packed into 64-bit words;
// wider fields store one byte per entry. Entries are validated on set().
class FieldMatrix {
public:
    FieldMatrix(int rows, int cols, const Field& f);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int extension_degree() const { return w_; }

    std::uint8_t get(int r, int c) const;
    void set(int r, int c, std::uint8_t v);

private:
    friend int matrix_rank(const FieldMatrix&, const Field&);
    int rows_, cols_, w_;
    int words_per_row_ = 0;            // w == 1 only
    std::vector<std::uint64_t> bits_;  // w == 1
    std::vector<std::uint8_t> bytes_;  // w > 1
};

// Rank by Gaussian elimination. The input is copied, never mutated.
int matrix_rank(const FieldMatrix& m, const Field& f);

// Incremental rank of a growing row set over GF(2), cols <= 64. Rows are
// reduced against a leading-bit basis; add_row returns true iff the rank grew.
class Gf2RankTracker {
public:
    explicit Gf2RankTracker(int cols);
    void reset();
    bool add_row(std::uint64_t row);
    int rank() const { return rank_; }
    int cols() const { return cols_; }

private:
    int cols_;
    int rank_;
    std::uint64_t mask_;
    std::uint64_t basis_[64];  // basis_[b] has leading bit b, or 0
};

// Same idea for GF(2^w), w > 1: forward elimination against normalized
// basis rows with recorded pivot columns.
class GfqRankTracker {
public:
    GfqRankTracker(int cols, const Field& f);
    void reset();
    bool add_row(const std::uint8_t* row);  // reads cols() bytes
    int rank() const { return rank_; }
    int cols() const { return cols_; }

private:
    const Field* f_;
    int cols_;
    int rank_;
    std::vector<std::uint8_t> basis_;  // rank_ rows, cols_ bytes each
    std::vector<int> pivots_;          // column -> basis row, -1 if none
    std::vector<std::uint8_t> scratch_;
};

}  // namespace rlnc
