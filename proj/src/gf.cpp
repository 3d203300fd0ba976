#include "rlnc/gf.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace rlnc {

namespace {

// Carry-less multiply followed by reduction mod poly. Only used to build the
// tables, so clarity beats speed here.
std::uint32_t clmul_mod(std::uint32_t a, std::uint32_t b, std::uint32_t poly, int w) {
    std::uint32_t acc = 0;
    while (b) {
        if (b & 1u) acc ^= a;
        b >>= 1;
        a <<= 1;
        if (a & (1u << w)) a ^= poly;
    }
    return acc;
}

// Remainder of carry-less division, for the irreducibility check.
std::uint32_t clmod(std::uint32_t a, std::uint32_t g) {
    const int dg = int(std::bit_width(g)) - 1;
    while (a && int(std::bit_width(a)) - 1 >= dg) {
        a ^= g << (int(std::bit_width(a)) - 1 - dg);
    }
    return a;
}

bool is_irreducible(std::uint32_t poly, int w) {
    // A composite polynomial of degree w has a factor of degree <= w/2.
    for (int d = 1; 2 * d <= w; ++d) {
        for (std::uint32_t g = 1u << d; g < (2u << d); ++g) {
            if (clmod(poly, g) == 0) return false;
        }
    }
    return true;
}

}  // namespace

std::uint32_t Field::default_polynomial(int extension_degree) {
    switch (extension_degree) {
        case 1: return 0x3;    // x + 1
        case 2: return 0x7;    // x^2 + x + 1
        case 4: return 0x13;   // x^4 + x + 1
        case 8: return 0x11D;  // x^8 + x^4 + x^3 + x^2 + 1
        default:
            throw std::invalid_argument("unsupported extension degree " +
                                        std::to_string(extension_degree));
    }
}

Field::Field(int extension_degree)
    : Field(extension_degree, default_polynomial(extension_degree)) {}

Field::Field(int extension_degree, std::uint32_t reduction_polynomial) {
    if (extension_degree != 1 && extension_degree != 2 && extension_degree != 4 &&
        extension_degree != 8) {
        throw std::invalid_argument("unsupported extension degree " +
                                    std::to_string(extension_degree));
    }
    w_ = extension_degree;
    q_ = 1 << w_;
    // The reduction polynomial is meaningless for the prime field itself.
    poly_ = (w_ == 1) ? default_polynomial(1) : reduction_polynomial;
    if (w_ > 1) {
        if (int(std::bit_width(poly_)) - 1 != w_) {
            throw std::invalid_argument("reduction polynomial degree != field degree");
        }
        if (!is_irreducible(poly_, w_)) {
            throw std::invalid_argument("reduction polynomial is reducible");
        }
    }

    mul_.assign(std::size_t(q_) * q_, 0);
    for (int a = 0; a < q_; ++a) {
        for (int b = a; b < q_; ++b) {
            std::uint8_t p = w_ == 1
                                 ? std::uint8_t(a & b)
                                 : std::uint8_t(clmul_mod(std::uint32_t(a),
                                                          std::uint32_t(b), poly_, w_));
            mul_[std::size_t(a) * q_ + b] = p;
            mul_[std::size_t(b) * q_ + a] = p;
        }
    }

    inv_.assign(q_, 0);
    for (int a = 1; a < q_; ++a) {
        const std::uint8_t* row = mul_row(std::uint8_t(a));
        for (int b = 1; b < q_; ++b) {
            if (row[b] == 1) {
                inv_[a] = std::uint8_t(b);
                break;
            }
        }
    }
}

std::uint8_t Field::inv(std::uint8_t a) const {
    if (a == 0) throw std::domain_error("inverse of zero");
    return inv_[a];
}

std::uint8_t field_mul(std::uint8_t a, std::uint8_t b, const Field& f) {
    if (a >= f.size() || b >= f.size()) {
        throw std::invalid_argument("field element out of range");
    }
    return f.mul(a, b);
}

std::uint8_t field_inv(std::uint8_t a, const Field& f) {
    if (a >= f.size()) throw std::invalid_argument("field element out of range");
    return f.inv(a);
}

FieldMatrix::FieldMatrix(int rows, int cols, const Field& f) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix shape");
    rows_ = rows;
    cols_ = cols;
    w_ = f.extension_degree();
    if (w_ == 1) {
        words_per_row_ = (cols_ + 63) / 64;
        bits_.assign(std::size_t(rows_) * words_per_row_, 0);
    } else {
        bytes_.assign(std::size_t(rows_) * cols_, 0);
    }
}

std::uint8_t FieldMatrix::get(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
        throw std::out_of_range("matrix index out of range");
    }
    if (w_ == 1) {
        return std::uint8_t((bits_[std::size_t(r) * words_per_row_ + c / 64] >> (c % 64)) & 1u);
    }
    return bytes_[std::size_t(r) * cols_ + c];
}

void FieldMatrix::set(int r, int c, std::uint8_t v) {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
        throw std::out_of_range("matrix index out of range");
    }
    if (v >= (1 << w_)) throw std::invalid_argument("field element out of range");
    if (w_ == 1) {
        std::uint64_t& word = bits_[std::size_t(r) * words_per_row_ + c / 64];
        std::uint64_t bit = 1ull << (c % 64);
        word = v ? (word | bit) : (word & ~bit);
    } else {
        bytes_[std::size_t(r) * cols_ + c] = v;
    }
}

int matrix_rank(const FieldMatrix& m, const Field& f) {
    if (f.extension_degree() != m.extension_degree()) {
        throw std::invalid_argument("matrix/field degree mismatch");
    }
    if (m.rows() == 0 || m.cols() == 0) return 0;

    if (m.extension_degree() == 1) {
        // Basis indexed by leading bit; reducing against the matching leading
        // bit only ever introduces lower bits, so the loop terminates.
        const int words = m.words_per_row_;
        std::vector<std::vector<std::uint64_t>> basis(m.cols());
        std::vector<std::uint64_t> row(words);
        int rank = 0;
        for (int r = 0; r < m.rows() && rank < std::min(m.rows(), m.cols()); ++r) {
            const std::uint64_t* src = m.bits_.data() + std::size_t(r) * words;
            row.assign(src, src + words);
            for (;;) {
                int lead = -1;
                for (int wd = words - 1; wd >= 0; --wd) {
                    if (row[wd]) {
                        lead = wd * 64 + std::bit_width(row[wd]) - 1;
                        break;
                    }
                }
                if (lead < 0) break;
                if (basis[lead].empty()) {
                    basis[lead] = row;
                    ++rank;
                    break;
                }
                for (int wd = 0; wd < words; ++wd) row[wd] ^= basis[lead][wd];
            }
        }
        return rank;
    }

    GfqRankTracker tr(m.cols(), f);
    for (int r = 0; r < m.rows(); ++r) {
        tr.add_row(m.bytes_.data() + std::size_t(r) * m.cols());
        if (tr.rank() == std::min(m.rows(), m.cols())) break;
    }
    return tr.rank();
}

Gf2RankTracker::Gf2RankTracker(int cols) {
    if (cols < 0 || cols > 64) throw std::invalid_argument("tracker supports 0..64 columns");
    cols_ = cols;
    mask_ = cols == 64 ? ~0ull : (1ull << cols) - 1;
    reset();
}

void Gf2RankTracker::reset() {
    rank_ = 0;
    for (auto& b : basis_) b = 0;
}

bool Gf2RankTracker::add_row(std::uint64_t row) {
    row &= mask_;
    while (row) {
        int b = std::bit_width(row) - 1;
        if (basis_[b]) {
            row ^= basis_[b];
        } else {
            basis_[b] = row;
            ++rank_;
            return true;
        }
    }
    return false;
}

GfqRankTracker::GfqRankTracker(int cols, const Field& f) : f_(&f), cols_(cols) {
    if (cols < 0) throw std::invalid_argument("negative column count");
    scratch_.resize(cols_);
    reset();
}

void GfqRankTracker::reset() {
    rank_ = 0;
    basis_.clear();
    pivots_.assign(cols_, -1);
}

bool GfqRankTracker::add_row(const std::uint8_t* row) {
    std::copy(row, row + cols_, scratch_.begin());
    // Left-to-right sweep: eliminating at column c only touches columns >= c,
    // so every pivot column is visited at most once.
    for (int c = 0; c < cols_; ++c) {
        if (!scratch_[c]) continue;
        const int b = pivots_[c];
        if (b < 0) {
            const std::uint8_t* mr = f_->mul_row(f_->inv(scratch_[c]));
            for (int k = c; k < cols_; ++k) scratch_[k] = mr[scratch_[k]];
            pivots_[c] = rank_;
            basis_.insert(basis_.end(), scratch_.begin(), scratch_.end());
            ++rank_;
            return true;
        }
        const std::uint8_t* brow = basis_.data() + std::size_t(b) * cols_;
        const std::uint8_t* mr = f_->mul_row(scratch_[c]);  // brow[c] == 1
        for (int k = c; k < cols_; ++k) scratch_[k] ^= mr[brow[k]];
    }
    return false;
}

}  // namespace rlnc
