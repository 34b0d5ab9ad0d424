#include "binae/binvec.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace binae {

void BinaryVector::check_index(std::size_t i) const {
    if (i >= len_) {
        throw std::out_of_range("BinaryVector: index " + std::to_string(i) +
                                " out of range for length " + std::to_string(len_));
    }
}

void BinaryVector::set(std::size_t i) {
    check_index(i);
    std::uint64_t& w = words_[i >> 6];
    const std::uint64_t mask = 1ULL << (i & 63);
    if (!(w & mask)) {
        w |= mask;
        ++ones_;
    }
}

void BinaryVector::reset(std::size_t i) {
    check_index(i);
    std::uint64_t& w = words_[i >> 6];
    const std::uint64_t mask = 1ULL << (i & 63);
    if (w & mask) {
        w &= ~mask;
        --ones_;
    }
}

BinaryVector BinaryVector::from_bits(const std::vector<int>& bits) {
    BinaryVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != 0) v.set(i);
    }
    return v;
}

BinaryVector BinaryVector::from_indices(std::size_t length,
                                        const std::vector<std::size_t>& indices) {
    BinaryVector v(length);
    for (std::size_t i : indices) v.set(i);
    return v;
}

BinaryVector BinaryVector::from_word(std::size_t length, std::uint64_t word) {
    if (length > 64) throw std::invalid_argument("from_word: length > 64");
    BinaryVector v(length);
    if (length == 0) return v;
    const std::uint64_t mask = length == 64 ? ~0ULL : (1ULL << length) - 1;
    if (!v.words_.empty()) {
        v.words_[0] = word & mask;
        v.ones_ = static_cast<std::size_t>(std::popcount(v.words_[0]));
    }
    return v;
}

std::vector<std::size_t> BinaryVector::one_indices() const {
    std::vector<std::size_t> out;
    out.reserve(ones_);
    for (std::size_t k = 0; k < words_.size(); ++k) {
        std::uint64_t w = words_[k];
        while (w) {
            out.push_back(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
            w &= w - 1;
        }
    }
    return out;
}

std::vector<int> BinaryVector::to_bits() const {
    std::vector<int> out(len_, 0);
    for (std::size_t i : one_indices()) out[i] = 1;
    return out;
}

std::uint64_t BinaryVector::hash64() const {
    // splitmix-style word mixer; length folded in so e.g. an empty vector
    // of length 3 and of length 70 hash differently.
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ (static_cast<std::uint64_t>(len_) << 1);
    for (std::uint64_t w : words_) {
        h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 0xbf58476d1ce4e5b9ULL;
        h ^= h >> 29;
    }
    return h;
}

bool BinaryVector::operator<(const BinaryVector& other) const {
    if (len_ != other.len_) return len_ < other.len_;
    return words_ < other.words_;
}

WeightMatrix::WeightMatrix(std::size_t n_rows, std::size_t n_cols) : n_cols_(n_cols) {
    if (n_rows == 0 || n_cols == 0) {
        throw std::invalid_argument("WeightMatrix: dimensions must be >= 1");
    }
    rows_.assign(n_rows, BinaryVector(n_cols));
}

WeightMatrix WeightMatrix::transposed() const {
    WeightMatrix t(n_cols_, n_rows());
    for (std::size_t i = 0; i < n_rows(); ++i) {
        for (std::size_t j : rows_[i].one_indices()) t.row(j).set(i);
    }
    return t;
}

BinaryVector random_binary_vector(std::size_t length, std::size_t ones, Rng& rng) {
    if (ones > length) {
        throw std::invalid_argument("random_binary_vector: ones > length");
    }
    // Partial Fisher-Yates over the index range: the first `ones` slots end
    // up holding a uniform random subset.
    std::vector<std::size_t> idx(length);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    BinaryVector v(length);
    for (std::size_t k = 0; k < ones; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng.bounded(length - k));
        std::swap(idx[k], idx[j]);
        v.set(idx[k]);
    }
    return v;
}

WeightMatrix random_weight_matrix(std::size_t n_rows, std::size_t n_cols,
                                  std::size_t a_w, Rng& rng) {
    WeightMatrix w(n_rows, n_cols);
    for (std::size_t i = 0; i < n_rows; ++i) {
        w.row(i) = random_binary_vector(n_cols, a_w, rng);
    }
    return w;
}

WeightMatrix bernoulli_weight_matrix(std::size_t n_rows, std::size_t n_cols,
                                     double density, Rng& rng) {
    if (density < 0.0 || density > 1.0) {
        throw std::invalid_argument("bernoulli_weight_matrix: density outside [0, 1]");
    }
    WeightMatrix w(n_rows, n_cols);
    for (std::size_t i = 0; i < n_rows; ++i) {
        for (std::size_t j = 0; j < n_cols; ++j) {
            if (rng.uniform01() < density) w.row(i).set(j);
        }
    }
    return w;
}

std::size_t hamming(const BinaryVector& a, const BinaryVector& b) {
    if (a.length() != b.length()) {
        throw std::invalid_argument("hamming: length mismatch");
    }
    const auto wa = a.words();
    const auto wb = b.words();
    std::size_t d = 0;
    for (std::size_t k = 0; k < wa.size(); ++k) {
        d += static_cast<std::size_t>(std::popcount(wa[k] ^ wb[k]));
    }
    return d;
}

OverlapVector overlaps(const WeightMatrix& w, const BinaryVector& x) {
    if (w.n_cols() != x.length()) {
        throw std::invalid_argument("overlaps: w.n_cols != x.length");
    }
    OverlapVector z(w.n_rows());
    const auto xw = x.words();
    for (std::size_t i = 0; i < w.n_rows(); ++i) {
        const auto rw = w.row(i).words();
        int acc = 0;
        for (std::size_t k = 0; k < xw.size(); ++k) {
            acc += std::popcount(rw[k] & xw[k]);
        }
        z[i] = acc;
    }
    return z;
}

OverlapVector transpose_overlaps(const WeightMatrix& w, const BinaryVector& y) {
    if (w.n_rows() != y.length()) {
        throw std::invalid_argument("transpose_overlaps: w.n_rows != y.length");
    }
    OverlapVector v(w.n_cols(), 0);
    // Walk active hidden units and scatter their rows; costs O(a_y * a_w)
    // instead of O(N_y * N_x).
    const auto yw = y.words();
    for (std::size_t k = 0; k < yw.size(); ++k) {
        std::uint64_t word = yw[k];
        while (word) {
            const std::size_t i = k * 64 + static_cast<std::size_t>(std::countr_zero(word));
            word &= word - 1;
            const auto rw = w.row(i).words();
            for (std::size_t c = 0; c < rw.size(); ++c) {
                std::uint64_t bits = rw[c];
                while (bits) {
                    v[c * 64 + static_cast<std::size_t>(std::countr_zero(bits))] += 1;
                    bits &= bits - 1;
                }
            }
        }
    }
    return v;
}

}  // namespace binae
