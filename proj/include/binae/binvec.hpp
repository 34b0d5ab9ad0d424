#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "binae/rng.hpp"

namespace binae {

// Integer overlap counts, one entry per unit of a layer.
using OverlapVector = std::vector<int>;

// Branch-free popcount fallback for platforms without a popcount
// instruction. Must agree with std::popcount bit for bit (tested).
inline std::uint32_t popcount_u64_portable(std::uint64_t v) {
    v = v - ((v >> 1) & 0x5555555555555555ULL);
    v = (v & 0x3333333333333333ULL) + ((v >> 2) & 0x3333333333333333ULL);
    v = (v + (v >> 4)) & 0x0f0f0f0f0f0f0f0fULL;
    return static_cast<std::uint32_t>((v * 0x0101010101010101ULL) >> 56);
}

// Fixed-length {0,1} vector packed LSB-first into 64-bit words.
//
// Invariants: bits at positions >= length() are always zero (so equality
// and hashing can work on raw words), and the popcount is cached and kept
// in sync by every mutator. Vectors are cheap to hash, compare and AND
// together, which is what every model in this library does all day.
class BinaryVector {
public:
    BinaryVector() = default;

    explicit BinaryVector(std::size_t length)
        : len_(length), ones_(0), words_((length + 63) / 64, 0) {}

    // bits[i] nonzero -> position i set.
    static BinaryVector from_bits(const std::vector<int>& bits);

    static BinaryVector from_indices(std::size_t length,
                                     const std::vector<std::size_t>& indices);

    // Low `length` bits of `word` (length <= 64). Handy when enumerating
    // all inputs of a small layer.
    static BinaryVector from_word(std::size_t length, std::uint64_t word);

    std::size_t length() const { return len_; }
    std::size_t ones() const { return ones_; }

    bool test(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    void set(std::size_t i);
    void reset(std::size_t i);

    std::span<const std::uint64_t> words() const { return words_; }

    std::vector<std::size_t> one_indices() const;
    std::vector<int> to_bits() const;

    bool operator==(const BinaryVector& other) const {
        return len_ == other.len_ && words_ == other.words_;
    }

    // 64-bit mix of the words; containers must still compare full keys.
    std::uint64_t hash64() const;

    // Strict weak order on (length, words); gives a canonical order for
    // censuses and attractor representatives.
    bool operator<(const BinaryVector& other) const;

private:
    void check_index(std::size_t i) const;

    std::size_t len_ = 0;
    std::size_t ones_ = 0;
    std::vector<std::uint64_t> words_;
};

struct BinaryVectorHash {
    std::size_t operator()(const BinaryVector& v) const {
        return static_cast<std::size_t>(v.hash64());
    }
};

// Row-major binary matrix; row i is the fan-in mask of hidden unit i.
// n_rows >= 1 and n_cols >= 1 are enforced at construction.
class WeightMatrix {
public:
    WeightMatrix(std::size_t n_rows, std::size_t n_cols);

    std::size_t n_rows() const { return rows_.size(); }
    std::size_t n_cols() const { return n_cols_; }

    const BinaryVector& row(std::size_t i) const { return rows_[i]; }
    BinaryVector& row(std::size_t i) { return rows_[i]; }

    // The n_cols x n_rows matrix with rows and columns swapped. Decoding
    // through the transpose is the common case, and iterating columns of
    // the transposed copy is much faster than bit-probing the original.
    WeightMatrix transposed() const;

private:
    std::size_t n_cols_;
    std::vector<BinaryVector> rows_;
};

// Uniformly random vector with exactly `ones` bits set.
BinaryVector random_binary_vector(std::size_t length, std::size_t ones, Rng& rng);

// Matrix whose rows are independent draws of random_binary_vector(n_cols, a_w).
WeightMatrix random_weight_matrix(std::size_t n_rows, std::size_t n_cols,
                                  std::size_t a_w, Rng& rng);

// Control variant: each bit independently Bernoulli(density). Row popcounts
// fluctuate; used only to compare against the fixed fan-in scheme.
WeightMatrix bernoulli_weight_matrix(std::size_t n_rows, std::size_t n_cols,
                                     double density, Rng& rng);

// Number of positions where a and b differ. Lengths must match.
std::size_t hamming(const BinaryVector& a, const BinaryVector& b);

// z_i = <row i of w, x>. Requires w.n_cols() == x.length().
OverlapVector overlaps(const WeightMatrix& w, const BinaryVector& x);

// v_j = sum over active y_i of w_ij, i.e. w^T y without materializing the
// transpose. Requires w.n_rows() == y.length().
OverlapVector transpose_overlaps(const WeightMatrix& w, const BinaryVector& y);

}  // namespace binae
