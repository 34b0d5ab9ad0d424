#pragma once

#include <span>
#include <vector>

#include "binae/binvec.hpp"

namespace binae {

enum class ModelKind { threshold, kwta, bmp };
enum class DecoderKind { transpose, independent_random, pairwise };

// One encode/decode configuration. hidden_control is t_y for the threshold
// model and a_y (or the step count, for bmp) otherwise.
struct ModelParams {
    int n_x = 50;
    int n_y = 150;
    int a_x = 20;
    int a_w = 30;
    ModelKind kind = ModelKind::threshold;
    int hidden_control = 1;
    DecoderKind decoder = DecoderKind::transpose;
    long long lambda = 0;  // bmp inhibition; 0 means "use the default"

    // Smallest integer satisfying lambda > 2 a_x a_w, the bound that keeps
    // already-selected bmp units suppressed forever.
    long long effective_lambda() const {
        return lambda != 0 ? lambda : 2LL * a_x * a_w + 1;
    }

    // Throws std::invalid_argument when any range constraint is violated.
    void validate() const;
};

struct EncodeDecodeResult {
    BinaryVector hidden;
    BinaryVector reconstruction;
    int chosen_control = 0;  // the t_x or a_x^r the decode scan picked
    double error = 0.0;      // hamming(x, reconstruction) / N_x
};

// k highest entries of z win; ties at the cutoff value are resolved by
// first occurrence (lowest index). k == 0 gives all zeros, k == z.size()
// all ones. Negative entries are fine.
BinaryVector kwta(std::span<const int> z, int k);

// Heaviside encode/decode: unit active iff its overlap reaches the
// threshold (ties count as active).
BinaryVector encode_threshold(const WeightMatrix& w, const BinaryVector& x, int t_y);
BinaryVector decode_threshold(const WeightMatrix& w, const BinaryVector& y, int t_x);

BinaryVector encode_kwta(const WeightMatrix& w, const BinaryVector& x, int a_y);
BinaryVector decode_kwta(const WeightMatrix& w, const BinaryVector& y, int a_x_r);

// Decode through a second, independently drawn matrix instead of w^T.
// Same kwta rule; used as a control to decouple code content from decoder
// weights.
BinaryVector decode_independent_random(const WeightMatrix& w_prime,
                                       const BinaryVector& y, int a_x_r);

// Sigma-pi decode with pairwise products y_k y_l and AND-derived weights
// w_j(k,l) = w_kj w_lj. With that weight choice the sum collapses to
// C(c_j, 2) where c_j is the ordinary transpose overlap, which is how it
// is computed here.
BinaryVector decode_pairwise(const WeightMatrix& w, const BinaryVector& y, int a_x_r);
OverlapVector pairwise_overlaps(const WeightMatrix& w, const BinaryVector& y);

// Reconstruction-side scans. Both return the lowest control value among
// the error minimizers, together with the reconstruction it produces.
struct DecodeScan {
    int control = 0;     // t_x, respectively a_x^r
    int mismatches = 0;  // hamming(x, reconstruction)
    BinaryVector reconstruction;
};
DecodeScan scan_optimal_tx(const OverlapVector& v, const BinaryVector& x);
DecodeScan scan_optimal_axr(const OverlapVector& v, const BinaryVector& x);

// Encode x with params, decode with the per-input optimal control value,
// report the result. decoder_w supplies the independent-random decode
// matrix and is required exactly for that decoder kind. For bmp this runs
// hidden_control pursuit steps and reports the final one.
EncodeDecodeResult best_reconstruction(const WeightMatrix& w, const BinaryVector& x,
                                       const ModelParams& params,
                                       const WeightMatrix* decoder_w = nullptr);

// Encode only, dispatching on params.kind (bmp: code after hidden_control
// steps, decoding internally with the fixed a_x^r = x.ones() policy so the
// map stays deterministic).
BinaryVector encode(const WeightMatrix& w, const BinaryVector& x, const ModelParams& params);

// One pursuit step: the trace after adding the n-th winner.
struct BmpStep {
    BinaryVector hidden;
    BinaryVector reconstruction;
    int chosen_axr = 0;
    double error = 0.0;
};

// Greedy binary matching pursuit. Each step activates the hidden unit with
// the largest residual score 2 w x - w x^r - lambda y and re-decodes.
// fixed_axr >= 0 pins the reconstruction count (skipping the per-step
// scan); -1 scans for the optimum each step. Requires
// lambda > 2 * x.ones() * max row fan-in and 1 <= n_steps <= n_rows.
std::vector<BmpStep> bmp_encode(const WeightMatrix& w, const BinaryVector& x,
                                int n_steps, long long lambda, int fixed_axr = -1);

}  // namespace binae
