#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "binae/models.hpp"

namespace binae {

struct CensusOptions {
    int cap = 24;     // refuse enumerations beyond 2^cap inputs
    int workers = 0;  // 0: library default thread count
};

// Partition of the full input space {0,1}^n_x by hidden code: one class
// per realized code, class size = number of inputs mapped to it. Only the
// size multiset matters for the information quantities, so that is all we
// keep (sorted ascending, which makes reductions canonical).
struct OmegaCensus {
    int n_x = 0;
    std::uint64_t total_inputs = 0;
    std::vector<std::uint64_t> class_sizes;

    std::uint64_t realized_count() const { return class_sizes.size(); }
    double mean_class_size() const {
        return static_cast<double>(total_inputs) /
               static_cast<double>(class_sizes.size());
    }
};

using EncodeMap = std::function<BinaryVector(const BinaryVector&)>;

// Enumerate all 2^n_x inputs in counting order through `f` and collect the
// class sizes. The parallel version partitions the input range and merges
// per-worker counts by code; merging integer counts is order-independent,
// so the result is identical for any worker count.
OmegaCensus omega_census(const EncodeMap& f, int n_x, const CensusOptions& opt = {});

// Single-threaded reference implementation (kept for testing and as the
// benchmark baseline).
OmegaCensus omega_census_serial(const EncodeMap& f, int n_x, const CensusOptions& opt = {});

// I(X, Y) for the deterministic map under uniform inputs: since Y = f(X),
// I = H(Y) = n_x - (1/2^n_x) sum |class| log2 |class|. Singleton classes
// contribute nothing.
double mutual_information(const OmegaCensus& census);

// n_x - log2(mean class size); log-sum bound, always >= the exact MI with
// equality iff all classes have equal size.
double mi_upper_bound(const OmegaCensus& census);

// I(X, X_r) of a full encode-decode pipeline = H(X_r); same census
// machinery applied to the composed map.
double decoder_mi(const EncodeMap& pipeline, int n_x, const CensusOptions& opt = {});

struct MIReport {
    int a_y = 0;
    double s_y = 0.0;
    double h_x = 0.0;  // = n_x bits
    double mi_encoder = 0.0;
    double mi_decoder = 0.0;
    double upper_bound = 0.0;
    double mean_error = 0.0;  // mean error over the fixed-a_x input slice

    double scaled_encoder() const { return mi_encoder / h_x; }
    double scaled_decoder() const { return mi_decoder / h_x; }
    double scaled_upper_bound() const { return upper_bound / h_x; }
};

struct MISweepOptions {
    DecoderKind decoder = DecoderKind::transpose;
    // Reconstruction count of the fixed decode policy; -1 picks
    // round(n_x * 0.5), the mean density of the uniform input ensemble.
    int fixed_axr = -1;
    // Input popcount for the mean-error column; -1 picks n_x / 2.
    int error_ax = -1;
    // Replace the fixed policy by the per-input optimal a_x^r. This
    // changes the pipeline map, so it is reported as its own variant.
    bool optimize_axr_per_input = false;
    std::uint64_t seed = 1;
    // Substream the weight draw comes from; bump it to average sweeps over
    // several matrices without touching the seed.
    std::uint64_t stream = 0;
    int cap = 24;
    int workers = 0;
};

// One exact enumeration for a fixed weight matrix and a_y
// (params.hidden_control). decoder_w backs the independent-random decoder.
MIReport mi_point(const WeightMatrix& w, const ModelParams& params,
                  const MISweepOptions& opt = {},
                  const WeightMatrix* decoder_w = nullptr);

// Draw one weight matrix from opt.seed and evaluate mi_point on every a_y
// in the list. params.kind must be kwta or bmp (a_y-controlled models).
std::vector<MIReport> mi_sparsity_sweep(const ModelParams& params,
                                        std::span<const int> a_y_values,
                                        const MISweepOptions& opt = {});

}  // namespace binae
