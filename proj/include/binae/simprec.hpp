#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "binae/models.hpp"

namespace binae {

struct MapProtocolConfig {
    int n_corpus = 1000;
    int n_queries = 100;
    int k_neighbors = 20;
    int n_weight_trials = 10;
};

// Which vectors the retrieval runs over: the hidden codes themselves (the
// standard protocol) or the decoded reconstructions (the only space where
// the decoder choice can matter).
enum class SimilaritySpace { hidden, reconstruction };

struct APReport {
    std::vector<double> per_query_ap;  // mean over trials, one per query slot
    std::vector<double> trial_maps;    // one mAP per weight trial
    double map_value = 0.0;
    // Mean hidden-code density over all corpus encodings; this is the
    // realized s_y, which for threshold models is not known in advance.
    double mean_code_density = 0.0;
    MapProtocolConfig config;
};

// k nearest corpus entries to corpus[query_index] by Hamming distance,
// excluding the query itself; ordered by (distance, index). k must be
// smaller than the corpus size.
std::vector<int> knn_hamming(const std::vector<BinaryVector>& corpus,
                             int query_index, int k);

// Standard average precision of ranked list b against relevant set a:
// mean over ranks of precision-at-rank at each hit. 1.0 iff every
// retrieved item is relevant.
double average_precision(const std::vector<int>& a_list, const std::vector<int>& b_list);

// Plain sum of I_A(b_i)/i without normalization; kept for comparison (it
// exceeds 1 when the list is mostly hits).
double average_precision_unnormalized(const std::vector<int>& a_list,
                                      const std::vector<int>& b_list);

// One protocol pass with an arbitrary code assignment: queries are drawn
// without replacement from the corpus, A = input-space neighbors,
// B = code-space neighbors, ap per query. Exposed so degenerate encoders
// (identity, constant) can be tested against the protocol directly.
std::vector<double> map_protocol(const std::vector<BinaryVector>& corpus,
                                 const std::vector<BinaryVector>& codes,
                                 Rng& query_rng, const MapProtocolConfig& cfg,
                                 bool unnormalized_ap = false);

struct MapOptions {
    MapProtocolConfig protocol;
    SimilaritySpace space = SimilaritySpace::hidden;
    bool unnormalized_ap = false;
};

// Full evaluation: per weight trial, draw fresh weights + corpus + queries
// from (seed, trial) substreams, encode with params, run the protocol,
// then average per query slot and over trials.
APReport mean_average_precision(const ModelParams& params, std::uint64_t seed,
                                const MapOptions& opt = {});

}  // namespace binae
