#include "binae/simprec.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace binae {

std::vector<int> knn_hamming(const std::vector<BinaryVector>& corpus,
                             int query_index, int k) {
    const int n = static_cast<int>(corpus.size());
    if (k < 0 || k >= n) {
        throw std::invalid_argument("knn_hamming: k must be in [0, corpus size)");
    }
    if (query_index < 0 || query_index >= n) {
        throw std::invalid_argument("knn_hamming: query index out of range");
    }
    const BinaryVector& q = corpus[static_cast<std::size_t>(query_index)];
    // Bucket by distance; scanning buckets upward and indexes ascending
    // inside each bucket gives the (distance, index) order directly.
    const std::size_t max_d = q.length();
    std::vector<std::vector<int>> bucket(max_d + 1);
    for (int i = 0; i < n; ++i) {
        if (i == query_index) continue;
        bucket[hamming(q, corpus[static_cast<std::size_t>(i)])].push_back(i);
    }
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (const auto& b : bucket) {
        for (int i : b) {
            if (static_cast<int>(out.size()) == k) return out;
            out.push_back(i);
        }
    }
    return out;
}

double average_precision(const std::vector<int>& a_list, const std::vector<int>& b_list) {
    if (a_list.size() != b_list.size()) {
        throw std::invalid_argument("average_precision: list lengths differ");
    }
    std::vector<int> rel(a_list);
    std::sort(rel.begin(), rel.end());
    int hits = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i < b_list.size(); ++i) {
        if (std::binary_search(rel.begin(), rel.end(), b_list[i])) {
            ++hits;
            acc += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return acc / static_cast<double>(b_list.size());
}

double average_precision_unnormalized(const std::vector<int>& a_list,
                                      const std::vector<int>& b_list) {
    if (a_list.size() != b_list.size()) {
        throw std::invalid_argument("average_precision: list lengths differ");
    }
    std::vector<int> rel(a_list);
    std::sort(rel.begin(), rel.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < b_list.size(); ++i) {
        if (std::binary_search(rel.begin(), rel.end(), b_list[i])) {
            acc += 1.0 / static_cast<double>(i + 1);
        }
    }
    return acc;
}

std::vector<double> map_protocol(const std::vector<BinaryVector>& corpus,
                                 const std::vector<BinaryVector>& codes,
                                 Rng& query_rng, const MapProtocolConfig& cfg,
                                 bool unnormalized_ap) {
    if (codes.size() != corpus.size()) {
        throw std::invalid_argument("map_protocol: corpus/code size mismatch");
    }
    const int n = static_cast<int>(corpus.size());
    if (cfg.n_queries > n || cfg.k_neighbors >= n) {
        throw std::invalid_argument("map_protocol: protocol larger than the corpus");
    }
    if (cfg.n_queries < 1 || cfg.k_neighbors < 1) {
        throw std::invalid_argument("map_protocol: need at least one query and one neighbor");
    }
    // queries drawn without replacement, order fixed by the rng stream
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> queries(static_cast<std::size_t>(cfg.n_queries));
    for (int i = 0; i < cfg.n_queries; ++i) {
        const int j = i + static_cast<int>(query_rng.bounded(
                              static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        queries[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
    }

    std::vector<double> ap(static_cast<std::size_t>(cfg.n_queries));
    for (int qi = 0; qi < cfg.n_queries; ++qi) {
        const int q = queries[static_cast<std::size_t>(qi)];
        const std::vector<int> a = knn_hamming(corpus, q, cfg.k_neighbors);
        const std::vector<int> b = knn_hamming(codes, q, cfg.k_neighbors);
        ap[static_cast<std::size_t>(qi)] =
            unnormalized_ap ? average_precision_unnormalized(a, b)
                            : average_precision(a, b);
    }
    return ap;
}

APReport mean_average_precision(const ModelParams& params, std::uint64_t seed,
                                const MapOptions& opt) {
    params.validate();
    const MapProtocolConfig& cfg = opt.protocol;
    if (cfg.n_weight_trials < 1) {
        throw std::invalid_argument("mean_average_precision: need at least one trial");
    }
    // mirror map_protocol's checks here, before the parallel loop
    if (cfg.n_queries > cfg.n_corpus || cfg.k_neighbors >= cfg.n_corpus) {
        throw std::invalid_argument("mean_average_precision: protocol larger than the corpus");
    }
    if (cfg.n_queries < 1 || cfg.k_neighbors < 1) {
        throw std::invalid_argument(
            "mean_average_precision: need at least one query and one neighbor");
    }

    std::vector<std::vector<double>> per_trial(
        static_cast<std::size_t>(cfg.n_weight_trials));
    std::vector<double> trial_density(
        static_cast<std::size_t>(cfg.n_weight_trials), 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int t = 0; t < cfg.n_weight_trials; ++t) {
        // fixed draw order per trial stream: weights, decoder weights,
        // corpus, then query selection
        Rng rng(seed, static_cast<std::uint64_t>(t));
        const WeightMatrix w = random_weight_matrix(
            static_cast<std::size_t>(params.n_y),
            static_cast<std::size_t>(params.n_x),
            static_cast<std::size_t>(params.a_w), rng);
        WeightMatrix w2(1, 1);
        const bool needs_w2 = opt.space == SimilaritySpace::reconstruction &&
                              params.decoder == DecoderKind::independent_random;
        if (needs_w2) {
            w2 = random_weight_matrix(static_cast<std::size_t>(params.n_y),
                                      static_cast<std::size_t>(params.n_x),
                                      static_cast<std::size_t>(params.a_w), rng);
        }
        std::vector<BinaryVector> corpus;
        corpus.reserve(static_cast<std::size_t>(cfg.n_corpus));
        for (int i = 0; i < cfg.n_corpus; ++i) {
            corpus.push_back(random_binary_vector(
                static_cast<std::size_t>(params.n_x),
                static_cast<std::size_t>(params.a_x), rng));
        }

        std::vector<BinaryVector> codes;
        codes.reserve(corpus.size());
        std::uint64_t code_ones = 0;
        for (const BinaryVector& x : corpus) {
            BinaryVector y = encode(w, x, params);
            code_ones += y.ones();
            if (opt.space == SimilaritySpace::hidden) {
                codes.push_back(std::move(y));
            } else {
                // decoder-sensitive variant: retrieve among reconstructions
                // decoded with the fixed a_x^r = a_x policy
                switch (params.decoder) {
                    case DecoderKind::transpose:
                        codes.push_back(decode_kwta(w, y, params.a_x));
                        break;
                    case DecoderKind::independent_random:
                        codes.push_back(decode_independent_random(w2, y, params.a_x));
                        break;
                    case DecoderKind::pairwise:
                        codes.push_back(decode_pairwise(w, y, params.a_x));
                        break;
                }
            }
        }
        per_trial[static_cast<std::size_t>(t)] =
            map_protocol(corpus, codes, rng, cfg, opt.unnormalized_ap);
        trial_density[static_cast<std::size_t>(t)] =
            static_cast<double>(code_ones) /
            (static_cast<double>(cfg.n_corpus) * params.n_y);
    }

    APReport rep;
    rep.config = cfg;
    rep.per_query_ap.assign(static_cast<std::size_t>(cfg.n_queries), 0.0);
    for (const auto& trial : per_trial) {
        double sum = 0.0;
        for (std::size_t i = 0; i < trial.size(); ++i) {
            rep.per_query_ap[i] += trial[i] / cfg.n_weight_trials;
            sum += trial[i];
        }
        rep.trial_maps.push_back(sum / cfg.n_queries);
    }
    rep.map_value =
        std::accumulate(rep.trial_maps.begin(), rep.trial_maps.end(), 0.0) /
        static_cast<double>(cfg.n_weight_trials);
    rep.mean_code_density =
        std::accumulate(trial_density.begin(), trial_density.end(), 0.0) /
        static_cast<double>(cfg.n_weight_trials);
    return rep;
}

}  // namespace binae
