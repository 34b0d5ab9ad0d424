#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "binae/models.hpp"

namespace binae {

// The iterated map x -> y -> x needs a fixed decode rule (a per-input
// optimized t_x / a_x^r would make the dynamics depend on the optimizer's
// tie-breaking). Either hold the output threshold or the output count.
enum class DecodePolicyKind { fixed_tx, fixed_axr };

struct DecodePolicy {
    DecodePolicyKind kind = DecodePolicyKind::fixed_axr;
    int value = 0;
};

// Defaults derived from the model parameters: threshold models decode at
// the rounded analytic optimum t_x, count models pin a_x^r = a_x.
DecodePolicy default_decode_policy(const ModelParams& params);

struct CycleReport {
    bool converged = false;
    int transient_length = 0;
    // Distinct input-layer states on the cycle, in traversal order
    // starting from the first revisited state. Empty when not converged.
    std::vector<BinaryVector> cycle_states_x;

    // x and y states alternate, so the cycle the dynamics actually walks
    // is twice as long as its x-state footprint.
    int combined_cycle_length() const {
        return 2 * static_cast<int>(cycle_states_x.size());
    }
};

// Iterate encode/decode from x0 until an x-state repeats, tracking every
// visited state in a hash map for the exact transient length. Gives up
// (converged = false) after max_iter steps.
CycleReport iterate_to_cycle(const WeightMatrix& w, const ModelParams& params,
                             const DecodePolicy& policy, const BinaryVector& x0,
                             int max_iter = 1000);

struct CycleCensus {
    // (transient_length, combined_cycle_length) -> number of starts
    std::map<std::pair<int, int>, std::uint64_t> histogram;
    std::uint64_t n_samples = 0;
    std::uint64_t n_converged = 0;
    std::uint64_t distinct_attractors = 0;
    // Starting states whose cycle is longer than the expected length 2,
    // kept as counterexample material (the length-2 claim is empirical).
    std::vector<BinaryVector> long_cycle_starts;

    double fraction_length2() const {
        std::uint64_t n2 = 0;
        for (const auto& [key, count] : histogram) {
            if (key.second == 2) n2 += count;
        }
        return n_samples == 0 ? 0.0
                              : static_cast<double>(n2) / static_cast<double>(n_samples);
    }
};

// Run iterate_to_cycle from n_samples random starts with a_x active bits
// (per-sample rng substreams) and aggregate cycle statistics. Attractors
// are deduplicated by their lexicographically smallest cycle state.
CycleCensus cycle_census(const WeightMatrix& w, const ModelParams& params,
                         const DecodePolicy& policy, int n_samples,
                         std::uint64_t seed, int max_iter = 1000);

}  // namespace binae
