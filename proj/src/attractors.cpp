#include "binae/attractors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "binae/analytic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace binae {

DecodePolicy default_decode_policy(const ModelParams& params) {
    params.validate();
    DecodePolicy p;
    if (params.kind == ModelKind::threshold) {
        const GaussianPair g = gaussian_moments(params, params.hidden_control);
        p.kind = DecodePolicyKind::fixed_tx;
        p.value = static_cast<int>(
            std::lround(approx_optimal_tx(g, params.a_x, params.n_x)));
    } else {
        p.kind = DecodePolicyKind::fixed_axr;
        p.value = params.a_x;
    }
    return p;
}

namespace {

BinaryVector step(const WeightMatrix& w, const ModelParams& params,
                  const DecodePolicy& policy, const BinaryVector& x) {
    const BinaryVector y = encode(w, x, params);
    return policy.kind == DecodePolicyKind::fixed_tx
               ? decode_threshold(w, y, policy.value)
               : decode_kwta(w, y, policy.value);
}

}  // namespace

CycleReport iterate_to_cycle(const WeightMatrix& w, const ModelParams& params,
                             const DecodePolicy& policy, const BinaryVector& x0,
                             int max_iter) {
    params.validate();
    if (max_iter < 1) throw std::invalid_argument("iterate_to_cycle: max_iter < 1");

    std::unordered_map<BinaryVector, int, BinaryVectorHash> seen;
    std::vector<BinaryVector> path;
    BinaryVector x = x0;
    for (int it = 0; it <= max_iter; ++it) {
        const auto [pos, inserted] = seen.emplace(x, it);
        if (!inserted) {
            CycleReport r;
            r.converged = true;
            r.transient_length = pos->second;
            r.cycle_states_x.assign(path.begin() + pos->second, path.end());
            return r;
        }
        path.push_back(x);
        x = step(w, params, policy, x);
    }
    CycleReport r;
    r.converged = false;
    r.transient_length = max_iter;
    return r;
}

CycleCensus cycle_census(const WeightMatrix& w, const ModelParams& params,
                         const DecodePolicy& policy, int n_samples,
                         std::uint64_t seed, int max_iter) {
    params.validate();
    if (n_samples < 0) throw std::invalid_argument("cycle_census: n_samples < 0");
    if (max_iter < 1) throw std::invalid_argument("cycle_census: max_iter < 1");

    std::vector<CycleReport> reports(static_cast<std::size_t>(n_samples));
    std::vector<BinaryVector> starts(static_cast<std::size_t>(n_samples));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (int s = 0; s < n_samples; ++s) {
        Rng rng(seed, static_cast<std::uint64_t>(s));
        starts[static_cast<std::size_t>(s)] =
            random_binary_vector(static_cast<std::size_t>(params.n_x),
                                 static_cast<std::size_t>(params.a_x), rng);
        reports[static_cast<std::size_t>(s)] = iterate_to_cycle(
            w, params, policy, starts[static_cast<std::size_t>(s)], max_iter);
    }

    // serial aggregation in sample order keeps the census deterministic
    CycleCensus census;
    census.n_samples = static_cast<std::uint64_t>(n_samples);
    std::unordered_set<BinaryVector, BinaryVectorHash> attractor_keys;
    for (int s = 0; s < n_samples; ++s) {
        const CycleReport& r = reports[static_cast<std::size_t>(s)];
        if (!r.converged) continue;
        census.n_converged += 1;
        census.histogram[{r.transient_length, r.combined_cycle_length()}] += 1;
        attractor_keys.insert(
            *std::min_element(r.cycle_states_x.begin(), r.cycle_states_x.end()));
        if (r.combined_cycle_length() > 2) {
            census.long_cycle_starts.push_back(starts[static_cast<std::size_t>(s)]);
        }
    }
    census.distinct_attractors = attractor_keys.size();
    return census;
}

}  // namespace binae
