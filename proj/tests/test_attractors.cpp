#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "binae/analytic.hpp"
#include "binae/attractors.hpp"
#include "binae/binvec.hpp"
#include "binae/models.hpp"
#include "binae/rng.hpp"

using namespace binae;

namespace {

// One encode/decode round trip built from the public pieces, used to
// re-walk reported orbits independently of the library's internal stepper.
BinaryVector roundtrip(const WeightMatrix& w, const ModelParams& p,
                       const DecodePolicy& policy, const BinaryVector& x) {
    const BinaryVector y = encode(w, x, p);
    return policy.kind == DecodePolicyKind::fixed_tx
               ? decode_threshold(w, y, policy.value)
               : decode_kwta(w, y, policy.value);
}

ModelParams small_kwta() {
    ModelParams p;
    p.n_x = 24;
    p.n_y = 48;
    p.a_x = 8;
    p.a_w = 6;
    p.kind = ModelKind::kwta;
    p.hidden_control = 10;
    return p;
}

}  // namespace

TEST_CASE("default decode policies per model kind") {
    ModelParams p = small_kwta();
    const DecodePolicy kw = default_decode_policy(p);
    CHECK(kw.kind == DecodePolicyKind::fixed_axr);
    CHECK(kw.value == p.a_x);

    ModelParams th = p;
    th.kind = ModelKind::threshold;
    th.hidden_control = 3;  // t_y
    const DecodePolicy tp = default_decode_policy(th);
    CHECK(tp.kind == DecodePolicyKind::fixed_tx);
    const GaussianPair g = gaussian_moments(th, 3);
    CHECK(tp.value == static_cast<int>(
                          std::lround(approx_optimal_tx(g, th.a_x, th.n_x))));

    ModelParams bm = p;
    bm.kind = ModelKind::bmp;
    bm.hidden_control = 4;
    const DecodePolicy bp = default_decode_policy(bm);
    CHECK(bp.kind == DecodePolicyKind::fixed_axr);
    CHECK(bp.value == bm.a_x);
}

TEST_CASE("local coding makes every sparse input a fixed point") {
    // one-hot rows: encoding selects exactly the active positions, the
    // transpose decode puts them back
    const int n = 12, a_x = 4;
    WeightMatrix w(n, n);
    for (int i = 0; i < n; ++i) {
        BinaryVector row(n);
        row.set(static_cast<std::size_t>(i));
        w.row(static_cast<std::size_t>(i)) = row;
    }
    ModelParams p;
    p.n_x = n;
    p.n_y = n;
    p.a_x = a_x;
    p.a_w = 1;
    p.kind = ModelKind::kwta;
    p.hidden_control = a_x;
    const DecodePolicy policy = default_decode_policy(p);

    Rng rng(141);
    for (int rep = 0; rep < 20; ++rep) {
        const BinaryVector x0 = random_binary_vector(n, a_x, rng);
        const CycleReport r = iterate_to_cycle(w, p, policy, x0);
        REQUIRE(r.converged);
        CHECK(r.transient_length == 0);
        CHECK(r.combined_cycle_length() == 2);
        REQUIRE(r.cycle_states_x.size() == 1);
        CHECK(r.cycle_states_x.front() == x0);
    }

    // census over the same net: every start is its own attractor
    const CycleCensus census = cycle_census(w, p, policy, 200, 142);
    CHECK(census.n_samples == 200);
    CHECK(census.n_converged == 200);
    CHECK(census.fraction_length2() == doctest::Approx(1.0));
    CHECK(census.histogram.size() == 1);
    CHECK(census.histogram.begin()->first == std::pair<int, int>{0, 2});
    CHECK(census.long_cycle_starts.empty());
    std::set<std::vector<int>> distinct_starts;
    for (int s = 0; s < 200; ++s) {
        Rng srng(142, static_cast<std::uint64_t>(s));
        distinct_starts.insert(random_binary_vector(n, a_x, srng).to_bits());
    }
    CHECK(census.distinct_attractors == distinct_starts.size());
}

TEST_CASE("reported cycles are genuine orbits of the map") {
    ModelParams p = small_kwta();
    Rng rng(143);
    const WeightMatrix w = random_weight_matrix(p.n_y, p.n_x, p.a_w, rng);
    const DecodePolicy policy = default_decode_policy(p);

    int checked = 0;
    for (int rep = 0; rep < 40; ++rep) {
        const BinaryVector x0 = random_binary_vector(p.n_x, p.a_x, rng);
        const CycleReport r = iterate_to_cycle(w, p, policy, x0);
        if (!r.converged) continue;
        ++checked;
        // walk the transient by hand and land exactly on the cycle entry
        BinaryVector x = x0;
        for (int i = 0; i < r.transient_length; ++i) x = roundtrip(w, p, policy, x);
        REQUIRE(!r.cycle_states_x.empty());
        CHECK(x == r.cycle_states_x.front());
        // the listed states map one into the next, closing the loop
        for (std::size_t i = 0; i < r.cycle_states_x.size(); ++i) {
            const BinaryVector& cur = r.cycle_states_x[i];
            const BinaryVector& nxt =
                r.cycle_states_x[(i + 1) % r.cycle_states_x.size()];
            CHECK(roundtrip(w, p, policy, cur) == nxt);
        }
        // each cycle state is distinct
        std::set<std::vector<int>> uniq;
        for (const auto& s : r.cycle_states_x) uniq.insert(s.to_bits());
        CHECK(uniq.size() == r.cycle_states_x.size());
        // restarting on the cycle reports a zero transient and equal length
        const CycleReport again =
            iterate_to_cycle(w, p, policy, r.cycle_states_x.front());
        REQUIRE(again.converged);
        CHECK(again.transient_length == 0);
        CHECK(again.combined_cycle_length() == r.combined_cycle_length());
    }
    CHECK(checked > 0);
}

TEST_CASE("census bookkeeping adds up") {
    ModelParams p = small_kwta();
    Rng rng(144);
    const WeightMatrix w = random_weight_matrix(p.n_y, p.n_x, p.a_w, rng);
    const DecodePolicy policy = default_decode_policy(p);
    const CycleCensus census = cycle_census(w, p, policy, 300, 145);

    CHECK(census.n_samples == 300);
    std::uint64_t total = 0, longer = 0;
    double frac2_num = 0;
    for (const auto& [key, count] : census.histogram) {
        total += count;
        if (key.second > 2) longer += count;
        if (key.second == 2) frac2_num += static_cast<double>(count);
        CHECK(key.first >= 0);
        CHECK(key.second >= 2);
        CHECK(key.second % 2 == 0);
    }
    CHECK(total == census.n_converged);
    CHECK(census.n_converged <= census.n_samples);
    CHECK(census.long_cycle_starts.size() == longer);
    CHECK(census.fraction_length2() ==
          doctest::Approx(frac2_num / 300.0).epsilon(1e-12));
    CHECK(census.distinct_attractors >= 1);
    CHECK(census.distinct_attractors <= census.n_converged);
}

TEST_CASE("census determinism and thread-count independence") {
    ModelParams p = small_kwta();
    Rng rng(146);
    const WeightMatrix w = random_weight_matrix(p.n_y, p.n_x, p.a_w, rng);
    const DecodePolicy policy = default_decode_policy(p);
    const CycleCensus a = cycle_census(w, p, policy, 150, 147);
    const CycleCensus b = cycle_census(w, p, policy, 150, 147);
    CHECK(a.histogram == b.histogram);
    CHECK(a.n_converged == b.n_converged);
    CHECK(a.distinct_attractors == b.distinct_attractors);
    const CycleCensus c = cycle_census(w, p, policy, 150, 148);
    CHECK(c.histogram != a.histogram);  // different starts, different stats

#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(3);
    const CycleCensus d = cycle_census(w, p, policy, 150, 147);
    omp_set_num_threads(saved);
    CHECK(d.histogram == a.histogram);
    CHECK(d.distinct_attractors == a.distinct_attractors);
#endif
}

TEST_CASE("threshold dynamics run under the fixed-t_x policy") {
    ModelParams p;
    p.n_x = 24;
    p.n_y = 48;
    p.a_x = 8;
    p.a_w = 6;
    p.kind = ModelKind::threshold;
    p.hidden_control = 2;
    Rng rng(149);
    const WeightMatrix w = random_weight_matrix(p.n_y, p.n_x, p.a_w, rng);
    const DecodePolicy policy = default_decode_policy(p);
    REQUIRE(policy.kind == DecodePolicyKind::fixed_tx);
    const CycleCensus census = cycle_census(w, p, policy, 100, 150);
    CHECK(census.n_converged > 0);
    // threshold decoding does not conserve popcount, so just verify the
    // orbit states live in the input space
    Rng srng(150, 0);
    const BinaryVector x0 = random_binary_vector(p.n_x, p.a_x, srng);
    const CycleReport r = iterate_to_cycle(w, p, policy, x0);
    if (r.converged) {
        for (const auto& s : r.cycle_states_x) CHECK(s.length() == 24);
    }
}

TEST_CASE("iteration budget: refusal to converge is reported, not invented") {
    ModelParams p = small_kwta();
    Rng rng(151);
    const WeightMatrix w = random_weight_matrix(p.n_y, p.n_x, p.a_w, rng);
    const DecodePolicy policy = default_decode_policy(p);

    // find a start with a positive transient, then starve the budget
    bool exercised = false;
    for (int rep = 0; rep < 60 && !exercised; ++rep) {
        const BinaryVector x0 = random_binary_vector(p.n_x, p.a_x, rng);
        const CycleReport full = iterate_to_cycle(w, p, policy, x0);
        if (!full.converged || full.transient_length < 2) continue;
        exercised = true;
        const CycleReport starved = iterate_to_cycle(w, p, policy, x0, 1);
        CHECK(!starved.converged);
        CHECK(starved.transient_length == 1);
        CHECK(starved.cycle_states_x.empty());
        CHECK(starved.combined_cycle_length() == 0);
    }
    CHECK(exercised);

    CHECK_THROWS_AS(iterate_to_cycle(w, p, policy, BinaryVector(24), 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(cycle_census(w, p, policy, 10, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(cycle_census(w, p, policy, -1, 1), std::invalid_argument);

    // a starved census counts its failures
    const CycleCensus tight = cycle_census(w, p, policy, 100, 152, 1);
    CHECK(tight.n_converged < tight.n_samples);
}
