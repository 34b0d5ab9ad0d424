#include "binae/models.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace binae {

void ModelParams::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("ModelParams: " + msg); };
    if (n_x < 1) fail("n_x must be >= 1");
    if (n_y < 1) fail("n_y must be >= 1");
    if (a_x < 1 || a_x > n_x) fail("a_x must be in [1, n_x]");
    if (a_w < 0 || a_w > n_x) fail("a_w must be in [0, n_x]");
    switch (kind) {
        case ModelKind::threshold:
            if (hidden_control < 1 || hidden_control > std::min(a_x, a_w))
                fail("t_y must be in [1, min(a_x, a_w)]");
            break;
        case ModelKind::kwta:
        case ModelKind::bmp:
            if (hidden_control < 1 || hidden_control > n_y)
                fail("a_y must be in [1, n_y]");
            break;
    }
    if (kind == ModelKind::bmp) {
        if (effective_lambda() <= 2LL * a_x * a_w) fail("lambda must exceed 2 a_x a_w");
        if (decoder != DecoderKind::transpose) fail("bmp decodes through w^T only");
    }
}

BinaryVector kwta(std::span<const int> z, int k) {
    const int n = static_cast<int>(z.size());
    if (k < 0 || k > n) throw std::invalid_argument("kwta: k outside [0, size]");
    BinaryVector out(static_cast<std::size_t>(n));
    if (k == 0) return out;
    if (k == n) {
        for (int i = 0; i < n; ++i) out.set(static_cast<std::size_t>(i));
        return out;
    }
    // Cutoff = value of the k-th largest entry; everything above it wins,
    // ties at the cutoff win in index order until k is reached.
    std::vector<int> tmp(z.begin(), z.end());
    std::nth_element(tmp.begin(), tmp.begin() + (k - 1), tmp.end(), std::greater<int>());
    const int cutoff = tmp[k - 1];
    int above = 0;
    for (int v : z) above += (v > cutoff) ? 1 : 0;
    int need = k - above;
    for (int i = 0; i < n; ++i) {
        if (z[i] > cutoff) {
            out.set(static_cast<std::size_t>(i));
        } else if (z[i] == cutoff && need > 0) {
            out.set(static_cast<std::size_t>(i));
            --need;
        }
    }
    return out;
}

namespace {

BinaryVector threshold_units(const OverlapVector& v, int t) {
    BinaryVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] >= t) out.set(i);
    }
    return out;
}

}  // namespace

BinaryVector encode_threshold(const WeightMatrix& w, const BinaryVector& x, int t_y) {
    return threshold_units(overlaps(w, x), t_y);
}

BinaryVector decode_threshold(const WeightMatrix& w, const BinaryVector& y, int t_x) {
    return threshold_units(transpose_overlaps(w, y), t_x);
}

BinaryVector encode_kwta(const WeightMatrix& w, const BinaryVector& x, int a_y) {
    const OverlapVector z = overlaps(w, x);
    return kwta(z, a_y);
}

BinaryVector decode_kwta(const WeightMatrix& w, const BinaryVector& y, int a_x_r) {
    const OverlapVector v = transpose_overlaps(w, y);
    return kwta(v, a_x_r);
}

BinaryVector decode_independent_random(const WeightMatrix& w_prime,
                                       const BinaryVector& y, int a_x_r) {
    return decode_kwta(w_prime, y, a_x_r);
}

OverlapVector pairwise_overlaps(const WeightMatrix& w, const BinaryVector& y) {
    OverlapVector v = transpose_overlaps(w, y);
    for (int& c : v) c = c * (c - 1) / 2;
    return v;
}

BinaryVector decode_pairwise(const WeightMatrix& w, const BinaryVector& y, int a_x_r) {
    const OverlapVector v = pairwise_overlaps(w, y);
    return kwta(v, a_x_r);
}

DecodeScan scan_optimal_tx(const OverlapVector& v, const BinaryVector& x) {
    if (v.size() != x.length()) {
        throw std::invalid_argument("scan_optimal_tx: size mismatch");
    }
    const int vmax = v.empty() ? 0 : *std::max_element(v.begin(), v.end());
    // Bucket the overlap values by whether the true bit is set. Walking
    // t upward, false negatives gain bucket_on[t-1] and false positives
    // lose bucket_off[t-1]; one pass covers every candidate threshold.
    std::vector<int> bucket_on(vmax + 1, 0), bucket_off(vmax + 1, 0);
    for (std::size_t j = 0; j < v.size(); ++j) {
        (x.test(j) ? bucket_on : bucket_off)[v[j]] += 1;
    }
    int fn = 0;
    int fp = static_cast<int>(x.length() - x.ones());
    int best_t = 0, best_err = fn + fp;
    for (int t = 1; t <= vmax + 1; ++t) {
        fn += bucket_on[t - 1];
        fp -= bucket_off[t - 1];
        if (fn + fp < best_err) {
            best_err = fn + fp;
            best_t = t;
        }
    }
    DecodeScan s;
    s.control = best_t;
    s.mismatches = best_err;
    s.reconstruction = threshold_units(v, best_t);
    return s;
}

DecodeScan scan_optimal_axr(const OverlapVector& v, const BinaryVector& x) {
    if (v.size() != x.length()) {
        throw std::invalid_argument("scan_optimal_axr: size mismatch");
    }
    const int n = static_cast<int>(v.size());
    // Order positions the way kwta fills them (value desc, index asc);
    // kwta(v, k) is then exactly the first k positions, so the error as a
    // function of k moves by +-1 per step and one sweep finds the optimum.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return v[a] > v[b]; });
    int err = static_cast<int>(x.ones());  // empty reconstruction
    int best_k = 0, best_err = err;
    for (int k = 1; k <= n; ++k) {
        err += x.test(static_cast<std::size_t>(order[k - 1])) ? -1 : +1;
        if (err < best_err) {
            best_err = err;
            best_k = k;
        }
    }
    DecodeScan s;
    s.control = best_k;
    s.mismatches = best_err;
    s.reconstruction = BinaryVector(static_cast<std::size_t>(n));
    for (int k = 0; k < best_k; ++k) {
        s.reconstruction.set(static_cast<std::size_t>(order[k]));
    }
    return s;
}

namespace {

OverlapVector decode_potentials(const WeightMatrix& w, const BinaryVector& y,
                                DecoderKind decoder, const WeightMatrix* decoder_w) {
    switch (decoder) {
        case DecoderKind::transpose:
            return transpose_overlaps(w, y);
        case DecoderKind::independent_random:
            if (decoder_w == nullptr) {
                throw std::invalid_argument(
                    "best_reconstruction: independent_random decoder needs its matrix");
            }
            return transpose_overlaps(*decoder_w, y);
        case DecoderKind::pairwise:
            return pairwise_overlaps(w, y);
    }
    throw std::logic_error("unreachable decoder kind");
}

}  // namespace

EncodeDecodeResult best_reconstruction(const WeightMatrix& w, const BinaryVector& x,
                                       const ModelParams& params,
                                       const WeightMatrix* decoder_w) {
    params.validate();
    if (w.n_cols() != x.length()) {
        throw std::invalid_argument("best_reconstruction: w.n_cols != x.length");
    }

    if (params.kind == ModelKind::bmp) {
        const auto steps = bmp_encode(w, x, params.hidden_control, params.effective_lambda());
        const BmpStep& last = steps.back();
        EncodeDecodeResult r;
        r.hidden = last.hidden;
        r.reconstruction = last.reconstruction;
        r.chosen_control = last.chosen_axr;
        r.error = last.error;
        return r;
    }

    EncodeDecodeResult r;
    r.hidden = (params.kind == ModelKind::threshold)
                   ? encode_threshold(w, x, params.hidden_control)
                   : encode_kwta(w, x, params.hidden_control);
    const OverlapVector v = decode_potentials(w, r.hidden, params.decoder, decoder_w);
    const DecodeScan scan = (params.kind == ModelKind::threshold)
                                ? scan_optimal_tx(v, x)
                                : scan_optimal_axr(v, x);
    r.reconstruction = scan.reconstruction;
    r.chosen_control = scan.control;
    r.error = static_cast<double>(scan.mismatches) / static_cast<double>(params.n_x);
    return r;
}

BinaryVector encode(const WeightMatrix& w, const BinaryVector& x, const ModelParams& params) {
    switch (params.kind) {
        case ModelKind::threshold:
            return encode_threshold(w, x, params.hidden_control);
        case ModelKind::kwta:
            return encode_kwta(w, x, params.hidden_control);
        case ModelKind::bmp: {
            const auto steps = bmp_encode(w, x, params.hidden_control,
                                          params.effective_lambda(),
                                          static_cast<int>(x.ones()));
            return steps.back().hidden;
        }
    }
    throw std::logic_error("unreachable model kind");
}

std::vector<BmpStep> bmp_encode(const WeightMatrix& w, const BinaryVector& x,
                                int n_steps, long long lambda, int fixed_axr) {
    if (w.n_cols() != x.length()) {
        throw std::invalid_argument("bmp_encode: w.n_cols != x.length");
    }
    if (n_steps < 1 || n_steps > static_cast<int>(w.n_rows())) {
        throw std::invalid_argument("bmp_encode: n_steps outside [1, n_rows]");
    }
    std::size_t max_fanin = 0;
    for (std::size_t i = 0; i < w.n_rows(); ++i) {
        max_fanin = std::max(max_fanin, w.row(i).ones());
    }
    if (lambda <= 2LL * static_cast<long long>(x.ones()) * static_cast<long long>(max_fanin)) {
        throw std::invalid_argument("bmp_encode: lambda must exceed 2 a_x a_w");
    }
    if (fixed_axr > static_cast<int>(w.n_cols())) {
        throw std::invalid_argument("bmp_encode: fixed_axr > n_cols");
    }

    const std::size_t n_y = w.n_rows();
    const std::size_t n_x = w.n_cols();

    // score_i = 2 w_i x - w_i x^r - lambda y_i; the first two terms are the
    // overlap of row i with the residual 2x - x^r.
    const OverlapVector wx = overlaps(w, x);
    std::vector<long long> score(n_y);
    for (std::size_t i = 0; i < n_y; ++i) score[i] = 2LL * wx[i];

    BinaryVector y(n_y);
    OverlapVector v(n_x, 0);  // running w^T y
    std::vector<BmpStep> trace;
    trace.reserve(static_cast<std::size_t>(n_steps));

    for (int step = 0; step < n_steps; ++step) {
        std::size_t winner = 0;
        long long best = std::numeric_limits<long long>::min();
        for (std::size_t i = 0; i < n_y; ++i) {
            if (score[i] > best) {  // strict: ties go to the first occurrence
                best = score[i];
                winner = i;
            }
        }
        y.set(winner);
        for (std::size_t j : w.row(winner).one_indices()) v[j] += 1;

        BmpStep s;
        s.hidden = y;
        if (fixed_axr >= 0) {
            s.reconstruction = kwta(v, fixed_axr);
            s.chosen_axr = fixed_axr;
            s.error = static_cast<double>(hamming(x, s.reconstruction)) /
                      static_cast<double>(n_x);
        } else {
            DecodeScan scan = scan_optimal_axr(v, x);
            s.reconstruction = std::move(scan.reconstruction);
            s.chosen_axr = scan.control;
            s.error = static_cast<double>(scan.mismatches) / static_cast<double>(n_x);
        }

        // refresh scores against the new reconstruction
        const OverlapVector wxr = overlaps(w, s.reconstruction);
        for (std::size_t i = 0; i < n_y; ++i) {
            score[i] = 2LL * wx[i] - wxr[i] - (y.test(i) ? lambda : 0);
        }
        trace.push_back(std::move(s));
    }
    return trace;
}

}  // namespace binae
