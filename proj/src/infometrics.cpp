#include "binae/infometrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace binae {

namespace {

void check_cap(int n_x, int cap) {
    if (n_x < 1) throw std::invalid_argument("census: n_x must be >= 1");
    if (n_x > cap) {
        throw std::invalid_argument("census: n_x = " + std::to_string(n_x) +
                                    " exceeds the enumeration cap " +
                                    std::to_string(cap) +
                                    " (raise the cap explicitly to allow this)");
    }
    if (cap > 62) throw std::invalid_argument("census: cap beyond 62 bits unsupported");
}

OmegaCensus census_from_counts(std::unordered_map<BinaryVector, std::uint64_t,
                                                  BinaryVectorHash>&& counts,
                               int n_x) {
    OmegaCensus c;
    c.n_x = n_x;
    c.total_inputs = 1ULL << n_x;
    c.class_sizes.reserve(counts.size());
    for (const auto& [code, n] : counts) c.class_sizes.push_back(n);
    std::sort(c.class_sizes.begin(), c.class_sizes.end());
    return c;
}

// Sort-and-run-length census over packed codes; the vector is consumed.
OmegaCensus census_from_codes(std::vector<std::uint64_t>&& codes, int n_x) {
    std::sort(codes.begin(), codes.end());
    OmegaCensus c;
    c.n_x = n_x;
    c.total_inputs = codes.size();
    std::size_t i = 0;
    while (i < codes.size()) {
        std::size_t j = i;
        while (j < codes.size() && codes[j] == codes[i]) ++j;
        c.class_sizes.push_back(j - i);
        i = j;
    }
    std::sort(c.class_sizes.begin(), c.class_sizes.end());
    return c;
}

int default_workers(int workers) {
#ifdef _OPENMP
    return workers > 0 ? workers : omp_get_max_threads();
#else
    (void)workers;
    return 1;
#endif
}

}  // namespace

OmegaCensus omega_census_serial(const EncodeMap& f, int n_x, const CensusOptions& opt) {
    check_cap(n_x, opt.cap);
    const std::uint64_t total = 1ULL << n_x;
    std::unordered_map<BinaryVector, std::uint64_t, BinaryVectorHash> counts;
    for (std::uint64_t xw = 0; xw < total; ++xw) {
        counts[f(BinaryVector::from_word(static_cast<std::size_t>(n_x), xw))] += 1;
    }
    return census_from_counts(std::move(counts), n_x);
}

OmegaCensus omega_census(const EncodeMap& f, int n_x, const CensusOptions& opt) {
    check_cap(n_x, opt.cap);
    const std::uint64_t total = 1ULL << n_x;
    const int nw = default_workers(opt.workers);
    std::vector<std::unordered_map<BinaryVector, std::uint64_t, BinaryVectorHash>>
        partial(static_cast<std::size_t>(nw));

#ifdef _OPENMP
#pragma omp parallel num_threads(nw)
    {
        auto& mine = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
        for (std::int64_t xw = 0; xw < static_cast<std::int64_t>(total); ++xw) {
            mine[f(BinaryVector::from_word(static_cast<std::size_t>(n_x),
                                           static_cast<std::uint64_t>(xw)))] += 1;
        }
    }
#else
    for (std::uint64_t xw = 0; xw < total; ++xw) {
        partial[0][f(BinaryVector::from_word(static_cast<std::size_t>(n_x), xw))] += 1;
    }
#endif

    // Count merging is commutative, so any merge order gives the same census.
    auto& counts = partial[0];
    for (std::size_t t = 1; t < partial.size(); ++t) {
        for (const auto& [code, n] : partial[t]) counts[code] += n;
        partial[t].clear();
    }
    return census_from_counts(std::move(counts), n_x);
}

double mutual_information(const OmegaCensus& census) {
    double acc = 0.0;
    for (std::uint64_t s : census.class_sizes) {
        if (s > 1) acc += static_cast<double>(s) * std::log2(static_cast<double>(s));
    }
    return static_cast<double>(census.n_x) -
           acc / static_cast<double>(census.total_inputs);
}

double mi_upper_bound(const OmegaCensus& census) {
    return static_cast<double>(census.n_x) - std::log2(census.mean_class_size());
}

double decoder_mi(const EncodeMap& pipeline, int n_x, const CensusOptions& opt) {
    return mutual_information(omega_census(pipeline, n_x, opt));
}

namespace {

// k-winners over a small scratch value array, emitting a packed word.
// Values are bounded (overlaps), so a counting pass finds the cutoff.
std::uint64_t kwta_word(const int* z, int n, int k, std::vector<int>& bucket) {
    if (k <= 0) return 0;
    if (k >= n) return n == 64 ? ~0ULL : (1ULL << n) - 1;
    int vmax = 0;
    for (int i = 0; i < n; ++i) vmax = std::max(vmax, z[i]);
    bucket.assign(static_cast<std::size_t>(vmax) + 1, 0);
    for (int i = 0; i < n; ++i) bucket[static_cast<std::size_t>(z[i])] += 1;
    int cum = 0, cutoff = 0;
    for (int v = vmax; v >= 0; --v) {
        cum += bucket[static_cast<std::size_t>(v)];
        if (cum >= k) {
            cutoff = v;
            break;
        }
    }
    int need = k - (cum - bucket[static_cast<std::size_t>(cutoff)]);
    std::uint64_t out = 0;
    for (int i = 0; i < n; ++i) {
        if (z[i] > cutoff) {
            out |= 1ULL << i;
        } else if (z[i] == cutoff && need > 0) {
            out |= 1ULL << i;
            --need;
        }
    }
    return out;
}

// Per-input optimal reconstruction count, walking the kwta fill order.
std::uint64_t best_axr_word(const int* v, int n, std::uint64_t x_word,
                            std::vector<int>& order) {
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return v[a] > v[b]; });
    int err = std::popcount(x_word);
    int best_err = err, best_k = 0;
    for (int k = 1; k <= n; ++k) {
        err += (x_word >> order[static_cast<std::size_t>(k - 1)]) & 1 ? -1 : +1;
        if (err < best_err) {
            best_err = err;
            best_k = k;
        }
    }
    std::uint64_t out = 0;
    for (int k = 0; k < best_k; ++k) out |= 1ULL << order[static_cast<std::size_t>(k)];
    return out;
}

struct PipelineCodes {
    std::vector<std::uint64_t> hidden;
    std::vector<std::uint64_t> recon;
    std::uint64_t err_bits = 0;   // summed over the fixed-popcount slice
    std::uint64_t err_count = 0;  // inputs in that slice
};

// Fully packed sweep kernel: kwta model, n_x <= cap <= 62, n_y <= 64.
PipelineCodes enumerate_packed(const WeightMatrix& w, const ModelParams& p,
                               const MISweepOptions& opt, int axr, int err_ax,
                               const WeightMatrix* decoder_w) {
    const int n_x = p.n_x;
    const int n_y = p.n_y;
    const std::uint64_t total = 1ULL << n_x;

    std::vector<std::uint64_t> row_mask(static_cast<std::size_t>(n_y));
    for (int i = 0; i < n_y; ++i) row_mask[static_cast<std::size_t>(i)] = w.row(i).words()[0];
    const WeightMatrix cols = (decoder_w ? *decoder_w : w).transposed();
    std::vector<std::uint64_t> col_mask(static_cast<std::size_t>(n_x));
    for (int j = 0; j < n_x; ++j) col_mask[static_cast<std::size_t>(j)] = cols.row(j).words()[0];

    PipelineCodes out;
    out.hidden.resize(total);
    out.recon.resize(total);
    std::uint64_t err_bits = 0, err_count = 0;

    const int nw = default_workers(opt.workers);
    (void)nw;
#ifdef _OPENMP
#pragma omp parallel num_threads(nw) reduction(+ : err_bits, err_count)
#endif
    {
        std::vector<int> z(static_cast<std::size_t>(n_y));
        std::vector<int> v(static_cast<std::size_t>(n_x));
        std::vector<int> bucket, order;
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (std::int64_t xi = 0; xi < static_cast<std::int64_t>(total); ++xi) {
            const std::uint64_t x = static_cast<std::uint64_t>(xi);
            for (int i = 0; i < n_y; ++i) {
                z[static_cast<std::size_t>(i)] =
                    std::popcount(row_mask[static_cast<std::size_t>(i)] & x);
            }
            const std::uint64_t y = kwta_word(z.data(), n_y, p.hidden_control, bucket);
            for (int j = 0; j < n_x; ++j) {
                int c = std::popcount(col_mask[static_cast<std::size_t>(j)] & y);
                if (opt.decoder == DecoderKind::pairwise) c = c * (c - 1) / 2;
                v[static_cast<std::size_t>(j)] = c;
            }
            const std::uint64_t xr =
                opt.optimize_axr_per_input
                    ? best_axr_word(v.data(), n_x, x, order)
                    : kwta_word(v.data(), n_x, axr, bucket);
            out.hidden[static_cast<std::size_t>(xi)] = y;
            out.recon[static_cast<std::size_t>(xi)] = xr;
            if (std::popcount(x) == err_ax) {
                err_bits += static_cast<std::uint64_t>(std::popcount(x ^ xr));
                err_count += 1;
            }
        }
    }
    out.err_bits = err_bits;
    out.err_count = err_count;
    return out;
}

// General kernel for anything the packed one does not cover (bmp encode,
// wide hidden layers). Works on BinaryVector directly.
PipelineCodes enumerate_general(const WeightMatrix& w, const ModelParams& p,
                                const MISweepOptions& opt, int axr, int err_ax,
                                const WeightMatrix* decoder_w) {
    const int n_x = p.n_x;
    const std::uint64_t total = 1ULL << n_x;
    if (p.n_y > 64) {
        throw std::invalid_argument("mi_point: hidden layers beyond 64 units not supported");
    }

    PipelineCodes out;
    out.hidden.resize(total);
    out.recon.resize(total);
    std::uint64_t err_bits = 0, err_count = 0;

    const int nw = default_workers(opt.workers);
    (void)nw;
#ifdef _OPENMP
#pragma omp parallel for num_threads(nw) schedule(static) reduction(+ : err_bits, err_count)
#endif
    for (std::int64_t xi = 0; xi < static_cast<std::int64_t>(total); ++xi) {
        const BinaryVector x =
            BinaryVector::from_word(static_cast<std::size_t>(n_x),
                                    static_cast<std::uint64_t>(xi));
        const BinaryVector y = encode(w, x, p);
        OverlapVector v = (opt.decoder == DecoderKind::pairwise)
                              ? pairwise_overlaps(w, y)
                              : transpose_overlaps(decoder_w ? *decoder_w : w, y);
        const BinaryVector xr = opt.optimize_axr_per_input
                                    ? scan_optimal_axr(v, x).reconstruction
                                    : kwta(v, axr);
        out.hidden[static_cast<std::size_t>(xi)] = y.words()[0];
        out.recon[static_cast<std::size_t>(xi)] = xr.words()[0];
        if (static_cast<int>(x.ones()) == err_ax) {
            err_bits += hamming(x, xr);
            err_count += 1;
        }
    }
    out.err_bits = err_bits;
    out.err_count = err_count;
    return out;
}

}  // namespace

MIReport mi_point(const WeightMatrix& w, const ModelParams& params,
                  const MISweepOptions& opt, const WeightMatrix* decoder_w) {
    params.validate();
    check_cap(params.n_x, opt.cap);
    if (params.kind == ModelKind::threshold) {
        throw std::invalid_argument("mi_point: sweep models are a_y-controlled (kwta or bmp)");
    }
    if (opt.decoder == DecoderKind::independent_random && decoder_w == nullptr) {
        throw std::invalid_argument("mi_point: independent_random decoder needs its matrix");
    }
    const int axr = opt.fixed_axr >= 0
                        ? opt.fixed_axr
                        : static_cast<int>(std::lround(0.5 * params.n_x));
    const int err_ax = opt.error_ax >= 0 ? opt.error_ax : params.n_x / 2;
    if (axr > params.n_x) throw std::invalid_argument("mi_point: fixed_axr > n_x");
    if (params.kind == ModelKind::bmp) {
        // the enumeration feeds every input, so the inhibition bound must
        // hold for the densest one; checked here so nothing throws inside
        // the parallel loop
        std::size_t max_fanin = 0;
        for (std::size_t i = 0; i < w.n_rows(); ++i) {
            max_fanin = std::max(max_fanin, w.row(i).ones());
        }
        if (params.effective_lambda() <=
            2LL * params.n_x * static_cast<long long>(max_fanin)) {
            throw std::invalid_argument(
                "mi_point: bmp over the full input space needs lambda > "
                "2 n_x max_fanin; set params.lambda accordingly");
        }
    }

    const bool packed = params.kind == ModelKind::kwta && params.n_y <= 64;
    PipelineCodes codes = packed
                              ? enumerate_packed(w, params, opt, axr, err_ax, decoder_w)
                              : enumerate_general(w, params, opt, axr, err_ax, decoder_w);

    MIReport r;
    r.a_y = params.hidden_control;
    r.s_y = static_cast<double>(params.hidden_control) / params.n_y;
    r.h_x = static_cast<double>(params.n_x);
    const OmegaCensus enc = census_from_codes(std::move(codes.hidden), params.n_x);
    const OmegaCensus dec = census_from_codes(std::move(codes.recon), params.n_x);
    r.mi_encoder = mutual_information(enc);
    r.upper_bound = mi_upper_bound(enc);
    r.mi_decoder = mutual_information(dec);
    r.mean_error = codes.err_count == 0
                       ? 0.0
                       : static_cast<double>(codes.err_bits) /
                             (static_cast<double>(codes.err_count) * params.n_x);
    return r;
}

std::vector<MIReport> mi_sparsity_sweep(const ModelParams& params,
                                        std::span<const int> a_y_values,
                                        const MISweepOptions& opt) {
    Rng rng(opt.seed, opt.stream);
    const WeightMatrix w = random_weight_matrix(
        static_cast<std::size_t>(params.n_y), static_cast<std::size_t>(params.n_x),
        static_cast<std::size_t>(params.a_w), rng);
    WeightMatrix w2(1, 1);
    const bool needs_w2 = opt.decoder == DecoderKind::independent_random;
    if (needs_w2) {
        w2 = random_weight_matrix(static_cast<std::size_t>(params.n_y),
                                  static_cast<std::size_t>(params.n_x),
                                  static_cast<std::size_t>(params.a_w), rng);
    }
    std::vector<MIReport> out;
    out.reserve(a_y_values.size());
    ModelParams p = params;
    for (int a_y : a_y_values) {
        p.hidden_control = a_y;
        out.push_back(mi_point(w, p, opt, needs_w2 ? &w2 : nullptr));
    }
    return out;
}

}  // namespace binae
