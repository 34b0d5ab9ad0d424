#include "binae/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace binae {

namespace {

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Phi((t - mu)/sigma) with the sigma = 0 limit as a step function.
double cdf_at(double t, double mu, double sigma) {
    if (sigma > 0.0) return normal_cdf((t - mu) / sigma);
    if (t > mu) return 1.0;
    if (t < mu) return 0.0;
    return 0.5;
}

}  // namespace

OverlapDistribution overlap_pmf(int n_x, int a_x, int a_w) {
    if (n_x < 1 || a_x < 0 || a_x > n_x || a_w < 0 || a_w > n_x) {
        throw std::invalid_argument("overlap_pmf: counts outside [0, n_x]");
    }
    OverlapDistribution d;
    d.k_min = std::max(0, a_x + a_w - n_x);
    d.k_max = std::min(a_x, a_w);
    d.pmf.reserve(static_cast<std::size_t>(d.k_max - d.k_min + 1));
    const double log_total = log_choose(n_x, a_w);
    for (int k = d.k_min; k <= d.k_max; ++k) {
        d.pmf.push_back(std::exp(log_choose(a_x, k) +
                                 log_choose(n_x - a_x, a_w - k) - log_total));
    }
    return d;
}

std::pair<double, double> conditional_weight_probs(int k, int n_x, int a_x, int a_w) {
    if (a_x < 1 || a_x > n_x || a_w < 0 || a_w > n_x) {
        throw std::invalid_argument("conditional_weight_probs: counts out of range");
    }
    if (k < std::max(0, a_x + a_w - n_x) || k > std::min(a_x, a_w)) {
        throw std::invalid_argument("conditional_weight_probs: k outside the overlap support");
    }
    if (a_x == n_x) {
        throw std::domain_error("conditional_weight_probs: p_minus undefined at a_x = n_x");
    }
    return {static_cast<double>(k) / a_x,
            static_cast<double>(a_w - k) / (n_x - a_x)};
}

namespace {

// Shared accumulation for both moment flavors: weight[k] in [0,1] says how
// much of the overlap-k row population is active.
GaussianPair accumulate_moments(const ModelParams& p, const OverlapDistribution& d,
                                const std::vector<double>& weight) {
    GaussianPair g;
    double var_plus = 0.0, var_minus = 0.0;
    for (int k = d.k_min; k <= d.k_max; ++k) {
        const double rows = weight[static_cast<std::size_t>(k - d.k_min)] *
                            d(k) * static_cast<double>(p.n_y);
        if (rows <= 0.0) continue;
        const double p_plus = static_cast<double>(k) / p.a_x;
        g.mu_plus += p_plus * rows;
        var_plus += p_plus * (1.0 - p_plus) * rows;
        if (p.a_x < p.n_x) {
            const double p_minus =
                static_cast<double>(p.a_w - k) / (p.n_x - p.a_x);
            g.mu_minus += p_minus * rows;
            var_minus += p_minus * (1.0 - p_minus) * rows;
        }
    }
    g.sigma_plus = std::sqrt(var_plus);
    g.sigma_minus = std::sqrt(var_minus);
    return g;
}

}  // namespace

GaussianPair gaussian_moments(const ModelParams& params, int t_y) {
    const OverlapDistribution d = overlap_pmf(params.n_x, params.a_x, params.a_w);
    std::vector<double> weight(static_cast<std::size_t>(d.k_max - d.k_min + 1), 0.0);
    for (int k = std::max(t_y, d.k_min); k <= d.k_max; ++k) {
        weight[static_cast<std::size_t>(k - d.k_min)] = 1.0;
    }
    return accumulate_moments(params, d, weight);
}

GaussianPair gaussian_moments_kwta(const ModelParams& params, double a_y) {
    if (a_y < 0.0 || a_y > static_cast<double>(params.n_y)) {
        throw std::invalid_argument("gaussian_moments_kwta: a_y outside [0, n_y]");
    }
    const OverlapDistribution d = overlap_pmf(params.n_x, params.a_x, params.a_w);
    std::vector<double> weight(static_cast<std::size_t>(d.k_max - d.k_min + 1), 0.0);
    // Take whole overlap levels from the top until the expected row count
    // a_y is spent; the level that straddles the budget enters fractionally.
    double remaining = a_y;
    for (int k = d.k_max; k >= d.k_min && remaining > 0.0; --k) {
        const double rows = d(k) * static_cast<double>(params.n_y);
        if (rows <= 0.0) continue;
        const double w = std::min(1.0, remaining / rows);
        weight[static_cast<std::size_t>(k - d.k_min)] = w;
        remaining -= w * rows;
    }
    return accumulate_moments(params, d, weight);
}

double expected_error(const GaussianPair& pair, double t_x, int a_x, int n_x,
                      bool half_correction) {
    const double t = half_correction ? t_x - 0.5 : t_x;
    const double fn = cdf_at(t, pair.mu_plus, pair.sigma_plus);
    const double fp = 1.0 - cdf_at(t, pair.mu_minus, pair.sigma_minus);
    return (fn * a_x + fp * (n_x - a_x)) / static_cast<double>(n_x);
}

int approx_optimal_ty(const ModelParams& params) {
    // argmax_t (mu_plus - mu_minus): each overlap level k contributes
    // (p_plus(k) - p_minus(k)) * p(k) * N_y, positive exactly for
    // k > kappa = a_x a_w / n_x, so the sum over k >= t peaks at
    // floor(kappa) + 1. Integer arithmetic keeps the tie at integral kappa
    // exact (it resolves upward, consistent with the sign analysis).
    const long long kappa_floor =
        (static_cast<long long>(params.a_x) * params.a_w) / params.n_x;
    const int hi = std::min(params.a_x, params.a_w);
    return static_cast<int>(std::clamp<long long>(kappa_floor + 1, 1, hi));
}

double approx_optimal_tx(const GaussianPair& pair, int a_x, int n_x) {
    const double mid = 0.5 * (pair.mu_plus + pair.mu_minus);
    if (pair.sigma_plus <= 0.0 || pair.sigma_minus <= 0.0) return mid;
    const double lo = pair.mu_minus - 4.0 * pair.sigma_minus;
    const double hi = pair.mu_plus + 4.0 * pair.sigma_plus;
    if (hi <= lo) return mid;
    const double step = 1e-3;
    const long long n = static_cast<long long>((hi - lo) / step);
    double best_t = lo, best_e = expected_error(pair, lo, a_x, n_x);
    for (long long i = 1; i <= n; ++i) {
        const double t = lo + static_cast<double>(i) * step;
        const double e = expected_error(pair, t, a_x, n_x);
        if (e < best_e) {
            best_e = e;
            best_t = t;
        }
    }
    return best_t;
}

}  // namespace binae
