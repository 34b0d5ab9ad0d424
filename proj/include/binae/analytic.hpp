#pragma once

#include <utility>
#include <vector>

#include "binae/models.hpp"

namespace binae {

// Law of the overlap z = <w_row, x> when both the row (a_w ones) and the
// input (a_x ones) are uniform fixed-weight vectors: hypergeometric with
// support [max(0, a_x + a_w - n_x), min(a_x, a_w)].
struct OverlapDistribution {
    int k_min = 0;
    int k_max = 0;
    std::vector<double> pmf;  // pmf[k - k_min]

    double operator()(int k) const {
        if (k < k_min || k > k_max) return 0.0;
        return pmf[static_cast<std::size_t>(k - k_min)];
    }
};

// Decoder-potential moments conditioned on the true bit: v_j | x_j=1 is
// approximately N(mu_plus, sigma_plus^2), and likewise for x_j=0.
struct GaussianPair {
    double mu_plus = 0.0;
    double sigma_plus = 0.0;
    double mu_minus = 0.0;
    double sigma_minus = 0.0;
};

OverlapDistribution overlap_pmf(int n_x, int a_x, int a_w);

// p_plus  = P(w_ij = 1 | x_j = 1, z_i = k) = k / a_x
// p_minus = P(w_ij = 1 | x_j = 0, z_i = k) = (a_w - k) / (n_x - a_x)
// a_x = n_x leaves p_minus undefined (no zero input bits exist).
std::pair<double, double> conditional_weight_probs(int k, int n_x, int a_x, int a_w);

// Moments of the decoder potentials for the threshold model: rows with
// overlap >= t_y are active, each contributing a Bernoulli(p_plus/p_minus)
// weight bit per output position; sums run over the pmf tail.
GaussianPair gaussian_moments(const ModelParams& params, int t_y);

// kwta variant: the tail is cut so that the expected number of active rows
// is exactly a_y, including the boundary overlap value fractionally.
GaussianPair gaussian_moments_kwta(const ModelParams& params, double a_y);

// Predicted mean reconstruction error at threshold t_x, scaled to [0, 1]:
// (FN mass * a_x + FP mass * (n_x - a_x)) / n_x under the Gaussian
// approximation. half_correction shifts t_x by -1/2 (integer-valued
// potentials compared against a continuous CDF).
double expected_error(const GaussianPair& pair, double t_x, int a_x, int n_x,
                      bool half_correction = false);

// First-approximation optimal encoder threshold: the integer t_y
// maximizing mu_plus - mu_minus. The summand p_plus(k) - p_minus(k)
// changes sign at kappa = a_x a_w / n_x, so the argmax is floor(kappa)+1
// (ties at integer kappa resolve upward), clamped to [1, min(a_x, a_w)].
int approx_optimal_ty(const ModelParams& params);

// Numerical argmin of expected_error over t_x in [mu- - 4 sigma-,
// mu+ + 4 sigma+] on a 1e-3 grid; degenerate sigmas fall back to the
// midpoint of the means. Not an integer in general.
double approx_optimal_tx(const GaussianPair& pair, int a_x, int n_x);

}  // namespace binae
