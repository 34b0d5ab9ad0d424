#include "binae/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"

#include "binae/analytic.hpp"
#include "binae/rng.hpp"

namespace binae {
namespace {

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

ModelParams params_from(const ExperimentConfig& cfg) {
    ModelParams p;
    p.n_x = cfg.n_x;
    p.n_y = cfg.n_y;
    p.a_x = cfg.a_x;
    p.a_w = cfg.a_w;
    p.kind = cfg.model;
    p.decoder = cfg.decoder;
    p.lambda = cfg.lambda;
    p.hidden_control = cfg.hidden_control > 0 ? cfg.hidden_control : 1;
    return p;
}

int default_hidden_control(const ModelParams& p) {
    if (p.kind == ModelKind::threshold) return approx_optimal_ty(p);
    return std::max(1, static_cast<int>(std::lround(0.25 * p.n_y)));
}

int resolve_workers(int workers) {
#ifdef _OPENMP
    return workers > 0 ? workers : omp_get_max_threads();
#else
    (void)workers;
    return 1;
#endif
}

// Sparsity controls one model visits: every t_y for threshold (the range is
// small), an even a_y / step-count grid capped at max_points otherwise.
std::vector<int> control_grid(const ModelParams& p, int max_points) {
    std::vector<int> grid;
    if (p.kind == ModelKind::threshold) {
        const int top = std::min(p.a_x, p.a_w);
        for (int t = 1; t <= top; ++t) grid.push_back(t);
        return grid;
    }
    const int step = std::max(1, p.n_y / max_points);
    for (int a = 1; a <= p.n_y; a += step) grid.push_back(a);
    if (grid.back() != p.n_y) grid.push_back(p.n_y);
    return grid;
}

struct ControlSample {
    int control = 0;
    double sy = 0.0;
    double err = 0.0;
};

struct Drawn {
    WeightMatrix w{1, 1};
    WeightMatrix w2{1, 1};
    bool has_w2 = false;
    BinaryVector x;
};

// Fixed draw order per trial substream: weights, decoder weights (only when
// the decoder needs them), input.
Drawn draw_trial(const ModelParams& p, Rng& rng, bool bernoulli_rows = false) {
    Drawn d;
    const auto rows = static_cast<std::size_t>(p.n_y);
    const auto cols = static_cast<std::size_t>(p.n_x);
    if (bernoulli_rows) {
        const double density = static_cast<double>(p.a_w) / p.n_x;
        d.w = bernoulli_weight_matrix(rows, cols, density, rng);
        if (p.decoder == DecoderKind::independent_random) {
            d.w2 = bernoulli_weight_matrix(rows, cols, density, rng);
            d.has_w2 = true;
        }
    } else {
        d.w = random_weight_matrix(rows, cols, static_cast<std::size_t>(p.a_w), rng);
        if (p.decoder == DecoderKind::independent_random) {
            d.w2 = random_weight_matrix(rows, cols, static_cast<std::size_t>(p.a_w), rng);
            d.has_w2 = true;
        }
    }
    d.x = random_binary_vector(cols, static_cast<std::size_t>(p.a_x), rng);
    return d;
}

// One trial's pass over the control grid. bmp runs a single pursuit and
// reads the trace; the other models re-encode per control.
std::vector<ControlSample> scan_controls(const ModelParams& base, const Drawn& d,
                                         const std::vector<int>& grid) {
    std::vector<ControlSample> out;
    out.reserve(grid.size());
    const double ny = static_cast<double>(base.n_y);
    if (base.kind == ModelKind::bmp) {
        const auto trace =
            bmp_encode(d.w, d.x, grid.back(), base.effective_lambda());
        for (int n : grid) {
            const BmpStep& s = trace[static_cast<std::size_t>(n - 1)];
            out.push_back({n, static_cast<double>(s.hidden.ones()) / ny, s.error});
        }
        return out;
    }
    ModelParams p = base;
    for (int c : grid) {
        p.hidden_control = c;
        const EncodeDecodeResult r =
            best_reconstruction(d.w, d.x, p, d.has_w2 ? &d.w2 : nullptr);
        out.push_back({c, static_cast<double>(r.hidden.ones()) / ny, r.error});
    }
    return out;
}

// Minimum error; ties go to the smaller sparsity, then to the first grid
// point (which is also the smaller control for count models).
ControlSample optimum_of(const std::vector<ControlSample>& samples) {
    ControlSample best = samples.front();
    for (const ControlSample& s : samples) {
        if (s.err < best.err || (s.err == best.err && s.sy < best.sy)) best = s;
    }
    return best;
}

// Throw early, outside the parallel trial loops, if any grid point is
// invalid; exceptions must not escape an OpenMP region.
void validate_grid(const ModelParams& base, const std::vector<int>& grid) {
    ModelParams probe = base;
    for (int c : grid) {
        probe.hidden_control = c;
        probe.validate();
    }
}

std::vector<std::vector<ControlSample>> scan_trials(const ExperimentConfig& cfg,
                                                    const ModelParams& base,
                                                    const std::vector<int>& grid,
                                                    bool bernoulli_rows = false) {
    validate_grid(base, grid);
    const int trials = cfg.trials;
    std::vector<std::vector<ControlSample>> per_trial(
        static_cast<std::size_t>(trials));
    const int nw = resolve_workers(cfg.workers);
    (void)nw;
#ifdef _OPENMP
#pragma omp parallel for num_threads(nw) schedule(dynamic)
#endif
    for (int t = 0; t < trials; ++t) {
        Rng rng(cfg.seed, static_cast<std::uint64_t>(t));
        const Drawn d = draw_trial(base, rng, bernoulli_rows);
        per_trial[static_cast<std::size_t>(t)] = scan_controls(base, d, grid);
    }
    return per_trial;
}

OptimumPoint aggregate_optima(double axis, int n_y,
                              const std::vector<std::vector<ControlSample>>& per_trial) {
    std::vector<double> errs, sys;
    errs.reserve(per_trial.size());
    sys.reserve(per_trial.size());
    for (const auto& samples : per_trial) {
        const ControlSample best = optimum_of(samples);
        errs.push_back(best.err);
        sys.push_back(best.sy);
    }
    OptimumPoint pt;
    pt.axis = axis;
    pt.n_y = n_y;
    pt.min_error_mean = mean_of(errs);
    pt.min_error_std = sample_std(errs, pt.min_error_mean);
    pt.opt_sy_mean = mean_of(sys);
    pt.opt_sy_std = sample_std(sys, pt.opt_sy_mean);
    return pt;
}

const char* to_string(DecodePolicyKind k) {
    return k == DecodePolicyKind::fixed_tx ? "fixed-tx" : "fixed-axr";
}

std::vector<std::string> string_row(std::initializer_list<std::string> cells) {
    return std::vector<std::string>(cells);
}

}  // namespace

const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::sweep_sparsity: return "sweep-sparsity";
        case ExperimentKind::sweep_ratio: return "sweep-ratio";
        case ExperimentKind::sweep_ax: return "sweep-ax";
        case ExperimentKind::sweep_aw: return "sweep-aw";
        case ExperimentKind::mi_curve: return "mi-curve";
        case ExperimentKind::map_curve: return "map-curve";
        case ExperimentKind::analytic_compare: return "analytic-compare";
        case ExperimentKind::threshold_approx: return "threshold-approx";
        case ExperimentKind::attractor_census: return "attractor-census";
        case ExperimentKind::weights_comparison: return "weights-comparison";
        case ExperimentKind::axr_average: return "axr-average";
    }
    return "unknown";
}

const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::threshold: return "threshold";
        case ModelKind::kwta: return "kwta";
        case ModelKind::bmp: return "bmp";
    }
    return "unknown";
}

const char* to_string(DecoderKind k) {
    switch (k) {
        case DecoderKind::transpose: return "transpose";
        case DecoderKind::independent_random: return "independent-random";
        case DecoderKind::pairwise: return "pairwise";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    static const std::pair<const char*, ExperimentKind> table[] = {
        {"sweep-sparsity", ExperimentKind::sweep_sparsity},
        {"sweep-ratio", ExperimentKind::sweep_ratio},
        {"sweep-ax", ExperimentKind::sweep_ax},
        {"sweep-aw", ExperimentKind::sweep_aw},
        {"mi-curve", ExperimentKind::mi_curve},
        {"map-curve", ExperimentKind::map_curve},
        {"analytic-compare", ExperimentKind::analytic_compare},
        {"threshold-approx", ExperimentKind::threshold_approx},
        {"attractor-census", ExperimentKind::attractor_census},
        {"weights-comparison", ExperimentKind::weights_comparison},
        {"axr-average", ExperimentKind::axr_average},
    };
    for (const auto& [n, k] : table) {
        if (name == n) return k;
    }
    throw std::invalid_argument("unknown experiment: " + name);
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "threshold") return ModelKind::threshold;
    if (name == "kwta") return ModelKind::kwta;
    if (name == "bmp") return ModelKind::bmp;
    throw std::invalid_argument("unknown model: " + name +
                                " (expected threshold, kwta, or bmp)");
}

DecoderKind parse_decoder_kind(const std::string& name) {
    if (name == "transpose") return DecoderKind::transpose;
    if (name == "independent-random") return DecoderKind::independent_random;
    if (name == "pairwise") return DecoderKind::pairwise;
    throw std::invalid_argument("unknown decoder: " + name +
                                " (expected transpose, independent-random, or pairwise)");
}

ExperimentConfig ExperimentConfig::resolved() const {
    ExperimentConfig c = *this;
    if (c.n_x < 1) throw std::invalid_argument("n_x must be positive");
    if (c.n_y < 1) throw std::invalid_argument("n_y must be positive");
    if (c.a_x < 1 || c.a_x > c.n_x) throw std::invalid_argument("a_x out of [1, n_x]");
    if (c.a_w < 1 || c.a_w > c.n_x) throw std::invalid_argument("a_w out of [1, n_x]");
    if (c.workers < 0) throw std::invalid_argument("workers must be >= 0");

    if (c.trials == 0) {
        switch (c.experiment) {
            case ExperimentKind::sweep_ratio:
                c.trials = c.model == ModelKind::bmp ? 20 : 100;
                break;
            case ExperimentKind::map_curve: c.trials = 10; break;
            case ExperimentKind::axr_average: c.trials = 200; break;
            case ExperimentKind::mi_curve: c.trials = 1; break;
            case ExperimentKind::attractor_census: c.trials = 1; break;
            default: c.trials = 100; break;
        }
    }
    if (c.trials < 1) throw std::invalid_argument("trials must be >= 1");

    switch (c.experiment) {
        case ExperimentKind::sweep_ratio:
            if (c.ratio_min < 1 || c.ratio_min > c.ratio_max) {
                throw std::invalid_argument("need 1 <= ratio_min <= ratio_max");
            }
            break;
        case ExperimentKind::sweep_ax:
        case ExperimentKind::sweep_aw:
        case ExperimentKind::threshold_approx:
            if (c.sweep_max == 0) c.sweep_max = c.n_x - 1;
            if (c.sweep_min < 1 || c.sweep_min > c.sweep_max || c.sweep_max > c.n_x) {
                throw std::invalid_argument("need 1 <= sweep_min <= sweep_max <= n_x");
            }
            break;
        case ExperimentKind::mi_curve:
            if (c.model == ModelKind::threshold) {
                throw std::invalid_argument(
                    "mi-curve sweeps a_y; use the kwta or bmp model");
            }
            if (c.ay_max == 0) c.ay_max = c.n_y;
            if (c.ay_step == 0) c.ay_step = std::max(1, c.n_y / 30);
            if (c.ay_min < 1 || c.ay_min > c.ay_max || c.ay_max > c.n_y) {
                throw std::invalid_argument("need 1 <= ay_min <= ay_max <= n_y");
            }
            if (c.mi_cap < 1 || c.mi_cap > 62) {
                throw std::invalid_argument("mi_cap out of [1, 62]");
            }
            break;
        case ExperimentKind::map_curve:
            if (c.sy_grid.empty()) {
                for (int i = 1; i <= 19; ++i) c.sy_grid.push_back(0.05 * i);
            }
            for (double s : c.sy_grid) {
                if (!(s > 0.0) || s > 1.0) {
                    throw std::invalid_argument("sy grid values must lie in (0, 1]");
                }
            }
            if (c.n_corpus < 2 || c.n_queries < 1 || c.k_neighbors < 1) {
                throw std::invalid_argument("bad retrieval protocol sizes");
            }
            break;
        case ExperimentKind::analytic_compare:
            if (c.model == ModelKind::bmp) {
                throw std::invalid_argument(
                    "analytic-compare covers the threshold and kwta models");
            }
            break;
        case ExperimentKind::attractor_census:
            if (c.samples < 1) throw std::invalid_argument("samples must be >= 1");
            if (c.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
            if (!c.policy.empty() && c.policy != "fixed-tx" && c.policy != "fixed-axr") {
                throw std::invalid_argument(
                    "policy must be fixed-tx or fixed-axr (or empty for the default)");
            }
            if (c.hidden_control == 0) {
                c.hidden_control = default_hidden_control(params_from(c));
            }
            break;
        case ExperimentKind::weights_comparison:
            if (c.model == ModelKind::bmp) {
                throw std::invalid_argument(
                    "weights-comparison needs a fixed fan-in bound; "
                    "use threshold or kwta");
            }
            break;
        case ExperimentKind::axr_average:
            if (c.model != ModelKind::kwta) {
                throw std::invalid_argument("axr-average is a kwta experiment");
            }
            break;
        default: break;
    }
    return c;
}

std::vector<SparsityPoint> sweep_sparsity_curve(const ExperimentConfig& cfg0) {
    const ExperimentConfig cfg = cfg0.resolved();
    const ModelParams base = params_from(cfg);
    const std::vector<int> grid = control_grid(base, 30);
    const auto per_trial = scan_trials(cfg, base, grid);

    std::vector<SparsityPoint> out;
    out.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<double> sys, errs;
        sys.reserve(per_trial.size());
        errs.reserve(per_trial.size());
        for (const auto& samples : per_trial) {
            sys.push_back(samples[g].sy);
            errs.push_back(samples[g].err);
        }
        SparsityPoint pt;
        pt.control = grid[g];
        pt.sy_mean = mean_of(sys);
        pt.sy_std = sample_std(sys, pt.sy_mean);
        pt.error_mean = mean_of(errs);
        pt.error_std = sample_std(errs, pt.error_mean);
        out.push_back(pt);
    }
    return out;
}

std::vector<OptimumPoint> sweep_ratio_curve(const ExperimentConfig& cfg0) {
    const ExperimentConfig cfg = cfg0.resolved();
    std::vector<OptimumPoint> out;
    for (int r = cfg.ratio_min; r <= cfg.ratio_max; ++r) {
        ModelParams p = params_from(cfg);
        p.n_y = r * cfg.n_x;
        const std::vector<int> grid = control_grid(p, 50);
        const auto per_trial = scan_trials(cfg, p, grid);
        out.push_back(aggregate_optima(static_cast<double>(r), p.n_y, per_trial));
    }
    return out;
}

std::vector<OptimumPoint> sweep_ax_curve(const ExperimentConfig& cfg0) {
    const ExperimentConfig cfg = cfg0.resolved();
    std::vector<OptimumPoint> out;
    for (int v = cfg.sweep_min; v <= cfg.sweep_max; ++v) {
        ModelParams p = params_from(cfg);
        p.a_x = v;
        const std::vector<int> grid = control_grid(p, 50);
        const auto per_trial = scan_trials(cfg, p, grid);
        out.push_back(aggregate_optima(static_cast<double>(v), p.n_y, per_trial));
    }
    return out;
}

std::vector<OptimumPoint> sweep_aw_curve(const ExperimentConfig& cfg0) {
    const ExperimentConfig cfg = cfg0.resolved();
    std::vector<OptimumPoint> out;
    for (int v = cfg.sweep_min; v <= cfg.sweep_max; ++v) {
        ModelParams p = params_from(cfg);
        p.a_w = v;
        const std::vector<int> grid = control_grid(p, 50);
        const auto per_trial = scan_trials(cfg, p, grid);
        out.push_back(aggregate_optima(static_cast<double>(v), p.n_y, per_trial));
    }
    return out;
}

std::vector<MIReport> mi_curve(const ExperimentConfig& cfg0) {
    const ExperimentConfig cfg = cfg0.resolved();
    const ModelParams p = params_from(cfg);

    std::vector<int> grid;
    for (int a = cfg.ay_min; a <= cfg.ay_max; a += cfg.ay_step) grid.push_back(a);

    MISweepOptions opt;
    opt.decoder = cfg.decoder;
    opt.fixed_axr = cfg.fixed_axr;
    opt.error_ax = cfg.error_ax;
    opt.optimize_axr_per_input = cfg.optimize_axr;
    opt.seed = cfg.seed;
    opt.cap = cfg.mi_cap;
    opt.workers = cfg.workers;

    std::vector<MIReport> acc;
    for (int t = 0; t < cfg.trials; ++t) {
        opt.stream = static_cast<std::uint64_t>(t);
        std::vector<MIReport> reports = mi_sparsity_sweep(p, grid, opt);
        if (acc.empty()) {
            acc = std::move(reports);
        } else {
            for (std::size_t i = 0; i < acc.size(); ++i) {
                acc[i].mi_encoder += reports[i].mi_encoder;
                acc[i].mi_decoder += reports[i].mi_decoder;
                acc[i].upper_bound += reports[i].upper_bound;
                acc[i].mean_error += reports[i].mean_error;
            }
        }
    }
    const double inv = 1.0 / cfg.trials;
    for (MIReport& r : acc) {
        r.mi_encoder *= inv;
        r.mi_decoder *= inv;
        r.upper_bound *= inv;
        r.mean_error *= inv;
    }
    return acc;
}

std::vector<MapCurvePoint> map_curve(const ExperimentConfig& cfg0,
                                     const std::vector<ModelKind>& models) {
    const ExperimentConfig cfg = cfg0.resolved();
    MapOptions mo;
    mo.protocol.n_corpus = cfg.n_corpus;
    mo.protocol.n_queries = cfg.n_queries;
    mo.protocol.k_neighbors = cfg.k_neighbors;
    mo.protocol.n_weight_trials = cfg.trials;
    mo.space = cfg.map_space;
    mo.unnormalized_ap = cfg.unnormalized_ap;

    std::vector<MapCurvePoint> out;
    for (ModelKind m : models) {
        ModelParams p = params_from(cfg);
        p.kind = m;
        std::vector<int> controls;
        if (m == ModelKind::threshold) {
            const int top = std::min(p.a_x, p.a_w);
            for (int t = 1; t <= top; ++t) controls.push_back(t);
        } else {
            for (double s : cfg.sy_grid) {
                const int a = std::clamp(
                    static_cast<int>(std::lround(s * p.n_y)), 1, p.n_y);
                if (controls.empty() || controls.back() != a) controls.push_back(a);
            }
        }
        for (int c : controls) {
            p.hidden_control = c;
            p.validate();
            const APReport rep = mean_average_precision(p, cfg.seed, mo);
            MapCurvePoint pt;
            pt.model = m;
            pt.control = c;
            pt.s_y = rep.mean_code_density;
            pt.map_mean = rep.map_value;
            pt.map_std = sample_std(rep.trial_maps, rep.map_value);
            out.push_back(pt);
        }
    }
    return out;
}

std::vector<AnalyticComparePoint> analytic_compare_curve(const ExperimentConfig& cfg0) {
    const ExperimentConfig cfg = cfg0.resolved();
    const ModelParams base = params_from(cfg);
    const std::vector<int> grid = control_grid(base, 30);
    const auto per_trial = scan_trials(cfg, base, grid);

    std::vector<AnalyticComparePoint> out;
    out.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<double> sys, errs;
        for (const auto& samples : per_trial) {
            sys.push_back(samples[g].sy);
            errs.push_back(samples[g].err);
        }
        const GaussianPair pair =
            base.kind == ModelKind::threshold
                ? gaussian_moments(base, grid[g])
                : gaussian_moments_kwta(base, static_cast<double>(grid[g]));
        const double tx = approx_optimal_tx(pair, base.a_x, base.n_x);
        const double pred =
            expected_error(pair, tx, base.a_x, base.n_x, cfg.half_correction);
        AnalyticComparePoint pt;
        pt.control = grid[g];
        pt.sy_emp_mean = mean_of(sys);
        pt.error_emp_mean = mean_of(errs);
        pt.error_emp_std = sample_std(errs, pt.error_emp_mean);
        pt.error_pred = pred;
        pt.abs_diff = std::fabs(pt.error_emp_mean - pred);
        out.push_back(pt);
    }
    return out;
}

std::vector<ThresholdApproxPoint> threshold_approx_curve(const ExperimentConfig& cfg0) {
    ExperimentConfig cfg = cfg0.resolved();
    if (cfg.model != ModelKind::threshold) {
        throw std::invalid_argument("threshold-approx is a threshold-model experiment");
    }
    std::vector<ThresholdApproxPoint> out;
    for (int v = cfg.sweep_min; v <= cfg.sweep_max; ++v) {
        ModelParams p = params_from(cfg);
        p.a_x = v;
        const std::vector<int> grid = control_grid(p, 0);  // every t_y
        const auto per_trial = scan_trials(cfg, p, grid);
        std::vector<double> chosen;
        chosen.reserve(per_trial.size());
        for (const auto& samples : per_trial) {
            chosen.push_back(static_cast<double>(optimum_of(samples).control));
        }
        ThresholdApproxPoint pt;
        pt.a_x = v;
        pt.s_x = static_cast<double>(v) / cfg.n_x;
        pt.ty_approx = approx_optimal_ty(p);
        pt.ty_emp_mean = mean_of(chosen);
        pt.ty_emp_std = sample_std(chosen, pt.ty_emp_mean);
        pt.abs_diff = std::fabs(pt.ty_emp_mean - pt.ty_approx);
        out.push_back(pt);
    }
    return out;
}

AttractorCensusResult attractor_census_experiment(const ExperimentConfig& cfg0) {
    const ExperimentConfig cfg = cfg0.resolved();
    ModelParams p = params_from(cfg);
    p.validate();

    DecodePolicy pol;
    if (cfg.policy.empty()) {
        pol = default_decode_policy(p);
    } else {
        pol.kind = cfg.policy == "fixed-tx" ? DecodePolicyKind::fixed_tx
                                            : DecodePolicyKind::fixed_axr;
        if (cfg.policy_value >= 0) {
            pol.value = cfg.policy_value;
        } else if (pol.kind == DecodePolicyKind::fixed_axr) {
            pol.value = p.a_x;
        } else {
            const GaussianPair pair =
                p.kind == ModelKind::threshold
                    ? gaussian_moments(p, p.hidden_control)
                    : gaussian_moments_kwta(p, static_cast<double>(p.hidden_control));
            pol.value = static_cast<int>(
                std::lround(approx_optimal_tx(pair, p.a_x, p.n_x)));
        }
    }

    // weight stream far above the per-sample streams [0, samples)
    Rng wrng(cfg.seed, std::uint64_t{1} << 62);
    const WeightMatrix w = random_weight_matrix(
        static_cast<std::size_t>(p.n_y), static_cast<std::size_t>(p.n_x),
        static_cast<std::size_t>(p.a_w), wrng);
    AttractorCensusResult res;
    res.policy = pol;
    res.census = cycle_census(w, p, pol, cfg.samples, cfg.seed, cfg.max_iter);
    return res;
}

std::vector<WeightsComparisonRow> weights_comparison(const ExperimentConfig& cfg0) {
    const ExperimentConfig cfg = cfg0.resolved();
    const ModelParams base = params_from(cfg);
    const std::vector<int> grid = control_grid(base, 50);

    std::vector<WeightsComparisonRow> out;
    for (const bool bernoulli : {false, true}) {
        const auto per_trial = scan_trials(cfg, base, grid, bernoulli);
        WeightsComparisonRow row;
        row.scheme = bernoulli ? "bernoulli" : "fixed_fanin";
        row.stats = aggregate_optima(0.0, base.n_y, per_trial);
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<AxrAveragePoint> axr_average_curve(const ExperimentConfig& cfg0) {
    const ExperimentConfig cfg = cfg0.resolved();
    const ModelParams base = params_from(cfg);

    std::vector<int> grid;
    if (cfg.hidden_control > 0) {
        grid.push_back(cfg.hidden_control);
    } else {
        for (double f : {0.1, 0.2, 0.25, 0.3, 0.4, 0.5}) {
            const int a = std::clamp(
                static_cast<int>(std::lround(f * base.n_y)), 1, base.n_y);
            if (grid.empty() || grid.back() != a) grid.push_back(a);
        }
    }
    validate_grid(base, grid);

    std::vector<AxrAveragePoint> out;
    for (int a : grid) {
        ModelParams p = base;
        p.hidden_control = a;
        std::vector<double> chosen(static_cast<std::size_t>(cfg.trials), 0.0);
        const int nw = resolve_workers(cfg.workers);
        (void)nw;
#ifdef _OPENMP
#pragma omp parallel for num_threads(nw) schedule(dynamic)
#endif
        for (int t = 0; t < cfg.trials; ++t) {
            Rng rng(cfg.seed, static_cast<std::uint64_t>(t));
            const Drawn d = draw_trial(p, rng);
            const EncodeDecodeResult r =
                best_reconstruction(d.w, d.x, p, d.has_w2 ? &d.w2 : nullptr);
            chosen[static_cast<std::size_t>(t)] = r.chosen_control;
        }
        AxrAveragePoint pt;
        pt.a_y = a;
        pt.s_y = static_cast<double>(a) / base.n_y;
        pt.mean_axr = mean_of(chosen);
        pt.std_axr = sample_std(chosen, pt.mean_axr);
        out.push_back(pt);
    }
    return out;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Table run_experiment(const ExperimentConfig& cfg0) {
    const ExperimentConfig cfg = cfg0.resolved();
    const auto num = [](double v) { return format_number(v); };
    Table t;
    switch (cfg.experiment) {
        case ExperimentKind::sweep_sparsity: {
            t.columns = {"control", "s_y_mean", "s_y_std",
                         "error_mean", "error_std", "trials"};
            for (const SparsityPoint& p : sweep_sparsity_curve(cfg)) {
                t.rows.push_back(string_row(
                    {num(p.control), num(p.sy_mean), num(p.sy_std),
                     num(p.error_mean), num(p.error_std), num(cfg.trials)}));
            }
            break;
        }
        case ExperimentKind::sweep_ratio: {
            t.columns = {"ratio", "n_y", "min_error_mean", "min_error_std",
                         "opt_sy_mean", "opt_sy_std", "trials"};
            for (const OptimumPoint& p : sweep_ratio_curve(cfg)) {
                t.rows.push_back(string_row(
                    {num(p.axis), num(p.n_y), num(p.min_error_mean),
                     num(p.min_error_std), num(p.opt_sy_mean), num(p.opt_sy_std),
                     num(cfg.trials)}));
            }
            break;
        }
        case ExperimentKind::sweep_ax: {
            t.columns = {"a_x", "s_x", "min_error_mean", "min_error_std",
                         "opt_sy_mean", "opt_sy_std", "trials"};
            for (const OptimumPoint& p : sweep_ax_curve(cfg)) {
                t.rows.push_back(string_row(
                    {num(p.axis), num(p.axis / cfg.n_x), num(p.min_error_mean),
                     num(p.min_error_std), num(p.opt_sy_mean), num(p.opt_sy_std),
                     num(cfg.trials)}));
            }
            break;
        }
        case ExperimentKind::sweep_aw: {
            t.columns = {"a_w", "min_error_mean", "min_error_std",
                         "opt_sy_mean", "opt_sy_std", "trials"};
            for (const OptimumPoint& p : sweep_aw_curve(cfg)) {
                t.rows.push_back(string_row(
                    {num(p.axis), num(p.min_error_mean), num(p.min_error_std),
                     num(p.opt_sy_mean), num(p.opt_sy_std), num(cfg.trials)}));
            }
            break;
        }
        case ExperimentKind::mi_curve: {
            t.columns = {"a_y", "s_y", "upper_bound_scaled", "encoder_mi_scaled",
                         "decoder_mi_scaled", "error_mean", "trials"};
            for (const MIReport& r : mi_curve(cfg)) {
                t.rows.push_back(string_row(
                    {num(r.a_y), num(r.s_y), num(r.scaled_upper_bound()),
                     num(r.scaled_encoder()), num(r.scaled_decoder()),
                     num(r.mean_error), num(cfg.trials)}));
            }
            break;
        }
        case ExperimentKind::map_curve: {
            t.columns = {"model", "control", "s_y", "map_mean", "map_std", "trials"};
            for (const MapCurvePoint& p : map_curve(cfg, {cfg.model})) {
                t.rows.push_back(string_row(
                    {to_string(p.model), num(p.control), num(p.s_y),
                     num(p.map_mean), num(p.map_std), num(cfg.trials)}));
            }
            break;
        }
        case ExperimentKind::analytic_compare: {
            t.columns = {"control", "s_y_mean", "error_emp_mean", "error_emp_std",
                         "error_pred", "abs_diff", "trials"};
            for (const AnalyticComparePoint& p : analytic_compare_curve(cfg)) {
                t.rows.push_back(string_row(
                    {num(p.control), num(p.sy_emp_mean), num(p.error_emp_mean),
                     num(p.error_emp_std), num(p.error_pred), num(p.abs_diff),
                     num(cfg.trials)}));
            }
            break;
        }
        case ExperimentKind::threshold_approx: {
            t.columns = {"a_x", "s_x", "ty_approx", "ty_emp_mean", "ty_emp_std",
                         "abs_diff", "trials"};
            for (const ThresholdApproxPoint& p : threshold_approx_curve(cfg)) {
                t.rows.push_back(string_row(
                    {num(p.a_x), num(p.s_x), num(p.ty_approx), num(p.ty_emp_mean),
                     num(p.ty_emp_std), num(p.abs_diff), num(cfg.trials)}));
            }
            break;
        }
        case ExperimentKind::attractor_census: {
            t.columns = {"policy", "policy_value", "transient",
                         "combined_cycle_length", "count", "n_samples",
                         "n_converged", "distinct_attractors"};
            const AttractorCensusResult res = attractor_census_experiment(cfg);
            for (const auto& [key, count] : res.census.histogram) {
                t.rows.push_back(string_row(
                    {to_string(res.policy.kind), num(res.policy.value),
                     num(key.first), num(key.second),
                     num(static_cast<double>(count)),
                     num(static_cast<double>(res.census.n_samples)),
                     num(static_cast<double>(res.census.n_converged)),
                     num(static_cast<double>(res.census.distinct_attractors))}));
            }
            break;
        }
        case ExperimentKind::weights_comparison: {
            t.columns = {"scheme", "min_error_mean", "min_error_std",
                         "opt_sy_mean", "opt_sy_std", "trials"};
            for (const WeightsComparisonRow& r : weights_comparison(cfg)) {
                t.rows.push_back(string_row(
                    {r.scheme, num(r.stats.min_error_mean), num(r.stats.min_error_std),
                     num(r.stats.opt_sy_mean), num(r.stats.opt_sy_std),
                     num(cfg.trials)}));
            }
            break;
        }
        case ExperimentKind::axr_average: {
            t.columns = {"a_y", "s_y", "mean_optimal_axr", "std_optimal_axr",
                         "trials"};
            for (const AxrAveragePoint& p : axr_average_curve(cfg)) {
                t.rows.push_back(string_row(
                    {num(p.a_y), num(p.s_y), num(p.mean_axr), num(p.std_axr),
                     num(cfg.trials)}));
            }
            break;
        }
    }
    return t;
}

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ',';
        out += t.columns[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

namespace {

// Cells are %.6g renderings; anything that parses as a full number is
// emitted as a JSON number (re-parsed, so it stays at 6 significant
// digits), the rest as strings.
nlohmann::ordered_json cell_to_json(const std::string& cell) {
    if (!cell.empty()) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() + cell.size()) return v;
    }
    return cell;
}

}  // namespace

std::string to_json(const Table& t, const ExperimentConfig& cfg,
                    double runtime_seconds) {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["config"] = {
        {"experiment", to_string(cfg.experiment)},
        {"n_x", cfg.n_x},
        {"n_y", cfg.n_y},
        {"a_x", cfg.a_x},
        {"a_w", cfg.a_w},
        {"model", to_string(cfg.model)},
        {"decoder", to_string(cfg.decoder)},
        {"hidden_control", cfg.hidden_control},
        {"lambda", cfg.model == ModelKind::bmp ? params_from(cfg).effective_lambda()
                                               : 0},
        {"trials", cfg.trials},
        {"seed", cfg.seed},
        {"workers", cfg.workers},
    };
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            obj[t.columns[i]] = cell_to_json(row[i]);
        }
        rows.push_back(std::move(obj));
    }
    j["rows"] = std::move(rows);
    j["runtime_seconds"] = runtime_seconds;
    return j.dump(2) + "\n";
}

int run(const ExperimentConfig& cfg0) {
    ExperimentConfig cfg;
    try {
        cfg = cfg0.resolved();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    const auto start = std::chrono::steady_clock::now();
    Table table;
    try {
        table = run_experiment(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    const std::string payload = cfg.format == OutputFormat::csv
                                    ? to_csv(table)
                                    : to_json(table, cfg, runtime);
    if (cfg.out_path.empty()) {
        std::cout << payload;
    } else {
        std::ofstream f(cfg.out_path, std::ios::binary);
        f << payload;
        f.flush();
        if (!f) {
            std::cerr << "error: cannot write " << cfg.out_path << "\n";
            return 1;
        }
    }
    std::cerr << to_string(cfg.experiment) << ": " << table.rows.size()
              << " rows in " << format_number(runtime) << " s";
    if (!cfg.out_path.empty()) std::cerr << " -> " << cfg.out_path;
    std::cerr << "\n";
    return 0;
}

}  // namespace binae
