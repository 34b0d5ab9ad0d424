#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "binae/attractors.hpp"
#include "binae/infometrics.hpp"
#include "binae/models.hpp"
#include "binae/simprec.hpp"

namespace binae {

inline constexpr const char* kVersion = "1.0.0";

enum class ExperimentKind {
    sweep_sparsity,
    sweep_ratio,
    sweep_ax,
    sweep_aw,
    mi_curve,
    map_curve,
    analytic_compare,
    threshold_approx,
    attractor_census,
    weights_comparison,
    axr_average,
};

enum class OutputFormat { csv, json };

const char* to_string(ExperimentKind k);
const char* to_string(ModelKind k);
const char* to_string(DecoderKind k);
ExperimentKind parse_experiment_kind(const std::string& name);
ModelKind parse_model_kind(const std::string& name);
DecoderKind parse_decoder_kind(const std::string& name);

// Complete description of one experiment run. Zero / empty / negative
// sentinel values mean "use this experiment's default"; resolve() replaces
// them and validates the result.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::sweep_sparsity;
    int n_x = 50;
    int n_y = 150;
    int a_x = 20;
    int a_w = 30;
    ModelKind model = ModelKind::threshold;
    DecoderKind decoder = DecoderKind::transpose;
    int hidden_control = 0;  // 0: derived default (t_y approx / mid-range a_y)
    long long lambda = 0;
    int trials = 0;  // 0: per-experiment default
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out_path;  // empty: table goes to stdout
    OutputFormat format = OutputFormat::csv;

    // axis ranges
    int ratio_min = 1, ratio_max = 8;          // sweep-ratio
    int sweep_min = 1, sweep_max = 0;          // sweep-ax / sweep-aw / threshold-approx; 0: n_x - 1
    int ay_min = 1, ay_max = 0, ay_step = 0;   // mi-curve; 0: full range / auto step
    std::vector<double> sy_grid;               // map-curve; empty: 0.05 .. 0.95

    // protocol knobs
    int n_corpus = 1000, n_queries = 100, k_neighbors = 20;  // map-curve
    SimilaritySpace map_space = SimilaritySpace::hidden;
    bool unnormalized_ap = false;
    int mi_cap = 24;
    int fixed_axr = -1;  // mi-curve decode policy; -1: round(n_x / 2)
    int error_ax = -1;   // mi-curve error slice; -1: n_x / 2
    bool optimize_axr = false;
    bool half_correction = false;  // analytic-compare CDF variant
    int samples = 10000, max_iter = 1000;  // attractor-census
    std::string policy;        // attractor-census: "", "fixed-tx", "fixed-axr"
    int policy_value = -1;     // -1: derived from the model params

    ExperimentConfig resolved() const;  // throws std::invalid_argument
};

// ---- typed results, one driver per experiment ------------------------------

struct SparsityPoint {
    int control = 0;  // t_y, a_y, or bmp step
    double sy_mean = 0, sy_std = 0;
    double error_mean = 0, error_std = 0;
};
std::vector<SparsityPoint> sweep_sparsity_curve(const ExperimentConfig& cfg);

// Per-trial optimum over the whole sparsity range, aggregated.
struct OptimumPoint {
    double axis = 0;  // ratio, a_x, or a_w
    int n_y = 0;
    double min_error_mean = 0, min_error_std = 0;
    double opt_sy_mean = 0, opt_sy_std = 0;
};
std::vector<OptimumPoint> sweep_ratio_curve(const ExperimentConfig& cfg);
std::vector<OptimumPoint> sweep_ax_curve(const ExperimentConfig& cfg);
std::vector<OptimumPoint> sweep_aw_curve(const ExperimentConfig& cfg);

std::vector<MIReport> mi_curve(const ExperimentConfig& cfg);

struct MapCurvePoint {
    ModelKind model = ModelKind::kwta;
    int control = 0;
    double s_y = 0;  // realized mean code density
    double map_mean = 0, map_std = 0;
};
std::vector<MapCurvePoint> map_curve(const ExperimentConfig& cfg,
                                     const std::vector<ModelKind>& models);

struct AnalyticComparePoint {
    int control = 0;
    double sy_emp_mean = 0;
    double error_emp_mean = 0, error_emp_std = 0;
    double error_pred = 0;
    double abs_diff = 0;
};
std::vector<AnalyticComparePoint> analytic_compare_curve(const ExperimentConfig& cfg);

struct ThresholdApproxPoint {
    int a_x = 0;
    double s_x = 0;
    int ty_approx = 0;
    double ty_emp_mean = 0, ty_emp_std = 0;
    double abs_diff = 0;
};
std::vector<ThresholdApproxPoint> threshold_approx_curve(const ExperimentConfig& cfg);

struct AttractorCensusResult {
    DecodePolicy policy;
    CycleCensus census;
};
AttractorCensusResult attractor_census_experiment(const ExperimentConfig& cfg);

struct WeightsComparisonRow {
    std::string scheme;  // "fixed_fanin" or "bernoulli"
    OptimumPoint stats;
};
std::vector<WeightsComparisonRow> weights_comparison(const ExperimentConfig& cfg);

struct AxrAveragePoint {
    int a_y = 0;
    double s_y = 0;
    double mean_axr = 0, std_axr = 0;
};
std::vector<AxrAveragePoint> axr_average_curve(const ExperimentConfig& cfg);

// ---- serialization ----------------------------------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

// All numbers rendered with 6 significant digits.
std::string format_number(double v);

// Dispatch to the right driver and lay the result out as a table.
Table run_experiment(const ExperimentConfig& cfg);

std::string to_csv(const Table& t);
std::string to_json(const Table& t, const ExperimentConfig& cfg, double runtime_seconds);

// Full CLI-facing entry: resolve, run, serialize, write, summarize.
// Returns the process exit code (0 ok, 1 output IO failure, 2 bad config).
int run(const ExperimentConfig& cfg);

}  // namespace binae
