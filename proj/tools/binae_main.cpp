#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "binae/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "binae: binary {0,1} autoencoder experiments\n"
        "Writes one result table per run (CSV or JSON) plus a summary line "
        "on stderr."};
    app.get_formatter()->column_width(34);

    std::string experiment;
    std::string model = "threshold";
    std::string decoder = "transpose";
    std::string format = "csv";
    std::string space = "hidden";
    binae::ExperimentConfig cfg;

    app.add_option("experiment", experiment,
                   "sweep-sparsity | sweep-ratio | sweep-ax | sweep-aw | "
                   "mi-curve | map-curve | analytic-compare | threshold-approx | "
                   "attractor-census | weights-comparison | axr-average")
        ->required();
    auto* o_nx = app.add_option("--nx", cfg.n_x, "input units");
    auto* o_ny = app.add_option("--ny", cfg.n_y, "hidden units");
    auto* o_ax = app.add_option("--ax", cfg.a_x, "active input bits");
    auto* o_aw = app.add_option("--aw", cfg.a_w, "ones per weight row");
    auto* o_model = app.add_option("--model", model, "threshold | kwta | bmp");
    app.add_option("--decoder", decoder,
                   "transpose | independent-random | pairwise");
    app.add_option("--control", cfg.hidden_control,
                   "t_y / a_y / bmp steps (0: derived default)");
    app.add_option("--lambda", cfg.lambda, "bmp inhibition (0: 2 a_x a_w + 1)");
    app.add_option("--trials", cfg.trials, "trials (0: per-experiment default)");
    app.add_option("--seed", cfg.seed, "rng seed");
    app.add_option("--workers", cfg.workers, "worker threads (0: all cores)");
    app.add_option("--out", cfg.out_path, "output path (default: stdout)");
    app.add_option("--format", format, "csv | json");

    app.add_option("--ratio-min", cfg.ratio_min, "sweep-ratio: first N_y/N_x");
    app.add_option("--ratio-max", cfg.ratio_max, "sweep-ratio: last N_y/N_x");
    app.add_option("--min", cfg.sweep_min, "sweep-ax/aw, threshold-approx: axis start");
    app.add_option("--max", cfg.sweep_max, "axis end (0: n_x - 1)");
    app.add_option("--ay-min", cfg.ay_min, "mi-curve: first a_y");
    app.add_option("--ay-max", cfg.ay_max, "mi-curve: last a_y (0: n_y)");
    app.add_option("--ay-step", cfg.ay_step, "mi-curve: a_y stride (0: auto)");
    app.add_option("--sy-grid", cfg.sy_grid,
                   "map-curve: code densities to visit")
        ->delimiter(',');
    app.add_option("--corpus", cfg.n_corpus, "map-curve: corpus size");
    app.add_option("--queries", cfg.n_queries, "map-curve: queries per trial");
    app.add_option("--neighbors", cfg.k_neighbors, "map-curve: list length");
    app.add_option("--space", space,
                   "map-curve similarity space: hidden | reconstruction");
    app.add_flag("--unnormalized-ap", cfg.unnormalized_ap,
                 "map-curve: skip the 1/k AP normalization");
    app.add_option("--cap", cfg.mi_cap, "mi-curve: refuse n_x beyond this");
    app.add_option("--fixed-axr", cfg.fixed_axr,
                   "mi-curve decode count (-1: round(n_x / 2))");
    app.add_option("--error-ax", cfg.error_ax,
                   "mi-curve error slice popcount (-1: n_x / 2)");
    app.add_flag("--optimize-axr", cfg.optimize_axr,
                 "mi-curve: per-input optimal a_x^r instead of the fixed policy");
    app.add_flag("--half-correction", cfg.half_correction,
                 "analytic-compare: evaluate the CDF at t_x - 1/2");
    app.add_option("--samples", cfg.samples, "attractor-census: random starts");
    app.add_option("--max-iter", cfg.max_iter, "attractor-census: iteration cap");
    app.add_option("--policy", cfg.policy,
                   "attractor-census decode rule: fixed-tx | fixed-axr");
    app.add_option("--policy-value", cfg.policy_value,
                   "attractor-census decode constant (-1: derived)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        cfg.experiment = binae::parse_experiment_kind(experiment);

        // scale defaults that depend on the experiment, applied only when
        // the flag was not given
        const bool exhaustive = cfg.experiment == binae::ExperimentKind::mi_curve;
        if (exhaustive) {
            if (!o_nx->count()) cfg.n_x = 20;
            if (!o_ny->count()) cfg.n_y = 30;
            if (!o_ax->count()) cfg.a_x = 10;
            if (!o_aw->count()) cfg.a_w = 7;
            if (!o_model->count()) model = "kwta";
        }
        if (cfg.experiment == binae::ExperimentKind::map_curve ||
            cfg.experiment == binae::ExperimentKind::analytic_compare ||
            cfg.experiment == binae::ExperimentKind::threshold_approx) {
            if (!o_ny->count()) cfg.n_y = 200;
        }
        if (cfg.experiment == binae::ExperimentKind::map_curve ||
            cfg.experiment == binae::ExperimentKind::axr_average) {
            if (!o_model->count()) model = "kwta";
        }

        cfg.model = binae::parse_model_kind(model);
        cfg.decoder = binae::parse_decoder_kind(decoder);
        if (format == "csv") {
            cfg.format = binae::OutputFormat::csv;
        } else if (format == "json") {
            cfg.format = binae::OutputFormat::json;
        } else {
            std::fprintf(stderr, "config error: unknown format: %s\n", format.c_str());
            return 2;
        }
        if (space == "hidden") {
            cfg.map_space = binae::SimilaritySpace::hidden;
        } else if (space == "reconstruction") {
            cfg.map_space = binae::SimilaritySpace::reconstruction;
        } else {
            std::fprintf(stderr, "config error: unknown space: %s\n", space.c_str());
            return 2;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    return binae::run(cfg);
}
