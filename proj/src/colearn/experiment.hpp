#pragma once

#include <string>
#include <vector>

#include "colearn/config.hpp"
#include "colearn/metrics.hpp"

namespace colearn::experiment {

struct RunOptions {
    std::string output_dir;  // empty: use the config value
    std::size_t jobs = 1;
    bool resume = false;
};

struct RunArtifacts {
    std::vector<std::string> trace_csvs;
    std::string summary_csv;
    std::vector<std::string> svg_paths;
    std::vector<std::string> checkpoints;
};

// Builds the (optionally corrupted) dataset pair described by the config.
std::pair<data::ImageDataset, data::ImageDataset> build_datasets(
    const config::ExperimentConfig& cfg);

// Runs every (method, seed) cell, writing one trace CSV and checkpoint per
// cell, then a summary CSV (last-k mean +- sample std per method) and one SVG
// per metric. Cells run in parallel up to opts.jobs; with opts.resume, cells
// whose .done marker exists are skipped. Summary statistics are recomputed
// from the trace CSVs so fresh and resumed runs emit identical bytes.
RunArtifacts run_experiment(const config::ExperimentConfig& cfg, const RunOptions& opts);

// Dataset-only mode: writes train.clds / test.clds into the output directory.
void corrupt_only(const config::ExperimentConfig& cfg, const RunOptions& opts);

// Serialization helpers shared with the tests.
std::string format_csv_row(const eval::MetricsRow& row);
std::vector<eval::MetricsRow> read_trace_csv(const std::string& path);

// Full-loss finite-difference gradient check on a fixed 4-sample fixture
// (8x8x1 images, 3 classes). Appends a human-readable report; returns pass.
bool run_gradient_check(std::string& report);

}  // namespace colearn::experiment
