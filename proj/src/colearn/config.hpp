#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "colearn/noise.hpp"
#include "colearn/synthetic.hpp"
#include "colearn/trainer.hpp"

namespace colearn::config {

enum class DatasetSource { synthetic, cifar10 };

struct DatasetConfig {
    DatasetSource source = DatasetSource::synthetic;
    data::SyntheticParams synthetic;  // synthetic.seed mirrors data_seed
    std::vector<std::string> train_paths;  // cifar10 only
    std::vector<std::string> test_paths;   // cifar10 only
    std::uint64_t data_seed = 1;
};

struct NoiseConfig {
    std::optional<data::NoiseKind> kind;  // nullopt: labels stay clean
    double rate = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // pairmap only
    bool include_true_class = false;

    data::TransitionMatrix build(std::size_t num_classes) const;
};

// One grid cell prototype: the cell name (unique within the config; defaults
// to the method string) plus the full per-method training configuration.
struct MethodSpec {
    std::string name;
    train::TrainConfig train;
};

struct ExperimentConfig {
    DatasetConfig dataset;
    NoiseConfig noise;
    std::vector<MethodSpec> methods;
    std::vector<std::uint64_t> seeds;
    std::string output_dir = "out";
    std::size_t summary_last_k = 10;

    void validate() const;
};

// Parses the JSON config document. Fills documented defaults, rejects unknown
// keys (with a nearest-known-key suggestion), and reports range errors with
// the full key path, e.g. "noise.rate".
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Edit distance used for the typo suggestions; exposed for testing.
std::size_t levenshtein(const std::string& a, const std::string& b);

}  // namespace colearn::config
