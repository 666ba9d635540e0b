#include "colearn/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace colearn::config {

using nlohmann::json;

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path.empty() ? msg : path + ": " + msg);
}

std::string join_path(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path,
                const std::vector<std::string>& allowed) {
    for (const auto& item : obj.items()) {
        const std::string& key = item.key();
        if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
        std::string best;
        std::size_t best_dist = std::string::npos;
        for (const auto& cand : allowed) {
            const std::size_t d = levenshtein(key, cand);
            if (d < best_dist) {
                best_dist = d;
                best = cand;
            }
        }
        std::string msg = "unknown key \"" + join_path(path, key) + "\"";
        if (!best.empty() && best_dist <= std::max<std::size_t>(2, key.size() / 2))
            msg += "; did you mean \"" + best + "\"?";
        throw ConfigError(msg);
    }
}

double get_number(const json& obj, const std::string& path, const std::string& key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(join_path(path, key), "expected a number");
    return v.get<double>();
}

std::size_t get_size(const json& obj, const std::string& path, const std::string& key,
                     std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        fail(join_path(path, key), "expected a nonnegative integer");
    return v.get<std::size_t>();
}

std::uint64_t get_u64(const json& obj, const std::string& path, const std::string& key,
                      std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        fail(join_path(path, key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key,
              bool fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) fail(join_path(path, key), "expected a boolean");
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) fail(join_path(path, key), "expected a string");
    return v.get<std::string>();
}

void require_range(double v, double lo, double hi, const std::string& path) {
    if (v < lo || v > hi) {
        std::ostringstream oss;
        oss << "value " << v << " out of range [" << lo << ", " << hi << "]";
        fail(path, oss.str());
    }
}

const std::vector<std::string> kTrainKeys = {
    "epochs", "batch_size", "lr", "adam_beta1", "adam_beta2", "adam_eps",
    "decay_start_fraction", "tau", "alpha", "sigma", "sup_weight", "reduction",
    "include_positive_in_denominator", "per_sample_lambda", "standardize",
    "crop_scale_min", "crop_scale_max", "flip_prob", "jitter_prob",
    "grayscale_prob", "fixed_jitter_order"};

// Applies a train-section object on top of the given base config.
void apply_train_keys(const json& obj, const std::string& path, train::TrainConfig& cfg) {
    cfg.epochs = get_size(obj, path, "epochs", cfg.epochs);
    cfg.batch_size = get_size(obj, path, "batch_size", cfg.batch_size);
    cfg.adam.lr = get_number(obj, path, "lr", cfg.adam.lr);
    cfg.adam.beta1 = get_number(obj, path, "adam_beta1", cfg.adam.beta1);
    cfg.adam.beta2 = get_number(obj, path, "adam_beta2", cfg.adam.beta2);
    cfg.adam.eps = get_number(obj, path, "adam_eps", cfg.adam.eps);
    cfg.decay_start_fraction =
        get_number(obj, path, "decay_start_fraction", cfg.decay_start_fraction);
    require_range(cfg.decay_start_fraction, 0.0, 1.0, join_path(path, "decay_start_fraction"));
    cfg.loss.tau = get_number(obj, path, "tau", cfg.loss.tau);
    cfg.loss.alpha = get_number(obj, path, "alpha", cfg.loss.alpha);
    cfg.loss.sigma = get_number(obj, path, "sigma", cfg.loss.sigma);
    cfg.loss.sup_weight = get_number(obj, path, "sup_weight", cfg.loss.sup_weight);
    const std::string red =
        get_string(obj, path, "reduction",
                   cfg.loss.reduction == losses::Reduction::mean ? "mean" : "sum");
    if (red == "mean")
        cfg.loss.reduction = losses::Reduction::mean;
    else if (red == "sum")
        cfg.loss.reduction = losses::Reduction::sum;
    else
        fail(join_path(path, "reduction"), "expected \"mean\" or \"sum\"");
    cfg.loss.include_positive_in_denominator =
        get_bool(obj, path, "include_positive_in_denominator",
                 cfg.loss.include_positive_in_denominator);
    cfg.loss.per_sample_lambda =
        get_bool(obj, path, "per_sample_lambda", cfg.loss.per_sample_lambda);
    cfg.standardize = get_bool(obj, path, "standardize", cfg.standardize);
    cfg.transform.crop_scale_min =
        get_number(obj, path, "crop_scale_min", cfg.transform.crop_scale_min);
    cfg.transform.crop_scale_max =
        get_number(obj, path, "crop_scale_max", cfg.transform.crop_scale_max);
    cfg.transform.flip_prob = get_number(obj, path, "flip_prob", cfg.transform.flip_prob);
    cfg.transform.jitter_prob = get_number(obj, path, "jitter_prob", cfg.transform.jitter_prob);
    cfg.transform.grayscale_prob =
        get_number(obj, path, "grayscale_prob", cfg.transform.grayscale_prob);
    cfg.transform.fixed_jitter_order =
        get_bool(obj, path, "fixed_jitter_order", cfg.transform.fixed_jitter_order);
    require_range(cfg.transform.flip_prob, 0.0, 1.0, join_path(path, "flip_prob"));
    require_range(cfg.transform.jitter_prob, 0.0, 1.0, join_path(path, "jitter_prob"));
    require_range(cfg.transform.grayscale_prob, 0.0, 1.0, join_path(path, "grayscale_prob"));
}

DatasetConfig parse_dataset(const json& obj) {
    const std::string path = "dataset";
    check_keys(obj, path,
               {"source", "num_classes", "n_train", "n_test", "side", "data_seed",
                "train_paths", "test_paths"});
    DatasetConfig ds;
    const std::string source = get_string(obj, path, "source", "synthetic");
    if (source == "synthetic")
        ds.source = DatasetSource::synthetic;
    else if (source == "cifar10")
        ds.source = DatasetSource::cifar10;
    else
        fail("dataset.source", "expected \"synthetic\" or \"cifar10\"");
    ds.synthetic.num_classes = get_size(obj, path, "num_classes", ds.synthetic.num_classes);
    ds.synthetic.n_train = get_size(obj, path, "n_train", ds.synthetic.n_train);
    ds.synthetic.n_test = get_size(obj, path, "n_test", ds.synthetic.n_test);
    ds.synthetic.side = get_size(obj, path, "side", ds.synthetic.side);
    ds.data_seed = get_u64(obj, path, "data_seed", ds.data_seed);
    ds.synthetic.seed = ds.data_seed;
    for (const char* key : {"train_paths", "test_paths"}) {
        if (!obj.contains(key)) continue;
        const auto& arr = obj.at(key);
        if (!arr.is_array()) fail(join_path(path, key), "expected an array of paths");
        auto& dst = std::string(key) == "train_paths" ? ds.train_paths : ds.test_paths;
        for (const auto& v : arr) {
            if (!v.is_string()) fail(join_path(path, key), "expected an array of paths");
            dst.push_back(v.get<std::string>());
        }
    }
    if (ds.source == DatasetSource::cifar10 && (ds.train_paths.empty() || ds.test_paths.empty()))
        fail(path, "cifar10 source requires train_paths and test_paths");
    return ds;
}

NoiseConfig parse_noise(const json& obj) {
    const std::string path = "noise";
    check_keys(obj, path, {"kind", "rate", "pairs", "include_true_class"});
    NoiseConfig n;
    const std::string kind = get_string(obj, path, "kind", "none");
    if (kind == "none")
        n.kind = std::nullopt;
    else if (kind == "symmetric")
        n.kind = data::NoiseKind::symmetric;
    else if (kind == "asymmetric_pairmap")
        n.kind = data::NoiseKind::asymmetric_pairmap;
    else if (kind == "asymmetric_circular")
        n.kind = data::NoiseKind::asymmetric_circular;
    else
        fail("noise.kind",
             "expected one of \"none\", \"symmetric\", \"asymmetric_pairmap\", "
             "\"asymmetric_circular\"");
    n.rate = get_number(obj, path, "rate", n.rate);
    require_range(n.rate, 0.0, 1.0, "noise.rate");
    n.include_true_class = get_bool(obj, path, "include_true_class", n.include_true_class);
    if (obj.contains("pairs")) {
        const auto& arr = obj.at("pairs");
        if (!arr.is_array()) fail("noise.pairs", "expected an array of [source, target] pairs");
        for (const auto& pr : arr) {
            if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number_integer() ||
                !pr[1].is_number_integer())
                fail("noise.pairs", "expected an array of [source, target] pairs");
            n.pairs.emplace_back(pr[0].get<std::size_t>(), pr[1].get<std::size_t>());
        }
    }
    return n;
}

}  // namespace

data::TransitionMatrix NoiseConfig::build(std::size_t num_classes) const {
    if (!kind) throw ConfigError("noise: no noise kind configured");
    switch (*kind) {
        case data::NoiseKind::symmetric:
            return data::build_symmetric(num_classes, rate, include_true_class);
        case data::NoiseKind::asymmetric_pairmap: {
            auto p = pairs.empty() && num_classes == 10 ? data::cifar10_pair_map() : pairs;
            return data::build_asymmetric_pairmap(num_classes, rate, p);
        }
        default:
            return data::build_asymmetric_circular(num_classes, rate);
    }
}

void ExperimentConfig::validate() const {
    if (methods.empty()) throw ConfigError("methods: at least one method is required");
    if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
    if (summary_last_k == 0) throw ConfigError("summary_last_k: must be positive");
    for (const auto& m : methods) {
        m.train.validate();
        for (const auto& other : methods)
            if (&m != &other && m.name == other.name)
                throw ConfigError("methods: duplicate cell name \"" + m.name + "\"");
    }
}

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    check_keys(doc, "",
               {"dataset", "noise", "train", "methods", "seeds", "output_dir",
                "summary_last_k"});

    ExperimentConfig cfg;
    if (doc.contains("dataset")) {
        if (!doc.at("dataset").is_object()) fail("dataset", "expected an object");
        cfg.dataset = parse_dataset(doc.at("dataset"));
    }
    if (doc.contains("noise")) {
        if (!doc.at("noise").is_object()) fail("noise", "expected an object");
        cfg.noise = parse_noise(doc.at("noise"));
    }

    train::TrainConfig base;
    if (doc.contains("train")) {
        const auto& t = doc.at("train");
        if (!t.is_object()) fail("train", "expected an object");
        check_keys(t, "train", kTrainKeys);
        apply_train_keys(t, "train", base);
    }

    if (doc.contains("methods")) {
        const auto& arr = doc.at("methods");
        if (!arr.is_array()) fail("methods", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto& entry = arr[i];
            const std::string path = "methods[" + std::to_string(i) + "]";
            MethodSpec spec;
            spec.train = base;
            if (entry.is_string()) {
                spec.train.method = losses::parse_method(entry.get<std::string>());
                spec.name = entry.get<std::string>();
            } else if (entry.is_object()) {
                auto keys = kTrainKeys;
                keys.push_back("method");
                keys.push_back("name");
                check_keys(entry, path, keys);
                if (!entry.contains("method")) fail(path, "missing required key \"method\"");
                const std::string method = get_string(entry, path, "method", "");
                try {
                    spec.train.method = losses::parse_method(method);
                } catch (const ParameterError& e) {
                    fail(join_path(path, "method"), e.what());
                }
                apply_train_keys(entry, path, spec.train);
                spec.name = get_string(entry, path, "name", method);
            } else {
                fail(path, "expected a method name or an object");
            }
            cfg.methods.push_back(std::move(spec));
        }
    } else {
        MethodSpec spec;
        spec.train = base;
        spec.name = losses::method_name(base.method);
        cfg.methods.push_back(std::move(spec));
    }

    if (doc.contains("seeds")) {
        const auto& arr = doc.at("seeds");
        if (!arr.is_array()) fail("seeds", "expected an array of integers");
        for (const auto& v : arr) {
            if (!v.is_number_integer() || v.get<long long>() < 0)
                fail("seeds", "expected nonnegative integers");
            cfg.seeds.push_back(v.get<std::uint64_t>());
        }
    } else {
        cfg.seeds = {1};
    }

    cfg.output_dir = get_string(doc, "", "output_dir", cfg.output_dir);
    cfg.summary_last_k = get_size(doc, "", "summary_last_k", cfg.summary_last_k);
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream oss;
    oss << in.rdbuf();
    return parse_config(oss.str());
}

}  // namespace colearn::config
