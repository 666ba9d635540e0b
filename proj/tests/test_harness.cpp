#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "colearn/dataset.hpp"
#include "colearn/experiment.hpp"
#include "doctest.h"

using namespace colearn;
namespace fs = std::filesystem;

namespace {

const char* kTinyConfig = R"({
  "dataset": {"source": "synthetic", "num_classes": 4, "n_train": 16, "n_test": 8, "side": 8},
  "noise": {"kind": "symmetric", "rate": 0.5},
  "methods": ["colearning", "standard_ce"],
  "seeds": [1, 2],
  "summary_last_k": 2,
  "train": {"epochs": 2, "batch_size": 8}
})";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const char* tag) {
    const fs::path dir = fs::temp_directory_path() / tag;
    fs::remove_all(dir);
    return dir;
}

std::map<std::string, std::string> dir_bytes(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() != ".done" &&
            entry.path().extension() != ".clmp")
            out[entry.path().filename().string()] = read_file(entry.path().string());
    return out;
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("minimal document fills documented defaults") {
        const auto cfg = config::parse_config("{}");
        CHECK(cfg.dataset.source == config::DatasetSource::synthetic);
        CHECK(!cfg.noise.kind.has_value());
        REQUIRE(cfg.methods.size() == 1);
        CHECK(cfg.methods[0].name == "colearning");
        CHECK(cfg.methods[0].train.epochs == 30);
        CHECK(cfg.methods[0].train.batch_size == 16);
        CHECK(cfg.seeds == std::vector<std::uint64_t>{1});
        CHECK(cfg.output_dir == "out");
        CHECK(cfg.summary_last_k == 10);
    }
    SUBCASE("range errors name the full key path") {
        try {
            config::parse_config(R"({"noise": {"kind": "symmetric", "rate": 1.5}})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("noise.rate") != std::string::npos);
        }
    }
    SUBCASE("unknown keys get a nearest-key suggestion") {
        try {
            config::parse_config(R"({"train": {"tua": 0.3}})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("tua") != std::string::npos);
            CHECK(msg.find("tau") != std::string::npos);
        }
    }
    SUBCASE("duplicate cell names rejected") {
        CHECK_THROWS_AS(
            config::parse_config(R"({"methods": ["colearning", "colearning"]})"),
            ConfigError);
    }
    SUBCASE("malformed JSON rejected") {
        CHECK_THROWS_AS(config::parse_config("{"), ConfigError);
    }
    SUBCASE("edit distance") {
        CHECK(config::levenshtein("tau", "tau") == 0);
        CHECK(config::levenshtein("tua", "tau") == 2);
        CHECK(config::levenshtein("", "abc") == 3);
        CHECK(config::levenshtein("kitten", "sitting") == 3);
    }
}

TEST_CASE("csv round-trip") {
    eval::MetricsRow row;
    row.epoch = 7;
    row.l_sup = 1.234567;
    row.l_int = 4.5;
    row.l_str = -0.25;
    row.l_total = 5.484567;
    row.test_accuracy = 0.8125;
    row.clean_subset_train_acc = 0.5;
    row.noisy_subset_memorization = -1.0;

    const fs::path path = fs::temp_directory_path() / "colearn_trace.csv";
    {
        std::ofstream out(path);
        out << "epoch,l_sup,l_int,l_str,l_total,test_acc,clean_train_acc,memorization\n";
        out << experiment::format_csv_row(row) << "\n";
    }
    const auto rows = experiment::read_trace_csv(path.string());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].epoch == 7);
    // Values survive the %.6g round-trip to six significant digits.
    CHECK(rows[0].l_sup == doctest::Approx(row.l_sup).epsilon(1e-5));
    CHECK(rows[0].test_accuracy == doctest::Approx(row.test_accuracy).epsilon(1e-5));
    CHECK(rows[0].noisy_subset_memorization == -1.0);
    fs::remove(path);

    SUBCASE("header mismatch rejected") {
        const fs::path bad = fs::temp_directory_path() / "colearn_bad.csv";
        std::ofstream(bad) << "epoch,l_sup\n";
        CHECK_THROWS_AS(experiment::read_trace_csv(bad.string()), FormatError);
        fs::remove(bad);
    }
}

TEST_CASE("experiment runs") {
    const auto cfg = config::parse_config(kTinyConfig);

    SUBCASE("produces the full artifact set") {
        const fs::path dir = fresh_dir("colearn_harness_run");
        experiment::RunOptions opts;
        opts.output_dir = dir.string();
        const auto artifacts = experiment::run_experiment(cfg, opts);

        CHECK(artifacts.trace_csvs.size() == 4);  // 2 methods x 2 seeds
        CHECK(artifacts.checkpoints.size() == 4);
        CHECK(artifacts.svg_paths.size() == 7);
        for (const auto& p : artifacts.trace_csvs) CHECK(fs::exists(p));
        for (const auto& p : artifacts.svg_paths) CHECK(fs::exists(p));
        REQUIRE(fs::exists(artifacts.summary_csv));

        // Summary values equal the last-k statistic recomputed from the traces.
        const std::string summary = read_file(artifacts.summary_csv);
        CHECK(summary.rfind("method,test_acc_mean,test_acc_std\n", 0) == 0);
        for (const std::string method : {"colearning", "standard_ce"}) {
            std::vector<std::vector<double>> acc;
            for (int seed : {1, 2}) {
                const auto rows = experiment::read_trace_csv(
                    (dir / (method + "_s" + std::to_string(seed) + ".csv")).string());
                REQUIRE(rows.size() == 2);
                acc.push_back({});
                for (const auto& r : rows) acc.back().push_back(r.test_accuracy);
            }
            const auto [mean, sd] = eval::last_k_summary_values(acc, 2);
            char expected[128];
            std::snprintf(expected, sizeof expected, "%s,%.6g,%.6g\n", method.c_str(),
                          mean, sd);
            CHECK(summary.find(expected) != std::string::npos);
        }

        // Each SVG is a complete, escaped XML document with a polyline per cell.
        for (const auto& p : artifacts.svg_paths) {
            const std::string svg = read_file(p);
            CHECK(svg.rfind("<?xml", 0) == 0);
            CHECK(svg.find("<svg") != std::string::npos);
            CHECK(svg.find("</svg>") != std::string::npos);
            CHECK(svg.find("<polyline") != std::string::npos);
        }
        fs::remove_all(dir);
    }
    SUBCASE("reruns are byte-identical and jobs do not change the output") {
        const fs::path a = fresh_dir("colearn_harness_a");
        const fs::path b = fresh_dir("colearn_harness_b");
        const fs::path c = fresh_dir("colearn_harness_c");
        experiment::RunOptions oa, ob, oc;
        oa.output_dir = a.string();
        ob.output_dir = b.string();
        oc.output_dir = c.string();
        oc.jobs = 2;
        experiment::run_experiment(cfg, oa);
        experiment::run_experiment(cfg, ob);
        experiment::run_experiment(cfg, oc);
        CHECK(dir_bytes(a) == dir_bytes(b));
        CHECK(dir_bytes(a) == dir_bytes(c));
        fs::remove_all(a);
        fs::remove_all(b);
        fs::remove_all(c);
    }
    SUBCASE("resume skips completed cells and reproduces the same bytes") {
        const fs::path dir = fresh_dir("colearn_harness_resume");
        experiment::RunOptions opts;
        opts.output_dir = dir.string();
        experiment::run_experiment(cfg, opts);
        const auto before = dir_bytes(dir);

        // Delete one cell; a resumed run must redo exactly that cell. A valid
        // but fabricated CSV marks a cell that must be skipped, not retrained.
        fs::remove(dir / "colearning_s2.csv");
        fs::remove(dir / "colearning_s2.done");
        const std::string sentinel =
            "epoch,l_sup,l_int,l_str,l_total,test_acc,clean_train_acc,memorization\n"
            "0,1,1,1,3,0.999,0.999,0\n"
            "1,1,1,1,3,0.999,0.999,0\n";
        std::ofstream(dir / "standard_ce_s1.csv", std::ios::trunc) << sentinel;

        opts.resume = true;
        experiment::run_experiment(cfg, opts);
        CHECK(read_file((dir / "colearning_s2.csv").string()) ==
              before.at("colearning_s2.csv"));
        // The completed cell was skipped, so the fabricated trace survives.
        CHECK(read_file((dir / "standard_ce_s1.csv").string()) == sentinel);
        fs::remove_all(dir);
    }
    SUBCASE("unwritable output directory fails before training") {
        experiment::RunOptions opts;
        opts.output_dir = "/proc/colearn_cannot_write";
        CHECK_THROWS_AS(experiment::run_experiment(cfg, opts), IoError);
    }
}

TEST_CASE("corrupt-only mode") {
    const auto cfg = config::parse_config(kTinyConfig);
    const fs::path dir = fresh_dir("colearn_harness_corrupt");
    experiment::RunOptions opts;
    opts.output_dir = dir.string();
    experiment::corrupt_only(cfg, opts);

    const auto train = data::load_clds((dir / "train.clds").string());
    const auto test = data::load_clds((dir / "test.clds").string());
    CHECK(train.size() == 16);
    CHECK(test.size() == 8);
    train.validate();
    test.validate();
    // Symmetric 0.5 noise flips some training labels but never test labels.
    std::size_t flipped = 0;
    for (auto m : train.corruption_mask) flipped += m;
    CHECK(flipped > 0);
    for (auto m : test.corruption_mask) CHECK(m == 0);

    // The on-disk labels match a direct rebuild of the same config.
    const auto [mem_train, mem_test] = experiment::build_datasets(cfg);
    CHECK(train.noisy_labels == mem_train.noisy_labels);
    fs::remove_all(dir);
}

TEST_CASE("gradient check harness") {
    std::string report;
    const bool ok = experiment::run_gradient_check(report);
    CHECK(ok);
    CHECK(report.find("PASS") != std::string::npos);
    CHECK(report.find("FAIL") == std::string::npos);
}
