#include "colearn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "colearn/cifar10.hpp"
#include "colearn/svg.hpp"

namespace colearn::experiment {

namespace fs = std::filesystem;

std::pair<data::ImageDataset, data::ImageDataset> build_datasets(
    const config::ExperimentConfig& cfg) {
    data::ImageDataset train, test;
    if (cfg.dataset.source == config::DatasetSource::synthetic) {
        auto pair = data::generate_synthetic(cfg.dataset.synthetic);
        train = std::move(pair.first);
        test = std::move(pair.second);
    } else {
        train = data::load_cifar10_binary(cfg.dataset.train_paths);
        test = data::load_cifar10_binary(cfg.dataset.test_paths);
    }
    if (cfg.noise.kind) {
        const auto q = cfg.noise.build(train.num_classes);
        train = data::corrupt_labels(train, q, cfg.dataset.data_seed);
    }
    return {std::move(train), std::move(test)};
}

std::string format_csv_row(const eval::MetricsRow& row) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%zu,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g", row.epoch,
                  row.l_sup, row.l_int, row.l_str, row.l_total, row.test_accuracy,
                  row.clean_subset_train_acc, row.noisy_subset_memorization);
    return buf;
}

namespace {

constexpr const char* kCsvHeader =
    "epoch,l_sup,l_int,l_str,l_total,test_acc,clean_train_acc,memorization";

void write_trace_csv(const std::string& path, const std::vector<eval::MetricsRow>& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write trace CSV: " + path);
    out << kCsvHeader << "\n";
    for (const auto& row : trace) out << format_csv_row(row) << "\n";
    if (!out) throw IoError("failed writing trace CSV: " + path);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << text;
    if (!out) throw IoError("failed writing file: " + path);
}

}  // namespace

std::vector<eval::MetricsRow> read_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read trace CSV: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw FormatError("unexpected trace CSV header in " + path);
    std::vector<eval::MetricsRow> trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        eval::MetricsRow row;
        unsigned long epoch = 0;
        if (std::sscanf(line.c_str(), "%lu,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &epoch, &row.l_sup,
                        &row.l_int, &row.l_str, &row.l_total, &row.test_accuracy,
                        &row.clean_subset_train_acc, &row.noisy_subset_memorization) != 8)
            throw FormatError("malformed trace CSV row in " + path);
        row.epoch = epoch;
        trace.push_back(row);
    }
    return trace;
}

RunArtifacts run_experiment(const config::ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    const std::string outdir = opts.output_dir.empty() ? cfg.output_dir : opts.output_dir;

    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory: " + outdir);
    // Fail before any training if the directory is not writable.
    {
        const std::string probe = (fs::path(outdir) / ".probe").string();
        std::ofstream p(probe, std::ios::binary);
        if (!p) throw IoError("output directory is not writable: " + outdir);
        p.close();
        fs::remove(probe, ec);
    }

    const auto [train_ds, test_ds] = build_datasets(cfg);

    struct Cell {
        std::size_t method_index;
        std::uint64_t seed;
        std::string name;
    };
    std::vector<Cell> cells;
    for (std::size_t m = 0; m < cfg.methods.size(); ++m)
        for (const auto seed : cfg.seeds)
            cells.push_back(
                {m, seed, cfg.methods[m].name + "_s" + std::to_string(seed)});

    RunArtifacts artifacts;
    for (const auto& cell : cells) {
        artifacts.trace_csvs.push_back((fs::path(outdir) / (cell.name + ".csv")).string());
        artifacts.checkpoints.push_back((fs::path(outdir) / (cell.name + ".clmp")).string());
    }

    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            const Cell& cell = cells[i];
            const std::string csv_path = artifacts.trace_csvs[i];
            const std::string ckpt_path = artifacts.checkpoints[i];
            const std::string done_path = (fs::path(outdir) / (cell.name + ".done")).string();
            try {
                if (opts.resume && fs::exists(done_path) && fs::exists(csv_path)) {
                    std::lock_guard<std::mutex> lock(log_mutex);
                    std::fprintf(stderr, "[colearn] %s: already complete, skipping\n",
                                 cell.name.c_str());
                    continue;
                }
                train::TrainConfig tc = cfg.methods[cell.method_index].train;
                tc.seed = cell.seed;
                train::TrainerState state;
                const auto trace = train::run_training(tc, train_ds, test_ds, &state);
                write_trace_csv(csv_path, trace);
                model::save_checkpoint(state.params, ckpt_path);
                write_text_file(done_path, "done\n");
                std::lock_guard<std::mutex> lock(log_mutex);
                std::fprintf(stderr, "[colearn] %s: done (final test_acc %.4f)\n",
                             cell.name.c_str(), trace.back().test_accuracy);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const std::size_t jobs = std::max<std::size_t>(1, opts.jobs);
    if (jobs == 1 || cells.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(jobs, cells.size()); ++t)
            pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // Summary and plots are recomputed from the CSV bytes so that fresh and
    // resumed runs agree exactly.
    std::vector<std::vector<std::vector<eval::MetricsRow>>> traces(cfg.methods.size());
    std::size_t min_epochs = std::string::npos;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        auto trace = read_trace_csv(artifacts.trace_csvs[i]);
        min_epochs = std::min(min_epochs, trace.size());
        traces[cells[i].method_index].push_back(std::move(trace));
    }
    const std::size_t k = std::min(cfg.summary_last_k, min_epochs);

    artifacts.summary_csv = (fs::path(outdir) / "summary.csv").string();
    {
        std::ostringstream out;
        out << "method,test_acc_mean,test_acc_std\n";
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            const auto [mean, sd] = eval::last_k_summary(traces[m], k);
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s,%.6g,%.6g\n", cfg.methods[m].name.c_str(),
                          mean, sd);
            out << buf;
        }
        write_text_file(artifacts.summary_csv, out.str());
    }

    struct Metric {
        const char* name;
        double eval::MetricsRow::* field;
    };
    const Metric metrics[] = {
        {"test_acc", &eval::MetricsRow::test_accuracy},
        {"l_sup", &eval::MetricsRow::l_sup},
        {"l_int", &eval::MetricsRow::l_int},
        {"l_str", &eval::MetricsRow::l_str},
        {"l_total", &eval::MetricsRow::l_total},
        {"clean_train_acc", &eval::MetricsRow::clean_subset_train_acc},
        {"memorization", &eval::MetricsRow::noisy_subset_memorization},
    };
    for (const auto& metric : metrics) {
        std::vector<plot::Series> series;
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            plot::Series s;
            s.name = cfg.methods[m].name;
            const std::size_t n_seeds = traces[m].size();
            for (std::size_t e = 0; e < min_epochs; ++e) {
                double mean = 0.0;
                for (const auto& trace : traces[m]) mean += trace[e].*metric.field;
                mean /= static_cast<double>(n_seeds);
                double var = 0.0;
                for (const auto& trace : traces[m]) {
                    const double d = trace[e].*metric.field - mean;
                    var += d * d;
                }
                const double sd =
                    n_seeds > 1 ? std::sqrt(var / static_cast<double>(n_seeds - 1)) : 0.0;
                s.mean.push_back(mean);
                s.band.push_back(sd);
            }
            series.push_back(std::move(s));
        }
        const std::string path = (fs::path(outdir) / (std::string(metric.name) + ".svg")).string();
        plot::emit_svg_plot(series, metric.name, path);
        artifacts.svg_paths.push_back(path);
    }
    return artifacts;
}

void corrupt_only(const config::ExperimentConfig& cfg, const RunOptions& opts) {
    const std::string outdir = opts.output_dir.empty() ? cfg.output_dir : opts.output_dir;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory: " + outdir);
    const auto [train_ds, test_ds] = build_datasets(cfg);
    data::save_clds(train_ds, (fs::path(outdir) / "train.clds").string());
    data::save_clds(test_ds, (fs::path(outdir) / "test.clds").string());
}

bool run_gradient_check(std::string& report) {
    // Fixed fixture: 4 samples of 8x8x1, 3 classes, full co-training loss with
    // the default loss knobs. The network is small so every parameter can be
    // finite-differenced quickly.
    constexpr std::size_t b = 4, dim = 64, c = 3;
    model::NetworkConfig net;
    net.input_dim = dim;
    net.encoder_widths = {32, 16};
    net.projection_dim = 8;
    net.num_classes = c;
    model::ModelParams params = model::init_params(net, hash_tag(42, "init"));

    Rng rng(hash_tag(42, "gradcheck"));
    model::BatchViews views;
    views.batch = b;
    views.input_dim = dim;
    views.num_classes = c;
    views.weak.resize(b * dim);
    views.strong1.resize(b * dim);
    views.strong2.resize(b * dim);
    views.labels_onehot.assign(b * c, 0.0);
    for (auto& v : views.weak) v = rng.uniform(-1.0, 1.0);
    for (auto& v : views.strong1) v = rng.uniform(-1.0, 1.0);
    for (auto& v : views.strong2) v = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < b; ++i) views.labels_onehot[i * c + i % c] = 1.0;

    losses::LossConfig loss_cfg;
    Rng mix_rng(hash_tag(42, "mixup"));
    const losses::MixupDraw draw =
        losses::draw_mixup(b, loss_cfg.alpha, loss_cfg.per_sample_lambda, mix_rng);

    auto forward = [&]() {
        ad::Tape tape;
        tape.grad_enabled = false;
        return losses::method_loss(tape, losses::Method::colearning, views, params, loss_cfg,
                                   &draw)
            .values.total;
    };

    params.zero_grad();
    {
        ad::Tape tape;
        auto loss = losses::method_loss(tape, losses::Method::colearning, views, params,
                                        loss_cfg, &draw);
        tape.backward(loss.total);
    }

    constexpr double step = 1e-6, rel_tol = 1e-4, abs_tol = 1e-7;
    bool ok = true;
    std::size_t total = 0;
    std::ostringstream out;
    out << "full-loss gradient check: " << params.parameter_count() << " parameters, step "
        << step << "\n";
    for (auto named : params.all()) {
        double worst = 0.0;
        std::size_t worst_idx = 0;
        bool tensor_ok = true;
        auto& data = named.tensor.data();
        const auto& grad = named.tensor.grad();
        for (std::size_t i = 0; i < data.size(); ++i, ++total) {
            const double saved = data[i];
            data[i] = saved + step;
            const double up = forward();
            data[i] = saved - step;
            const double down = forward();
            data[i] = saved;
            const double fd = (up - down) / (2.0 * step);
            const double diff = std::abs(grad[i] - fd);
            const double tol = std::max(rel_tol * std::abs(fd), abs_tol);
            const double score = diff / tol;
            if (score > worst) {
                worst = score;
                worst_idx = i;
            }
            if (diff > tol) tensor_ok = false;
        }
        out << "  " << named.name << ": " << (tensor_ok ? "ok" : "FAIL")
            << " (worst diff/tol " << worst << " at index " << worst_idx << ")\n";
        if (!tensor_ok) ok = false;
    }
    out << (ok ? "PASS" : "FAIL") << ": " << total << " parameters checked\n";
    report += out.str();
    return ok;
}

}  // namespace colearn::experiment
