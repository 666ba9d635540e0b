#include "colearn/metrics.hpp"

#include <cmath>

namespace colearn::eval {

std::vector<std::uint8_t> predict_labels(const model::ModelParams& params,
                                         const data::ImageDataset& ds,
                                         const augment::ChannelStats* stats) {
    const std::size_t n = ds.size();
    const std::size_t dim = ds.image_bytes();
    const std::size_t c = params.config.num_classes;
    std::vector<std::uint8_t> out(n);

    constexpr std::size_t kChunk = 256;
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t b = std::min(kChunk, n - start);
        std::vector<double> batch(b * dim);
        for (std::size_t i = 0; i < b; ++i) {
            const auto row = augment::normalize_only(ds.image(start + i), stats);
            std::copy(row.begin(), row.end(), batch.begin() + i * dim);
        }
        ad::Tape tape;
        tape.grad_enabled = false;
        ad::Tensor x = ad::Tensor::leaf({b, dim}, std::move(batch));
        ad::Tensor logits = model::classify_logits(tape, model::encode(tape, x, params), params);
        for (std::size_t i = 0; i < b; ++i) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < c; ++j)
                if (logits.data()[i * c + j] > logits.data()[i * c + best]) best = j;
            out[start + i] = static_cast<std::uint8_t>(best);
        }
    }
    return out;
}

double test_accuracy(const model::ModelParams& params, const data::ImageDataset& test_ds,
                     const augment::ChannelStats* stats) {
    if (test_ds.size() == 0) throw ParameterError("test_accuracy: empty test set");
    const auto preds = predict_labels(params, test_ds, stats);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i] == test_ds.clean_labels[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(preds.size());
}

std::pair<double, double> memorization_metrics(const model::ModelParams& params,
                                               const data::ImageDataset& train_ds,
                                               const augment::ChannelStats* stats) {
    const auto preds = predict_labels(params, train_ds, stats);
    std::size_t clean_n = 0, clean_correct = 0, noisy_n = 0, noisy_memorized = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (train_ds.corruption_mask[i]) {
            ++noisy_n;
            if (preds[i] == train_ds.noisy_labels[i]) ++noisy_memorized;
        } else {
            ++clean_n;
            if (preds[i] == train_ds.clean_labels[i]) ++clean_correct;
        }
    }
    const double clean_acc =
        clean_n == 0 ? -1.0 : static_cast<double>(clean_correct) / static_cast<double>(clean_n);
    const double memorization =
        noisy_n == 0 ? -1.0 : static_cast<double>(noisy_memorized) / static_cast<double>(noisy_n);
    return {clean_acc, memorization};
}

std::pair<double, double> last_k_summary_values(const std::vector<std::vector<double>>& traces,
                                                std::size_t k) {
    if (traces.empty()) throw ParameterError("last_k_summary: no traces");
    if (k == 0) throw ParameterError("last_k_summary: k must be positive");
    std::vector<double> seed_means;
    for (const auto& trace : traces) {
        if (trace.size() < k)
            throw ParameterError("last_k_summary: trace shorter than k");
        double acc = 0.0;
        for (std::size_t i = trace.size() - k; i < trace.size(); ++i) acc += trace[i];
        seed_means.push_back(acc / static_cast<double>(k));
    }
    double mean = 0.0;
    for (double v : seed_means) mean += v;
    mean /= static_cast<double>(seed_means.size());
    double var = 0.0;
    for (double v : seed_means) var += (v - mean) * (v - mean);
    const double std_dev = seed_means.size() > 1
                               ? std::sqrt(var / static_cast<double>(seed_means.size() - 1))
                               : 0.0;
    return {mean, std_dev};
}

std::pair<double, double> last_k_summary(const std::vector<std::vector<MetricsRow>>& traces,
                                         std::size_t k) {
    std::vector<std::vector<double>> acc;
    for (const auto& trace : traces) {
        std::vector<double> vals;
        for (const auto& row : trace) vals.push_back(row.test_accuracy);
        acc.push_back(std::move(vals));
    }
    return last_k_summary_values(acc, k);
}

}  // namespace colearn::eval
