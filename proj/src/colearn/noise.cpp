#include "colearn/noise.hpp"

#include <cmath>
#include <set>
#include <string>

#include "colearn/rng.hpp"

namespace colearn::data {

void TransitionMatrix::validate() const {
    for (std::size_t i = 0; i < num_classes; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < num_classes; ++j) {
            const double e = at(i, j);
            if (e < 0.0 || e > 1.0)
                throw ParameterError("transition matrix entry outside [0,1]");
            row_sum += e;
        }
        if (std::fabs(row_sum - 1.0) > 1e-12)
            throw ParameterError("transition matrix row " + std::to_string(i) +
                                 " does not sum to 1");
    }
}

namespace {

TransitionMatrix identity_matrix(std::size_t c) {
    TransitionMatrix q;
    q.num_classes = c;
    q.entries.assign(c * c, 0.0);
    for (std::size_t i = 0; i < c; ++i) q.entries[i * c + i] = 1.0;
    return q;
}

void check_rate(double p) {
    if (p < 0.0 || p > 1.0) throw ParameterError("noise rate must be in [0,1]");
}

}  // namespace

TransitionMatrix build_symmetric(std::size_t num_classes, double p, bool include_true_class) {
    if (num_classes < 2) throw ParameterError("symmetric noise needs at least 2 classes");
    check_rate(p);
    TransitionMatrix q = identity_matrix(num_classes);
    q.noise_rate = p;
    q.kind = NoiseKind::symmetric;
    const std::size_t c = num_classes;
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            if (include_true_class)
                q.entries[i * c + j] =
                    (i == j) ? 1.0 - p + p / static_cast<double>(c) : p / static_cast<double>(c);
            else
                q.entries[i * c + j] =
                    (i == j) ? 1.0 - p : p / static_cast<double>(c - 1);
        }
    q.validate();
    return q;
}

TransitionMatrix build_asymmetric_pairmap(
    std::size_t num_classes, double p,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    check_rate(p);
    TransitionMatrix q = identity_matrix(num_classes);
    q.noise_rate = p;
    q.kind = NoiseKind::asymmetric_pairmap;
    std::set<std::size_t> seen;
    for (const auto& [s, t] : pairs) {
        if (s >= num_classes || t >= num_classes)
            throw ParameterError("pair map class index out of range");
        if (s == t) throw ParameterError("pair map source equals target");
        if (!seen.insert(s).second)
            throw ParameterError("duplicate source class " + std::to_string(s));
        q.entries[s * num_classes + s] = 1.0 - p;
        q.entries[s * num_classes + t] = p;
    }
    q.validate();
    return q;
}

TransitionMatrix build_asymmetric_circular(std::size_t num_classes, double p) {
    if (num_classes < 2) throw ParameterError("circular noise needs at least 2 classes");
    check_rate(p);
    TransitionMatrix q = identity_matrix(num_classes);
    q.noise_rate = p;
    q.kind = NoiseKind::asymmetric_circular;
    for (std::size_t i = 0; i < num_classes; ++i) {
        q.entries[i * num_classes + i] = 1.0 - p;
        q.entries[i * num_classes + (i + 1) % num_classes] += p;
    }
    q.validate();
    return q;
}

std::vector<std::pair<std::size_t, std::size_t>> cifar10_pair_map() {
    return {{9, 1}, {2, 0}, {4, 7}, {3, 5}};
}

ImageDataset corrupt_labels(const ImageDataset& ds, const TransitionMatrix& q,
                            std::uint64_t seed) {
    if (q.num_classes != ds.num_classes)
        throw ParameterError("transition matrix size does not match dataset classes");
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (ds.noisy_labels[i] != ds.clean_labels[i])
            throw ParameterError("corrupt_labels: dataset already corrupted");
    q.validate();

    ImageDataset out = ds;
    const std::uint64_t base = hash_tag(seed, "noise");
    for (std::size_t i = 0; i < out.size(); ++i) {
        // Per-sample stream keyed by index: order-independent and stable.
        Rng rng(hash_combine(base, i));
        const double u = rng.uniform();
        const std::size_t row = out.clean_labels[i];
        double cum = 0.0;
        std::size_t drawn = q.num_classes - 1;
        for (std::size_t j = 0; j < q.num_classes; ++j) {
            cum += q.at(row, j);
            if (u < cum) {
                drawn = j;
                break;
            }
        }
        out.noisy_labels[i] = static_cast<std::uint8_t>(drawn);
        out.corruption_mask[i] = out.noisy_labels[i] != out.clean_labels[i] ? 1 : 0;
    }
    return out;
}

}  // namespace colearn::data
