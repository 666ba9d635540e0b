#include "colearn/trainer.hpp"

#include <cmath>
#include <string>

namespace colearn::train {

void TrainConfig::validate() const {
    if (epochs == 0) throw ParameterError("train: epochs must be positive");
    if (batch_size < 2) throw ParameterError("train: batch_size must be >= 2");
    if (adam.lr <= 0.0) throw ParameterError("train: lr must be positive");
    if (decay_start_fraction < 0.0 || decay_start_fraction > 1.0)
        throw ParameterError("train: decay_start_fraction must be in [0, 1]");
    transform.validate();
}

TrainerState init_state(const TrainConfig& cfg, const data::ImageDataset& train_ds) {
    model::NetworkConfig net;
    net.input_dim = train_ds.image_bytes();
    net.num_classes = train_ds.num_classes;
    net.validate();
    TrainerState state;
    state.params = model::init_params(net, hash_tag(cfg.seed, "init"));
    state.adam = AdamState::for_params(state.params);
    return state;
}

namespace {

bool method_needs_strong(losses::Method m) {
    return m != losses::Method::standard_ce && m != losses::Method::ce_mixup;
}

bool method_needs_mixup(losses::Method m) {
    return m == losses::Method::colearning || m == losses::Method::ce_mixup;
}

// Stream seed for (purpose, epoch, index, view): independent of the order in
// which samples are visited.
std::uint64_t stream_seed(std::uint64_t base, std::size_t a, std::size_t b, std::size_t c) {
    return hash_combine(hash_combine(hash_combine(base, a), b), c);
}

}  // namespace

EpochStats train_epoch(TrainerState& state, const TrainConfig& cfg,
                       const data::ImageDataset& train_ds,
                       const augment::ChannelStats* stats, std::size_t epoch) {
    const std::size_t n = train_ds.size();
    const std::size_t dim = train_ds.image_bytes();
    const std::size_t c = train_ds.num_classes;
    const bool needs_strong = method_needs_strong(cfg.method);
    const bool needs_mixup = method_needs_mixup(cfg.method);

    augment::TransformParams weak = cfg.transform;
    weak.is_strong = false;
    augment::TransformParams strong = cfg.transform;
    strong.is_strong = true;

    Rng shuffle_rng(hash_combine(hash_tag(cfg.seed, "shuffle"), epoch));
    const auto order = shuffle_rng.permutation(n);
    const std::uint64_t aug_base = hash_tag(cfg.seed, "aug");
    const std::uint64_t mix_base = hash_tag(cfg.seed, "mixup");
    const double lr_t = lr_at(epoch, cfg.epochs, cfg.adam.lr, cfg.decay_start_fraction);

    EpochStats stats_out;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start + 2 <= n; start += cfg.batch_size, ++batch_index) {
        const std::size_t b = std::min(cfg.batch_size, n - start);
        if (b < 2) break;

        model::BatchViews views;
        views.batch = b;
        views.input_dim = dim;
        views.num_classes = c;
        views.weak.resize(b * dim);
        views.labels_onehot.assign(b * c, 0.0);
        if (needs_strong) {
            views.strong1.resize(b * dim);
            views.strong2.resize(b * dim);
        }
        for (std::size_t i = 0; i < b; ++i) {
            const std::size_t idx = order[start + i];
            const data::Image img = train_ds.image(idx);
            Rng r1(stream_seed(aug_base, epoch, idx, 1));
            const auto x1 = augment::apply_view(img, weak, r1, stats);
            std::copy(x1.begin(), x1.end(), views.weak.begin() + i * dim);
            if (needs_strong) {
                Rng r2(stream_seed(aug_base, epoch, idx, 2));
                Rng r3(stream_seed(aug_base, epoch, idx, 3));
                const auto x2 = augment::apply_view(img, strong, r2, stats);
                const auto x3 = augment::apply_view(img, strong, r3, stats);
                std::copy(x2.begin(), x2.end(), views.strong1.begin() + i * dim);
                std::copy(x3.begin(), x3.end(), views.strong2.begin() + i * dim);
            }
            views.labels_onehot[i * c + train_ds.noisy_labels[idx]] = 1.0;
        }

        losses::MixupDraw draw;
        if (needs_mixup) {
            Rng mix_rng(stream_seed(mix_base, epoch, batch_index, 0));
            draw = losses::draw_mixup(b, cfg.loss.alpha, cfg.loss.per_sample_lambda, mix_rng);
        }

        ad::Tape tape;
        const auto loss = losses::method_loss(tape, cfg.method, views, state.params, cfg.loss,
                                              needs_mixup ? &draw : nullptr);
        if (!std::isfinite(loss.values.total))
            throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) +
                                ", batch " + std::to_string(batch_index));
        state.params.zero_grad();
        tape.backward(loss.total);
        adam_step(state.params, state.adam, lr_t, cfg.adam);

        stats_out.l_sup += loss.values.l_sup;
        stats_out.l_int += loss.values.l_int;
        stats_out.l_str += loss.values.l_str;
        stats_out.l_total += loss.values.total;
        stats_out.batches += 1;
    }
    if (stats_out.batches > 0) {
        const auto nb = static_cast<double>(stats_out.batches);
        stats_out.l_sup /= nb;
        stats_out.l_int /= nb;
        stats_out.l_str /= nb;
        stats_out.l_total /= nb;
    }
    return stats_out;
}

std::vector<eval::MetricsRow> run_training(
    const TrainConfig& cfg, const data::ImageDataset& train_ds,
    const data::ImageDataset& test_ds, TrainerState* out_state,
    const std::function<void(const eval::MetricsRow&)>& on_epoch) {
    cfg.validate();
    train_ds.validate();
    test_ds.validate();
    if (train_ds.size() < 2) throw ParameterError("train: training set must have >= 2 samples");

    augment::ChannelStats stats_storage;
    const augment::ChannelStats* stats = nullptr;
    if (cfg.standardize) {
        stats_storage = augment::compute_channel_stats(train_ds);
        stats = &stats_storage;
    }
    TrainerState state = init_state(cfg, train_ds);

    std::vector<eval::MetricsRow> trace;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const EpochStats es = train_epoch(state, cfg, train_ds, stats, epoch);
        eval::MetricsRow row;
        row.epoch = epoch;
        row.l_sup = es.l_sup;
        row.l_int = es.l_int;
        row.l_str = es.l_str;
        row.l_total = es.l_total;
        row.test_accuracy = eval::test_accuracy(state.params, test_ds, stats);
        const auto [clean_acc, memo] = eval::memorization_metrics(state.params, train_ds, stats);
        row.clean_subset_train_acc = clean_acc;
        row.noisy_subset_memorization = memo;
        if (on_epoch) on_epoch(row);
        trace.push_back(row);
    }
    if (out_state) *out_state = std::move(state);
    return trace;
}

}  // namespace colearn::train
