#include <algorithm>
#include <cmath>

#include "colearn/metrics.hpp"
#include "colearn/noise.hpp"
#include "colearn/synthetic.hpp"
#include "colearn/trainer.hpp"
#include "doctest.h"

using namespace colearn;

namespace {

std::pair<data::ImageDataset, data::ImageDataset> small_data(std::uint64_t seed) {
    data::SyntheticParams p;
    p.num_classes = 4;
    p.n_train = 24;
    p.n_test = 16;
    p.side = 8;
    p.seed = seed;
    return data::generate_synthetic(p);
}

model::ModelParams random_model(const data::ImageDataset& ds, std::uint64_t seed) {
    model::NetworkConfig cfg;
    cfg.input_dim = ds.image_bytes();
    cfg.encoder_widths = {8};
    cfg.projection_dim = 4;
    cfg.num_classes = ds.num_classes;
    return model::init_params(cfg, seed);
}

}  // namespace

TEST_CASE("test_accuracy") {
    const auto [train_ds, test_ds] = small_data(31);
    const auto params = random_model(test_ds, 3);

    SUBCASE("equals an independent scalar recount of argmax matches") {
        const auto preds = eval::predict_labels(params, test_ds, nullptr);
        REQUIRE(preds.size() == test_ds.size());
        double hits = 0.0;
        for (std::size_t i = 0; i < preds.size(); ++i)
            if (preds[i] == test_ds.clean_labels[i]) hits += 1.0;
        CHECK(eval::test_accuracy(params, test_ds, nullptr) ==
              doctest::Approx(hits / static_cast<double>(test_ds.size())).epsilon(1e-12));
    }
    SUBCASE("constant predictor scores 1 on a single-class set") {
        data::ImageDataset one;
        one.height = one.width = 8;
        one.channels = 3;
        one.num_classes = 4;
        for (std::size_t i = 0; i < 5; ++i) one.push_image(test_ds.image(i), 2);
        auto p = random_model(one, 4);
        for (auto& v : p.classifier_weight.data()) v = 0.0;
        p.classifier_bias.data() = {0.0, 0.0, 5.0, 0.0};
        CHECK(eval::test_accuracy(p, one, nullptr) == 1.0);
    }
    SUBCASE("invariant to sample order") {
        data::ImageDataset reversed;
        reversed.height = test_ds.height;
        reversed.width = test_ds.width;
        reversed.channels = test_ds.channels;
        reversed.num_classes = test_ds.num_classes;
        for (std::size_t i = test_ds.size(); i-- > 0;)
            reversed.push_image(test_ds.image(i), test_ds.clean_labels[i]);
        CHECK(eval::test_accuracy(params, reversed, nullptr) ==
              eval::test_accuracy(params, test_ds, nullptr));
    }
    SUBCASE("empty test set rejected") {
        data::ImageDataset empty;
        empty.height = empty.width = 8;
        empty.channels = 3;
        empty.num_classes = 4;
        CHECK_THROWS_AS(eval::test_accuracy(params, empty, nullptr), ParameterError);
    }
    SUBCASE("untrained model sits near chance level") {
        data::SyntheticParams p;
        p.num_classes = 4;
        p.n_train = 4;
        p.n_test = 400;
        p.side = 8;
        p.seed = 33;
        const auto [tiny_train, wide_test] = data::generate_synthetic(p);
        (void)tiny_train;
        const auto fresh = random_model(wide_test, 5);
        const double acc = eval::test_accuracy(fresh, wide_test, nullptr);
        CHECK(acc > 0.05);
        CHECK(acc < 0.60);
    }
}

TEST_CASE("memorization metrics") {
    auto [train_ds, test_ds] = small_data(41);

    SUBCASE("clean dataset reports -1 for the corrupted subset") {
        const auto params = random_model(train_ds, 6);
        const auto [clean_acc, memo] = eval::memorization_metrics(params, train_ds, nullptr);
        CHECK(clean_acc >= 0.0);
        CHECK(memo == -1.0);
    }
    SUBCASE("fully corrupted dataset reports -1 for the clean subset") {
        auto all_noisy = train_ds;
        for (std::size_t i = 0; i < all_noisy.size(); ++i) {
            all_noisy.noisy_labels[i] =
                static_cast<std::uint8_t>((all_noisy.clean_labels[i] + 1) % 4);
            all_noisy.corruption_mask[i] = 1;
        }
        const auto params = random_model(all_noisy, 7);
        const auto [clean_acc, memo] = eval::memorization_metrics(params, all_noisy, nullptr);
        CHECK(clean_acc == -1.0);
        CHECK(memo >= 0.0);
        CHECK(memo <= 1.0);
    }
    SUBCASE("a model that predicts the noisy label memorizes at rate 1") {
        // Single corrupted sample; bias forces its noisy label everywhere.
        auto ds = train_ds;
        ds.noisy_labels[0] = static_cast<std::uint8_t>((ds.clean_labels[0] + 1) % 4);
        ds.corruption_mask[0] = 1;
        auto p = random_model(ds, 8);
        for (auto& v : p.classifier_weight.data()) v = 0.0;
        p.classifier_bias.data().assign(4, 0.0);
        p.classifier_bias.data()[ds.noisy_labels[0]] = 5.0;
        const auto [clean_acc, memo] = eval::memorization_metrics(p, ds, nullptr);
        CHECK(memo == 1.0);
        // The same constant predictor scores the noisy-class frequency on the
        // clean subset.
        double hits = 0.0, n = 0.0;
        for (std::size_t i = 1; i < ds.size(); ++i) {
            if (ds.clean_labels[i] == ds.noisy_labels[0]) hits += 1.0;
            n += 1.0;
        }
        CHECK(clean_acc == doctest::Approx(hits / n).epsilon(1e-12));
    }
    SUBCASE("mask agreement after corruption") {
        const auto corrupted =
            data::corrupt_labels(train_ds, data::build_symmetric(4, 0.5), 17);
        const auto params = random_model(corrupted, 9);
        const auto [clean_acc, memo] = eval::memorization_metrics(params, corrupted, nullptr);
        CHECK(clean_acc >= 0.0);
        CHECK(clean_acc <= 1.0);
        CHECK(memo >= 0.0);
        CHECK(memo <= 1.0);
    }
}

TEST_CASE("last-k summaries") {
    SUBCASE("constant trace gives the constant and zero spread") {
        const std::vector<std::vector<double>> traces = {{0.8, 0.8, 0.8, 0.8}};
        const auto [mean, sd] = eval::last_k_summary_values(traces, 2);
        CHECK(mean == 0.8);
        CHECK(sd == 0.0);
    }
    SUBCASE("two seeds with last-k means 0.6 and 0.8") {
        const std::vector<std::vector<double>> traces = {{0.0, 0.5, 0.7},
                                                         {0.0, 0.9, 0.7}};
        const auto [mean, sd] = eval::last_k_summary_values(traces, 2);
        CHECK(mean == doctest::Approx(0.7).epsilon(1e-12));
        // Sample standard deviation of {0.6, 0.8}.
        CHECK(sd == doctest::Approx(std::sqrt(2.0) * 0.1).epsilon(1e-9));
    }
    SUBCASE("k equal to the trace length uses every epoch") {
        const std::vector<std::vector<double>> traces = {{0.2, 0.4, 0.6}};
        const auto [mean, sd] = eval::last_k_summary_values(traces, 3);
        CHECK(mean == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(sd == 0.0);
    }
    SUBCASE("seed order does not change the result") {
        const std::vector<std::vector<double>> a = {{0.1, 0.3}, {0.5, 0.7}, {0.2, 0.9}};
        const std::vector<std::vector<double>> b = {{0.2, 0.9}, {0.1, 0.3}, {0.5, 0.7}};
        CHECK(eval::last_k_summary_values(a, 2) == eval::last_k_summary_values(b, 2));
    }
    SUBCASE("invalid inputs") {
        CHECK_THROWS_AS(eval::last_k_summary_values({}, 2), ParameterError);
        CHECK_THROWS_AS(eval::last_k_summary_values({{0.1}}, 2), ParameterError);
        CHECK_THROWS_AS(eval::last_k_summary_values({{0.1, 0.2}}, 0), ParameterError);
    }
    SUBCASE("MetricsRow overload extracts test accuracy") {
        std::vector<eval::MetricsRow> trace(3);
        trace[0].test_accuracy = 0.1;
        trace[1].test_accuracy = 0.5;
        trace[2].test_accuracy = 0.7;
        const auto [mean, sd] = eval::last_k_summary({trace}, 2);
        CHECK(mean == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(sd == 0.0);
    }
}
