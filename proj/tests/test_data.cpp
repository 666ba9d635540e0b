#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "colearn/cifar10.hpp"
#include "colearn/noise.hpp"
#include "colearn/synthetic.hpp"
#include "doctest.h"
#include "support/stats.hpp"

using namespace colearn;

namespace {

// Minimal dataset with the requested clean labels and 1x1x1 images.
data::ImageDataset tiny_dataset(const std::vector<std::uint8_t>& labels,
                                std::size_t num_classes) {
    data::ImageDataset ds;
    ds.height = ds.width = ds.channels = 1;
    ds.num_classes = num_classes;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        data::Image img{1, 1, 1, {static_cast<std::uint8_t>(i % 251)}};
        ds.push_image(img, labels[i]);
    }
    return ds;
}

data::ImageDataset balanced_dataset(std::size_t n, std::size_t num_classes) {
    std::vector<std::uint8_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::uint8_t>(i % num_classes);
    return tiny_dataset(labels, num_classes);
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("symmetric transition matrix") {
    SUBCASE("p=0 is the identity") {
        const auto q = data::build_symmetric(4, 0.0);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                CHECK(q.at(i, j) == (i == j ? 1.0 : 0.0));
    }
    SUBCASE("C=5 p=0.4 exclude-true") {
        const auto q = data::build_symmetric(5, 0.4);
        for (std::size_t i = 0; i < 5; ++i) {
            double row_sum = 0.0;
            for (std::size_t j = 0; j < 5; ++j) {
                CHECK(q.at(i, j) == doctest::Approx(i == j ? 0.6 : 0.1).epsilon(1e-12));
                row_sum += q.at(i, j);
            }
            CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("C=10 p=0.5 exclude-true") {
        const auto q = data::build_symmetric(10, 0.5);
        CHECK(q.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(q.at(0, 9) == doctest::Approx(0.5 / 9.0).epsilon(1e-12));
    }
    SUBCASE("include-true spreads p over all classes") {
        const auto q = data::build_symmetric(5, 0.4, true);
        CHECK(q.at(2, 2) == doctest::Approx(1.0 - 0.4 + 0.4 / 5.0).epsilon(1e-12));
        CHECK(q.at(2, 0) == doctest::Approx(0.4 / 5.0).epsilon(1e-12));
    }
    SUBCASE("bad arguments") {
        CHECK_THROWS_AS(data::build_symmetric(4, 1.5), ParameterError);
        CHECK_THROWS_AS(data::build_symmetric(4, -0.1), ParameterError);
        CHECK_THROWS_AS(data::build_symmetric(1, 0.2), ParameterError);
    }
}

TEST_CASE("asymmetric pairmap transition matrix") {
    SUBCASE("p=0 is the identity") {
        const auto q = data::build_asymmetric_pairmap(10, 0.0, data::cifar10_pair_map());
        for (std::size_t i = 0; i < 10; ++i) CHECK(q.at(i, i) == 1.0);
    }
    SUBCASE("standard 10-class map at p=0.4") {
        const auto q = data::build_asymmetric_pairmap(10, 0.4, data::cifar10_pair_map());
        CHECK(q.at(9, 9) == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(q.at(9, 1) == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(q.at(2, 0) == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(q.at(4, 7) == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(q.at(3, 5) == doctest::Approx(0.4).epsilon(1e-12));
        for (std::size_t j = 0; j < 10; ++j)
            CHECK(q.at(0, j) == (j == 0 ? 1.0 : 0.0));  // unlisted class: identity row
        q.validate();
    }
    SUBCASE("deterministic flip at p=1") {
        const auto q = data::build_asymmetric_pairmap(3, 1.0, {{0, 1}});
        CHECK(q.at(0, 1) == 1.0);
        CHECK(q.at(0, 0) == 0.0);
    }
    SUBCASE("bad pair lists") {
        CHECK_THROWS_AS(data::build_asymmetric_pairmap(3, 0.2, {{0, 1}, {0, 2}}),
                        ParameterError);
        CHECK_THROWS_AS(data::build_asymmetric_pairmap(3, 0.2, {{1, 1}}), ParameterError);
        CHECK_THROWS_AS(data::build_asymmetric_pairmap(3, 0.2, {{0, 5}}), ParameterError);
    }
}

TEST_CASE("asymmetric circular transition matrix") {
    SUBCASE("C=3 p=0.3") {
        const auto q = data::build_asymmetric_circular(3, 0.3);
        const double expected[3][3] = {{0.7, 0.3, 0.0}, {0.0, 0.7, 0.3}, {0.3, 0.0, 0.7}};
        for (std::size_t i = 0; i < 3; ++i) {
            double row_sum = 0.0;
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(q.at(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-12));
                row_sum += q.at(i, j);
            }
            CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("p=0 is the identity") {
        const auto q = data::build_asymmetric_circular(4, 0.0);
        for (std::size_t i = 0; i < 4; ++i) CHECK(q.at(i, i) == 1.0);
    }
    SUBCASE("two classes swap") {
        const auto q = data::build_asymmetric_circular(2, 0.4);
        CHECK(q.at(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(q.at(0, 1) == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(q.at(1, 0) == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(q.at(1, 1) == doctest::Approx(0.6).epsilon(1e-12));
    }
}

TEST_CASE("corrupt_labels") {
    SUBCASE("identity matrix leaves labels untouched") {
        auto ds = balanced_dataset(50, 5);
        const auto out = data::corrupt_labels(ds, data::build_symmetric(5, 0.0), 3);
        CHECK(out.noisy_labels == out.clean_labels);
        for (auto m : out.corruption_mask) CHECK(m == 0);
    }
    SUBCASE("deterministic given the seed") {
        auto ds = balanced_dataset(200, 10);
        const auto q = data::build_symmetric(10, 0.5);
        const auto a = data::corrupt_labels(ds, q, 11);
        const auto b = data::corrupt_labels(ds, q, 11);
        const auto c = data::corrupt_labels(ds, q, 12);
        CHECK(a.noisy_labels == b.noisy_labels);
        CHECK(a.noisy_labels != c.noisy_labels);
    }
    SUBCASE("clean labels and mask invariant") {
        auto ds = balanced_dataset(500, 10);
        const auto out = data::corrupt_labels(ds, data::build_symmetric(10, 0.5), 5);
        CHECK(out.clean_labels == ds.clean_labels);
        for (std::size_t i = 0; i < out.size(); ++i)
            CHECK(static_cast<bool>(out.corruption_mask[i]) ==
                  (out.noisy_labels[i] != out.clean_labels[i]));
        out.validate();
    }
    SUBCASE("binomial concentration at p=0.5") {
        auto ds = balanced_dataset(10000, 10);
        const auto out = data::corrupt_labels(ds, data::build_symmetric(10, 0.5), 77);
        std::size_t flipped = 0;
        for (auto m : out.corruption_mask) flipped += m;
        const double rate = static_cast<double>(flipped) / 10000.0;
        CHECK(std::abs(rate - 0.5) < 0.015);  // 3 sigma of Binomial(10000, 0.5)
    }
    SUBCASE("chi-square goodness of fit, N=50000") {
        const std::size_t n = 50000, c = 10;
        auto ds = balanced_dataset(n, c);
        const auto q = data::build_symmetric(c, 0.5);
        const auto out = data::corrupt_labels(ds, q, 123);
        // Pool per-row statistics: observed target counts vs N_i * Q[i][j].
        double statistic = 0.0;
        double dof = 0.0;
        for (std::size_t i = 0; i < c; ++i) {
            std::vector<double> observed(c, 0.0);
            double n_i = 0.0;
            for (std::size_t s = 0; s < n; ++s)
                if (out.clean_labels[s] == i) {
                    observed[out.noisy_labels[s]] += 1.0;
                    n_i += 1.0;
                }
            for (std::size_t j = 0; j < c; ++j) {
                const double expected = n_i * q.at(i, j);
                statistic += (observed[j] - expected) * (observed[j] - expected) / expected;
            }
            dof += static_cast<double>(c - 1);
        }
        CHECK(teststats::chi_square_upper_tail(statistic, dof) > 0.001);
    }
    SUBCASE("dimension mismatch rejected") {
        auto ds = balanced_dataset(10, 5);
        CHECK_THROWS_AS(data::corrupt_labels(ds, data::build_symmetric(4, 0.2), 1),
                        ParameterError);
    }
}

TEST_CASE("CIFAR-10 binary loader") {
    SUBCASE("hand-built two-record file round-trips") {
        const std::string path = temp_path("colearn_cifar_fixture.bin");
        std::vector<std::uint8_t> bytes;
        // Record 0: label 3, pixel value derived from (channel, index).
        bytes.push_back(3);
        for (std::size_t ch = 0; ch < 3; ++ch)
            for (std::size_t i = 0; i < 1024; ++i)
                bytes.push_back(static_cast<std::uint8_t>((ch * 89 + i * 7) % 256));
        // Record 1: label 9, constant channels R=10 G=20 B=30.
        bytes.push_back(9);
        for (std::size_t ch = 0; ch < 3; ++ch)
            for (std::size_t i = 0; i < 1024; ++i)
                bytes.push_back(static_cast<std::uint8_t>(10 * (ch + 1)));
        {
            std::ofstream out(path, std::ios::binary);
            out.write(reinterpret_cast<const char*>(bytes.data()),
                      static_cast<std::streamsize>(bytes.size()));
        }
        const auto ds = data::load_cifar10_binary({path});
        REQUIRE(ds.size() == 2);
        CHECK(ds.height == 32);
        CHECK(ds.width == 32);
        CHECK(ds.channels == 3);
        CHECK(ds.num_classes == 10);
        CHECK(ds.clean_labels[0] == 3);
        CHECK(ds.clean_labels[1] == 9);
        CHECK(ds.noisy_labels == ds.clean_labels);
        // Planar-to-interleaved placement: pixel (r, c, ch) = byte ch*1024 + r*32 + c.
        const auto img0 = ds.image(0);
        for (std::size_t r = 0; r < 32; r += 7)
            for (std::size_t col = 0; col < 32; col += 5)
                for (std::size_t ch = 0; ch < 3; ++ch) {
                    const std::size_t planar = ch * 1024 + r * 32 + col;
                    CHECK(img0.at(r, col, ch) ==
                          static_cast<std::uint8_t>((ch * 89 + planar % 1024 * 7) % 256));
                }
        const auto img1 = ds.image(1);
        CHECK(img1.at(17, 4, 0) == 10);
        CHECK(img1.at(17, 4, 1) == 20);
        CHECK(img1.at(17, 4, 2) == 30);
        std::filesystem::remove(path);
    }
    SUBCASE("empty file gives an empty dataset") {
        const std::string path = temp_path("colearn_cifar_empty.bin");
        std::ofstream(path, std::ios::binary).close();
        const auto ds = data::load_cifar10_binary({path});
        CHECK(ds.size() == 0);
        std::filesystem::remove(path);
    }
    SUBCASE("truncated file rejected") {
        const std::string path = temp_path("colearn_cifar_trunc.bin");
        {
            std::ofstream out(path, std::ios::binary);
            std::vector<char> junk(3072, 1);
            out.write(junk.data(), static_cast<std::streamsize>(junk.size()));
        }
        CHECK_THROWS_AS(data::load_cifar10_binary({path}), FormatError);
        std::filesystem::remove(path);
    }
    SUBCASE("out-of-range label rejected") {
        const std::string path = temp_path("colearn_cifar_badlabel.bin");
        {
            std::ofstream out(path, std::ios::binary);
            std::vector<char> rec(3073, 0);
            rec[0] = 11;
            out.write(rec.data(), static_cast<std::streamsize>(rec.size()));
        }
        CHECK_THROWS_AS(data::load_cifar10_binary({path}), FormatError);
        std::filesystem::remove(path);
    }
}

TEST_CASE("synthetic dataset generator") {
    SUBCASE("class balance within one") {
        data::SyntheticParams p;
        p.num_classes = 10;
        p.n_train = 100;
        p.n_test = 50;
        p.side = 8;
        const auto [train, test] = data::generate_synthetic(p);
        std::vector<std::size_t> counts(10, 0);
        for (auto y : train.clean_labels) counts[y] += 1;
        for (auto c : counts) CHECK(c == 10);
        CHECK(test.size() == 50);
    }
    SUBCASE("deterministic given the seed") {
        data::SyntheticParams p;
        p.n_train = 60;
        p.n_test = 20;
        p.side = 8;
        p.seed = 9;
        const auto [a_train, a_test] = data::generate_synthetic(p);
        const auto [b_train, b_test] = data::generate_synthetic(p);
        CHECK(a_train.pixels == b_train.pixels);
        CHECK(a_test.pixels == b_test.pixels);
        CHECK(a_train.clean_labels == b_train.clean_labels);
        p.seed = 10;
        const auto [c_train, c_test] = data::generate_synthetic(p);
        CHECK(a_train.pixels != c_train.pixels);
    }
    SUBCASE("adjacent classes separate by at least 15 levels in some channel mean") {
        data::SyntheticParams p;
        p.num_classes = 10;
        p.n_train = 1000;
        p.n_test = 10;
        p.side = 16;
        const auto [train, test] = data::generate_synthetic(p);
        std::vector<std::array<double, 3>> means(10, {0.0, 0.0, 0.0});
        std::vector<double> counts(10, 0.0);
        for (std::size_t i = 0; i < train.size(); ++i) {
            const auto img = train.image(i);
            const auto k = train.clean_labels[i];
            for (std::size_t px = 0; px < img.pixels.size(); px += 3)
                for (std::size_t ch = 0; ch < 3; ++ch)
                    means[k][ch] += img.pixels[px + ch];
            counts[k] += static_cast<double>(img.pixels.size() / 3);
        }
        for (std::size_t k = 0; k < 10; ++k)
            for (auto& m : means[k]) m /= counts[k];
        for (std::size_t k = 0; k < 10; ++k) {
            const auto& a = means[k];
            const auto& b = means[(k + 1) % 10];
            const double sep = std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]),
                                         std::abs(a[2] - b[2])});
            CAPTURE(k);
            CHECK(sep >= 15.0);
        }
    }
    SUBCASE("parameter validation") {
        data::SyntheticParams p;
        p.num_classes = 20;  // above the supported 16
        CHECK_THROWS_AS(data::generate_synthetic(p), ParameterError);
        data::SyntheticParams q;
        q.side = 4;  // below the minimum of 8
        CHECK_THROWS_AS(data::generate_synthetic(q), ParameterError);
    }
}

TEST_CASE("dataset binary round-trip") {
    data::SyntheticParams p;
    p.num_classes = 6;
    p.n_train = 40;
    p.n_test = 10;
    p.side = 8;
    auto [train, test] = data::generate_synthetic(p);
    train = data::corrupt_labels(train, data::build_symmetric(6, 0.4), 2);

    const std::string path = temp_path("colearn_roundtrip.clds");
    data::save_clds(train, path);
    const auto loaded = data::load_clds(path);
    CHECK(loaded.height == train.height);
    CHECK(loaded.width == train.width);
    CHECK(loaded.channels == train.channels);
    CHECK(loaded.num_classes == train.num_classes);
    CHECK(loaded.pixels == train.pixels);
    CHECK(loaded.clean_labels == train.clean_labels);
    CHECK(loaded.noisy_labels == train.noisy_labels);
    CHECK(loaded.corruption_mask == train.corruption_mask);
    std::filesystem::remove(path);

    SUBCASE("missing file") { CHECK_THROWS_AS(data::load_clds("/nonexistent.clds"), IoError); }
}
