#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "colearn/colearn.h"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const char* kTinyConfig = R"({
  "dataset": {"source": "synthetic", "num_classes": 4, "n_train": 12, "n_test": 8, "side": 8},
  "noise": {"kind": "symmetric", "rate": 0.5},
  "methods": ["standard_ce"],
  "seeds": [1],
  "summary_last_k": 2,
  "train": {"epochs": 2, "batch_size": 6}
})";

}  // namespace

TEST_CASE("experiment lifecycle") {
    colearn_experiment* exp = nullptr;
    REQUIRE(colearn_experiment_create(kTinyConfig, &exp) == COLEARN_OK);
    REQUIRE(exp != nullptr);
    CHECK(std::string(colearn_error_message()).empty());

    const fs::path dir = fs::temp_directory_path() / "colearn_capi_run";
    fs::remove_all(dir);
    CHECK(colearn_experiment_set_output_dir(exp, dir.string().c_str()) == COLEARN_OK);
    CHECK(colearn_experiment_set_jobs(exp, 1) == COLEARN_OK);
    CHECK(colearn_experiment_set_resume(exp, 0) == COLEARN_OK);
    CHECK(colearn_experiment_run(exp) == COLEARN_OK);
    CHECK(fs::exists(dir / "standard_ce_s1.csv"));
    CHECK(fs::exists(dir / "summary.csv"));

    // A resumed rerun succeeds and keeps the artifacts in place.
    CHECK(colearn_experiment_set_resume(exp, 1) == COLEARN_OK);
    CHECK(colearn_experiment_run(exp) == COLEARN_OK);
    CHECK(fs::exists(dir / "standard_ce_s1.done"));

    colearn_experiment_destroy(exp);
    fs::remove_all(dir);
}

TEST_CASE("corrupt-only entry point") {
    colearn_experiment* exp = nullptr;
    REQUIRE(colearn_experiment_create(kTinyConfig, &exp) == COLEARN_OK);
    const fs::path dir = fs::temp_directory_path() / "colearn_capi_corrupt";
    fs::remove_all(dir);
    CHECK(colearn_experiment_set_output_dir(exp, dir.string().c_str()) == COLEARN_OK);
    CHECK(colearn_experiment_corrupt(exp) == COLEARN_OK);
    CHECK(fs::exists(dir / "train.clds"));
    CHECK(fs::exists(dir / "test.clds"));
    colearn_experiment_destroy(exp);
    fs::remove_all(dir);
}

TEST_CASE("configuration errors") {
    colearn_experiment* exp = nullptr;
    SUBCASE("malformed JSON") {
        CHECK(colearn_experiment_create("{", &exp) == COLEARN_ERR_CONFIG);
        CHECK(exp == nullptr);
        CHECK(std::string(colearn_error_message()).find("JSON") != std::string::npos);
    }
    SUBCASE("unknown key reported with the path") {
        CHECK(colearn_experiment_create(R"({"sedes": [1]})", &exp) == COLEARN_ERR_CONFIG);
        const std::string msg = colearn_error_message();
        CHECK(msg.find("sedes") != std::string::npos);
        CHECK(msg.find("seeds") != std::string::npos);
    }
    SUBCASE("missing config file") {
        CHECK(colearn_experiment_create_from_file("/nonexistent/config.json", &exp) !=
              COLEARN_OK);
        CHECK(std::strlen(colearn_error_message()) > 0);
    }
    SUBCASE("null arguments") {
        CHECK(colearn_experiment_create(nullptr, &exp) == COLEARN_ERR_CONFIG);
        CHECK(colearn_experiment_create(kTinyConfig, nullptr) == COLEARN_ERR_CONFIG);
        CHECK(colearn_experiment_set_output_dir(nullptr, "x") == COLEARN_ERR_CONFIG);
        CHECK(colearn_experiment_run(nullptr) == COLEARN_ERR_CONFIG);
        CHECK(colearn_experiment_corrupt(nullptr) == COLEARN_ERR_CONFIG);
        colearn_experiment_destroy(nullptr);  // must be a safe no-op
    }
    SUBCASE("zero jobs rejected") {
        REQUIRE(colearn_experiment_create(kTinyConfig, &exp) == COLEARN_OK);
        CHECK(colearn_experiment_set_jobs(exp, 0) == COLEARN_ERR_CONFIG);
        CHECK(std::strlen(colearn_error_message()) > 0);
        colearn_experiment_destroy(exp);
    }
}

TEST_CASE("runtime errors") {
    colearn_experiment* exp = nullptr;
    REQUIRE(colearn_experiment_create(kTinyConfig, &exp) == COLEARN_OK);
    REQUIRE(colearn_experiment_set_output_dir(exp, "/proc/colearn_cannot_write") ==
            COLEARN_OK);
    CHECK(colearn_experiment_run(exp) == COLEARN_ERR_RUNTIME);
    CHECK(std::strlen(colearn_error_message()) > 0);
    colearn_experiment_destroy(exp);
}

TEST_CASE("gradient check") {
    char buf[16384];
    CHECK(colearn_gradcheck(buf, sizeof buf) == COLEARN_OK);
    const std::string report = buf;
    CHECK(report.find("PASS") != std::string::npos);
    CHECK(report.find("FAIL") == std::string::npos);

    SUBCASE("truncation keeps the buffer NUL-terminated") {
        char tiny[8];
        std::memset(tiny, 'x', sizeof tiny);
        colearn_gradcheck(tiny, sizeof tiny);
        CHECK(tiny[sizeof tiny - 1] == '\0');
    }
    SUBCASE("null buffer rejected") {
        CHECK(colearn_gradcheck(nullptr, 0) == COLEARN_ERR_CONFIG);
    }
}

TEST_CASE("version string") {
    REQUIRE(colearn_version() != nullptr);
    CHECK(std::string(colearn_version()) == "1.0.0");
}
