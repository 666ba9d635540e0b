#include "colearn/colearn.h"

#include <cstring>
#include <string>

#include "colearn/experiment.hpp"

namespace {

thread_local std::string g_error;

void set_error(const std::string& msg) { g_error = msg; }

// ConfigError (and anything raised while interpreting user input) maps to the
// config status; every other failure is a runtime error.
template <typename Fn>
colearn_status guarded(Fn&& fn) {
    try {
        fn();
        g_error.clear();
        return COLEARN_OK;
    } catch (const colearn::ConfigError& e) {
        set_error(e.what());
        return COLEARN_ERR_CONFIG;
    } catch (const std::exception& e) {
        set_error(e.what());
        return COLEARN_ERR_RUNTIME;
    } catch (...) {
        set_error("unknown error");
        return COLEARN_ERR_RUNTIME;
    }
}

}  // namespace

struct colearn_experiment {
    colearn::config::ExperimentConfig config;
    colearn::experiment::RunOptions options;
};

extern "C" {

colearn_status colearn_experiment_create(const char* json_text, colearn_experiment** out) {
    if (json_text == nullptr || out == nullptr) {
        set_error("null argument");
        return COLEARN_ERR_CONFIG;
    }
    *out = nullptr;
    return guarded([&] {
        auto exp = new colearn_experiment;
        try {
            exp->config = colearn::config::parse_config(json_text);
        } catch (...) {
            delete exp;
            throw;
        }
        *out = exp;
    });
}

colearn_status colearn_experiment_create_from_file(const char* path,
                                                   colearn_experiment** out) {
    if (path == nullptr || out == nullptr) {
        set_error("null argument");
        return COLEARN_ERR_CONFIG;
    }
    *out = nullptr;
    return guarded([&] {
        auto exp = new colearn_experiment;
        try {
            exp->config = colearn::config::parse_config_file(path);
        } catch (...) {
            delete exp;
            throw;
        }
        *out = exp;
    });
}

void colearn_experiment_destroy(colearn_experiment* exp) { delete exp; }

colearn_status colearn_experiment_set_output_dir(colearn_experiment* exp, const char* dir) {
    if (exp == nullptr || dir == nullptr) {
        set_error("null argument");
        return COLEARN_ERR_CONFIG;
    }
    exp->options.output_dir = dir;
    g_error.clear();
    return COLEARN_OK;
}

colearn_status colearn_experiment_set_jobs(colearn_experiment* exp, size_t jobs) {
    if (exp == nullptr || jobs == 0) {
        set_error(exp == nullptr ? "null argument" : "jobs must be positive");
        return COLEARN_ERR_CONFIG;
    }
    exp->options.jobs = jobs;
    g_error.clear();
    return COLEARN_OK;
}

colearn_status colearn_experiment_set_resume(colearn_experiment* exp, int resume) {
    if (exp == nullptr) {
        set_error("null argument");
        return COLEARN_ERR_CONFIG;
    }
    exp->options.resume = resume != 0;
    g_error.clear();
    return COLEARN_OK;
}

colearn_status colearn_experiment_run(colearn_experiment* exp) {
    if (exp == nullptr) {
        set_error("null argument");
        return COLEARN_ERR_CONFIG;
    }
    return guarded([&] { colearn::experiment::run_experiment(exp->config, exp->options); });
}

colearn_status colearn_experiment_corrupt(colearn_experiment* exp) {
    if (exp == nullptr) {
        set_error("null argument");
        return COLEARN_ERR_CONFIG;
    }
    return guarded([&] { colearn::experiment::corrupt_only(exp->config, exp->options); });
}

colearn_status colearn_gradcheck(char* buf, size_t buf_len) {
    if (buf == nullptr || buf_len == 0) {
        set_error("gradcheck: null or empty report buffer");
        return COLEARN_ERR_CONFIG;
    }
    bool ok = false;
    const colearn_status status = guarded([&] {
        std::string report;
        ok = colearn::experiment::run_gradient_check(report);
        if (buf != nullptr && buf_len > 0) {
            const size_t n = report.size() < buf_len - 1 ? report.size() : buf_len - 1;
            std::memcpy(buf, report.data(), n);
            buf[n] = '\0';
        }
    });
    if (status != COLEARN_OK) return status;
    if (!ok) {
        set_error("gradient check failed");
        return COLEARN_ERR_RUNTIME;
    }
    return COLEARN_OK;
}

const char* colearn_error_message(void) { return g_error.c_str(); }

const char* colearn_version(void) { return "1.0.0"; }

}  // extern "C"
