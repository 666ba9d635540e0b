// Command-line front end over the shared-library C API.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "colearn/colearn.h"

namespace {

int report_failure(colearn_status status) {
    std::fprintf(stderr, "error: %s\n", colearn_error_message());
    return static_cast<int>(status);
}

int run_with_options(const std::string& config_path, const std::string& output_dir,
                     std::size_t jobs, bool resume, bool corrupt_mode) {
    colearn_experiment* exp = nullptr;
    colearn_status status = colearn_experiment_create_from_file(config_path.c_str(), &exp);
    if (status != COLEARN_OK) return report_failure(status);
    if (!output_dir.empty()) {
        status = colearn_experiment_set_output_dir(exp, output_dir.c_str());
        if (status != COLEARN_OK) {
            colearn_experiment_destroy(exp);
            return report_failure(status);
        }
    }
    colearn_experiment_set_jobs(exp, jobs);
    colearn_experiment_set_resume(exp, resume ? 1 : 0);
    status = corrupt_mode ? colearn_experiment_corrupt(exp) : colearn_experiment_run(exp);
    colearn_experiment_destroy(exp);
    if (status != COLEARN_OK) return report_failure(status);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Co-training laboratory for learning with noisy labels"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(colearn_version()));

    std::string config_path, output_dir;
    std::size_t jobs = 1;
    bool resume = false;

    auto* run = app.add_subcommand("run", "Run every (method, seed) cell of a config");
    run->add_option("config", config_path, "JSON experiment config")->required();
    run->add_option("--output-dir", output_dir, "Override the config's output directory");
    run->add_option("--jobs", jobs, "Parallel cells")->check(CLI::PositiveNumber);
    run->add_flag("--resume", resume, "Skip cells with an existing .done marker");

    auto* corrupt = app.add_subcommand("corrupt", "Write the corrupted datasets and exit");
    corrupt->add_option("config", config_path, "JSON experiment config")->required();
    corrupt->add_option("--output-dir", output_dir, "Override the config's output directory");

    auto* gradcheck =
        app.add_subcommand("gradcheck", "Finite-difference check of the full loss gradient");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (gradcheck->parsed()) {
        static char report[16384];
        const colearn_status status = colearn_gradcheck(report, sizeof(report));
        std::fputs(report, stdout);
        if (status != COLEARN_OK) return report_failure(status);
        return 0;
    }
    return run_with_options(config_path, output_dir, jobs, resume, corrupt->parsed());
}
