#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sectorhomog/config.hpp"
#include "sectorhomog/error.hpp"
#include "sectorhomog/experiments.hpp"

namespace {

int exit_code(sectorhomog::ErrorKind kind)
{
    using sectorhomog::ErrorKind;
    switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Io: return 3;
    default: return 4;
    }
}

void report(std::string_view kind, const std::string& what)
{
    nlohmann::json j = {{"error", kind}, {"message", what}};
    std::cerr << j.dump() << '\n';
}

int thread_count(int cli)
{
    if (cli > 0) {
        return cli;
    }
    if (const char* env = std::getenv("SECTOR_HOMOG_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) {
                return n;
            }
        } catch (const std::exception&) {
        }
        throw sectorhomog::Error(sectorhomog::ErrorKind::Config,
                                 "SECTOR_HOMOG_THREADS must be a positive integer");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Corner-adapted two-scale expansion experiments on sectors"};
    std::string experiment;
    std::string config_file;
    std::string out_dir;
    int threads = 0;
    app.add_option("experiment", experiment, "cell | gain | corrector-growth | excess-decay | gamma-recovery | extend-check")
        ->required();
    app.add_option("--config", config_file, "JSON configuration")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output root (overrides the config)");
    app.add_option("--threads", threads, "worker threads (default: SECTOR_HOMOG_THREADS, else all)")
        ->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    try {
        auto config = sectorhomog::load_config(config_file, experiment);
        if (!out_dir.empty()) {
            config.output = out_dir;
            sectorhomog::refresh_resolved(config);
        }
        const int n = thread_count(threads);
#ifdef _OPENMP
        if (n > 0) {
            omp_set_num_threads(n);
        }
#else
        (void)n;
#endif
        const auto result = sectorhomog::run(config, std::cerr);
        std::cout << result.directory.string() << '\n';
    } catch (const sectorhomog::Error& e) {
        report(sectorhomog::to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        report("internal", e.what());
        return 5;
    }
    return 0;
}
