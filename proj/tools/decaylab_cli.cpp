#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include "decaylab/catalog.hpp"
#include "decaylab/config.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/parallel.hpp"

namespace {

constexpr int kExitConfig = 2;

int report_validation(const decaylab::ValidationError& e) {
    std::cerr << "configuration error at " << e.key_path() << ": " << e.what() << "\n";
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks of dispersive decay estimates"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 1;

    auto* run = app.add_subcommand("run", "Run one catalog experiment");
    run->add_option("--config", config_path, "Experiment config file")->required();
    run->add_option("--out", out_dir, "Report directory (default: $DECAYLAB_OUT, else output.dir, else ./reports/<id>)");
    run->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 256));

    auto* list = app.add_subcommand("list", "List the experiment catalog");

    auto* validate = app.add_subcommand("validate", "Check a config file without running it");
    validate->add_option("--config", config_path, "Experiment config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (*list) {
        for (const auto& e : decaylab::list_catalog()) std::printf("%-22s %s\n%-22s   %s\n", e.id.c_str(), e.description.c_str(), "", e.anchor.c_str());
        return 0;
    }

    try {
        const auto cfg = decaylab::ExperimentConfig::load(config_path);
        const auto resolved = cfg.resolved();
        if (*validate) {
            std::cout << resolved.emit();
            return 0;
        }
        decaylab::set_thread_count(threads);
        std::string dir = out_dir;
        if (dir.empty()) {
            if (const char* env = std::getenv("DECAYLAB_OUT")) dir = std::string(env) + "/" + resolved.id();
            else if (resolved.has("output.dir")) dir = resolved.get_string("output.dir");
            else dir = "reports/" + resolved.id();
        }
        const auto report = decaylab::run(cfg);
        decaylab::write_report(report, dir);
        for (const auto& c : report.checks)
            std::printf("%s  %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        if (!report.error.empty()) std::printf("STOPPED  %s\n", report.error.c_str());
        std::printf("report written to %s (%.1f s)\n", dir.c_str(), report.wall_clock_seconds);
        return report.exit_code();
    } catch (const decaylab::ValidationError& e) {
        return report_validation(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
