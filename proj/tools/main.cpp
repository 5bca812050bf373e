#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "surfsub/error.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kDivergence = 3, kSolver = 4 };

void add_common(CLI::App* app, surfsub::cli::CommonOptions& opts) {
    app->add_option("--config", opts.config, "INI configuration file")->check(CLI::ExistingFile);
    app->add_option("--override", opts.overrides, "section.key=value, applied after the file");
    app->add_option("--out", opts.out, "output directory")->capture_default_str();
    app->add_option("--workers", opts.workers, "worker threads for sweeps")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled surface-subsurface flow: convergence analysis and simulation"};
    app.require_subcommand(1);

    surfsub::cli::CommonOptions opts;
    std::optional<std::string> preset;
    std::optional<double> cr_threshold;

    auto* presets = app.add_subcommand("presets", "list scenario and soil presets");
    auto* analyze = app.add_subcommand("analyze", "closed-form convergence factor sweep");
    auto* linrun = app.add_subcommand("linrun", "linear column coupling runs");
    auto* simulate = app.add_subcommand("simulate", "nonlinear coupled simulation");
    for (auto* sub : {analyze, linrun, simulate}) add_common(sub, opts);
    simulate->add_option("--preset", preset, "scenario preset (overrides [scenario] preset)");
    simulate->add_option("--cr-exclude-threshold", cr_threshold, "drop CR_n above this from the time average");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*presets) return surfsub::cli::cmd_presets();
        if (*analyze) return surfsub::cli::cmd_analyze(opts);
        if (*linrun) return surfsub::cli::cmd_linrun(opts);
        return surfsub::cli::cmd_simulate(opts, preset, cr_threshold);
    } catch (const surfsub::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const surfsub::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return kDivergence;
    } catch (const surfsub::Error& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolver;
    }
}
