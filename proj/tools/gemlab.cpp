#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "gemlab/config.hpp"
#include "gemlab/runner.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    bool enforce_asserts = false;
    bool plotdata = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment config file")->required();
    cmd->add_option("--out", flags.out_dir, "output directory (overrides output.dir)");
    cmd->add_option("--seed", flags.seed, "master seed (overrides the config)");
    cmd->add_flag("--assert", flags.enforce_asserts,
                  "return nonzero when the config's assert thresholds fail");
    cmd->add_flag("--plotdata", flags.plotdata, "also emit plot-data CSV artifacts");
}

int execute(const CommonFlags& flags, std::initializer_list<gem::RunKind> accepted) {
    gem::ExperimentConfig config = gem::validate_config(flags.config_path);
    bool ok = false;
    for (gem::RunKind kind : accepted) ok = ok || config.kind == kind;
    if (!ok) {
        std::cerr << "config kind '" << gem::run_kind_name(config.kind)
                  << "' does not match this subcommand\n";
        return 2;
    }
    if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
    if (flags.seed >= 0) {
        config.seed = static_cast<std::uint64_t>(flags.seed);
        config.seed_set = true;
    }
    if (flags.plotdata) config.emit_plotdata = true;

    const gem::RunManifest manifest = gem::run(config);
    for (const auto& [metric, value] : manifest.metrics)
        std::printf("%-24s %.9g\n", metric.c_str(), value);
    std::printf("artifacts: %zu -> %s/manifest.json\n", manifest.artifacts.size(),
                config.output_dir.c_str());

    if (!manifest.asserts_passed) {
        for (const std::string& failure : manifest.assert_failures)
            std::cerr << "assert failed: " << failure << "\n";
        if (flags.enforce_asserts) return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gemlab: gradient echo memory simulation and analysis"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string validate_path;

    CLI::App* simulate = app.add_subcommand("simulate", "solve the memory dynamics");
    CLI::App* raman = app.add_subcommand("raman", "synthesize/fit Raman absorption spectra");
    CLI::App* decay = app.add_subcommand("decay-fit", "fit efficiency decay models");
    CLI::App* tomo = app.add_subcommand("tomography", "heterodyne tomography pipeline");
    CLI::App* tv = app.add_subcommand("tv", "T-V channel benchmarking");
    CLI::App* compare = app.add_subcommand("compare", "memory vs fiber comparison report");
    CLI::App* validate = app.add_subcommand("validate", "parse a config and echo it resolved");
    for (CLI::App* cmd : {simulate, raman, decay, tomo, tv, compare}) add_common(cmd, flags);
    validate->add_option("--config", validate_path, "experiment config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            const gem::ExperimentConfig config = gem::validate_config(validate_path);
            std::cout << gem::canonical_config(config);
            return 0;
        }
        if (simulate->parsed())
            return execute(flags, {gem::RunKind::simulate, gem::RunKind::simulate_4wm});
        if (raman->parsed()) return execute(flags, {gem::RunKind::raman});
        if (decay->parsed()) return execute(flags, {gem::RunKind::decay_fit});
        if (tomo->parsed()) return execute(flags, {gem::RunKind::tomography});
        if (tv->parsed()) return execute(flags, {gem::RunKind::tv});
        if (compare->parsed()) return execute(flags, {gem::RunKind::compare});
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
