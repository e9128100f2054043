#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "unisplit/experiment.hpp"

namespace {

int fail(const std::string& kind, const std::string& message, int code) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reversible complex-coefficient splitting experiments"};
    app.set_version_flag("--version", std::string(unisplit::version));
    std::string experiment, config_path, out_dir;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    app.add_option("experiment", experiment,
                   "SCHEMES_LIST, VALIDATE, DH_SWEEP, CONSERVATION, EFFICIENCY, ORDER or RKN_CHECK")
        ->required();
    app.add_option("--config", config_path, "experiment config (JSON)")->required();
    app.add_option("--out", out_dir, "artifact directory (overrides the config's output)");
    app.add_option("--seed", seed, "matrix seed override");
    app.add_option("--threads", threads, "worker threads for sweep cells")->check(CLI::Range(1u, 1024u));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    unisplit::ExperimentConfig cfg;
    unisplit::RunOutcome outcome;
    try {
        std::ifstream f(config_path);
        if (!f) return fail("invalid_config", "cannot open config file '" + config_path + "'", 2);
        nlohmann::json j;
        try {
            f >> j;
        } catch (const nlohmann::json::exception& e) {
            return fail("invalid_config", std::string("malformed JSON: ") + e.what(), 2);
        }
        cfg = unisplit::parse_config(j, unisplit::experiment_from_string(experiment), seed);
        if (!out_dir.empty()) cfg.output = out_dir;
        outcome = unisplit::run(cfg, threads);
    } catch (const unisplit::UsageError& e) {
        return fail("invalid_config", e.what(), 2);
    } catch (const unisplit::ValidationError& e) {
        return fail("invalid_config", e.what(), 2);
    } catch (const std::exception& e) {
        return fail("runtime_error", e.what(), 1);
    }

    try {
        unisplit::write_artifacts(outcome, cfg.output);
    } catch (const std::exception& e) {
        return fail("io_error", e.what(), 1);
    }
    std::cout << outcome.out;
    if (outcome.error) std::cerr << outcome.error->dump() << "\n";
    return outcome.exit_code;
}
