#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gsim/config.hpp"
#include "gsim/run.hpp"

namespace {

int execute(gsim::Scenario scenario, const std::string& config_path,
            std::optional<std::uint64_t> seed_override, const std::string& out_prefix,
            std::optional<int> threads_override) {
    gsim::RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config file '" << config_path << "'\n";
            return 2;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            cfg = gsim::parse_config(buf.str(), scenario);
        } catch (const gsim::ConfigError& e) {
            std::cerr << "error: config: " << config_path << ": " << e.what() << "\n";
            return 2;
        }
    } else if (scenario != gsim::Scenario::Selftest) {
        std::cerr << "error: config: --config is required for this subcommand\n";
        return 2;
    }
    cfg.scenario = scenario;
    if (seed_override) cfg.seed = *seed_override;
    if (threads_override) cfg.threads = *threads_override;
    return gsim::run_scenario(cfg, out_prefix, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermal-light ghost imaging and HBT correlation simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_prefix = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;

    app.add_option("--config", config_path, "configuration file")->expected(1);
    app.add_option("--seed", seed, "master seed (overrides the config file)");
    app.add_option("--out", out_prefix, "output path prefix");
    app.add_option("--threads", threads, "worker thread cap");

    // the global flags may appear after the subcommand; let unmatched
    // options fall through to the parent parser
    app.add_subcommand("hbt", "intensity-interferometry run: TAC histogram, fit, g2(0)")
        ->fallthrough();
    app.add_subcommand("ghost", "Monte Carlo ghost-imaging scan")->fallthrough();
    app.add_subcommand("check-lens", "validate the bench geometry against the lens equation")
        ->fallthrough();
    app.add_subcommand("ideal-curve", "analytic reference curve for the ghost scan")
        ->fallthrough();
    app.add_subcommand("selftest", "run the built-in statistical oracle suite")->fallthrough();

    CLI11_PARSE(app, argc, argv);

    const std::string sub = app.get_subcommands().front()->get_name();
    const auto scenario = gsim::scenario_from_name(sub);
    if (!scenario) {
        std::cerr << "error: unknown subcommand\n";
        return 2;
    }
    return execute(*scenario, config_path, seed, out_prefix, threads);
}
