#include "cli_config.hpp"
#include "commands.hpp"

#include "impactkit/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

namespace {

using impactkit::cli::RunConfig;

void add_common_options(CLI::App* sub, RunConfig& config, std::string& config_file) {
    sub->add_option("--config", config_file, "JSON config file; explicit flags override");
    sub->add_option("--dist", config.dist, "size law, e.g. pareto:beta=1.5");
    sub->add_option("--horizon", config.horizon, "schedule length (default: support max)");
    sub->add_option("--r0", config.r0, "impact of the first lot");
    sub->add_option("--rtilde1", config.rtilde1, "impact scale constant");
    sub->add_option("--density", config.density,
                    "information density for scale calibration, e.g. uniform:a=0,b=1");
    sub->add_option("--out", config.out, "output path ('-' = stdout)");
    sub->add_option("--format", config.format, "csv|json");
    sub->add_option("--seed", config.seed, "random seed");
}

std::vector<std::string> given_flags(const CLI::App* sub) {
    std::vector<std::string> given;
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->count() == 0) continue;
        std::string name = opt->get_name();
        if (name.rfind("--", 0) == 0) name = name.substr(2);
        given.push_back(name);
    }
    // flag spellings that differ from config keys
    for (auto& name : given) {
        if (name == "eta-scale") name = "eta_scale";
        if (name == "eta-kind") name = "eta_kind";
        if (name == "null-dist") name = "null_dist";
        if (name == "id") name = "figure_id";
    }
    return given;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"equilibrium market-impact schedules and trading-game simulation"};
    app.require_subcommand(1);

    RunConfig config;
    std::string config_file;

    CLI::App* impact = app.add_subcommand("impact", "solve and export an impact schedule");
    add_common_options(impact, config, config_file);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo trading game");
    add_common_options(simulate, config, config_file);
    simulate->add_option("--paths", config.paths, "number of Monte Carlo paths");
    simulate->add_option("--mu", config.mu, "probability a metaorder is present");
    simulate->add_option("--eta-scale", config.eta_scale, "day-trader noise scale");
    simulate->add_option("--eta-kind", config.eta_kind, "gaussian|uniform");
    simulate->add_option("--k", config.k_traders, "number of long-term traders");
    simulate->add_option("--s0", config.s0, "initial price");
    simulate->add_option("--null-dist", config.null_dist, "game-length law when absent");

    CLI::App* verify = app.add_subcommand("verify", "run the identity suite");
    add_common_options(verify, config, config_file);
    verify->add_option("--corrupt", config.corrupt,
                       "negative control, e.g. rtilde:2:x2");
    verify->add_option("--k", config.k_traders, "number of long-term traders");

    CLI::App* figure = app.add_subcommand("figure", "emit plot-ready datasets");
    add_common_options(figure, config, config_file);
    figure->add_option("--id", config.figure_id, "figure id (2 or 3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "error: config: " << e.what() << '\n';
        return impactkit::cli::kExitConfig;
    }

    CLI::App* chosen = app.get_subcommands().front();
    config.command = chosen->get_name();

    if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) {
            std::cerr << "error: config: cannot open config file '" << config_file << "'\n";
            return impactkit::cli::kExitConfig;
        }
        std::ostringstream text;
        text << in.rdbuf();
        try {
            config = impactkit::cli::merge_config_file(config, text.str(),
                                                       given_flags(chosen));
        } catch (const impactkit::config_error& e) {
            std::cerr << "error: config: " << e.what() << '\n';
            return impactkit::cli::kExitConfig;
        }
    }

    return impactkit::cli::run_command(config, std::cout, std::cerr);
}
