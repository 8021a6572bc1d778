// qmlab: scenario-driven front end for the quantum trajectory laboratory.
// Exit status: 0 success, 1 tolerance/verification failure, 2 config error.

#include "qmlab/errors.hpp"
#include "qmlab/scenario.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Args {
    std::string config;
    std::string out = ".";
    std::uint64_t seed_value = 0;
    double tolerance_scale = 1.0;
};

int dispatch(const std::string& command, const Args& args, bool seed_given) {
    qmlab::Scenario scenario = qmlab::parse_scenario_file(args.config);
    qmlab::RunOptions options;
    options.out_dir = args.out;
    if (seed_given) options.seed = args.seed_value;
    options.tolerance_scale = args.tolerance_scale;

    if (command == "verify")
        return qmlab::run_verify(scenario, options, std::cout);
    if (command == "simulate")
        return qmlab::run_simulate(scenario, options, std::cout);
    if (command == "hydrogen2d")
        return qmlab::run_hydrogen2d(scenario, options, std::cout);
    if (command == "relativistic")
        return qmlab::run_relativistic(scenario, options, std::cout);
    return qmlab::run_sweep(scenario, options, std::cout);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum trajectory laboratory (1-D laws, planar hydrogen, "
                 "relativistic extension)"};
    app.require_subcommand(1);

    Args args;
    const std::pair<const char*, const char*> commands[] = {
        {"verify", "run the residual verification battery for a scenario"},
        {"simulate", "integrate a 1-D trajectory law"},
        {"hydrogen2d", "integrate a planar-hydrogen ground-state trajectory"},
        {"relativistic", "integrate the relativistic lab-time law"},
        {"sweep", "integrate a family over random recombination constants"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", args.config, "scenario file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", args.out, "output directory (default .)");
        sub->add_option("--seed", args.seed_value,
                        "seed override for constant sweeps");
        sub->add_option("--tolerance-scale", args.tolerance_scale,
                        "multiplier on every verification tolerance");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        return dispatch(sub->get_name(), args, sub->count("--seed") > 0);
    } catch (const qmlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qmlab::ToleranceError& e) {
        std::cerr << "tolerance failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
