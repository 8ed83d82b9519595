// tmsim: batch front end for the toggle-memory charge-recovery simulator.
//
//   tmsim run <scenario-file-or-bundled-name> [--out DIR]
//   tmsim list-examples
//   tmsim show-example <name>

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tmsim/scenario.hpp"

namespace {

std::string load_scenario_text(const std::string& arg) {
    for (const auto& [name, text] : tmsim::bundled_scenarios())
        if (name == arg) return text;
    std::ifstream in(arg, std::ios::binary);
    if (!in)
        throw tmsim::ScenarioError(tmsim::ScenarioErrorCode::Io,
                                   "cannot open scenario '" + arg + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adiabatic toggle-memory simulator"};
    app.require_subcommand(1);

    std::string scenario_arg;
    std::string out_dir = ".";
    auto* run = app.add_subcommand("run", "Run a scenario file (or a bundled example by name)");
    run->add_option("scenario", scenario_arg, "Scenario file path or bundled name")->required();
    run->add_option("--out", out_dir, "Output directory");

    auto* list = app.add_subcommand("list-examples", "List bundled example scenarios");

    std::string show_name;
    auto* show = app.add_subcommand("show-example", "Print a bundled scenario document");
    show->add_option("name", show_name, "Bundled scenario name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) {
            for (const auto& [name, text] : tmsim::bundled_scenarios())
                std::cout << name << "\n";
            return 0;
        }
        if (show->parsed()) {
            for (const auto& [name, text] : tmsim::bundled_scenarios()) {
                if (name == show_name) {
                    std::cout << text;
                    return 0;
                }
            }
            std::cerr << "error: no bundled scenario named '" << show_name << "'\n";
            return 2;
        }
        const tmsim::Scenario s = tmsim::parse_scenario(load_scenario_text(scenario_arg));
        const auto result = tmsim::run_scenario(s, out_dir);
        std::cout << result.summary;
        for (const auto& f : result.files_written) std::cout << "wrote " << f << "\n";
        return 0;
    } catch (const tmsim::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
}
