// Scenario front end: a flat key = value configuration selects one experiment
// (analytic table, transient protocol, frequency or width sweep, cell demo,
// or a machine program run) and the runner writes CSV data series plus a
// summary.txt.

#ifndef TMSIM_SCENARIO_HPP
#define TMSIM_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tmsim/machine.hpp"
#include "tmsim/toggle_cell.hpp"
#include "tmsim/transient.hpp"

namespace tmsim {

enum class ScenarioKind { Analytic, Transient, SweepFreq, SweepWidth, Machine, Cell };

enum class ScenarioErrorCode : int {
    Parse = 3,       // malformed document, unknown key, bad unit
    Validation = 4,  // invariant violation in the assembled parameters
    Simulation = 5,  // engine rejected the run
    Io = 6,          // output path not writable
};

struct ScenarioError : std::runtime_error {
    ScenarioErrorCode code;
    ScenarioError(ScenarioErrorCode c, const std::string& msg)
        : std::runtime_error(msg), code(c) {}
};

// Parse "<number><optional SI suffix>" where the suffix is one of
// f p n u m k M G. Plain decimals with exponent are accepted unchanged.
double parse_si_value(const std::string& token);

struct Scenario {
    ScenarioKind kind = ScenarioKind::Analytic;
    std::string name = "scenario";
    std::uint64_t seed = 0;

    BusNetwork net;
    double f = 10e6;
    bool toggle_output = false;

    std::vector<double> freqs;      // sweep-freq
    std::vector<double> widths_um;  // sweep-width

    std::size_t word_count = 256;   // machine
    int bits = 32;
    std::size_t instruction_count = 100;
    EnergyModelParams energy;

    TriggerParams trigger;          // cell
    double pulse_width = 5e-9;
};

// Parse and fully validate a scenario document. Errors carry line numbers.
Scenario parse_scenario(const std::string& text);

struct ScenarioResult {
    std::vector<std::string> files_written;
    std::string summary;
};

// Run the scenario and write its artifacts (CSV series and summary.txt) into
// out_dir. Deterministic: identical inputs give byte-identical files.
ScenarioResult run_scenario(const Scenario& s, const std::string& out_dir);

// Step-drive dissipation over sinusoid-drive net dissipation at the scenario
// frequency.
double compare_to_baseline(const Scenario& s);

// Bundled example scenarios keyed by name (fig5, fig8, fig10, fig11, fig12,
// fig13, machine-demo).
const std::vector<std::pair<std::string, std::string>>& bundled_scenarios();

}  // namespace tmsim

#endif  // TMSIM_SCENARIO_HPP
