// Word-parallel associative toggle memory. An instruction broadcast to every
// word tests a set of bit positions (wired-AND matchline) and complements a
// set of target bits in the words that match. Energy is charged per word from
// an analytic or calibrated two-cycle model.

#ifndef TMSIM_MACHINE_HPP
#define TMSIM_MACHINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tmsim/toggle_cell.hpp"
#include "tmsim/transient.hpp"

namespace tmsim {

enum class Reversibility { Reversible, Irreversible };

struct Instruction {
    std::vector<int> test_set;    // bit indices tested for true; may be empty
    std::vector<int> toggle_set;  // bit indices complemented on match

    Instruction() = default;
    Instruction(std::vector<int> test, std::vector<int> toggle);

    std::uint64_t test_mask = 0;
    std::uint64_t toggle_mask = 0;

    void validate(int width) const;
};

struct Machine {
    int width = 0;                    // bits per word, up to 64
    std::vector<std::uint64_t> words;
    BusState bus;                     // matchline parameters shared by all words

    Machine() = default;
    Machine(int width, std::size_t word_count, double c_bus = 1e-12, double v_dd = 1.0);

    bool operator==(const Machine& o) const { return width == o.width && words == o.words; }
};

enum class EnergyMode { Analytic, Calibrated };

struct EnergyModelParams {
    EnergyMode mode = EnergyMode::Analytic;
    DischargeMode discharge = DischargeMode::Recovery;
    double f = 10e6;                    // hertz, for the calibrated model
    double e_hold_two_cycle = 43e-15;   // joules per matched word
    double e_cycle_two_cycle = 77e-15;  // joules per unmatched word, recovery
    double e_irreversible = 500e-15;    // joules per unmatched word, irreversible

    void validate() const;
};

// Replace the analytic constants with two-cycle protocol results for the
// given network and frequency.
EnergyModelParams calibrated_energy_model(const BusNetwork& net, double f,
                                          DischargeMode discharge = DischargeMode::Recovery);

struct LedgerEntry {
    std::size_t instr_index = 0;
    std::size_t matched = 0;
    std::size_t unmatched = 0;
    double e_matched = 0.0;
    double e_unmatched = 0.0;
    double e_total = 0.0;
    Reversibility cls = Reversibility::Reversible;
};

struct EnergyLedger {
    std::vector<LedgerEntry> entries;
};

Reversibility classify_instruction(const Instruction& i);

// Broadcast one instruction to every word. The word loop is data-parallel;
// the OpenMP variant and the serial reference produce identical machines and
// ledger entries. The serial reference drives the behavioral toggle-cell
// model word by word.
LedgerEntry execute_instruction(Machine& m, const Instruction& i, const EnergyModelParams& p);
LedgerEntry execute_instruction_serial(Machine& m, const Instruction& i,
                                       const EnergyModelParams& p);

struct IrreversibleProgramError : std::runtime_error {
    std::size_t index;
    explicit IrreversibleProgramError(std::size_t idx)
        : std::runtime_error("instruction " + std::to_string(idx) +
                             " is irreversible (test and toggle sets overlap)"),
          index(idx) {}
};

// Reverse a program of reversible instructions. Each instruction is its own
// inverse, so the reversed sequence undoes the original. Throws
// IrreversibleProgramError naming the first offending instruction otherwise.
std::vector<Instruction> invert_program(const std::vector<Instruction>& prog);

EnergyLedger run_program(Machine& m, const std::vector<Instruction>& prog,
                         const EnergyModelParams& p);
EnergyLedger run_program_serial(Machine& m, const std::vector<Instruction>& prog,
                                const EnergyModelParams& p);

struct EnergyReport {
    double e_reversible = 0.0;
    double e_irreversible_class = 0.0;
    double e_total = 0.0;
    std::size_t matched = 0;
    std::size_t unmatched = 0;
    double mean_matched_energy = 0.0;
    double mean_unmatched_energy = 0.0;
    double matched_to_unmatched_ratio = 0.0;  // 0 when undefined
    bool irreversible_dominates = false;
};

EnergyReport energy_report(const EnergyLedger& ledger);

struct SpeedupResult {
    double factor = 0.0;
    bool slower_than_serial = false;  // flagged when Y/X <= 1
};

// Throughput gain of Y parallel processors each slowed down by factor X.
SpeedupResult parallel_speedup(double y_processors, double x_slowdown);

// Text formats: snapshots are one word per line, '0'/'1' characters, highest
// bit index first; programs are lines "test=<i,j,...> toggle=<k,...>";
// ledgers serialize as CSV "instr,matched,unmatched,class,e_J".
std::string format_snapshot(const Machine& m);
Machine parse_snapshot(const std::string& text, double c_bus = 1e-12, double v_dd = 1.0);
std::string format_program(const std::vector<Instruction>& prog);
std::vector<Instruction> parse_program(const std::string& text);
std::string ledger_to_csv(const EnergyLedger& ledger);

// Seeded generators for randomized runs; never wall-clock.
Machine random_machine(int width, std::size_t word_count, std::uint64_t seed);
std::vector<Instruction> random_reversible_program(int width, std::size_t length,
                                                   std::uint64_t seed);

}  // namespace tmsim

#endif  // TMSIM_MACHINE_HPP
