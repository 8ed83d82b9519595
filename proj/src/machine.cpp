#include "tmsim/machine.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <random>
#include <sstream>

namespace tmsim {

namespace {

std::uint64_t mask_of(const std::vector<int>& idx) {
    std::uint64_t m = 0;
    for (int i : idx) {
        if (i < 0 || i >= 64) throw std::invalid_argument("bit index out of range [0, 64)");
        m |= std::uint64_t{1} << i;
    }
    return m;
}

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

Instruction::Instruction(std::vector<int> test, std::vector<int> toggle)
    : test_set(sorted_unique(std::move(test))), toggle_set(sorted_unique(std::move(toggle))) {
    if (toggle_set.empty())
        throw std::invalid_argument("instruction: toggle set must not be empty");
    test_mask = mask_of(test_set);
    toggle_mask = mask_of(toggle_set);
}

void Instruction::validate(int width) const {
    if (toggle_set.empty())
        throw std::invalid_argument("instruction: toggle set must not be empty");
    for (int i : test_set)
        if (i < 0 || i >= width) throw std::invalid_argument("instruction: test index out of range");
    for (int i : toggle_set)
        if (i < 0 || i >= width)
            throw std::invalid_argument("instruction: toggle index out of range");
}

Machine::Machine(int w, std::size_t word_count, double c_bus, double v_dd) : width(w) {
    if (width < 1 || width > 64)
        throw std::invalid_argument("machine: width must be in [1, 64]");
    words.assign(word_count, 0);
    bus.capacitance = c_bus;
    bus.v_dd = v_dd;
    bus.voltage = 0.5 * v_dd;  // precharge level between instructions
}

void EnergyModelParams::validate() const {
    if (e_hold_two_cycle < 0.0 || e_cycle_two_cycle < 0.0 || e_irreversible < 0.0)
        throw std::invalid_argument("energy model: energies must be >= 0");
    if (!(f > 0.0)) throw std::invalid_argument("energy model: frequency must be > 0");
}

EnergyModelParams calibrated_energy_model(const BusNetwork& net, double f,
                                          DischargeMode discharge) {
    EnergyModelParams p;
    p.mode = EnergyMode::Calibrated;
    p.discharge = discharge;
    p.f = f;
    p.e_hold_two_cycle = run_two_cycle_protocol(net, true, f).e_net_per_half_cycle.back();
    p.e_cycle_two_cycle = run_two_cycle_protocol(net, false, f).e_net_per_half_cycle.back();
    const double v_dd = net.supply.v_high;
    p.e_irreversible = 0.5 * net.c_bus * v_dd * v_dd;
    return p;
}

Reversibility classify_instruction(const Instruction& i) {
    if (i.test_mask & i.toggle_mask) return Reversibility::Irreversible;
    return Reversibility::Reversible;
}

namespace {

LedgerEntry make_entry(std::size_t matched, std::size_t total, const Instruction& i,
                       const EnergyModelParams& p) {
    LedgerEntry e;
    e.matched = matched;
    e.unmatched = total - matched;
    e.cls = classify_instruction(i);
    const double e_unmatched_each = p.discharge == DischargeMode::Recovery
                                        ? p.e_cycle_two_cycle
                                        : p.e_irreversible;
    e.e_matched = static_cast<double>(e.matched) * p.e_hold_two_cycle;
    e.e_unmatched = static_cast<double>(e.unmatched) * e_unmatched_each;
    e.e_total = e.e_matched + e.e_unmatched;
    return e;
}

}  // namespace

LedgerEntry execute_instruction(Machine& m, const Instruction& i, const EnergyModelParams& p) {
    i.validate(m.width);
    p.validate();
    const std::uint64_t tm = i.test_mask;
    const std::uint64_t gm = i.toggle_mask;
    std::size_t matched = 0;
    const long long n = static_cast<long long>(m.words.size());
#pragma omp parallel for schedule(static) reduction(+ : matched)
    for (long long k = 0; k < n; ++k) {
        if ((m.words[k] & tm) == tm) {
            m.words[k] ^= gm;
            ++matched;
        }
    }
    return make_entry(matched, m.words.size(), i, p);
}

LedgerEntry execute_instruction_serial(Machine& m, const Instruction& i,
                                       const EnergyModelParams& p) {
    i.validate(m.width);
    p.validate();

    // Reference semantics, word by word, through the behavioral cell model:
    // charge the matchline, let every tested cell with a false bit discharge
    // it, then fire the trigger at the toggle targets. Droop is disabled here
    // because the broadcast trigger hits all targets of one word at once.
    TriggerParams trig;
    trig.droop_per_toggle = 0.0;
    const double pulse = 5e-9;

    std::size_t matched = 0;
    for (auto& word : m.words) {
        BusState bus = m.bus;
        bus.voltage = bus.v_dd;  // charged for the test phase
        for (int idx : i.test_set) {
            CellState cell{((word >> idx) & 1u) != 0};
            bus = bit_test(cell, bus, p.discharge, p.f).bus;
        }
        const bool match = bus.voltage >= trig.threshold_fraction * bus.v_dd;
        if (match) {
            ++matched;
            for (int idx : i.toggle_set) {
                CellState cell{((word >> idx) & 1u) != 0};
                auto r = conditional_toggle(cell, bus, pulse, trig);
                bus = r.bus;
                if (r.toggled) word ^= std::uint64_t{1} << idx;
            }
        }
    }
    return make_entry(matched, m.words.size(), i, p);
}

std::vector<Instruction> invert_program(const std::vector<Instruction>& prog) {
    for (std::size_t k = 0; k < prog.size(); ++k)
        if (classify_instruction(prog[k]) == Reversibility::Irreversible)
            throw IrreversibleProgramError(k);
    return {prog.rbegin(), prog.rend()};
}

namespace {

template <typename Exec>
EnergyLedger run_with(Machine& m, const std::vector<Instruction>& prog,
                      const EnergyModelParams& p, Exec exec) {
    EnergyLedger ledger;
    ledger.entries.reserve(prog.size());
    for (std::size_t k = 0; k < prog.size(); ++k) {
        LedgerEntry e = exec(m, prog[k], p);
        e.instr_index = k;
        ledger.entries.push_back(e);
    }
    return ledger;
}

}  // namespace

EnergyLedger run_program(Machine& m, const std::vector<Instruction>& prog,
                         const EnergyModelParams& p) {
    return run_with(m, prog, p, execute_instruction);
}

EnergyLedger run_program_serial(Machine& m, const std::vector<Instruction>& prog,
                                const EnergyModelParams& p) {
    return run_with(m, prog, p, execute_instruction_serial);
}

EnergyReport energy_report(const EnergyLedger& ledger) {
    EnergyReport r;
    double e_matched_sum = 0.0;
    double e_unmatched_sum = 0.0;
    for (const auto& e : ledger.entries) {
        r.e_total += e.e_total;
        if (e.cls == Reversibility::Reversible)
            r.e_reversible += e.e_total;
        else
            r.e_irreversible_class += e.e_total;
        r.matched += e.matched;
        r.unmatched += e.unmatched;
        e_matched_sum += e.e_matched;
        e_unmatched_sum += e.e_unmatched;
    }
    if (r.matched > 0) r.mean_matched_energy = e_matched_sum / static_cast<double>(r.matched);
    if (r.unmatched > 0)
        r.mean_unmatched_energy = e_unmatched_sum / static_cast<double>(r.unmatched);
    if (r.mean_unmatched_energy > 0.0)
        r.matched_to_unmatched_ratio = r.mean_matched_energy / r.mean_unmatched_energy;
    r.irreversible_dominates = r.e_irreversible_class > r.e_reversible;
    return r;
}

SpeedupResult parallel_speedup(double y_processors, double x_slowdown) {
    if (!(y_processors >= 1.0)) throw std::invalid_argument("speedup: need Y >= 1");
    if (!(x_slowdown > 0.0)) throw std::invalid_argument("speedup: need X > 0");
    const double factor = y_processors / x_slowdown;
    return {factor, factor <= 1.0};
}

std::string format_snapshot(const Machine& m) {
    std::string out;
    out.reserve(m.words.size() * (m.width + 1));
    for (std::uint64_t w : m.words) {
        for (int b = m.width - 1; b >= 0; --b) out.push_back((w >> b) & 1u ? '1' : '0');
        out.push_back('\n');
    }
    return out;
}

Machine parse_snapshot(const std::string& text, double c_bus, double v_dd) {
    std::vector<std::uint64_t> words;
    int width = -1;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (width < 0) width = static_cast<int>(line.size());
        if (static_cast<int>(line.size()) != width)
            throw std::invalid_argument("snapshot line " + std::to_string(lineno) +
                                        ": inconsistent word width");
        std::uint64_t w = 0;
        for (char ch : line) {
            if (ch != '0' && ch != '1')
                throw std::invalid_argument("snapshot line " + std::to_string(lineno) +
                                            ": bits must be 0 or 1");
            w = (w << 1) | static_cast<std::uint64_t>(ch - '0');
        }
        words.push_back(w);
    }
    if (width <= 0) throw std::invalid_argument("snapshot: no words");
    Machine m(width, words.size(), c_bus, v_dd);
    m.words = std::move(words);
    return m;
}

namespace {

std::vector<int> parse_index_list(const std::string& s, std::size_t lineno) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        const std::string tok = s.substr(pos, comma - pos);
        if (!tok.empty()) {
            int v = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || p != tok.data() + tok.size())
                throw std::invalid_argument("program line " + std::to_string(lineno) +
                                            ": bad index '" + tok + "'");
            out.push_back(v);
        }
        pos = comma + 1;
    }
    return out;
}

}  // namespace

std::string format_program(const std::vector<Instruction>& prog) {
    std::string out;
    for (const auto& i : prog) {
        out += "test=";
        for (std::size_t k = 0; k < i.test_set.size(); ++k) {
            if (k) out += ',';
            out += std::to_string(i.test_set[k]);
        }
        out += " toggle=";
        for (std::size_t k = 0; k < i.toggle_set.size(); ++k) {
            if (k) out += ',';
            out += std::to_string(i.toggle_set[k]);
        }
        out += '\n';
    }
    return out;
}

std::vector<Instruction> parse_program(const std::string& text) {
    std::vector<Instruction> prog;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto tpos = line.find("test=");
        const auto gpos = line.find(" toggle=");
        if (tpos != 0 || gpos == std::string::npos)
            throw std::invalid_argument("program line " + std::to_string(lineno) +
                                        ": expected 'test=<list> toggle=<list>'");
        auto test = parse_index_list(line.substr(5, gpos - 5), lineno);
        auto toggle = parse_index_list(line.substr(gpos + 8), lineno);
        prog.emplace_back(std::move(test), std::move(toggle));
    }
    return prog;
}

std::string ledger_to_csv(const EnergyLedger& ledger) {
    std::string out = "instr,matched,unmatched,class,e_J\n";
    char buf[64];
    for (const auto& e : ledger.entries) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%s,%.12e\n", e.instr_index, e.matched,
                      e.unmatched,
                      e.cls == Reversibility::Reversible ? "reversible" : "irreversible",
                      e.e_total);
        out += buf;
    }
    return out;
}

Machine random_machine(int width, std::size_t word_count, std::uint64_t seed) {
    Machine m(width, word_count);
    std::mt19937_64 rng(seed);
    const std::uint64_t mask =
        width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
    for (auto& w : m.words) w = rng() & mask;
    return m;
}

std::vector<Instruction> random_reversible_program(int width, std::size_t length,
                                                   std::uint64_t seed) {
    if (width < 2) throw std::invalid_argument("reversible program needs width >= 2");
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_int_distribution<int> bit(0, width - 1);
    std::uniform_int_distribution<int> test_count(0, std::min(4, width - 1));
    std::uniform_int_distribution<int> toggle_count(1, std::min(3, width - 1));

    std::vector<Instruction> prog;
    prog.reserve(length);
    while (prog.size() < length) {
        std::vector<int> test, toggle;
        const int nt = test_count(rng);
        for (int k = 0; k < nt; ++k) test.push_back(bit(rng));
        const int ng = toggle_count(rng);
        for (int k = 0; k < ng; ++k) {
            int b = bit(rng);
            // keep the sets disjoint so the instruction stays reversible
            while (std::find(test.begin(), test.end(), b) != test.end()) b = bit(rng);
            toggle.push_back(b);
        }
        prog.emplace_back(std::move(test), std::move(toggle));
    }
    return prog;
}

}  // namespace tmsim
