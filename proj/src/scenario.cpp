#include "tmsim/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace tmsim {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double suffix_multiplier(char c) {
    switch (c) {
    case 'f': return 1e-15;
    case 'p': return 1e-12;
    case 'n': return 1e-9;
    case 'u': return 1e-6;
    case 'm': return 1e-3;
    case 'k': return 1e3;
    case 'M': return 1e6;
    case 'G': return 1e9;
    default: return 0.0;
    }
}

}  // namespace

double parse_si_value(const std::string& token) {
    const std::string t = trim(token);
    if (t.empty()) throw ScenarioError(ScenarioErrorCode::Parse, "empty numeric value");
    char* end = nullptr;
    const double base = std::strtod(t.c_str(), &end);
    if (end == t.c_str())
        throw ScenarioError(ScenarioErrorCode::Parse, "cannot parse number '" + t + "'");
    if (*end == '\0') return base;
    const double mult = suffix_multiplier(*end);
    if (mult == 0.0 || *(end + 1) != '\0')
        throw ScenarioError(ScenarioErrorCode::Parse, "bad unit suffix in '" + t + "'");
    return base * mult;
}

namespace {

struct RawValue {
    std::string text;
    int line = 0;
    mutable bool used = false;
};

struct Document {
    std::map<std::string, RawValue> kv;

    const RawValue* find(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }
    std::string require(const std::string& key) const {
        const RawValue* v = find(key);
        if (!v)
            throw ScenarioError(ScenarioErrorCode::Parse, "missing required key '" + key + "'");
        return v->text;
    }
    double number(const std::string& key, double fallback) const {
        const RawValue* v = find(key);
        if (!v) return fallback;
        return number_at(key, *v);
    }
    double require_number(const std::string& key) const {
        const RawValue* v = find(key);
        if (!v)
            throw ScenarioError(ScenarioErrorCode::Parse, "missing required key '" + key + "'");
        return number_at(key, *v);
    }
    static double number_at(const std::string& key, const RawValue& v) {
        try {
            return parse_si_value(v.text);
        } catch (const ScenarioError& e) {
            throw ScenarioError(ScenarioErrorCode::Parse,
                                "line " + std::to_string(v.line) + ": key '" + key + "': " +
                                    e.what());
        }
    }
    bool boolean(const std::string& key, bool fallback) const {
        const RawValue* v = find(key);
        if (!v) return fallback;
        if (v->text == "true" || v->text == "1") return true;
        if (v->text == "false" || v->text == "0") return false;
        throw ScenarioError(ScenarioErrorCode::Parse,
                            "line " + std::to_string(v->line) + ": key '" + key +
                                "' must be true or false");
    }
    std::vector<double> list(const std::string& key) const {
        const RawValue* v = find(key);
        if (!v)
            throw ScenarioError(ScenarioErrorCode::Parse, "missing required key '" + key + "'");
        std::vector<double> out;
        std::stringstream ss(v->text);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            out.push_back(number_at(key, RawValue{tok, v->line}));
        }
        if (out.empty())
            throw ScenarioError(ScenarioErrorCode::Parse,
                                "line " + std::to_string(v->line) + ": key '" + key +
                                    "' needs at least one value");
        return out;
    }
};

Document tokenize(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') continue;  // cosmetic section header
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ScenarioError(ScenarioErrorCode::Parse,
                                "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ScenarioError(ScenarioErrorCode::Parse,
                                "line " + std::to_string(lineno) + ": expected key = value");
        if (doc.kv.count(key))
            throw ScenarioError(ScenarioErrorCode::Parse,
                                "line " + std::to_string(lineno) + ": duplicate key '" + key +
                                    "'");
        doc.kv[key] = {val, lineno, false};
    }
    return doc;
}

ScenarioKind parse_kind(const std::string& s, int line) {
    if (s == "analytic") return ScenarioKind::Analytic;
    if (s == "transient") return ScenarioKind::Transient;
    if (s == "sweep-freq") return ScenarioKind::SweepFreq;
    if (s == "sweep-width") return ScenarioKind::SweepWidth;
    if (s == "machine") return ScenarioKind::Machine;
    if (s == "cell") return ScenarioKind::Cell;
    throw ScenarioError(ScenarioErrorCode::Parse,
                        "line " + std::to_string(line) + ": unknown kind '" + s + "'");
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    const Document doc = tokenize(text);

    Scenario s;
    const RawValue* kind = doc.find("kind");
    if (!kind) throw ScenarioError(ScenarioErrorCode::Parse, "missing required key 'kind'");
    s.kind = parse_kind(kind->text, kind->line);
    if (const RawValue* v = doc.find("name")) s.name = v->text;
    s.seed = static_cast<std::uint64_t>(doc.number("seed", 0.0));

    const bool needs_network = s.kind != ScenarioKind::Machine;
    const double v_dd = doc.number("V_dd", 1.0);
    if (!(v_dd > 0.0))
        throw ScenarioError(ScenarioErrorCode::Validation, "V_dd must be > 0");

    if (needs_network) {
        s.net.c_bus = doc.require_number("C");
        s.net.r_on = doc.number("R_on", 5e3);
        s.net.r_gnd = doc.number("R_gnd", s.net.r_on);
        s.net.r_stray = doc.number("R_stray", std::numeric_limits<double>::infinity());
        s.net.supply = SupplyWaveform::half_sinusoid(0.5 * v_dd, v_dd, doc.number("f", 10e6));
        s.net.v_init = doc.number("v_init", 0.5 * v_dd);
    }
    s.f = doc.number("f", 10e6);
    s.toggle_output = doc.boolean("toggle_output", false);

    switch (s.kind) {
    case ScenarioKind::SweepFreq:
        s.freqs = doc.list("freqs");
        for (double f : s.freqs)
            if (!(f > 0.0))
                throw ScenarioError(ScenarioErrorCode::Validation, "freqs must be > 0");
        if (!std::is_sorted(s.freqs.begin(), s.freqs.end()))
            throw ScenarioError(ScenarioErrorCode::Validation, "freqs must be sorted ascending");
        break;
    case ScenarioKind::SweepWidth:
        s.widths_um = doc.list("widths");
        for (double w : s.widths_um)
            if (!(w > 0.0))
                throw ScenarioError(ScenarioErrorCode::Validation, "widths must be > 0");
        break;
    case ScenarioKind::Machine: {
        s.word_count = static_cast<std::size_t>(doc.number("words", 256.0));
        s.bits = static_cast<int>(doc.number("bits", 32.0));
        s.instruction_count = static_cast<std::size_t>(doc.number("instructions", 100.0));
        s.energy.e_hold_two_cycle = doc.number("e_hold", 43e-15);
        s.energy.e_cycle_two_cycle = doc.number("e_cycle", 77e-15);
        s.energy.e_irreversible = doc.number("e_irreversible", 500e-15);
        s.energy.f = s.f;
        if (const RawValue* v = doc.find("energy_mode")) {
            if (v->text == "analytic")
                s.energy.mode = EnergyMode::Analytic;
            else if (v->text == "calibrated")
                s.energy.mode = EnergyMode::Calibrated;
            else
                throw ScenarioError(ScenarioErrorCode::Parse,
                                    "line " + std::to_string(v->line) +
                                        ": energy_mode must be analytic or calibrated");
        }
        if (s.bits < 2 || s.bits > 64)
            throw ScenarioError(ScenarioErrorCode::Validation, "bits must be in [2, 64]");
        if (s.word_count == 0)
            throw ScenarioError(ScenarioErrorCode::Validation, "words must be >= 1");
        try {
            s.energy.validate();
        } catch (const std::exception& e) {
            throw ScenarioError(ScenarioErrorCode::Validation, e.what());
        }
        break;
    }
    case ScenarioKind::Cell:
        s.trigger.threshold_fraction = doc.number("threshold", 0.70);
        s.trigger.droop_per_toggle = doc.number("droop", 0.05);
        s.trigger.min_pulse = doc.number("min_pulse", 2e-9);
        s.trigger.max_pulse = doc.number("max_pulse", 20e-9);
        s.pulse_width = doc.number("pulse", 5e-9);
        try {
            s.trigger.validate();
        } catch (const std::exception& e) {
            throw ScenarioError(ScenarioErrorCode::Validation, e.what());
        }
        break;
    default:
        break;
    }

    for (const auto& [key, v] : doc.kv)
        if (!v.used)
            throw ScenarioError(ScenarioErrorCode::Parse,
                                "line " + std::to_string(v.line) + ": unknown key '" + key + "'");

    if (needs_network) {
        try {
            s.net.validate();
        } catch (const std::exception& e) {
            throw ScenarioError(ScenarioErrorCode::Validation, e.what());
        }
    }
    if (!(s.f > 0.0))
        throw ScenarioError(ScenarioErrorCode::Validation, "f must be > 0");
    return s;
}

namespace {

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

void write_file(const std::string& path, const std::string& content,
                std::vector<std::string>& files) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError(ScenarioErrorCode::Io, "cannot write " + path);
    out << content;
    if (!out) throw ScenarioError(ScenarioErrorCode::Io, "failed writing " + path);
    files.push_back(path);
}

std::string run_analytic(const Scenario& s, std::vector<std::string>& files,
                         const std::string& dir) {
    const double c = s.net.c_bus;
    const double r = s.net.r_on;
    const double v1 = s.net.supply.v_high;
    const double T = 0.5 / s.f;

    LumpedParams lp{r, c, s.net.r_stray, v1};
    std::ostringstream sum;
    sum << "ramp_charging_current_A = " << fmt("%.12e", ramp_charging_current(lp, T)) << "\n";
    sum << "ramp_resistor_power_W = " << fmt("%.12e", ramp_resistor_power(lp, T)) << "\n";
    sum << "ramp_resistor_energy_J = " << fmt("%.12e", ramp_resistor_energy(lp, T)) << "\n";
    const auto split = step_charge_energies(c, v1);
    sum << "step_from_supply_J = " << fmt("%.12e", split.from_supply) << "\n";
    sum << "step_in_capacitor_J = " << fmt("%.12e", split.in_capacitor) << "\n";
    sum << "conventional_dynamic_power_W = "
        << fmt("%.12e", conventional_dynamic_power(s.f, c, v1)) << "\n";

    SweepTable table;
    for (int k = 1; k <= 20; ++k) {
        const double f = 1e6 * k;
        table.emplace_back(f, predicted_recovery_energy(f, r, c, v1));
    }
    write_file(dir + "/" + s.name + "_predicted.csv",
               sweep_to_csv(table, "f_Hz", "e_two_cycle_J"), files);
    sum << "predicted_loglog_slope = "
        << fmt("%.12e", loglog_slope(table.front().first, table.front().second,
                                     table.back().first, table.back().second))
        << "\n";
    return sum.str();
}

std::string run_transient(const Scenario& s, std::vector<std::string>& files,
                          const std::string& dir) {
    const auto res = run_two_cycle_protocol(s.net, s.toggle_output, s.f);
    write_file(dir + "/" + s.name + "_trace.csv", trace_to_csv(res.trace), files);

    std::ostringstream sum;
    const double half = 0.5 / s.f;
    for (std::size_t k = 0; k < res.e_net_per_half_cycle.size(); ++k) {
        sum << "e_net_at_" << fmt("%g", (k + 1) * half * 1e9) << "ns_J = "
            << fmt("%.12e", res.e_net_per_half_cycle[k]) << "\n";
    }
    sum << "e_supply_peak_J = " << fmt("%.12e", res.e_supply_peak) << "\n";
    sum << "e_supply_end_J = " << fmt("%.12e", res.e_supply_end) << "\n";
    sum << "fitted_R_ser_ohm = "
        << fmt("%.12e", fit_series_resistance(s.f, std::max(res.e_supply_end, 0.0), s.net.c_bus,
                                              s.net.supply.v_high))
        << "\n";
    sum << "improvement_ratio_vs_step = " << fmt("%.6f", improvement_ratio(s.net, s.f)) << "\n";
    sum << "conservation_residual = " << fmt("%.3e", conservation_residual(res.trace)) << "\n";
    return sum.str();
}

std::string run_sweep_freq(const Scenario& s, std::vector<std::string>& files,
                           const std::string& dir) {
    const auto table = sweep_frequency(s.net, s.toggle_output, s.freqs);
    write_file(dir + "/" + s.name + "_sweep.csv", sweep_to_csv(table, "f_Hz", "e_two_cycle_J"),
               files);
    std::ostringstream sum;
    if (table.size() >= 2) {
        const auto& a = table[table.size() - 2];
        const auto& b = table.back();
        sum << "loglog_slope_last_two = "
            << fmt("%.6f", loglog_slope(a.first, a.second, b.first, b.second)) << "\n";
    }
    sum << "fitted_R_ser_ohm = "
        << fmt("%.12e", fit_series_resistance(table.front().first, table.front().second,
                                              s.net.c_bus, s.net.supply.v_high))
        << "\n";
    return sum.str();
}

std::string run_sweep_width(const Scenario& s, std::vector<std::string>& files,
                            const std::string& dir) {
    const auto table = sweep_driver_width(s.net, s.widths_um, s.f);
    write_file(dir + "/" + s.name + "_sweep.csv", sweep_to_csv(table, "W_um", "e_cycle_J"),
               files);
    bool decreasing = true;
    for (std::size_t k = 1; k < table.size(); ++k)
        if (!(table[k].second < table[k - 1].second)) decreasing = false;
    std::ostringstream sum;
    sum << "energy_strictly_decreasing_in_width = " << (decreasing ? "yes" : "no") << "\n";
    return sum.str();
}

std::string run_machine(const Scenario& s, std::vector<std::string>& files,
                        const std::string& dir) {
    EnergyModelParams p = s.energy;
    if (p.mode == EnergyMode::Calibrated) p = calibrated_energy_model(BusNetwork{}, s.f);

    Machine m = random_machine(s.bits, s.word_count, s.seed);
    const Machine initial = m;
    const auto prog = random_reversible_program(s.bits, s.instruction_count, s.seed);

    const EnergyLedger ledger = run_program(m, prog, p);
    run_program(m, invert_program(prog), p);
    const bool restored = m == initial;

    write_file(dir + "/" + s.name + "_before.txt", format_snapshot(initial), files);
    write_file(dir + "/" + s.name + "_program.txt", format_program(prog), files);
    write_file(dir + "/" + s.name + "_ledger.csv", ledger_to_csv(ledger), files);

    const EnergyReport rep = energy_report(ledger);
    std::ostringstream sum;
    sum << "words = " << s.word_count << "\nbits = " << s.bits
        << "\ninstructions = " << prog.size() << "\n";
    sum << "e_total_J = " << fmt("%.12e", rep.e_total) << "\n";
    sum << "e_reversible_J = " << fmt("%.12e", rep.e_reversible) << "\n";
    sum << "e_irreversible_class_J = " << fmt("%.12e", rep.e_irreversible_class) << "\n";
    sum << "matched_to_unmatched_energy_ratio = "
        << fmt("%.4f", rep.matched_to_unmatched_ratio) << "\n";
    sum << "RESTORED: " << (restored ? "yes" : "no") << "\n";
    sum << "note: trigger-line broadcast energy is not modeled and is excluded from the "
           "ledger\n";
    return sum.str();
}

std::string run_cell(const Scenario& s, std::vector<std::string>& files,
                     const std::string& dir) {
    BusState bus;
    bus.capacitance = s.net.c_bus;
    bus.v_dd = s.net.supply.v_high;
    bus.voltage = bus.v_dd;
    CellState cell{false};

    std::string csv = "k,bus_V,bit,toggled\n";
    char buf[80];
    int toggles = 0;
    for (int k = 1; k <= 100; ++k) {
        const auto r = conditional_toggle(cell, bus, s.pulse_width, s.trigger);
        std::snprintf(buf, sizeof buf, "%d,%.12e,%d,%d\n", k, r.bus.voltage, r.cell.bit ? 1 : 0,
                      r.toggled ? 1 : 0);
        csv += buf;
        if (!r.toggled) break;
        cell = r.cell;
        bus = r.bus;
        ++toggles;
    }
    write_file(dir + "/" + s.name + "_toggles.csv", csv, files);

    std::ostringstream sum;
    sum << "toggles_before_cutoff = " << toggles << "\n";
    sum << "final_bus_V = " << fmt("%.12e", bus.voltage) << "\n";
    sum << "note: droop per toggle is a calibration placeholder, not a measured value\n";
    return sum.str();
}

}  // namespace

double compare_to_baseline(const Scenario& s) {
    if (s.kind != ScenarioKind::Transient && s.kind != ScenarioKind::SweepFreq)
        throw ScenarioError(ScenarioErrorCode::Validation,
                            "baseline comparison needs a transient scenario");
    return improvement_ratio(s.net, s.f);
}

ScenarioResult run_scenario(const Scenario& s, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ScenarioError(ScenarioErrorCode::Io, "cannot create " + out_dir);

    ScenarioResult result;
    std::string body;
    try {
        switch (s.kind) {
        case ScenarioKind::Analytic: body = run_analytic(s, result.files_written, out_dir); break;
        case ScenarioKind::Transient:
            body = run_transient(s, result.files_written, out_dir);
            break;
        case ScenarioKind::SweepFreq:
            body = run_sweep_freq(s, result.files_written, out_dir);
            break;
        case ScenarioKind::SweepWidth:
            body = run_sweep_width(s, result.files_written, out_dir);
            break;
        case ScenarioKind::Machine: body = run_machine(s, result.files_written, out_dir); break;
        case ScenarioKind::Cell: body = run_cell(s, result.files_written, out_dir); break;
        }
    } catch (const ScenarioError&) {
        throw;
    } catch (const std::exception& e) {
        throw ScenarioError(ScenarioErrorCode::Simulation, e.what());
    }

    std::ostringstream sum;
    sum << "scenario = " << s.name << "\nseed = " << s.seed << "\n" << body;
    result.summary = sum.str();
    write_file(out_dir + "/summary.txt", result.summary, result.files_written);
    return result;
}

const std::vector<std::pair<std::string, std::string>>& bundled_scenarios() {
    static const std::vector<std::pair<std::string, std::string>> examples = {
        {"fig5",
         "# Repeated conditional toggles droop the matchline until the trigger cuts off\n"
         "kind = cell\n"
         "name = fig5\n"
         "C = 1p\n"
         "V_dd = 1.0\n"
         "threshold = 0.70\n"
         "droop = 0.05\n"
         "pulse = 5n\n"},
        {"fig8",
         "# Two-cycle charge recovery, toggle output false\n"
         "kind = transient\n"
         "name = fig8\n"
         "C = 1p\n"
         "R_on = 5k\n"
         "V_dd = 1.0\n"
         "f = 10M\n"
         "toggle_output = false\n"},
        {"fig10",
         "# Two-cycle charge recovery, toggle output true (bus holds, then returns)\n"
         "kind = transient\n"
         "name = fig10\n"
         "C = 1p\n"
         "R_on = 5k\n"
         "V_dd = 1.0\n"
         "f = 10M\n"
         "toggle_output = true\n"},
        {"fig11",
         "# Energy per cycle versus driver width at 10 MHz\n"
         "kind = sweep-width\n"
         "name = fig11\n"
         "C = 1p\n"
         "V_dd = 1.0\n"
         "f = 10M\n"
         "widths = 0.5,1.0,1.5,2.0,2.5\n"},
        {"fig12",
         "# Two-cycle energy versus supply frequency\n"
         "kind = sweep-freq\n"
         "name = fig12\n"
         "C = 1p\n"
         "R_on = 5k\n"
         "V_dd = 1.0\n"
         "toggle_output = false\n"
         "freqs = 1M,2M,5M,10M,20M\n"},
        {"fig13",
         "# Two-cycle charge recovery with a 1 MEG stray path to ground\n"
         "kind = transient\n"
         "name = fig13\n"
         "C = 1p\n"
         "R_on = 5k\n"
         "R_stray = 1M\n"
         "V_dd = 1.0\n"
         "f = 10M\n"
         "toggle_output = false\n"},
        {"machine-demo",
         "# Random reversible program, run forward then inverted\n"
         "kind = machine\n"
         "name = machine-demo\n"
         "words = 256\n"
         "bits = 32\n"
         "instructions = 100\n"
         "seed = 0\n"
         "e_hold = 43f\n"
         "e_cycle = 77f\n"
         "e_irreversible = 500f\n"},
    };
    return examples;
}

}  // namespace tmsim
