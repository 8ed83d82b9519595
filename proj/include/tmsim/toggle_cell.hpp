// Behavioral model of one conditional-toggle cell and the matchline control
// gate: bit test, threshold-gated toggle with a pulse-width window, bus droop
// per trigger, and the resistance-width margin rule.

#ifndef TMSIM_TOGGLE_CELL_HPP
#define TMSIM_TOGGLE_CELL_HPP

#include <stdexcept>

#include "tmsim/adiabatic.hpp"

namespace tmsim {

struct CellState {
    bool bit = false;  // flip-flop output; the complementary node is implied
};

struct BusState {
    double voltage = 0.0;      // volts
    double capacitance = 1e-12;  // farads
    double v_dd = 1.0;         // volts

    void validate() const {
        if (!(capacitance > 0.0)) throw std::invalid_argument("bus: capacitance must be > 0");
        if (voltage < 0.0 || voltage > v_dd)
            throw std::invalid_argument("bus: voltage must lie in [0, v_dd]");
    }
};

struct TriggerParams {
    double threshold_fraction = 0.70;  // of v_dd
    double min_pulse = 2e-9;           // seconds
    double max_pulse = 20e-9;          // seconds
    double droop_per_toggle = 0.05;    // volts

    void validate() const {
        if (!(threshold_fraction > 0.0) || !(threshold_fraction < 1.0))
            throw std::invalid_argument("trigger: threshold fraction must be in (0, 1)");
        if (!(min_pulse > 0.0) || !(min_pulse < max_pulse))
            throw std::invalid_argument("trigger: require 0 < min_pulse < max_pulse");
        if (droop_per_toggle < 0.0)
            throw std::invalid_argument("trigger: droop must be >= 0");
    }
};

struct ControlState {
    bool v_fm = false;
    bool v_pre = false;
    bool v_to = false;
};

// Gate logic of the bus driver M1, a P-switch with active-low control:
// G_M1 = !V_FM + !V_PRE * V11. M1 conducts when the gate signal is low.
inline bool matchline_gate(bool v_fm, bool v_pre, bool v11) {
    const bool gate = !v_fm || (!v_pre && v11);
    return !gate;
}

enum class DischargeMode { Irreversible, Recovery };

struct BitTestResult {
    BusState bus;
    double e_lost = 0.0;  // joules
};

// Test one stored bit against the charged matchline. A true bit leaves the
// bus alone. A false bit discharges it: irreversibly to ground (the full
// capacitor energy is abandoned) or back through the supply, costing only the
// simple-model recovery loss at the given frequency and series resistance.
inline BitTestResult bit_test(const CellState& cell, const BusState& bus, DischargeMode mode,
                              double f = 10e6, double r_ser = 5e3) {
    bus.validate();
    BitTestResult r{bus, 0.0};
    if (cell.bit) return r;
    if (mode == DischargeMode::Irreversible) {
        r.e_lost = 0.5 * bus.capacitance * bus.voltage * bus.voltage;
        r.bus.voltage = 0.0;
    } else {
        r.e_lost = predicted_recovery_energy(f, r_ser, bus.capacitance, bus.v_dd);
        r.bus.voltage = 0.5 * bus.v_dd;
    }
    return r;
}

enum class ToggleOutcome { Toggled, BelowThreshold, PulseTooShort, PulseTooLong };

struct ToggleResult {
    CellState cell;
    BusState bus;
    bool toggled = false;
    ToggleOutcome outcome = ToggleOutcome::BelowThreshold;
};

// Conditional toggle: the bit flips only when the bus sits above the trigger
// threshold and the pulse width falls inside the usable window. Each toggle
// droops the bus a little; once it crosses the threshold no further toggles
// happen.
inline ToggleResult conditional_toggle(const CellState& cell, const BusState& bus,
                                       double pulse_width, const TriggerParams& p) {
    p.validate();
    bus.validate();
    if (!(pulse_width > 0.0)) throw std::invalid_argument("toggle: pulse width must be > 0");

    ToggleResult r{cell, bus, false, ToggleOutcome::Toggled};
    if (pulse_width < p.min_pulse) {
        r.outcome = ToggleOutcome::PulseTooShort;
        return r;
    }
    if (pulse_width > p.max_pulse) {
        r.outcome = ToggleOutcome::PulseTooLong;
        return r;
    }
    // The threshold must be strictly exceeded (with a 1 nV guard band so a bus
    // drooped to exactly the trigger level refuses the next toggle regardless
    // of rounding in the droop arithmetic).
    if (bus.voltage <= p.threshold_fraction * bus.v_dd + 1e-9) {
        r.outcome = ToggleOutcome::BelowThreshold;
        return r;
    }
    r.cell.bit = !cell.bit;
    r.bus.voltage = std::max(0.0, bus.voltage - p.droop_per_toggle);
    r.toggled = true;
    return r;
}

struct TriggerMargin {
    double product = 0.0;  // R [kOhm] * W [um]
    bool ok = false;       // must exceed 4 for reliable triggering
};

inline TriggerMargin trigger_margin(double r_kohm, double w_um) {
    if (!(r_kohm > 0.0) || !(w_um > 0.0))
        throw std::invalid_argument("trigger margin: inputs must be > 0");
    const double product = r_kohm * w_um;
    return {product, product > 4.0};
}

}  // namespace tmsim

#endif  // TMSIM_TOGGLE_CELL_HPP
