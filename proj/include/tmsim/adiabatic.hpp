// Closed-form energy model for adiabatic (charge-recovery) switching of a
// lumped RC load. These expressions are exact in the slow-charging
// approximation and serve as oracles for the transient engine.

#ifndef TMSIM_ADIABATIC_HPP
#define TMSIM_ADIABATIC_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tmsim {

enum class SupplyKind { Step, Ramp, HalfSinusoid };

// Supply waveform description. All quantities SI.
struct SupplyWaveform {
    SupplyKind kind = SupplyKind::Step;
    double v_low = 0.0;       // volts
    double v_high = 0.0;      // volts
    double rise_time = 0.0;   // seconds, Ramp only
    double frequency = 0.0;   // hertz, HalfSinusoid only

    static SupplyWaveform step(double v_low, double v_high) {
        SupplyWaveform w{SupplyKind::Step, v_low, v_high, 0.0, 0.0};
        w.validate();
        return w;
    }
    static SupplyWaveform ramp(double v_low, double v_high, double rise_time) {
        SupplyWaveform w{SupplyKind::Ramp, v_low, v_high, rise_time, 0.0};
        w.validate();
        return w;
    }
    static SupplyWaveform half_sinusoid(double v_low, double v_high, double frequency) {
        SupplyWaveform w{SupplyKind::HalfSinusoid, v_low, v_high, 0.0, frequency};
        w.validate();
        return w;
    }

    void validate() const {
        if (!(v_high > v_low) || v_low < 0.0)
            throw std::invalid_argument("supply: require v_high > v_low >= 0");
        if (kind == SupplyKind::Ramp && !(rise_time > 0.0))
            throw std::invalid_argument("supply: ramp needs rise_time > 0");
        if (kind == SupplyKind::HalfSinusoid && !(frequency > 0.0))
            throw std::invalid_argument("supply: half-sinusoid needs frequency > 0");
    }
};

// Lumped driver/load model: channel resistance R charging bus capacitance C
// toward V_1, with an optional stray resistance to ground.
struct LumpedParams {
    double r = 0.0;  // ohms
    double c = 0.0;  // farads
    double r_stray = std::numeric_limits<double>::infinity();  // ohms; inf = none
    double v1 = 0.0; // volts

    void validate() const {
        if (r < 0.0) throw std::invalid_argument("lumped: R must be >= 0");
        if (!(c > 0.0)) throw std::invalid_argument("lumped: C must be > 0");
        if (!(r_stray > 0.0)) throw std::invalid_argument("lumped: R_stray must be > 0");
    }
};

// Supply voltage at time t. The half-sinusoid starts at v_low (negated
// cosine), reaches v_high at half a period, and repeats.
inline double eval_supply(const SupplyWaveform& w, double t) {
    switch (w.kind) {
    case SupplyKind::Step:
        return t < 0.0 ? w.v_low : w.v_high;
    case SupplyKind::Ramp: {
        if (t <= 0.0) return w.v_low;
        if (t >= w.rise_time) return w.v_high;
        return w.v_low + (w.v_high - w.v_low) * (t / w.rise_time);
    }
    case SupplyKind::HalfSinusoid: {
        const double mid = 0.5 * (w.v_low + w.v_high);
        const double amp = 0.5 * (w.v_high - w.v_low);
        return mid - amp * std::cos(2.0 * std::numbers::pi * w.frequency * t);
    }
    }
    throw std::logic_error("eval_supply: bad waveform kind");
}

// Quasi-static charging current when the supply ramps 0 -> V_1 in time T.
inline double ramp_charging_current(const LumpedParams& p, double rise_time) {
    p.validate();
    if (!(rise_time > 0.0)) throw std::invalid_argument("rise_time must be > 0");
    return p.c * p.v1 / rise_time;
}

// Constant resistor power during the slow ramp: (RC/T^2) C V_1^2.
inline double ramp_resistor_power(const LumpedParams& p, double rise_time) {
    p.validate();
    if (!(rise_time > 0.0)) throw std::invalid_argument("rise_time must be > 0");
    return (p.r * p.c / (rise_time * rise_time)) * p.c * p.v1 * p.v1;
}

// Resistor energy for one slow ramp: (RC/T) C V_1^2. Vanishes as T -> inf.
inline double ramp_resistor_energy(const LumpedParams& p, double rise_time) {
    p.validate();
    if (!(rise_time > 0.0)) throw std::invalid_argument("rise_time must be > 0");
    return (p.r * p.c / rise_time) * p.c * p.v1 * p.v1;
}

// Energy change of a capacitor moved between two voltages; negative on
// discharge.
inline double capacitor_energy_delta(double c, double v0, double v1) {
    if (!(c > 0.0)) throw std::invalid_argument("C must be > 0");
    return 0.5 * c * (v1 * v1 - v0 * v0);
}

struct StepChargeEnergies {
    double from_supply;   // C V_1^2
    double in_capacitor;  // half of it
    double in_resistor;   // the other half, lost as heat
};

// Irreversible step charging split: the DC supply delivers C V_1^2, the
// capacitor keeps half, the channel burns the rest.
inline StepChargeEnergies step_charge_energies(double c, double v1) {
    if (!(c > 0.0)) throw std::invalid_argument("C must be > 0");
    const double e_cap = 0.5 * c * v1 * v1;
    return {2.0 * e_cap, e_cap, e_cap};
}

// Conventional CMOS dynamic power f C V_DD^2.
inline double conventional_dynamic_power(double f1, double c, double v_dd) {
    if (f1 < 0.0 || c < 0.0 || v_dd < 0.0)
        throw std::invalid_argument("conventional_dynamic_power: inputs must be >= 0");
    return f1 * c * v_dd * v_dd;
}

// Two-cycle recovery loss predicted by the simple model: E = 2 f R_ser C^2 V_1^2.
// Four half-swing ramp legs of duration 1/(2f) each.
inline double predicted_recovery_energy(double f, double r_ser, double c, double v1) {
    if (!(f > 0.0) || !(r_ser > 0.0) || !(c > 0.0) || !(v1 > 0.0))
        throw std::invalid_argument("predicted_recovery_energy: inputs must be > 0");
    return 2.0 * f * r_ser * c * c * v1 * v1;
}

// Inverse of predicted_recovery_energy: back out the series resistance from a
// measured two-cycle energy.
inline double fit_series_resistance(double f, double e_two_cycle, double c, double v1) {
    if (!(f > 0.0) || !(c > 0.0) || !(v1 > 0.0))
        throw std::invalid_argument("fit_series_resistance: f, C, V_1 must be > 0");
    if (e_two_cycle < 0.0)
        throw std::invalid_argument("fit_series_resistance: energy must be >= 0");
    return e_two_cycle / (2.0 * f * c * c * v1 * v1);
}

// Slope of a log-log energy-versus-frequency curve between two points.
inline double loglog_slope(double f_a, double e_a, double f_b, double e_b) {
    if (!(f_a > 0.0) || !(f_b > 0.0) || !(e_a > 0.0) || !(e_b > 0.0))
        throw std::invalid_argument("loglog_slope: all values must be > 0");
    if (f_a == f_b)
        throw std::invalid_argument("loglog_slope: frequencies must differ");
    return (std::log(e_b) - std::log(e_a)) / (std::log(f_b) - std::log(f_a));
}

}  // namespace tmsim

#endif  // TMSIM_ADIABATIC_HPP
