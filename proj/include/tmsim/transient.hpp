// Lumped-RC transient engine for the matchline bus: one capacitor, a driver
// switch with constant on-resistance fed by an arbitrary supply waveform, an
// optional ground (discharge) switch, and an optional stray resistance.
// Energies are accumulated by trapezoidal quadrature of v*i on the
// integration grid.

#ifndef TMSIM_TRANSIENT_HPP
#define TMSIM_TRANSIENT_HPP

#include <string>
#include <utility>
#include <vector>

#include "tmsim/adiabatic.hpp"

namespace tmsim {

struct BusNetwork {
    double c_bus = 1e-12;  // farads
    double r_on = 5e3;     // ohms, driver channel when conducting
    double r_gnd = 5e3;    // ohms, discharge path when conducting
    double r_stray = std::numeric_limits<double>::infinity();  // ohms; inf = none
    SupplyWaveform supply = SupplyWaveform::half_sinusoid(0.5, 1.0, 10e6);
    double v_init = 0.5;   // volts, bus precharge (default half of v_high)

    void validate() const {
        if (!(c_bus > 0.0)) throw std::invalid_argument("network: C_bus must be > 0");
        if (!(r_on > 0.0)) throw std::invalid_argument("network: R_on must be > 0");
        if (!(r_gnd > 0.0)) throw std::invalid_argument("network: R_gnd must be > 0");
        if (!(r_stray > 0.0)) throw std::invalid_argument("network: R_stray must be > 0");
        supply.validate();
        if (v_init < 0.0 || v_init > supply.v_high)
            throw std::invalid_argument("network: v_init must lie in [0, v_high]");
    }
};

struct SwitchInterval {
    double t_start = 0.0;
    double t_end = 0.0;
    bool driver_on = false;
    bool ground_on = false;
};
using SwitchSchedule = std::vector<SwitchInterval>;

struct SimConfig {
    double dt = 0.0;          // integration step
    double horizon = 0.0;     // total simulated time
    double print_step = 0.0;  // output decimation

    void validate() const {
        if (!(dt > 0.0) || !(dt <= print_step) || !(print_step <= horizon))
            throw std::invalid_argument("sim config: require 0 < dt <= print_step <= horizon");
        if (print_step > horizon / 100.0 * (1.0 + 1e-12))
            throw std::invalid_argument("sim config: print_step must be <= horizon/100");
    }
};

struct TraceSample {
    double t;
    double v_bus;
    double v_supply;
    double i_supply;   // into the bus through the driver
    double e_supply;   // cumulative net energy drawn from the supply
    double e_diss;     // cumulative resistive dissipation (all paths)
};

struct TransientTrace {
    std::vector<TraceSample> samples;
    double c_bus = 0.0;
    double v_init = 0.0;

    const TraceSample& front() const { return samples.front(); }
    const TraceSample& back() const { return samples.back(); }
};

// Integrate the bus node with the trapezoidal rule on a fixed grid aligned to
// the schedule boundaries. Throws on an invalid schedule or when dt exceeds a
// tenth of the smallest active time constant.
TransientTrace simulate(const BusNetwork& net, const SwitchSchedule& sched, const SimConfig& cfg);

// Cumulative net supply energy at time t (linear interpolation between
// samples). Throws if t lies outside the trace.
double energy_from_supply(const TransientTrace& trace, double t);

// Cumulative dissipated energy at time t.
double dissipated_energy(const TransientTrace& trace, double t);

// Bus voltage at time t.
double bus_voltage(const TransientTrace& trace, double t);

// Largest violation of e_supply = dE_cap + e_diss over the whole trace,
// expressed as a fraction of the peak supply energy.
double conservation_residual(const TransientTrace& trace);

struct TwoCycleResult {
    TransientTrace trace;
    // Net dissipated energy at each half-cycle boundary (supply energy minus
    // the recoverable charge still sitting on the bus), four entries.
    std::vector<double> e_net_per_half_cycle;
    // Raw net supply energy at the end of the protocol (the value an energy
    // meter on the supply reads after two full cycles).
    double e_supply_end = 0.0;
    // Supply-energy reading at the first crest of the supply waveform, where
    // the bus carries its maximum charge.
    double e_supply_peak = 0.0;
};

// Conditional-toggle charge-recovery protocol over two supply cycles.
// Toggle output false: the driver conducts throughout; the bus charges and
// discharges once per cycle. Toggle output true: the bus charges on the first
// half-cycle, holds through cycles two and three, and returns its charge on
// the final half-cycle.
TwoCycleResult run_two_cycle_protocol(const BusNetwork& net, bool toggle_output_true, double f);

using SweepTable = std::vector<std::pair<double, double>>;

// Two-cycle net supply energy versus supply frequency. The parallel variant
// dispatches independent simulations with OpenMP; results are identical to
// the serial reference.
SweepTable sweep_frequency(const BusNetwork& net, bool toggle_output_true,
                           const std::vector<double>& freqs);
SweepTable sweep_frequency_serial(const BusNetwork& net, bool toggle_output_true,
                                  const std::vector<double>& freqs);

// One charge/discharge cycle versus driver width. R_on = rho_w / W with
// rho_w = 12.5 kOhm*um, calibrated so W = 2.5 um gives the fitted 5 kOhm.
inline constexpr double kWidthResistivityOhmUm = 12.5e3;

SweepTable sweep_driver_width(const BusNetwork& net_base, const std::vector<double>& widths_um,
                              double f);
SweepTable sweep_driver_width_serial(const BusNetwork& net_base,
                                     const std::vector<double>& widths_um, double f);

// Dissipation of two conventional step-driven charge/dump operations on the
// same network (bus taken 0 -> V_DD from a DC rail, then dumped to ground).
double step_drive_two_cycle_dissipation(const BusNetwork& net);

// Step-drive dissipation divided by the two-cycle recovery net energy at f.
double improvement_ratio(const BusNetwork& net, double f);

// Locale-independent CSV serialization. Traces carry the header
// t_s,v_bus_V,v_supply_V,i_A,e_supply_J,e_diss_J; sweep tables take their two
// column names from the caller (f_Hz,e_two_cycle_J or W_um,e_cycle_J).
std::string trace_to_csv(const TransientTrace& trace);
std::string sweep_to_csv(const SweepTable& table, const std::string& col_a,
                         const std::string& col_b);

}  // namespace tmsim

#endif  // TMSIM_TRANSIENT_HPP
