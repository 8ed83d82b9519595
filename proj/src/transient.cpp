#include "tmsim/transient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tmsim {

namespace {

struct SegmentState {
    bool driver_on;
    bool ground_on;
};

// Split [0, horizon] at every schedule edge and tag each piece with its
// switch state. Gaps between intervals are "everything off".
struct Segment {
    double t0, t1;
    SegmentState s;
};

std::vector<Segment> build_segments(const SwitchSchedule& sched, double horizon) {
    double prev_end = 0.0;
    for (const auto& iv : sched) {
        if (!(iv.t_start < iv.t_end))
            throw std::invalid_argument("schedule: interval must have t_start < t_end");
        if (iv.t_start < prev_end - 1e-18)
            throw std::invalid_argument("schedule: intervals must be sorted and non-overlapping");
        if (iv.t_end > horizon * (1.0 + 1e-12))
            throw std::invalid_argument("schedule: interval exceeds horizon");
        prev_end = iv.t_end;
    }
    std::vector<Segment> segs;
    double t = 0.0;
    for (const auto& iv : sched) {
        if (iv.t_start > t)
            segs.push_back({t, iv.t_start, {false, false}});
        segs.push_back({iv.t_start, std::min(iv.t_end, horizon), {iv.driver_on, iv.ground_on}});
        t = iv.t_end;
    }
    if (t < horizon)
        segs.push_back({t, horizon, {false, false}});
    return segs;
}

}  // namespace

TransientTrace simulate(const BusNetwork& net, const SwitchSchedule& sched, const SimConfig& cfg) {
    net.validate();
    cfg.validate();
    const auto segs = build_segments(sched, cfg.horizon);

    const double c = net.c_bus;
    const double g_stray = std::isinf(net.r_stray) ? 0.0 : 1.0 / net.r_stray;

    // Reject steps too coarse for the fastest active time constant.
    for (const auto& seg : segs) {
        double g = g_stray;
        if (seg.s.driver_on) g += 1.0 / net.r_on;
        if (seg.s.ground_on) g += 1.0 / net.r_gnd;
        if (g > 0.0 && cfg.dt > (c / g) / 10.0)
            throw std::invalid_argument("sim config: dt exceeds a tenth of the smallest active RC");
    }

    TransientTrace trace;
    trace.c_bus = c;
    trace.v_init = net.v_init;

    double v = net.v_init;
    double e_sup = 0.0;
    double e_diss = 0.0;
    double next_print = cfg.print_step;
    double last_emitted = -1.0;

    auto emit = [&](double t, double v_bus, double v_s, double i) {
        if (t <= last_emitted) return;
        trace.samples.push_back({t, v_bus, v_s, i, e_sup, e_diss});
        last_emitted = t;
    };

    {
        const SegmentState& s0 = segs.front().s;
        const double vs = eval_supply(net.supply, 0.0);
        const double i = s0.driver_on ? (vs - v) / net.r_on : 0.0;
        emit(0.0, v, vs, i);
    }

    for (const auto& seg : segs) {
        const double g_drv = seg.s.driver_on ? 1.0 / net.r_on : 0.0;
        const double g_gnd = seg.s.ground_on ? 1.0 / net.r_gnd : 0.0;
        const double g_sum = g_drv + g_gnd + g_stray;
        const double b = g_sum / c;

        const double len = seg.t1 - seg.t0;
        if (len <= 0.0) continue;
        const long n = std::max(1L, static_cast<long>(std::ceil(len / cfg.dt)));
        const double h = len / static_cast<double>(n);

        double vs0 = eval_supply(net.supply, seg.t0);
        for (long k = 0; k < n; ++k) {
            const double t1 = (k + 1 == n) ? seg.t1 : seg.t0 + (k + 1) * h;
            const double vs1 = eval_supply(net.supply, t1);

            const double a0 = g_drv * vs0 / c;
            const double a1 = g_drv * vs1 / c;
            const double v_new =
                ((1.0 - 0.5 * h * b) * v + 0.5 * h * (a0 + a1)) / (1.0 + 0.5 * h * b);

            const double i0 = g_drv * (vs0 - v);
            const double i1 = g_drv * (vs1 - v_new);
            e_sup += 0.5 * h * (vs0 * i0 + vs1 * i1);

            const double pd0 = g_drv * (vs0 - v) * (vs0 - v) + (g_gnd + g_stray) * v * v;
            const double pd1 =
                g_drv * (vs1 - v_new) * (vs1 - v_new) + (g_gnd + g_stray) * v_new * v_new;
            e_diss += 0.5 * h * (pd0 + pd1);

            v = v_new;
            vs0 = vs1;

            if (t1 >= next_print - 1e-15 * cfg.horizon) {
                emit(t1, v, vs1, i1);
                while (next_print <= t1 + 1e-15 * cfg.horizon) next_print += cfg.print_step;
            }
        }
        // Always land a sample on the segment edge; switch states change here.
        {
            const double vs = eval_supply(net.supply, seg.t1);
            emit(seg.t1, v, vs, g_drv * (vs - v));
        }
    }
    return trace;
}

namespace {

const TraceSample* find_bracket(const TransientTrace& trace, double t) {
    const auto& s = trace.samples;
    if (s.empty() || t < s.front().t - 1e-18 || t > s.back().t * (1.0 + 1e-12) + 1e-18)
        throw std::out_of_range("time outside trace");
    auto it = std::lower_bound(s.begin(), s.end(), t,
                               [](const TraceSample& a, double tt) { return a.t < tt; });
    if (it == s.begin()) return &*it;
    return &*(it - 1);
}

double interp(const TransientTrace& trace, double t, double TraceSample::*field) {
    const TraceSample* lo = find_bracket(trace, t);
    const TraceSample* hi = lo + 1;
    if (hi == trace.samples.data() + trace.samples.size() || t <= lo->t)
        return lo->*field;
    const double w = (t - lo->t) / (hi->t - lo->t);
    return lo->*field + w * (hi->*field - lo->*field);
}

}  // namespace

double energy_from_supply(const TransientTrace& trace, double t) {
    return interp(trace, t, &TraceSample::e_supply);
}

double dissipated_energy(const TransientTrace& trace, double t) {
    return interp(trace, t, &TraceSample::e_diss);
}

double bus_voltage(const TransientTrace& trace, double t) {
    return interp(trace, t, &TraceSample::v_bus);
}

double conservation_residual(const TransientTrace& trace) {
    double peak = 0.0;
    for (const auto& s : trace.samples) peak = std::max(peak, std::abs(s.e_supply));
    if (peak == 0.0) return 0.0;
    double worst = 0.0;
    for (const auto& s : trace.samples) {
        const double de_cap =
            0.5 * trace.c_bus * (s.v_bus * s.v_bus - trace.v_init * trace.v_init);
        worst = std::max(worst, std::abs(s.e_supply - de_cap - s.e_diss));
    }
    return worst / peak;
}

TwoCycleResult run_two_cycle_protocol(const BusNetwork& net, bool toggle_output_true, double f) {
    if (!(f > 0.0)) throw std::invalid_argument("protocol: frequency must be > 0");
    net.validate();

    const double v_dd = net.supply.v_high;
    BusNetwork n = net;
    n.supply = SupplyWaveform::half_sinusoid(0.5 * v_dd, v_dd, f);
    n.validate();

    const double half = 0.5 / f;
    const double horizon = 4.0 * half;

    // Gate logic G_M1 = !V_FM + !V_PRE * V11 (active low): with V_FM held
    // true for the whole instruction, the driver conducts whenever V_PRE is
    // true or the toggle output is false.
    SwitchSchedule sched;
    for (int k = 0; k < 4; ++k) {
        const bool v_pre = (k == 0) || (k == 3);
        const bool conduct = v_pre || !toggle_output_true;
        sched.push_back({k * half, (k + 1) * half, conduct, false});
    }

    const double g_stray = std::isinf(n.r_stray) ? 0.0 : 1.0 / n.r_stray;
    const double tau = n.c_bus / (1.0 / n.r_on + g_stray);
    SimConfig cfg;
    cfg.dt = std::min(half, tau) / 200.0;
    cfg.print_step = half / 50.0;
    cfg.horizon = horizon;

    TwoCycleResult res;
    res.trace = simulate(n, sched, cfg);
    for (int k = 1; k <= 4; ++k) {
        const double t = k * half;
        const double vb = bus_voltage(res.trace, t);
        const double recoverable = 0.5 * n.c_bus * (vb * vb - n.v_init * n.v_init);
        res.e_net_per_half_cycle.push_back(energy_from_supply(res.trace, t) - recoverable);
    }
    res.e_supply_end = res.trace.back().e_supply;
    // Supply-energy reading at the first crest (mid of the first cycle), where
    // the bus holds its maximum charge: the figure-of-merit "peak" energy.
    res.e_supply_peak = energy_from_supply(res.trace, half);
    return res;
}

SweepTable sweep_frequency_serial(const BusNetwork& net, bool toggle_output_true,
                                  const std::vector<double>& freqs) {
    SweepTable table(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        table[i] = {freqs[i],
                    run_two_cycle_protocol(net, toggle_output_true, freqs[i]).e_supply_end};
    }
    return table;
}

SweepTable sweep_frequency(const BusNetwork& net, bool toggle_output_true,
                           const std::vector<double>& freqs) {
    SweepTable table(freqs.size());
    const long long n = static_cast<long long>(freqs.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        table[i] = {freqs[i],
                    run_two_cycle_protocol(net, toggle_output_true, freqs[i]).e_supply_end};
    }
    return table;
}

namespace {

// One full charge/discharge cycle with the driver conducting throughout.
double one_cycle_energy(const BusNetwork& net, double f) {
    const double v_dd = net.supply.v_high;
    BusNetwork n = net;
    n.supply = SupplyWaveform::half_sinusoid(0.5 * v_dd, v_dd, f);
    n.validate();

    const double half = 0.5 / f;
    SwitchSchedule sched = {{0.0, half, true, false}, {half, 2.0 * half, true, false}};

    const double g_stray = std::isinf(n.r_stray) ? 0.0 : 1.0 / n.r_stray;
    const double tau = n.c_bus / (1.0 / n.r_on + g_stray);
    SimConfig cfg;
    cfg.dt = std::min(half, tau) / 200.0;
    cfg.print_step = half / 50.0;
    cfg.horizon = 2.0 * half;

    return simulate(n, sched, cfg).back().e_supply;
}

}  // namespace

SweepTable sweep_driver_width_serial(const BusNetwork& net_base,
                                     const std::vector<double>& widths_um, double f) {
    SweepTable table(widths_um.size());
    for (std::size_t i = 0; i < widths_um.size(); ++i) {
        if (!(widths_um[i] > 0.0))
            throw std::invalid_argument("width sweep: widths must be > 0");
        BusNetwork n = net_base;
        n.r_on = kWidthResistivityOhmUm / widths_um[i];
        table[i] = {widths_um[i], one_cycle_energy(n, f)};
    }
    return table;
}

SweepTable sweep_driver_width(const BusNetwork& net_base, const std::vector<double>& widths_um,
                              double f) {
    for (double w : widths_um)
        if (!(w > 0.0)) throw std::invalid_argument("width sweep: widths must be > 0");
    SweepTable table(widths_um.size());
    const long long n = static_cast<long long>(widths_um.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        BusNetwork nb = net_base;
        nb.r_on = kWidthResistivityOhmUm / widths_um[i];
        table[i] = {widths_um[i], one_cycle_energy(nb, f)};
    }
    return table;
}

double step_drive_two_cycle_dissipation(const BusNetwork& net) {
    net.validate();
    const double v_dd = net.supply.v_high;
    BusNetwork n = net;
    n.supply = SupplyWaveform::step(0.0, v_dd);
    n.v_init = 0.0;

    // Charge from the DC rail, dump to ground, twice. Ten time constants per
    // phase settles each exponential to under 5e-5.
    const double t_chg = 10.0 * n.r_on * n.c_bus;
    const double t_dmp = 10.0 * n.r_gnd * n.c_bus;
    SwitchSchedule sched;
    double t = 0.0;
    for (int k = 0; k < 2; ++k) {
        sched.push_back({t, t + t_chg, true, false});
        t += t_chg;
        sched.push_back({t, t + t_dmp, false, true});
        t += t_dmp;
    }

    SimConfig cfg;
    cfg.dt = std::min(n.r_on, n.r_gnd) * n.c_bus / 200.0;
    cfg.horizon = t;
    cfg.print_step = t / 200.0;
    return simulate(n, sched, cfg).back().e_diss;
}

std::string trace_to_csv(const TransientTrace& trace) {
    std::string out = "t_s,v_bus_V,v_supply_V,i_A,e_supply_J,e_diss_J\n";
    char buf[160];
    for (const auto& s : trace.samples) {
        std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e,%.12e,%.12e\n", s.t, s.v_bus,
                      s.v_supply, s.i_supply, s.e_supply, s.e_diss);
        out += buf;
    }
    return out;
}

std::string sweep_to_csv(const SweepTable& table, const std::string& col_a,
                         const std::string& col_b) {
    std::string out = col_a + "," + col_b + "\n";
    char buf[80];
    for (const auto& [x, e] : table) {
        std::snprintf(buf, sizeof buf, "%.12e,%.12e\n", x, e);
        out += buf;
    }
    return out;
}

double improvement_ratio(const BusNetwork& net, double f) {
    const double e_step = step_drive_two_cycle_dissipation(net);
    const auto res = run_two_cycle_protocol(net, false, f);
    const double e_sin = res.e_net_per_half_cycle.back();
    if (!(e_sin > 0.0)) return std::numeric_limits<double>::infinity();
    return e_step / e_sin;
}

}  // namespace tmsim
