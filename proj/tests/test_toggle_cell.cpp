#include <doctest.h>

#include "tmsim/toggle_cell.hpp"

using namespace tmsim;

TEST_CASE("matchline gate truth table") {
    // G_M1 = !V_FM + !V_PRE*V11, active low: exhaustive over all 8 triples
    for (int fm = 0; fm <= 1; ++fm)
        for (int pre = 0; pre <= 1; ++pre)
            for (int v11 = 0; v11 <= 1; ++v11) {
                const bool expect = !((!fm) || ((!pre) && v11));
                CHECK(matchline_gate(fm, pre, v11) == expect);
            }
    CHECK(matchline_gate(true, true, false));   // charge phase
    CHECK(matchline_gate(true, true, true));
    CHECK_FALSE(matchline_gate(false, true, true));   // V_FM false blocks M1
    CHECK_FALSE(matchline_gate(true, false, true));   // bus holds for the toggle
    CHECK(matchline_gate(true, false, false));        // discharge through the supply
}

TEST_CASE("bit test") {
    BusState bus{1.0, 1e-12, 1.0};

    SUBCASE("true bit leaves the bus alone in both modes") {
        CellState cell{true};
        for (auto mode : {DischargeMode::Irreversible, DischargeMode::Recovery}) {
            const auto r = bit_test(cell, bus, mode);
            CHECK(r.bus.voltage == 1.0);
            CHECK(r.e_lost == 0.0);
        }
    }
    SUBCASE("false bit discharges irreversibly") {
        const auto r = bit_test(CellState{false}, bus, DischargeMode::Irreversible);
        CHECK(r.bus.voltage == 0.0);
        CHECK(r.e_lost == doctest::Approx(0.5e-12));
    }
    SUBCASE("false bit under recovery costs the simple-model loss") {
        const auto r = bit_test(CellState{false}, bus, DischargeMode::Recovery, 10e6, 5e3);
        CHECK(r.bus.voltage == doctest::Approx(0.5));
        CHECK(r.e_lost == doctest::Approx(100e-15));  // 2 f R C^2 V^2 at 10 MHz
    }
}

TEST_CASE("conditional toggle threshold and pulse window") {
    TriggerParams p;
    CellState off{false};

    SUBCASE("fires above 70% of VDD") {
        BusState bus{0.71, 1e-12, 1.0};
        const auto r = conditional_toggle(off, bus, 5e-9, p);
        CHECK(r.toggled);
        CHECK(r.cell.bit);
        CHECK(r.bus.voltage == doctest::Approx(0.66));
    }
    SUBCASE("holds below the threshold") {
        BusState bus{0.65, 1e-12, 1.0};
        const auto r = conditional_toggle(off, bus, 5e-9, p);
        CHECK_FALSE(r.toggled);
        CHECK(r.outcome == ToggleOutcome::BelowThreshold);
        CHECK_FALSE(r.cell.bit);
    }
    SUBCASE("rejects pulses outside the window") {
        BusState bus{1.0, 1e-12, 1.0};
        const auto fast = conditional_toggle(off, bus, 1e-9, p);
        CHECK_FALSE(fast.toggled);
        CHECK(fast.outcome == ToggleOutcome::PulseTooShort);
        const auto slow = conditional_toggle(off, bus, 25e-9, p);
        CHECK_FALSE(slow.toggled);
        CHECK(slow.outcome == ToggleOutcome::PulseTooLong);
        CHECK_THROWS_AS(conditional_toggle(off, bus, 0.0, p), std::invalid_argument);
    }
}

TEST_CASE("double toggle is the identity when droop is disabled") {
    TriggerParams p;
    p.droop_per_toggle = 0.0;
    for (bool start : {false, true}) {
        BusState bus{0.9, 1e-12, 1.0};
        CellState cell{start};
        const auto r1 = conditional_toggle(cell, bus, 5e-9, p);
        const auto r2 = conditional_toggle(r1.cell, r1.bus, 5e-9, p);
        CHECK(r1.toggled);
        CHECK(r2.toggled);
        CHECK(r2.cell.bit == start);
    }
}

TEST_CASE("no toggle below threshold anywhere on a 1 mV grid") {
    TriggerParams p;
    for (int mv = 0; mv < 700; ++mv) {
        BusState bus{mv * 1e-3, 1e-12, 1.0};
        const auto r = conditional_toggle(CellState{false}, bus, 5e-9, p);
        CHECK_FALSE(r.toggled);
        CHECK_FALSE(r.cell.bit);
    }
}

TEST_CASE("droop walks the bus down until toggling stops") {
    TriggerParams p;  // droop 0.05 V
    BusState bus{1.0, 1e-12, 1.0};
    CellState cell{false};
    int toggles = 0;
    for (int k = 0; k < 100; ++k) {
        const auto r = conditional_toggle(cell, bus, 5e-9, p);
        if (!r.toggled) break;
        // voltage steps down by the droop each time
        CHECK(r.bus.voltage == doctest::Approx(1.0 - (toggles + 1) * 0.05));
        cell = r.cell;
        bus = r.bus;
        ++toggles;
    }
    CHECK(toggles == 6);  // 1.0 - 6*0.05 lands at the 0.70 cutoff
    CHECK(bus.voltage < 0.7 + 1e-9);
}

TEST_CASE("trigger margin rule") {
    const auto set = trigger_margin(12.0, 1.0);
    CHECK(set.product == 12.0);
    CHECK(set.ok);
    const auto boundary = trigger_margin(4.0, 1.0);
    CHECK(boundary.product == 4.0);
    CHECK_FALSE(boundary.ok);
    CHECK(trigger_margin(8.0, 1.0).ok);
    CHECK(trigger_margin(2.0, 2.5).ok);  // 5 > 4
    CHECK_THROWS_AS(trigger_margin(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(trigger_margin(1.0, -2.0), std::invalid_argument);
}
