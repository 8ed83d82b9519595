#include <doctest.h>

#include <random>

#include "tmsim/machine.hpp"

using namespace tmsim;

TEST_CASE("instruction classification") {
    Instruction keyword({0, 1, 2, 3, 4, 5, 6}, {7});
    CHECK(classify_instruction(keyword) == Reversibility::Reversible);

    Instruction self_test({7}, {7});
    CHECK(classify_instruction(self_test) == Reversibility::Irreversible);

    Instruction unconditional({}, {7});
    CHECK(classify_instruction(unconditional) == Reversibility::Reversible);

    CHECK_THROWS_AS(Instruction({0}, {}), std::invalid_argument);
    CHECK_THROWS_AS(Instruction({0}, {99}), std::invalid_argument);
    Instruction narrow({0}, {5});
    CHECK_THROWS_AS(narrow.validate(4), std::invalid_argument);
}

TEST_CASE("execute: keyword match complements the flag bit") {
    Machine m(8, 3);
    m.words[0] = 0x7f;  // bits 0..6 true, bit 7 false
    m.words[1] = 0x7e;  // bit 0 false -> no match
    m.words[2] = 0xff;  // all true, bit 7 toggles off

    Instruction i({0, 1, 2, 3, 4, 5, 6}, {7});
    EnergyModelParams p;
    const auto entry = execute_instruction(m, i, p);

    CHECK(m.words[0] == 0xff);
    CHECK(m.words[1] == 0x7e);  // unchanged
    CHECK(m.words[2] == 0x7f);
    CHECK(entry.matched == 2);
    CHECK(entry.unmatched == 1);
    CHECK(entry.cls == Reversibility::Reversible);
}

TEST_CASE("ledger arithmetic at the default energy constants") {
    Machine m(8, 5);
    // 2 words match test {0,1}, 3 do not
    m.words = {0x03, 0x0b, 0x01, 0x02, 0x00};
    Instruction i({0, 1}, {7});
    EnergyModelParams p;
    const auto entry = execute_instruction(m, i, p);
    CHECK(entry.matched == 2);
    CHECK(entry.unmatched == 3);
    CHECK(entry.e_total == doctest::Approx(2 * 43e-15 + 3 * 77e-15).epsilon(1e-12));  // 317 fJ

    EnergyLedger ledger;
    ledger.entries.push_back(entry);
    const auto rep = energy_report(ledger);
    CHECK(rep.matched_to_unmatched_ratio == doctest::Approx(43.0 / 77.0).epsilon(1e-9));
    CHECK_FALSE(rep.irreversible_dominates);
}

TEST_CASE("irreversible discharge mode charges the abandoned-bus energy") {
    Machine m(8, 4);
    m.words = {0x01, 0x00, 0x00, 0x00};
    Instruction i({0}, {7});
    EnergyModelParams p;
    p.discharge = DischargeMode::Irreversible;
    const auto entry = execute_instruction(m, i, p);
    CHECK(entry.e_total == doctest::Approx(43e-15 + 3 * 500e-15).epsilon(1e-12));
}

TEST_CASE("wired-AND matches the brute-force predicate exhaustively") {
    const int width = 10;
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<int> test, toggle;
        for (int b = 0; b < width; ++b) {
            const auto r = rng() % 4;
            if (r == 0) test.push_back(b);
            else if (r == 1) toggle.push_back(b);
        }
        if (toggle.empty()) toggle.push_back(static_cast<int>(rng() % width));
        Instruction i(test, toggle);

        Machine m(width, std::size_t{1} << width);
        for (std::uint64_t w = 0; w < m.words.size(); ++w) m.words[w] = w;
        EnergyModelParams p;
        execute_instruction(m, i, p);

        for (std::uint64_t w = 0; w < m.words.size(); ++w) {
            bool all_true = true;
            for (int b : i.test_set)
                if (!((w >> b) & 1)) all_true = false;
            const std::uint64_t expect = all_true ? (w ^ i.toggle_mask) : w;
            CHECK(m.words[w] == expect);
        }
    }
}

TEST_CASE("serial cell-level reference agrees with the parallel kernel") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        Machine a = random_machine(16, 64, rng());
        Machine b = a;
        const auto prog = random_reversible_program(16, 20, rng());
        EnergyModelParams p;
        const auto la = run_program(a, prog, p);
        const auto lb = run_program_serial(b, prog, p);
        CHECK(a == b);
        REQUIRE(la.entries.size() == lb.entries.size());
        for (std::size_t k = 0; k < la.entries.size(); ++k) {
            CHECK(la.entries[k].matched == lb.entries[k].matched);
            CHECK(la.entries[k].e_total == lb.entries[k].e_total);
        }
    }
}

TEST_CASE("program inversion") {
    std::vector<Instruction> prog = {Instruction({0}, {1}), Instruction({2}, {3}),
                                     Instruction({}, {0})};
    const auto inv = invert_program(prog);
    REQUIRE(inv.size() == 3);
    CHECK(inv[0].toggle_set == prog[2].toggle_set);
    CHECK(inv[2].test_set == prog[0].test_set);

    CHECK(invert_program({}).empty());

    prog.push_back(Instruction({5}, {5}));
    try {
        invert_program(prog);
        FAIL("expected IrreversibleProgramError");
    } catch (const IrreversibleProgramError& e) {
        CHECK(e.index == 3);
    }
}

TEST_CASE("forward then inverted execution restores the machine") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        Machine m = random_machine(32, 128, rng());
        const Machine initial = m;
        const auto prog = random_reversible_program(32, 50, rng());
        EnergyModelParams p;
        run_program(m, prog, p);
        run_program(m, invert_program(prog), p);
        CHECK(m == initial);
    }
}

TEST_CASE("classification agrees with double-execution brute force") {
    // An instruction is irreversible exactly when running it twice fails to
    // restore some word, checked over all 2^k words.
    const int width = 8;
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<int> test, toggle;
        for (int b = 0; b < width; ++b) {
            const auto r = rng() % 3;
            if (r == 0) test.push_back(b);
            if (r == 1 || (r == 0 && rng() % 4 == 0)) toggle.push_back(b);
        }
        if (toggle.empty()) toggle.push_back(0);
        Instruction i(test, toggle);

        bool breaks_some_word = false;
        EnergyModelParams p;
        for (std::uint64_t w = 0; w < (1u << width); ++w) {
            Machine m(width, 1);
            m.words[0] = w;
            execute_instruction(m, i, p);
            execute_instruction(m, i, p);
            if (m.words[0] != w) breaks_some_word = true;
        }
        CHECK((classify_instruction(i) == Reversibility::Irreversible) == breaks_some_word);
    }
}

TEST_CASE("ledger energy is additive and permutation invariant") {
    std::mt19937_64 rng(3);
    Machine m = random_machine(16, 100, rng());
    const auto prog_a = random_reversible_program(16, 10, 1);
    const auto prog_b = random_reversible_program(16, 10, 2);
    EnergyModelParams p;

    Machine m1 = m;
    auto concat = prog_a;
    concat.insert(concat.end(), prog_b.begin(), prog_b.end());
    const auto rep_concat = energy_report(run_program(m1, concat, p));

    Machine m2 = m;
    const auto la = run_program(m2, prog_a, p);
    const auto lb = run_program(m2, prog_b, p);
    CHECK(rep_concat.e_total ==
          doctest::Approx(energy_report(la).e_total + energy_report(lb).e_total)
              .epsilon(1e-12));

    // permuting the words changes nothing in the ledger
    Machine m3 = m;
    std::shuffle(m3.words.begin(), m3.words.end(), std::mt19937_64(77));
    Machine m4 = m3;
    const auto rep3 = energy_report(run_program(m4, concat, p));
    CHECK(rep3.e_total == doctest::Approx(rep_concat.e_total).epsilon(1e-12));
}

TEST_CASE("word independence under broadcast") {
    const auto prog = random_reversible_program(12, 15, 11);
    EnergyModelParams p;
    Machine a = random_machine(12, 40, 21);
    Machine b = random_machine(12, 60, 22);
    Machine joined(12, 0);
    joined.words = a.words;
    joined.words.insert(joined.words.end(), b.words.begin(), b.words.end());

    run_program(a, prog, p);
    run_program(b, prog, p);
    run_program(joined, prog, p);

    std::vector<std::uint64_t> expect = a.words;
    expect.insert(expect.end(), b.words.begin(), b.words.end());
    CHECK(joined.words == expect);
}

TEST_CASE("parallel speedup") {
    CHECK(parallel_speedup(1e6, 100.0).factor == doctest::Approx(1e4));
    CHECK_FALSE(parallel_speedup(1e6, 100.0).slower_than_serial);
    CHECK(parallel_speedup(50.0, 50.0).factor == doctest::Approx(1.0));
    CHECK(parallel_speedup(50.0, 50.0).slower_than_serial);
    const auto bad = parallel_speedup(1.0, 10.0);
    CHECK(bad.factor == doctest::Approx(0.1));
    CHECK(bad.slower_than_serial);
    CHECK_THROWS_AS(parallel_speedup(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("snapshot and program text round-trip") {
    Machine m = random_machine(12, 30, 123);
    const auto text = format_snapshot(m);
    const Machine back = parse_snapshot(text);
    CHECK(back == m);

    const auto prog = random_reversible_program(12, 25, 5);
    const auto back_prog = parse_program(format_program(prog));
    REQUIRE(back_prog.size() == prog.size());
    for (std::size_t k = 0; k < prog.size(); ++k) {
        CHECK(back_prog[k].test_set == prog[k].test_set);
        CHECK(back_prog[k].toggle_set == prog[k].toggle_set);
    }

    CHECK_THROWS_AS(parse_snapshot("01\n0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_snapshot("02\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_program("toggle=1\n"), std::invalid_argument);

    const auto csv = ledger_to_csv(EnergyLedger{});
    CHECK(csv == "instr,matched,unmatched,class,e_J\n");
}

TEST_CASE("calibrated energy model pulls constants from the transient engine") {
    BusNetwork net;  // 1 pF, 5 kOhm, 1 V defaults
    const auto p = calibrated_energy_model(net, 10e6);
    CHECK(p.mode == EnergyMode::Calibrated);
    // hold (toggle output true) costs less than a full extra cycle
    CHECK(p.e_hold_two_cycle < p.e_cycle_two_cycle);
    CHECK(p.e_hold_two_cycle > 0.5 * 43e-15);
    CHECK(p.e_cycle_two_cycle < 1.5 * 77e-15);
    CHECK(p.e_irreversible == doctest::Approx(0.5e-12));
}
