// Compares the OpenMP kernels against their serial references: a frequency
// sweep (independent transient simulations per point) and a broadcast program
// run (independent words per instruction).

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tmsim/machine.hpp"
#include "tmsim/transient.hpp"

using namespace tmsim;
using clk = std::chrono::steady_clock;

namespace {

double seconds_since(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

void bench_sweep() {
    BusNetwork net;
    std::vector<double> freqs;
    for (int k = 0; k < 64; ++k) freqs.push_back(1e6 + k * 0.3e6);

    auto t0 = clk::now();
    const auto serial = sweep_frequency_serial(net, false, freqs);
    const double ts = seconds_since(t0);

    t0 = clk::now();
    const auto parallel = sweep_frequency(net, false, freqs);
    const double tp = seconds_since(t0);

    bool identical = serial == parallel;
    std::printf("frequency sweep (%zu points): serial %.3f s, parallel %.3f s, "
                "speedup %.2fx, results identical: %s\n",
                freqs.size(), ts, tp, ts / tp, identical ? "yes" : "no");
}

void bench_machine() {
    EnergyModelParams p;
    const int width = 48;
    const std::size_t words = 200000;
    const auto prog = random_reversible_program(width, 200, 7);

    Machine a = random_machine(width, words, 1);
    Machine b = a;

    auto t0 = clk::now();
    run_program_serial(a, prog, p);
    const double ts = seconds_since(t0);

    t0 = clk::now();
    run_program(b, prog, p);
    const double tp = seconds_since(t0);

    std::printf("machine program (%zu words x %zu instructions): serial %.3f s, "
                "parallel %.3f s, speedup %.2fx, machines identical: %s\n",
                words, prog.size(), ts, tp, ts / tp, a == b ? "yes" : "no");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both variants run serially\n");
#endif
    bench_sweep();
    bench_machine();
    return 0;
}
