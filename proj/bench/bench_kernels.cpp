// Serial reference vs OpenMP kernels on G-heat propagators.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "nisio/row_operator.hpp"
#include "nisio/zoo/heat.hpp"

using namespace nisio;

namespace {

template <class F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const double dx = argc > 1 ? std::stod(argv[1]) : 0.005;
    const double h = argc > 2 ? std::stod(argv[2]) : 1.0 / 64;
    const int reps = 7;

    auto g = std::make_shared<const WeightedGrid>(WeightedGrid::uniform(-8, 8, dx, {6.0}));
    std::vector<RowOperator> ops;
    for (double sigma : {0.5, 0.75, 1.0}) ops.push_back(HeatMember(g, {sigma}).propagator(h));
    std::vector<const RowOperator*> members;
    for (const auto& op : ops) members.push_back(&op);

    const std::size_t n = g->size();
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    std::vector<double> u(n), a(n), b(n);
    for (auto& x : u) x = z(rng);
    std::vector<std::int32_t> arg_a(n), arg_b(n), sel(n);
    for (std::size_t i = 0; i < n; ++i) sel[i] = static_cast<std::int32_t>(i % members.size());

    std::printf("grid points %zu, nonzeros per member %zu, threads %d\n", n, ops[0].nonzeros(), omp_get_max_threads());
    std::printf("%-14s %12s %12s %9s %s\n", "kernel", "serial [ms]", "openmp [ms]", "speedup", "identical");

    auto row = [&](const char* name, double ts, double tp, bool same) {
        std::printf("%-14s %12.3f %12.3f %9.2f %s\n", name, 1e3 * ts, 1e3 * tp, ts / tp, same ? "yes" : "NO");
    };

    {
        const double ts = best_of(reps, [&] { reference::apply(ops[2], u, a); });
        const double tp = best_of(reps, [&] { ops[2].apply(u, b); });
        row("apply", ts, tp, a == b);
    }
    {
        const double ts = best_of(reps, [&] { reference::envelope_max(members, u, a, arg_a); });
        const double tp = best_of(reps, [&] { kernels::envelope_max(members, u, b, arg_b); });
        row("envelope_max", ts, tp, a == b && arg_a == arg_b);
    }
    {
        const double ts = best_of(reps, [&] { reference::select_apply(members, sel, u, a); });
        const double tp = best_of(reps, [&] { kernels::select_apply(members, sel, u, b); });
        row("select_apply", ts, tp, a == b);
    }
    return 0;
}
