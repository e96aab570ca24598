// Benchmark comparing the serial reference kernels with the OpenMP ones.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chiralcp/optimizer.hpp"
#include "chiralcp/scan.hpp"

using namespace chiralcp;

namespace {

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now();
    fn();
    best = std::min(best, now() - t0);
  }
  return best;
}

void bench_scan(const char* assembly, int n) {
  const auto a = assemble(assembly);
  ScanGrid g;
  g.eps_steps = n;
  g.delta_steps = n;
  volatile double sink = 0.0;

  const double ts = time_best_of(3, [&] {
    const auto r = scan_serial(a, g);
    sink = r.rows.back().contrast;
  });
  const double tp = time_best_of(3, [&] {
    const auto r = scan(a, g);
    sink = r.rows.back().contrast;
  });
  std::printf("scan   %-7s %4dx%-4d  serial %8.1f ms   omp %8.1f ms   x%.2f\n",
              assembly, n, n, 1e3 * ts, 1e3 * tp, ts / tp);
  (void)sink;
}

void bench_optimize(int restarts) {
  const auto t = builtin_template("eq15");
  OptimizeOptions o;
  o.order = 1;
  o.restarts = restarts;
  o.seed = 1;

  o.jobs = 1;
  const double ts = time_best_of(2, [&] { (void)optimize(t, o); });
  o.jobs = 0;
  const double tp = time_best_of(2, [&] { (void)optimize(t, o); });
  std::printf("optimize eq15 %4d restarts  serial %8.1f ms   omp %8.1f ms   x%.2f\n",
              restarts, 1e3 * ts, 1e3 * tp, ts / tp);
}

}  // namespace

int main(int argc, char** argv) {
  int n = (argc > 1) ? std::atoi(argv[1]) : 101;
#ifdef _OPENMP
  std::printf("# OpenMP max threads: %d\n", omp_get_max_threads());
#else
  std::printf("# built without OpenMP\n");
#endif
  bench_scan("single", n);
  bench_scan("T9", n);
  bench_scan("CP9", n);
  bench_scan("CP9", 2 * n - 1);
  bench_optimize(64);
  return 0;
}
