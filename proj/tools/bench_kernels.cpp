// Benchmark comparing the serial reference kernels against the OpenMP
// variants: component Liouvillian application, dense matmul, and an
// end-to-end preset sweep at both worker counts.

#include <chrono>
#include <cstdio>
#include <vector>

#include "echolab/fock.hpp"
#include "echolab/model.hpp"
#include "echolab/sweep.hpp"

using namespace echolab;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

model::DeviceParams scaled_device() {
  model::DeviceParams d;
  d.mech_freq_hz = 1.0 / (2.0 * 3.141592653589793);
  d.qubit_splitting_hz = 2.5 / 3.141592653589793;
  d.coupling_kappa = 0.7071067811865476;
  d.q_factor = 50.0;
  d.nbar = 1.0;
  d.mbar = 1.0;
  d.t2_s = 50.0;
  d.alpha0 = 2.0;
  return d;
}

void bench_rhs(int dim, int reps) {
  const auto dev = scaled_device();
  const auto derived = model::derive(dev);
  const auto st = fock::make_stencil(fock::ComponentKind::pm, derived, dim);
  fock::FockMatrix rho =
      fock::displaced_thermal(2.0, 1.0, dim, false, fock::ExecPolicy::serial);
  fock::FockMatrix out(dim);

  auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) fock::component_rhs_serial(st, rho, out);
  const double ts = seconds_since(t0);

  t0 = Clock::now();
  for (int r = 0; r < reps; ++r)
    fock::component_rhs(st, rho, out, fock::ExecPolicy::parallel);
  const double tp = seconds_since(t0);

  std::printf("rhs     dim %4d  serial %8.3f us/call  omp %8.3f us/call  speedup %.2fx\n",
              dim, 1e6 * ts / reps, 1e6 * tp / reps, ts / tp);
}

void bench_matmul(int dim, int reps) {
  fock::FockMatrix a =
      fock::displacement_operator(1.5, dim, fock::ExecPolicy::serial);
  fock::FockMatrix b = a.dagger();

  auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) fock::FockMatrix c = fock::matmul_serial(a, b);
  const double ts = seconds_since(t0);

  t0 = Clock::now();
  for (int r = 0; r < reps; ++r)
    fock::FockMatrix c = fock::matmul(a, b, fock::ExecPolicy::parallel);
  const double tp = seconds_since(t0);

  std::printf("matmul  dim %4d  serial %8.3f ms/call  omp %8.3f ms/call  speedup %.2fx\n",
              dim, 1e3 * ts / reps, 1e3 * tp / reps, ts / tp);
}

void bench_evolve(int dim) {
  const auto dev = scaled_device();
  const auto derived = model::derive(dev);
  fock::FockMatrix rho =
      fock::displaced_thermal(2.0, 1.0, dim, false, fock::ExecPolicy::serial);
  rho.scale(0.5);

  for (const auto policy : {fock::ExecPolicy::serial, fock::ExecPolicy::parallel}) {
    fock::EvolveOptions opt;
    opt.policy = policy;
    fock::EvolveDiagnostics diag;
    const auto t0 = Clock::now();
    fock::FockMatrix end = fock::evolve_component(
        fock::ComponentKind::pm, rho, 1.0 / derived.omega1_rad, derived, dev,
        opt, &diag);
    std::printf("evolve  dim %4d  %s %8.3f s  (%ld steps)\n", dim,
                policy == fock::ExecPolicy::serial ? "serial" : "omp   ",
                seconds_since(t0), diag.steps_accepted);
  }
}

void bench_sweep() {
  for (const int workers : {1, 0}) {
    const auto t0 = Clock::now();
    const auto preset = sweep::run_preset("fig1", sweep::Engine::analytic,
                                          workers, 401);
    std::printf("preset fig1 analytic  workers=%s  %8.3f s\n",
                workers == 1 ? "1  " : "all", seconds_since(t0));
    (void)preset;
  }
}

} // namespace

int main() {
  std::printf("echolab kernel benchmark\n\n");
  for (const int dim : {40, 80, 160}) bench_rhs(dim, 2000);
  for (const int dim : {320, 640}) bench_rhs(dim, 200);
  for (const int dim : {40, 80, 160}) bench_matmul(dim, 20);
  bench_evolve(60);
  bench_sweep();
  return 0;
}
