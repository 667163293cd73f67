#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "echolab/analytic.hpp"
#include "echolab/constants.hpp"
#include "echolab/errors.hpp"
#include "echolab/model.hpp"
#include "test_util.hpp"

using namespace echolab;
using doctest::Approx;
using model::cplx;

namespace {

// Frozen values computed with the reduced-density-matrix oracle
// (testutil::entanglement_rdm_oracle) before the build.
constexpr double kEntanglementS1 = 0.715349166710722;
constexpr double kEntanglementS2 = 0.986747430039656;

model::DeviceParams damped_scaled(double gamma_over_omega1, double alpha0,
                                  double nbar, double mbar) {
  auto dev = testutil::scaled_device(gamma_over_omega1, alpha0, nbar);
  dev.mbar = mbar;
  return dev;
}

} // namespace

TEST_CASE("ramsey_ideal: uncoupled limit oscillates at 2*Delta/hbar + omega1") {
  const double omega1 = 0.2, delta = 2.5;
  for (int i = 0; i < 50; ++i) {
    const double t = 0.17 * i;
    const auto s = analytic::ramsey_ideal(0.0, omega1, delta, t);
    CHECK(s.p_plus ==
          Approx(0.5 + 0.5 * std::cos((2 * delta + omega1) * t)).epsilon(1e-12));
    CHECK(s.envelope == Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("ramsey_ideal: natural recoherence at omega1 t = pi") {
  const double omega1 = 0.2;
  const auto s = analytic::ramsey_ideal(5.0, omega1, 2.5, testutil::pi / omega1);
  CHECK(s.envelope == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ramsey_ideal: chi-phi decomposition identity") {
  const double omega1 = 0.2, delta = 2.5;
  for (double a : {0.0, 0.7, 2.0, 5.0, 25.0}) {
    for (int i = 0; i <= 60; ++i) {
      const double t = i * (2.0 * testutil::pi / omega1) / 60.0;
      const auto s = analytic::ramsey_ideal(a, omega1, delta, t);
      const auto cp = analytic::ramsey_chi_phi(a, omega1, delta, t);
      CHECK(std::abs(0.5 * (1.0 + cp.chi * std::cos(cp.phi)) - s.p_plus) <
            1e-12);
    }
  }
}

TEST_CASE("ramsey_ideal: signal depends only on |alpha0|") {
  const double omega1 = 0.2, delta = 2.5;
  for (double phase : {0.3, 1.2, 2.9}) {
    const auto a = analytic::ramsey_ideal(3.0, omega1, delta, 4.0);
    const auto b =
        analytic::ramsey_ideal(3.0 * std::exp(cplx(0, phase)), omega1, delta, 4.0);
    CHECK(std::abs(a.p_plus - b.p_plus) < 1e-12);
    CHECK(std::abs(a.trace_plus_minus - b.trace_plus_minus) < 1e-12);
  }
}

TEST_CASE("echo_ideal: exact zero and unit envelope at t2 = t1") {
  for (double t1 : {0.0, 1.0, 3.7}) {
    const auto s = analytic::echo_ideal(25.0, 0.2, 2.5, t1, t1);
    CHECK(s.p_plus == 0.0);
    CHECK(s.envelope == 1.0);
  }
}

TEST_CASE("echo_ideal: alpha0 = 0 keeps envelope at unity") {
  for (double t2 : {0.0, 0.9, 2.4}) {
    const auto s = analytic::echo_ideal(0.0, 0.2, 2.5, 1.3, t2);
    CHECK(s.envelope == Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("separation") {
  const double omega1 = 0.2;
  CHECK(analytic::separation(25.0, omega1, 0.0) == 0.0);
  CHECK(analytic::separation(25.0, omega1, 0.5 * testutil::pi / omega1) ==
        Approx(50.0).epsilon(1e-12));
  // reference device at tau_c = 0.2 us: S ~ 2.5 (small-time form = 0.8*pi)
  const auto d = model::derive(testutil::reference_device());
  CHECK(analytic::separation_small_time(25.0, d.omega1_rad, 0.2e-6) ==
        Approx(0.8 * testutil::pi).epsilon(1e-12));
  CHECK(analytic::separation(25.0, d.omega1_rad, 0.2e-6) ==
        Approx(50.0 * std::sin(0.016 * testutil::pi)).epsilon(1e-12));
}

TEST_CASE("entanglement anchors and oracle agreement") {
  CHECK(analytic::entanglement(0.0) == 0.0);
  CHECK(analytic::entanglement(1.0) == Approx(kEntanglementS1).epsilon(1e-12));
  CHECK(analytic::entanglement(2.0) == Approx(kEntanglementS2).epsilon(1e-12));
  // independent oracle: S = 2|a0| sin(w1 t)
  CHECK(std::abs(analytic::entanglement(1.0) -
                 testutil::entanglement_rdm_oracle(1.0, testutil::pi / 6)) <
        1e-12);
  CHECK(std::abs(analytic::entanglement(2.0) -
                 testutil::entanglement_rdm_oracle(1.0, testutil::pi / 2)) <
        1e-12);
  double prev = -1.0;
  for (double s = 0.0; s <= 4.0; s += 0.25) {
    const double e = analytic::entanglement(s);
    CHECK(e >= prev);
    prev = e;
  }
  CHECK(analytic::entanglement(6.0) == Approx(1.0).epsilon(1e-7));
  CHECK_THROWS_AS((void)analytic::entanglement(-0.1), model::ParameterError);
}

TEST_CASE("ramsey_thermal_undamped: mbar = 0 collapses to the ideal signal") {
  const double omega1 = 0.2, delta = 2.5;
  for (int i = 0; i <= 40; ++i) {
    const double t = i * (2.0 * testutil::pi / omega1) / 40.0;
    const auto th = analytic::ramsey_thermal_undamped(3.0, omega1, delta, 0.0,
                                                      model::infinite, t);
    const auto id = analytic::ramsey_ideal(3.0, omega1, delta, t);
    CHECK(std::abs(th.p_plus - id.p_plus) < 1e-13);
    CHECK(std::abs(th.trace_plus_minus - id.trace_plus_minus) < 1e-13);
  }
}

TEST_CASE("ramsey_thermal_undamped: full recoherence at omega1 t = pi") {
  const double omega1 = 0.2, delta = 2.5, t2 = 50.0;
  const double t = testutil::pi / omega1;
  const auto s =
      analytic::ramsey_thermal_undamped(4.0, omega1, delta, 10.0, t2, t);
  CHECK(s.envelope == Approx(0.5 + 0.5 * std::exp(-t / t2)).epsilon(1e-12));
}

TEST_CASE("ramsey_thermal_undamped: thermal suppression between recoherences") {
  // alpha0 = 0, mbar = 10 at omega1 t = pi/2: fringe amplitude is 1/21 of
  // the T2 factor (|1 + mbar*eta| = 21 at eta = 2)
  const double omega1 = 0.2, delta = 2.5, t2 = 50.0;
  const double t = 0.5 * testutil::pi / omega1;
  const auto s =
      analytic::ramsey_thermal_undamped(0.0, omega1, delta, 10.0, t2, t);
  CHECK(s.envelope - 0.5 ==
        Approx(0.5 * std::exp(-t / t2) / 21.0).epsilon(1e-12));
}

TEST_CASE("ramsey_damped: t = 0 gives theta = 0 and P+ = 1") {
  auto dev = damped_scaled(0.1, 2.0, 1.0, 1.0);
  const auto d = model::derive(dev);
  const auto s = analytic::ramsey_damped(d, dev, 0.0);
  CHECK(std::abs(s.theta) < 1e-14);
  CHECK(s.p_plus == Approx(1.0).epsilon(1e-14));
  CHECK(s.envelope == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ramsey_damped: gamma -> 0 recovers the thermal expression") {
  auto dev = testutil::reference_device();
  dev.nbar = 10;
  dev.mbar = 10;
  dev.q_factor = model::infinite;
  const auto d = model::derive(dev);
  const double span = 2.0 * testutil::pi / d.omega1_rad;
  for (int i = 0; i <= 1000; ++i) {
    const double t = i * span / 1000.0;
    const auto a = analytic::ramsey_damped(d, dev, t);
    const auto b = analytic::ramsey_thermal_undamped(
        dev.alpha0, d.omega1_rad, d.delta_over_hbar_rad, dev.mbar, dev.t2_s, t);
    CHECK(std::abs(a.p_plus - b.p_plus) < 1e-10);
    CHECK(std::abs(a.trace_plus_minus - b.trace_plus_minus) < 1e-10);
  }
}

TEST_CASE("damping lowers the recoherence envelope at the echo point") {
  // Ramsey-branch envelopes at these parameters are 1/2 to machine
  // precision for t >> 1/(omega1 |alpha0|); the damped-vs-lossless ordering
  // is resolvable at the echo point t = 2 t1, where dissipation is the only
  // thing that spoils refocusing.
  auto dev = testutil::reference_device();
  dev.nbar = 10;
  dev.mbar = 10;
  dev.q_factor = 3000;
  const auto d = model::derive(dev);
  auto dev0 = dev;
  dev0.q_factor = model::infinite;
  const auto d0 = model::derive(dev0);
  const auto sched = model::PulseSchedule::echo(0.2e-6, 0.0);
  const double damped = analytic::elapsed_signal(d, dev, sched, 0.4e-6).envelope;
  const double lossless =
      analytic::elapsed_signal(d0, dev0, sched, 0.4e-6).envelope;
  CHECK(damped < lossless - 1e-3);
}

TEST_CASE("echo_damped: perfect echo for gamma = 0") {
  auto dev = testutil::reference_device();
  dev.nbar = 10;
  dev.q_factor = model::infinite;
  for (double mbar : {0.0, 1.0, 10.0, 25.0}) {
    dev.mbar = mbar;
    const auto d = model::derive(dev);
    for (int i = 1; i <= 10; ++i) {
      const double t1 = i * 0.02e-6;
      const auto s = analytic::echo_damped(d, dev, t1, t1);
      const double expected = 0.5 * (1.0 + std::exp(-2.0 * t1 / dev.t2_s));
      CHECK(std::abs(s.envelope - expected) < 1e-10);
      CHECK(std::abs(s.theta.imag()) < 1e-10);
    }
  }
}

TEST_CASE("echo_damped: limit chain to echo_ideal at gamma = 0, mbar = 0") {
  auto dev = testutil::reference_device();
  dev.q_factor = model::infinite;
  dev.nbar = 10; // irrelevant at gamma = 0
  dev.mbar = 0;
  const auto d = model::derive(dev);
  for (int i = 0; i <= 50; ++i) {
    const double t1 = 0.2e-6;
    const double t2 = i * 0.4e-6 / 50.0;
    const auto damped = analytic::echo_damped(d, dev, t1, t2);
    const auto ideal = analytic::echo_ideal(dev.alpha0, d.omega1_rad,
                                            d.delta_over_hbar_rad, t1, t2);
    const double t2f = std::exp(-(t1 + t2) / dev.t2_s);
    CHECK(std::abs(damped.p_plus - (0.5 + t2f * (ideal.p_plus - 0.5))) < 1e-10);
    CHECK(std::abs(damped.envelope - (0.5 + t2f * (ideal.envelope - 0.5))) <
          1e-10);
  }
}

TEST_CASE("echo_damped: dissipation spoils recoherence even at alpha0 = 0") {
  auto dev = damped_scaled(0.1, 0.0, 2.0, 2.0);
  const auto d = model::derive(dev);
  const double t1 = 2.5;
  const auto s = analytic::echo_damped(d, dev, t1, t1);
  const double no_dissipation = 0.5 * (1.0 + std::exp(-2.0 * t1 / dev.t2_s));
  CHECK(s.envelope < no_dissipation - 1e-6);
}

TEST_CASE("echo_damped: t2 = 0 is the conjugate Ramsey branch") {
  auto dev = damped_scaled(0.1, 2.0, 1.0, 1.0);
  const auto d = model::derive(dev);
  for (double t1 : {0.5, 2.0, 5.0}) {
    const auto echo = analytic::echo_damped(d, dev, t1, 0.0);
    const auto ramsey = analytic::ramsey_damped(d, dev, t1);
    CHECK(std::abs(echo.trace_plus_minus -
                   std::conj(ramsey.trace_plus_minus)) < 1e-12);
    CHECK(echo.p_plus == Approx(1.0 - ramsey.p_plus).epsilon(1e-12));
  }
}

TEST_CASE("beta-flip invariance of the damped signals") {
  for (double gr : {0.01, 0.1, 0.4}) {
    auto dev = damped_scaled(gr, 3.0, 2.0, 1.5);
    const auto d = model::derive(dev);
    auto flipped = d;
    flipped.beta = -d.beta;
    flipped.big_m = 1.0 / d.big_m;
    for (double t : {0.7, 3.0, 5.0}) {
      const auto a = analytic::ramsey_damped(d, dev, t);
      const auto b = analytic::ramsey_damped(flipped, dev, t);
      CHECK(std::abs(a.p_plus - b.p_plus) < 1e-12);
      CHECK(std::abs(a.envelope - b.envelope) < 1e-12);
      CHECK(std::abs(a.trace_plus_minus - b.trace_plus_minus) < 1e-12);
      const auto ae = analytic::echo_damped(d, dev, t, 0.6 * t);
      const auto be = analytic::echo_damped(flipped, dev, t, 0.6 * t);
      CHECK(std::abs(ae.p_plus - be.p_plus) < 1e-12);
      CHECK(std::abs(ae.trace_plus_minus - be.trace_plus_minus) < 1e-12);
    }
  }
}

TEST_CASE("physicality over a parameter grid") {
  for (double gr : {0.0, 0.01, 0.1, 0.3}) {
    for (double alpha : {0.0, 1.0, 3.3}) {
      for (double occ : {0.0, 2.0, 10.0}) {
        auto dev = damped_scaled(gr, alpha, occ, occ);
        dev.t2_s = model::infinite; // probe the pre-T2 envelope bounds
        const auto d = model::derive(dev);
        for (int i = 0; i <= 30; ++i) {
          const double t = i * 10.0 / 30.0;
          const auto r = analytic::ramsey_damped(d, dev, t);
          CHECK(r.theta.imag() >= -1e-9);
          CHECK(r.envelope >= 0.5 - 1e-9);
          CHECK(r.envelope <= 1.0 + 1e-9);
          CHECK(r.p_plus >= -1e-12);
          CHECK(r.p_plus <= 1.0 + 1e-12);
          CHECK(std::abs(r.trace_plus_minus) <= 0.5 + 1e-12);
          const auto e = analytic::echo_damped(d, dev, 0.6 * t, 0.4 * t);
          CHECK(e.theta.imag() >= -1e-9);
          CHECK(e.envelope >= 0.5 - 1e-9);
          CHECK(e.envelope <= 1.0 + 1e-9);
          CHECK(e.p_plus >= -1e-12);
          CHECK(e.p_plus <= 1.0 + 1e-12);
          CHECK(std::abs(e.trace_plus_minus) <= 0.5 + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("theta continuity on fine grids (no branch hops)") {
  // A 2*pi branch hop between neighbors would show as a jump close to
  // 2*pi; a continuous theta on a grid resolving its drift rate keeps
  // every difference well below pi. The drift rate carries a 2|alpha0|^2
  // factor from the displacement term, so the grid scales with it.
  for (double alpha : {0.0, 1.0, 2.0, 5.0, 25.0}) {
    auto dev = damped_scaled(0.1, alpha, 3.0, 3.0);
    const auto d = model::derive(dev);
    const double rate =
        d.omega1_rad * std::abs(d.beta) * (1.0 + 2.0 * alpha * alpha);
    const double step = 0.1 / rate;
    std::vector<double> re, im;
    for (int i = 0; i <= 300; ++i) {
      const auto s = analytic::ramsey_damped(d, dev, i * step);
      re.push_back(s.theta.real());
      im.push_back(s.theta.imag());
    }
    for (std::size_t i = 1; i < re.size(); ++i) {
      CHECK(std::abs(re[i] - re[i - 1]) < testutil::pi);
      CHECK(std::abs(im[i] - im[i - 1]) < testutil::pi);
    }
  }
}

TEST_CASE("unwrap utility") {
  // continuous ramp with sub-pi steps, wrapped into (-pi, pi], is restored
  std::vector<double> phases;
  for (int i = 0; i < 12; ++i) phases.push_back(0.3 + 2.1 * i);
  std::vector<double> wrapped = phases;
  for (auto& p : wrapped)
    p -= 2.0 * testutil::pi * std::round(p / (2.0 * testutil::pi));
  analytic::unwrap(wrapped);
  for (std::size_t i = 1; i < phases.size(); ++i)
    CHECK(wrapped[i] - wrapped[i - 1] ==
          Approx(phases[i] - phases[i - 1]).epsilon(1e-12));
}

TEST_CASE("damped signals depend only on |alpha0| (closed forms)") {
  auto dev = damped_scaled(0.1, 2.0, 1.0, 1.0);
  auto dev_rot = dev;
  dev_rot.alpha0 = 2.0 * std::exp(cplx(0.0, 1.1));
  const auto d = model::derive(dev);
  const auto dr = model::derive(dev_rot);
  const auto a = analytic::ramsey_damped(d, dev, 3.0);
  const auto b = analytic::ramsey_damped(dr, dev_rot, 3.0);
  CHECK(std::abs(a.p_plus - b.p_plus) < 1e-12);
  CHECK(std::abs(a.trace_plus_minus - b.trace_plus_minus) < 1e-12);
}

TEST_CASE("elapsed_signal switches branch at the pi pulse") {
  auto dev = damped_scaled(0.1, 2.0, 1.0, 1.0);
  const auto d = model::derive(dev);
  const auto sched = model::PulseSchedule::echo(2.0, 0.0);
  const auto before = analytic::elapsed_signal(d, dev, sched, 1.5);
  CHECK(before.p_plus ==
        Approx(analytic::ramsey_damped(d, dev, 1.5).p_plus).epsilon(1e-14));
  const auto after = analytic::elapsed_signal(d, dev, sched, 3.5);
  CHECK(after.p_plus ==
        Approx(analytic::echo_damped(d, dev, 2.0, 1.5).p_plus).epsilon(1e-14));
}
