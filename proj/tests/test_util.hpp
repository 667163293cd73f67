#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// here must stay independent of the library's implementation paths: the
// entanglement oracle goes through the coherent-state overlap integral and
// a 2x2 eigenvalue problem, never through the closed-form entropy
// expression.

#include <cmath>
#include <complex>
#include <vector>

#include "echolab/model.hpp"

namespace testutil {

using cplx = std::complex<double>;
inline constexpr double pi = 3.141592653589793238462643383279502884;

/// The reference device of the experimental-parameters discussion
/// (nu_a = 5 GHz, omega/2pi = 50 MHz, kappa = 0.2, T2 = 0.5 us).
inline echolab::model::DeviceParams reference_device() {
  echolab::model::DeviceParams d;
  d.qubit_splitting_hz = 5e9;
  d.mech_freq_hz = 50e6;
  d.coupling_kappa = 0.2;
  d.q_factor = echolab::model::infinite;
  d.nbar = 0.0;
  d.mbar = 0.0;
  d.t2_s = 0.5e-6;
  d.alpha0 = 25.0;
  return d;
}

/// Desk-scale device: omega = 1 rad/s, omega1 = 0.2 rad/s,
/// Delta/hbar = 2.5 rad/s. gamma_over_omega1 sets Q.
inline echolab::model::DeviceParams scaled_device(double gamma_over_omega1,
                                                  double alpha0 = 2.0,
                                                  double occupation = 1.0) {
  echolab::model::DeviceParams d;
  d.mech_freq_hz = 1.0 / (2.0 * pi);
  d.qubit_splitting_hz = 2.5 / pi;
  d.coupling_kappa = std::sqrt(0.5);
  d.q_factor = gamma_over_omega1 > 0.0 ? 1.0 / (0.2 * gamma_over_omega1)
                                       : echolab::model::infinite;
  d.nbar = occupation;
  d.mbar = occupation;
  d.t2_s = 50.0;
  d.alpha0 = alpha0;
  return d;
}

/// <a|b> for coherent states, from the displacement algebra.
inline cplx coherent_overlap(cplx a, cplx b) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) +
                  std::conj(a) * b);
}

/// Eigenvalues of a Hermitian 2x2 [[a, b], [conj(b), d]].
inline std::pair<double, double> eig2(double a, cplx b, double d) {
  const double mid = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
  return {mid - rad, mid + rad};
}

/// Independent entanglement oracle: reduced qubit density matrix of
/// (|-, a_-> - i |+, a_+>)/sqrt(2), eigenvalues, binary entropy.
inline double entanglement_rdm_oracle(cplx alpha0, double omega1_t) {
  const cplx am = alpha0 * std::exp(cplx(0.0, omega1_t));
  const cplx ap = alpha0 * std::exp(cplx(0.0, -omega1_t));
  const cplx ov = coherent_overlap(am, ap); // <a_-|a_+>
  const auto [lo, hi] = eig2(0.5, cplx(0.0, 0.5) * std::conj(ov), 0.5);
  auto ent = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  return ent(lo) + ent(hi);
}

/// Coherent-state amplitudes in the truncated number basis.
inline std::vector<cplx> coherent_vector(cplx alpha, int dim) {
  std::vector<cplx> v(dim);
  v[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n)
    v[n] = v[n - 1] * alpha / std::sqrt(double(n));
  return v;
}

} // namespace testutil
