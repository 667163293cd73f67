#pragma once

#include <complex>
#include <vector>

#include "echolab/model.hpp"

namespace echolab::analytic {

using model::cplx;

/// One evaluated point of the qubit signal.
///
/// `trace_plus_minus` is Tr[rho_+-] just before the final pi/2 pulse
/// (|.| <= 1/2). `p_plus` is the fully oscillating probability after that
/// pulse; `envelope` is its slow envelope 1/2 + |Tr[rho_+-]|. `theta` is the
/// slow complex phase with exp(i*theta) carrying everything except the fast
/// 2*Delta/hbar rotation and the T2 decay; Im(theta) >= 0 for physical
/// damping.
struct SignalPoint {
  double t_s = 0.0;
  cplx trace_plus_minus = 0.0;
  double p_plus = 0.0;
  double envelope = 0.0;
  cplx theta = 0.0;
};

struct ChiPhi {
  double chi = 0.0; // fringe contrast exp(-S^2/2)
  double phi = 0.0; // real fringe phase
};

// --- ideal (pure initial state, no environment) ---

SignalPoint ramsey_ideal(cplx alpha0, double omega1, double delta_over_hbar,
                         double t);

/// Contrast/phase decomposition of the ideal Ramsey signal,
/// P+ = (1 + chi*cos(phi))/2.
ChiPhi ramsey_chi_phi(cplx alpha0, double omega1, double delta_over_hbar,
                      double t);

SignalPoint echo_ideal(cplx alpha0, double omega1, double delta_over_hbar,
                       double t1, double t2);

/// Phase-space separation 2|alpha0| sin(omega1 t) of the two resonator
/// states entangled with the qubit.
double separation(cplx alpha0, double omega1, double t);

/// Short-time form 2|alpha0| omega1 t.
double separation_small_time(cplx alpha0, double omega1, double t);

/// Qubit-resonator entanglement (von Neumann entropy of either reduced
/// state) as a function of the separation S; 0 at S=0, -> 1 for large S.
double entanglement(double separation);

// --- thermal initial state, undamped resonator ---

SignalPoint ramsey_thermal_undamped(cplx alpha0, double omega1,
                                    double delta_over_hbar, double mbar,
                                    double t2_s, double t);

// --- damped resonator (full closed forms) ---

/// Slow phase theta(t) of the free-evolution (Ramsey) branch. Exposed
/// separately so the beta-branch invariance can be probed directly:
/// (beta, M) -> (-beta, 1/M) must leave exp(i*theta) unchanged.
cplx damped_phase(double omega1, double gamma, cplx beta, cplx big_m,
                  double alpha0_sq, double t);

/// Slow phase theta(t_f) after a pi pulse at t1 and further evolution t2.
cplx damped_echo_phase(double omega1, double gamma, cplx beta, cplx big_m,
                       double alpha0_sq, double t1, double t2);

/// Throws NumericalError on non-physical output (Im theta < -1e-9 or
/// |trace| > 1/2).
SignalPoint ramsey_damped(const model::DerivedParams& derived,
                          const model::DeviceParams& dev, double t);

SignalPoint echo_damped(const model::DerivedParams& derived,
                        const model::DeviceParams& dev, double t1, double t2);

/// Envelope at elapsed time t of an echo run with the pi pulse at t1:
/// Ramsey branch for t <= t1, echo branch (t2 = t - t1) after.
SignalPoint elapsed_signal(const model::DerivedParams& derived,
                           const model::DeviceParams& dev,
                           const model::PulseSchedule& schedule, double t);

/// In-place 2*pi unwrapping so consecutive values differ by <= pi.
void unwrap(std::vector<double>& phases);

} // namespace echolab::analytic
