#pragma once

#include <complex>

#include "echolab/analytic.hpp"
#include "echolab/model.hpp"

namespace echolab::gaussian {

using model::cplx;

/// The six complex parameters of the Gaussian Wigner ansatz for the +-
/// component, plus the redundant pair a1 = (xbar + i pbar)/2,
/// a2 = (xbar - i pbar)/2 kept for consistency checking.
struct GaussianParams {
  cplx theta_prime = 0.0;
  cplx xbar = 0.0, pbar = 0.0;
  cplx sigma_x = 0.0, sigma_p = 0.0, sigma_xp = 0.0;
  cplx a1 = 0.0, a2 = 0.0;

  /// Initial condition for a thermal state of occupation mbar displaced by
  /// alpha0 (theta' = 3*pi/2).
  static GaussianParams displaced_thermal(cplx alpha0, double mbar);

  /// Complex-conjugated Wigner data used as the post-pi-pulse initial
  /// condition: xbar, pbar, sigmas conjugate, theta' -> -conj(theta'),
  /// a1 <-> conj(a2).
  GaussianParams conjugated() const;

  double mean_identity_defect() const;  // |xbar^2 + pbar^2 - 4 a1 a2|
  double a_consistency_defect() const;  // redundant-pair mismatch
};

struct IntegrateOptions {
  double tol = 1e-10;        // local tolerance per unit component scale
  double initial_step = 0.0; // 0 = automatic
};

struct IntegrateDiagnostics {
  long steps_accepted = 0;
  long steps_rejected = 0;
  double max_sigma_xp_abs = 0.0;
  double max_sigma_asym = 0.0; // max |sigma_x - sigma_p|
  double max_mean_identity_defect = 0.0;
  double max_a_consistency_defect = 0.0;

  void merge(const IntegrateDiagnostics& other);
};

/// Integrates the six-parameter equation set (plus the redundant a1, a2)
/// for `duration` with RK4 step doubling. Throws NumericalError on step
/// underflow or NaN (naming the offending parameter).
GaussianParams integrate_gaussian(const GaussianParams& initial,
                                  double duration,
                                  const model::DerivedParams& derived,
                                  const IntegrateOptions& options = {},
                                  IntegrateDiagnostics* diag = nullptr);

/// Tr[rho_+-(t)] = e^{-2i Delta t/hbar - t/T2} e^{i theta'}/2 for a state
/// evolved without a pi pulse.
cplx reconstruct_trace(const GaussianParams& params, double t,
                       const model::DeviceParams& dev,
                       const model::DerivedParams& derived);

/// P+ = (1 - 2 Im Tr[rho_+-])/2.
double p_plus_from_trace(cplx trace);

struct EchoTrace {
  cplx trace = 0.0;          // Tr[rho_+-(t1+t2)]
  GaussianParams final_params;
  IntegrateDiagnostics diag;
};

/// Conjugates the mid-sequence state at t1 and continues for t2, returning
/// the final trace with the fast rotation and T2 factor reattached.
EchoTrace echo_conjugate_and_continue(const GaussianParams& mid, double t1,
                                      double t2,
                                      const model::DerivedParams& derived,
                                      const model::DeviceParams& dev,
                                      const IntegrateOptions& options = {});

// Closed-form solutions used as independent cross-checks on the integrator.
cplx sigma_x_closed_form(const model::DerivedParams& derived, double t);
cplx a1_closed_form(cplx alpha0, const model::DerivedParams& derived, double t);
cplx a2_closed_form(cplx alpha0, const model::DerivedParams& derived, double t);

/// Full signal evaluation (Ramsey or Echo schedule) through this oracle.
analytic::SignalPoint signal(const model::DeviceParams& dev,
                             const model::DerivedParams& derived,
                             const model::PulseSchedule& schedule,
                             const IntegrateOptions& options = {},
                             IntegrateDiagnostics* diag = nullptr);

/// Signal at elapsed time t of an echo run with the pi pulse at
/// schedule.t1_s (Ramsey branch before, echo branch after).
analytic::SignalPoint elapsed_signal(const model::DeviceParams& dev,
                                     const model::DerivedParams& derived,
                                     const model::PulseSchedule& schedule,
                                     double t,
                                     const IntegrateOptions& options = {});

} // namespace echolab::gaussian
