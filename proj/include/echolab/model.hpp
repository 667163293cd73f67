#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace echolab::model {

using cplx = std::complex<double>;

/// Thrown when inputs violate a documented precondition.
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Sentinel meaning "no damping" (for q_factor) or "no dephasing" (for t2_s).
inline constexpr double infinite = std::numeric_limits<double>::infinity();

/// Experimental knobs of the qubit-resonator device, in experimentalist units.
/// All temperatures enter only through the occupations nbar/mbar; use
/// occupation_from_temperature to convert.
struct DeviceParams {
  double qubit_splitting_hz = 5e9; // nu_a = 2*Delta/h
  double mech_freq_hz = 50e6;      // omega / 2pi
  double coupling_kappa = 0.2;     // kappa = lambda/(hbar*omega)
  double q_factor = infinite;      // Q = omega/gamma; `infinite` => gamma = 0
  double nbar = 0.0;               // mean bath occupation
  double mbar = 0.0;               // mean occupation of the prepared state
  double t2_s = infinite;          // qubit dephasing time; `infinite` => none
  cplx alpha0 = 0.0;               // initial coherent amplitude
  std::optional<double> beam_mass_kg; // only used for x_zp reporting

  bool q_is_infinite() const { return std::isinf(q_factor); }
  bool t2_is_infinite() const { return std::isinf(t2_s); }
};

/// Derived scales in SI angular units (rad/s, seconds).
struct DerivedParams {
  double omega_rad = 0.0;          // omega
  double delta_over_hbar_rad = 0.0;// Delta/hbar
  double lambda_joule = 0.0;       // lambda = kappa*hbar*omega
  double omega1_rad = 0.0;         // omega1 = kappa^2 omega^2 / (Delta/hbar)
  double gamma_rad = 0.0;          // gamma = omega/Q (0 for infinite Q)
  double delta_validity = 0.0;     // (2 kappa |alpha0| hbar*omega/Delta)^2
  double big_n = 1.0;              // N = 2*nbar + 1
  cplx beta = 1.0;                 // principal sqrt([1-i*gamma/2w1]^2 - 2i*gamma*nbar/w1)
  cplx big_m = 0.0;                // (2m+1 - beta - i*gamma/2w1) / (2m+1 + beta - i*gamma/2w1)
  std::optional<double> x_zp_m;    // sqrt(hbar/2m*omega), if beam mass given
};

/// Ideal instantaneous-pulse timing.
struct PulseSchedule {
  enum class Kind { ramsey, echo };
  Kind kind = Kind::ramsey;
  double t_s = 0.0;  // Ramsey free-evolution time
  double t1_s = 0.0; // Echo: before the pi pulse
  double t2_s = 0.0; // Echo: after the pi pulse

  double total_time_s() const {
    return kind == Kind::ramsey ? t_s : t1_s + t2_s;
  }
  static PulseSchedule ramsey(double t) { return {Kind::ramsey, t, 0.0, 0.0}; }
  static PulseSchedule echo(double t1, double t2) {
    return {Kind::echo, 0.0, t1, t2};
  }
};

void validate(const PulseSchedule& schedule);

/// Bose occupation 1/(exp(hbar*omega/kT) - 1); exactly 0 at T = 0.
double occupation_from_temperature(double temp_k, double freq_hz);

/// Diameter of the phase-space uncertainty circle of a thermal state,
/// sqrt(2*nbar+1)/2 (a coherent state has diameter 1/2).
double thermal_uncertainty_diameter(double nbar);

/// Computes all derived scales. Pure; identical inputs give bit-identical
/// outputs. Throws ParameterError on nonpositive frequencies, kappa <= 0,
/// or negative Q, nbar, mbar, T2.
DerivedParams derive(const DeviceParams& params);

struct RegimeCheck {
  std::string name;
  double value = 0.0; // the computed ratio
  double limit = 0.0;
  bool pass = false;
};

/// Named dispersive-regime checks with their computed margins. Reporting
/// only: callers decide whether a failed check warns or aborts.
struct RegimeReport {
  std::vector<RegimeCheck> checks;
  bool all_pass = true;

  std::string summary() const;
};

RegimeReport validate_regime(const DeviceParams& params,
                             double delta_max = 0.04);

} // namespace echolab::model
