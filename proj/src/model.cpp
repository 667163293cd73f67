#include "echolab/model.hpp"

#include <cmath>
#include <sstream>

#include "echolab/constants.hpp"

namespace echolab::model {

void validate(const PulseSchedule& schedule) {
  if (schedule.kind == PulseSchedule::Kind::ramsey) {
    if (!(schedule.t_s >= 0.0))
      throw ParameterError("pulse schedule: t must be >= 0");
  } else {
    if (!(schedule.t1_s >= 0.0) || !(schedule.t2_s >= 0.0))
      throw ParameterError("pulse schedule: t1, t2 must be >= 0");
  }
}

double occupation_from_temperature(double temp_k, double freq_hz) {
  if (!(temp_k >= 0.0))
    throw ParameterError("temperature must be >= 0");
  if (!(freq_hz > 0.0))
    throw ParameterError("frequency must be > 0");
  if (temp_k == 0.0) return 0.0;
  const double x = consts::hbar * (2.0 * consts::pi * freq_hz) /
                   (consts::k_boltzmann * temp_k);
  return 1.0 / std::expm1(x);
}

double thermal_uncertainty_diameter(double nbar) {
  if (!(nbar >= 0.0)) throw ParameterError("nbar must be >= 0");
  return 0.5 * std::sqrt(2.0 * nbar + 1.0);
}

static void check_device(const DeviceParams& p) {
  if (!(p.qubit_splitting_hz > 0.0))
    throw ParameterError("qubit splitting must be > 0");
  if (!(p.mech_freq_hz > 0.0))
    throw ParameterError("mechanical frequency must be > 0");
  if (!(p.coupling_kappa > 0.0))
    throw ParameterError("coupling kappa must be > 0");
  if (!(p.q_factor > 0.0))
    throw ParameterError("Q factor must be > 0");
  if (!(p.nbar >= 0.0)) throw ParameterError("nbar must be >= 0");
  if (!(p.mbar >= 0.0)) throw ParameterError("mbar must be >= 0");
  if (!(p.t2_s > 0.0)) throw ParameterError("T2 must be > 0");
}

DerivedParams derive(const DeviceParams& p) {
  check_device(p);
  DerivedParams d;
  d.omega_rad = 2.0 * consts::pi * p.mech_freq_hz;
  d.delta_over_hbar_rad = consts::pi * p.qubit_splitting_hz; // nu_a = 2*Delta/h
  d.lambda_joule = p.coupling_kappa * consts::hbar * d.omega_rad;
  d.omega1_rad = p.coupling_kappa * p.coupling_kappa * d.omega_rad *
                 d.omega_rad / d.delta_over_hbar_rad;
  d.gamma_rad = p.q_is_infinite() ? 0.0 : d.omega_rad / p.q_factor;
  const double amp_ratio =
      2.0 * p.coupling_kappa * std::abs(p.alpha0) * d.omega_rad /
      d.delta_over_hbar_rad;
  d.delta_validity = amp_ratio * amp_ratio;
  d.big_n = 2.0 * p.nbar + 1.0;

  if (d.gamma_rad == 0.0) {
    // Exact gamma = 0 limit: the radical collapses and M is real.
    d.beta = 1.0;
    d.big_m = p.mbar / (p.mbar + 1.0);
  } else {
    const double gt = d.gamma_rad / (2.0 * d.omega1_rad);
    const cplx one_m_igt(1.0, -gt);
    d.beta = std::sqrt(one_m_igt * one_m_igt -
                       cplx(0.0, 2.0 * d.gamma_rad * p.nbar / d.omega1_rad));
    const cplx a(2.0 * p.mbar + 1.0, -gt);
    d.big_m = (a - d.beta) / (a + d.beta);
  }

  if (p.beam_mass_kg) {
    if (!(*p.beam_mass_kg > 0.0))
      throw ParameterError("beam mass must be > 0");
    d.x_zp_m = std::sqrt(consts::hbar / (2.0 * *p.beam_mass_kg * d.omega_rad));
  }
  return d;
}

RegimeReport validate_regime(const DeviceParams& p, double delta_max) {
  RegimeReport report;
  const double omega = 2.0 * consts::pi * p.mech_freq_hz;
  const double delta_hbar = consts::pi * p.qubit_splitting_hz;
  const double amp_ratio =
      2.0 * p.coupling_kappa * std::abs(p.alpha0) * omega / delta_hbar;
  const double gamma = p.q_is_infinite() ? 0.0 : omega / p.q_factor;

  auto add = [&report](const std::string& name, double value, double limit) {
    RegimeCheck c{name, value, limit, value <= limit};
    report.all_pass = report.all_pass && c.pass;
    report.checks.push_back(std::move(c));
  };
  add("delta_amplitude", amp_ratio * amp_ratio, delta_max);
  add("freq_separation", omega / delta_hbar, 0.1);
  add("coupling_perturbation",
      p.coupling_kappa * p.coupling_kappa * omega / (2.0 * delta_hbar), 0.1);
  add("weak_damping", gamma / omega, 1e-2);
  return report;
}

std::string RegimeReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.pass ? "  [ok]   " : "  [FAIL] ") << c.name << " = " << c.value
       << " (limit " << c.limit << ")\n";
  }
  return os.str();
}

} // namespace echolab::model
