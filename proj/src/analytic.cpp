#include "echolab/analytic.hpp"

#include <cmath>

#include "echolab/constants.hpp"
#include "echolab/errors.hpp"

namespace echolab::analytic {

namespace {

constexpr cplx kI(0.0, 1.0);

double t2_factor(const model::DeviceParams& dev, double t) {
  return dev.t2_is_infinite() ? 1.0 : std::exp(-t / dev.t2_s);
}

void check_physical(const SignalPoint& s, const char* what) {
  if (s.theta.imag() < -1e-9 || std::abs(s.trace_plus_minus) > 0.5 + 1e-12)
    throw NumericalError(std::string(what) +
                         ": non-physical signal (Im theta = " +
                         std::to_string(s.theta.imag()) + ")");
}

} // namespace

SignalPoint ramsey_ideal(cplx alpha0, double omega1, double delta_over_hbar,
                         double t) {
  const double a2 = std::norm(alpha0);
  const cplx u = std::exp(-2.0 * kI * omega1 * t);
  const cplx overlap = std::exp(-a2 * (1.0 - u));
  const cplx val = overlap * std::exp(-kI * (2.0 * delta_over_hbar + omega1) * t);
  SignalPoint s;
  s.t_s = t;
  s.trace_plus_minus = -0.5 * kI * val;
  s.p_plus = 0.5 + 0.5 * val.real();
  s.theta = -omega1 * t + kI * a2 * (1.0 - u);
  s.envelope = 0.5 + 0.5 * std::exp(-s.theta.imag());
  return s;
}

ChiPhi ramsey_chi_phi(cplx alpha0, double omega1, double delta_over_hbar,
                      double t) {
  const double a2 = std::norm(alpha0);
  const double st = std::sin(omega1 * t);
  ChiPhi cp;
  cp.chi = std::exp(-2.0 * a2 * st * st);
  cp.phi = (2.0 * delta_over_hbar + omega1) * t + a2 * std::sin(2.0 * omega1 * t);
  return cp;
}

SignalPoint echo_ideal(cplx alpha0, double omega1, double delta_over_hbar,
                       double t1, double t2) {
  const double a2 = std::norm(alpha0);
  const double dt = t1 - t2;
  const cplx u = std::exp(2.0 * kI * omega1 * dt);
  const cplx overlap = std::exp(-a2 * (1.0 - u));
  const cplx val = overlap * std::exp(kI * (2.0 * delta_over_hbar + omega1) * dt);
  SignalPoint s;
  s.t_s = t1 + t2;
  s.trace_plus_minus = 0.5 * kI * val;
  s.p_plus = 0.5 - 0.5 * val.real();
  s.theta = omega1 * dt + kI * a2 * (1.0 - u);
  s.envelope = 0.5 * (1.0 + std::exp(-a2 * (1.0 - std::cos(2.0 * omega1 * dt))));
  return s;
}

double separation(cplx alpha0, double omega1, double t) {
  return 2.0 * std::abs(alpha0) * std::sin(omega1 * t);
}

double separation_small_time(cplx alpha0, double omega1, double t) {
  return 2.0 * std::abs(alpha0) * omega1 * t;
}

double entanglement(double separation) {
  if (!(separation >= 0.0))
    throw model::ParameterError("separation must be >= 0");
  const double chi = std::exp(-0.5 * separation * separation);
  // (1 +- chi)^((1 +- chi)/2) in log2 form, with the x log x -> 0 limit.
  auto half_xlog2x = [](double x) {
    return x > 0.0 ? 0.5 * x * std::log2(x) : 0.0;
  };
  return 1.0 - (half_xlog2x(1.0 + chi) + half_xlog2x(1.0 - chi));
}

SignalPoint ramsey_thermal_undamped(cplx alpha0, double omega1,
                                    double delta_over_hbar, double mbar,
                                    double t2_s, double t) {
  const double a2 = std::norm(alpha0);
  const cplx eta = 1.0 - std::exp(-2.0 * kI * omega1 * t);
  const cplx denom = 1.0 + mbar * eta; // Re >= 1, so log stays principal
  const cplx val = std::exp(-eta * a2 / denom) *
                   std::exp(-kI * (2.0 * delta_over_hbar + omega1) * t) / denom;
  const double t2f = std::isinf(t2_s) ? 1.0 : std::exp(-t / t2_s);
  SignalPoint s;
  s.t_s = t;
  s.trace_plus_minus = -0.5 * kI * t2f * val;
  s.p_plus = 0.5 + 0.5 * t2f * val.real();
  s.theta = -omega1 * t + kI * a2 * eta / denom + kI * std::log(denom);
  s.envelope = 0.5 + 0.5 * t2f * std::exp(-s.theta.imag());
  return s;
}

cplx damped_phase(double omega1, double gamma, cplx beta, cplx big_m,
                  double alpha0_sq, double t) {
  const cplx u = std::exp(-2.0 * kI * omega1 * beta * t);
  // Both 1-M and 1-M*u keep positive real part for physical parameters,
  // so taking the logs separately stays on the principal branch and is
  // continuous in t.
  const cplx log_ratio = std::log(1.0 - big_m) - std::log(1.0 - big_m * u);
  const cplx ratio = (1.0 - big_m) / (1.0 - big_m * u);
  return -(kI * gamma / 2.0 + omega1 * beta) * t - kI * log_ratio -
         kI * (alpha0_sq / beta) * (u - 1.0) * ratio;
}

cplx damped_echo_phase(double omega1, double gamma, cplx beta, cplx big_m,
                       double alpha0_sq, double t1, double t2) {
  const double gt = gamma / (2.0 * omega1);
  const cplx bc = std::conj(beta);
  const cplx mc = std::conj(big_m);
  // Conjugated Wigner data at the pi pulse; ubar = e^{+2 i w1 beta* t1}.
  const cplx ubar = std::exp(2.0 * kI * omega1 * bc * t1);
  const cplx rc = (1.0 - mc) / (1.0 - mc * ubar);
  const cplx sigma_mid = -kI * gt + bc * (1.0 + mc * ubar) / (1.0 - mc * ubar);
  const cplx a1a2_mid = alpha0_sq * ubar * rc * rc;
  const cplx phase_mid = -(kI * gamma / 2.0 - omega1 * bc) * t1 -
                         kI * (std::log(1.0 - mc) - std::log(1.0 - mc * ubar)) -
                         kI * (alpha0_sq / bc) * (ubar - 1.0) * rc;
  // Second free evolution with the conjugated state as initial condition.
  const cplx m_prime = (sigma_mid - kI * gt - beta) / (sigma_mid - kI * gt + beta);
  const cplx u2 = std::exp(-2.0 * kI * omega1 * beta * t2);
  const cplx rp = (1.0 - m_prime) / (1.0 - m_prime * u2);
  return phase_mid - (kI * gamma / 2.0 + omega1 * beta) * t2 -
         kI * (std::log(1.0 - m_prime) - std::log(1.0 - m_prime * u2)) -
         kI * (a1a2_mid / beta) * (u2 - 1.0) * rp;
}

SignalPoint ramsey_damped(const model::DerivedParams& derived,
                          const model::DeviceParams& dev, double t) {
  const cplx theta = damped_phase(derived.omega1_rad, derived.gamma_rad,
                                  derived.beta, derived.big_m,
                                  std::norm(dev.alpha0), t);
  const double t2f = t2_factor(dev, t);
  const cplx fast = std::exp(-2.0 * kI * derived.delta_over_hbar_rad * t);
  const cplx slow = std::exp(kI * theta);
  SignalPoint s;
  s.t_s = t;
  s.theta = theta;
  s.trace_plus_minus = -0.5 * kI * t2f * fast * slow;
  s.p_plus = 0.5 + 0.5 * t2f * (fast * slow).real();
  s.envelope = 0.5 + 0.5 * t2f * std::exp(-theta.imag());
  check_physical(s, "ramsey_damped");
  return s;
}

SignalPoint echo_damped(const model::DerivedParams& derived,
                        const model::DeviceParams& dev, double t1, double t2) {
  const cplx theta = damped_echo_phase(derived.omega1_rad, derived.gamma_rad,
                                       derived.beta, derived.big_m,
                                       std::norm(dev.alpha0), t1, t2);
  const double tf = t1 + t2;
  const double t2f = t2_factor(dev, tf);
  const cplx fast = std::exp(2.0 * kI * derived.delta_over_hbar_rad * (t1 - t2));
  const cplx slow = std::exp(kI * theta);
  SignalPoint s;
  s.t_s = tf;
  s.theta = theta;
  s.trace_plus_minus = 0.5 * kI * t2f * fast * slow;
  s.p_plus = 0.5 - 0.5 * t2f * (fast * slow).real();
  s.envelope = 0.5 + 0.5 * t2f * std::exp(-theta.imag());
  check_physical(s, "echo_damped");
  return s;
}

SignalPoint elapsed_signal(const model::DerivedParams& derived,
                           const model::DeviceParams& dev,
                           const model::PulseSchedule& schedule, double t) {
  if (schedule.kind == model::PulseSchedule::Kind::ramsey || t <= schedule.t1_s)
    return ramsey_damped(derived, dev, t);
  return echo_damped(derived, dev, schedule.t1_s, t - schedule.t1_s);
}

void unwrap(std::vector<double>& phases) {
  const double two_pi = 2.0 * consts::pi;
  for (std::size_t i = 1; i < phases.size(); ++i) {
    double d = phases[i] - phases[i - 1];
    d -= two_pi * std::round(d / two_pi);
    phases[i] = phases[i - 1] + d;
  }
}

} // namespace echolab::analytic
