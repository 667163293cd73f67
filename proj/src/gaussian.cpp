#include "echolab/gaussian.hpp"

#include <array>
#include <cmath>
#include <string>

#include "echolab/constants.hpp"
#include "echolab/errors.hpp"

namespace echolab::gaussian {

namespace {

constexpr cplx kI(0.0, 1.0);
constexpr int kNumVars = 8;
constexpr const char* kVarNames[kNumVars] = {
    "theta_prime", "xbar", "pbar", "sigma_x", "sigma_p", "sigma_xp", "a1", "a2"};

using State = std::array<cplx, kNumVars>;

State pack(const GaussianParams& g) {
  return {g.theta_prime, g.xbar, g.pbar, g.sigma_x,
          g.sigma_p,     g.sigma_xp, g.a1, g.a2};
}

GaussianParams unpack(const State& y) {
  GaussianParams g;
  g.theta_prime = y[0];
  g.xbar = y[1];
  g.pbar = y[2];
  g.sigma_x = y[3];
  g.sigma_p = y[4];
  g.sigma_xp = y[5];
  g.a1 = y[6];
  g.a2 = y[7];
  return g;
}

struct Rates {
  double omega, omega1, gamma, big_n;
};

State rhs(const Rates& r, const State& y) {
  const cplx xb = y[1], pb = y[2], sx = y[3], sp = y[4], sxp = y[5];
  State d;
  d[0] = -0.5 * r.omega1 * (xb * xb + pb * pb + sx + sp);
  d[1] = r.omega * pb - 0.5 * r.gamma * xb - kI * r.omega1 * (sxp * pb + sx * xb);
  d[2] = -r.omega * xb - 0.5 * r.gamma * pb - kI * r.omega1 * (sxp * xb + sp * pb);
  d[3] = 2.0 * r.omega * sxp - r.gamma * (sx - r.big_n) -
         kI * r.omega1 * (sx * sx + sxp * sxp - 1.0);
  d[4] = -2.0 * r.omega * sxp - r.gamma * (sp - r.big_n) -
         kI * r.omega1 * (sp * sp + sxp * sxp - 1.0);
  d[5] = r.omega * (sp - sx) - r.gamma * sxp - kI * r.omega1 * sxp * (sp + sx);
  // Redundant pair; for displaced-thermal initial states (sigma_xp = 0,
  // sigma_x = sigma_p) these reproduce (xbar +- i pbar)/2 exactly.
  d[6] = (-kI * r.omega - 0.5 * r.gamma - kI * r.omega1 * sx) * y[6];
  d[7] = (kI * r.omega - 0.5 * r.gamma - kI * r.omega1 * sx) * y[7];
  return d;
}

State rk4_step(const Rates& r, const State& y, const State& k1, double h) {
  State t, k2, k3, k4;
  for (int i = 0; i < kNumVars; ++i) t[i] = y[i] + 0.5 * h * k1[i];
  k2 = rhs(r, t);
  for (int i = 0; i < kNumVars; ++i) t[i] = y[i] + 0.5 * h * k2[i];
  k3 = rhs(r, t);
  for (int i = 0; i < kNumVars; ++i) t[i] = y[i] + h * k3[i];
  k4 = rhs(r, t);
  State out;
  for (int i = 0; i < kNumVars; ++i)
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

} // namespace

GaussianParams GaussianParams::displaced_thermal(cplx alpha0, double mbar) {
  GaussianParams g;
  g.theta_prime = 1.5 * consts::pi;
  g.xbar = 2.0 * alpha0.real();
  g.pbar = 2.0 * alpha0.imag();
  g.sigma_x = 2.0 * mbar + 1.0;
  g.sigma_p = 2.0 * mbar + 1.0;
  g.sigma_xp = 0.0;
  g.a1 = alpha0;
  g.a2 = std::conj(alpha0);
  return g;
}

GaussianParams GaussianParams::conjugated() const {
  GaussianParams g;
  g.theta_prime = -std::conj(theta_prime);
  g.xbar = std::conj(xbar);
  g.pbar = std::conj(pbar);
  g.sigma_x = std::conj(sigma_x);
  g.sigma_p = std::conj(sigma_p);
  g.sigma_xp = std::conj(sigma_xp);
  g.a1 = std::conj(a2);
  g.a2 = std::conj(a1);
  return g;
}

double GaussianParams::mean_identity_defect() const {
  return std::abs(xbar * xbar + pbar * pbar - 4.0 * a1 * a2);
}

double GaussianParams::a_consistency_defect() const {
  return std::abs(a1 - 0.5 * (xbar + kI * pbar)) +
         std::abs(a2 - 0.5 * (xbar - kI * pbar));
}

void IntegrateDiagnostics::merge(const IntegrateDiagnostics& other) {
  steps_accepted += other.steps_accepted;
  steps_rejected += other.steps_rejected;
  max_sigma_xp_abs = std::max(max_sigma_xp_abs, other.max_sigma_xp_abs);
  max_sigma_asym = std::max(max_sigma_asym, other.max_sigma_asym);
  max_mean_identity_defect =
      std::max(max_mean_identity_defect, other.max_mean_identity_defect);
  max_a_consistency_defect =
      std::max(max_a_consistency_defect, other.max_a_consistency_defect);
}

GaussianParams integrate_gaussian(const GaussianParams& initial,
                                  double duration,
                                  const model::DerivedParams& derived,
                                  const IntegrateOptions& options,
                                  IntegrateDiagnostics* diag) {
  if (!(duration >= 0.0))
    throw model::ParameterError("duration must be >= 0");
  IntegrateDiagnostics local;
  State y = pack(initial);
  if (duration > 0.0) {
    const Rates r{derived.omega_rad, derived.omega1_rad, derived.gamma_rad,
                  derived.big_n};
    const double rate =
        std::max({r.omega, r.omega1 * (1.0 + std::abs(initial.sigma_x)),
                  r.gamma, 1e-300});
    double h = options.initial_step > 0.0 ? options.initial_step
                                          : std::min(duration, 0.1 / rate);
    double t = 0.0;
    while (t < duration) {
      h = std::min(h, duration - t);
      if (h < duration * 1e-15)
        throw NumericalError("integrate_gaussian: step size underflow");
      const State k1 = rhs(r, y);
      const State ybig = rk4_step(r, y, k1, h);
      const State ymid = rk4_step(r, y, k1, 0.5 * h);
      const State k1m = rhs(r, ymid);
      const State yhalf = rk4_step(r, ymid, k1m, 0.5 * h);

      double err = 0.0;
      for (int i = 0; i < kNumVars; ++i) {
        const double scale = std::max(1.0, std::abs(yhalf[i]));
        err = std::max(err, std::abs(yhalf[i] - ybig[i]) / scale);
      }
      err /= 15.0;
      for (int i = 0; i < kNumVars; ++i) {
        if (!std::isfinite(yhalf[i].real()) || !std::isfinite(yhalf[i].imag()))
          throw NumericalError(std::string("integrate_gaussian: NaN in ") +
                               kVarNames[i]);
      }

      if (err <= options.tol) {
        for (int i = 0; i < kNumVars; ++i)
          y[i] = yhalf[i] + (yhalf[i] - ybig[i]) / 15.0;
        t += h;
        ++local.steps_accepted;
        const GaussianParams g = unpack(y);
        local.max_sigma_xp_abs =
            std::max(local.max_sigma_xp_abs, std::abs(g.sigma_xp));
        local.max_sigma_asym =
            std::max(local.max_sigma_asym, std::abs(g.sigma_x - g.sigma_p));
        local.max_mean_identity_defect = std::max(local.max_mean_identity_defect,
                                                  g.mean_identity_defect());
        local.max_a_consistency_defect = std::max(
            local.max_a_consistency_defect, g.a_consistency_defect());
        const double grow = err > 0.0 ? 0.9 * std::pow(options.tol / err, 0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
      } else {
        ++local.steps_rejected;
        h *= std::clamp(0.9 * std::pow(options.tol / err, 0.2), 0.1, 0.9);
      }
    }
  }
  if (diag) diag->merge(local);
  return unpack(y);
}

cplx reconstruct_trace(const GaussianParams& params, double t,
                       const model::DeviceParams& dev,
                       const model::DerivedParams& derived) {
  const double t2f = dev.t2_is_infinite() ? 1.0 : std::exp(-t / dev.t2_s);
  return 0.5 * t2f * std::exp(-2.0 * kI * derived.delta_over_hbar_rad * t) *
         std::exp(kI * params.theta_prime);
}

double p_plus_from_trace(cplx trace) { return 0.5 * (1.0 - 2.0 * trace.imag()); }

EchoTrace echo_conjugate_and_continue(const GaussianParams& mid, double t1,
                                      double t2,
                                      const model::DerivedParams& derived,
                                      const model::DeviceParams& dev,
                                      const IntegrateOptions& options) {
  EchoTrace out;
  const GaussianParams flipped = mid.conjugated();
  out.final_params =
      integrate_gaussian(flipped, t2, derived, options, &out.diag);
  const double tf = t1 + t2;
  const double t2f = dev.t2_is_infinite() ? 1.0 : std::exp(-tf / dev.t2_s);
  out.trace = 0.5 * t2f *
              std::exp(2.0 * kI * derived.delta_over_hbar_rad * (t1 - t2)) *
              std::exp(kI * out.final_params.theta_prime);
  return out;
}

cplx sigma_x_closed_form(const model::DerivedParams& derived, double t) {
  const double gt = derived.gamma_rad / (2.0 * derived.omega1_rad);
  const cplx u = std::exp(-2.0 * kI * derived.omega1_rad * derived.beta * t);
  return kI * gt + derived.beta * (1.0 + derived.big_m * u) /
                       (1.0 - derived.big_m * u);
}

cplx a1_closed_form(cplx alpha0, const model::DerivedParams& derived, double t) {
  const cplx u = std::exp(-2.0 * kI * derived.omega1_rad * derived.beta * t);
  return alpha0 *
         std::exp((-kI * derived.omega_rad - kI * derived.omega1_rad * derived.beta) * t) *
         (1.0 - derived.big_m) / (1.0 - derived.big_m * u);
}

cplx a2_closed_form(cplx alpha0, const model::DerivedParams& derived, double t) {
  const cplx u = std::exp(-2.0 * kI * derived.omega1_rad * derived.beta * t);
  return std::conj(alpha0) *
         std::exp((kI * derived.omega_rad - kI * derived.omega1_rad * derived.beta) * t) *
         (1.0 - derived.big_m) / (1.0 - derived.big_m * u);
}

namespace {

analytic::SignalPoint assemble(cplx trace, cplx theta, double t) {
  analytic::SignalPoint s;
  s.t_s = t;
  s.trace_plus_minus = trace;
  s.p_plus = p_plus_from_trace(trace);
  s.envelope = 0.5 + std::abs(trace);
  s.theta = theta;
  return s;
}

} // namespace

analytic::SignalPoint signal(const model::DeviceParams& dev,
                             const model::DerivedParams& derived,
                             const model::PulseSchedule& schedule,
                             const IntegrateOptions& options,
                             IntegrateDiagnostics* diag) {
  model::validate(schedule);
  const GaussianParams init =
      GaussianParams::displaced_thermal(dev.alpha0, dev.mbar);
  if (schedule.kind == model::PulseSchedule::Kind::ramsey) {
    const GaussianParams end =
        integrate_gaussian(init, schedule.t_s, derived, options, diag);
    const cplx trace = reconstruct_trace(end, schedule.t_s, dev, derived);
    return assemble(trace, end.theta_prime - 1.5 * consts::pi, schedule.t_s);
  }
  IntegrateDiagnostics d1;
  const GaussianParams mid =
      integrate_gaussian(init, schedule.t1_s, derived, options, &d1);
  EchoTrace echo = echo_conjugate_and_continue(mid, schedule.t1_s,
                                               schedule.t2_s, derived, dev,
                                               options);
  if (diag) {
    diag->merge(d1);
    diag->merge(echo.diag);
  }
  return assemble(echo.trace,
                  echo.final_params.theta_prime + 1.5 * consts::pi,
                  schedule.t1_s + schedule.t2_s);
}

analytic::SignalPoint elapsed_signal(const model::DeviceParams& dev,
                                     const model::DerivedParams& derived,
                                     const model::PulseSchedule& schedule,
                                     double t,
                                     const IntegrateOptions& options) {
  if (schedule.kind == model::PulseSchedule::Kind::ramsey || t <= schedule.t1_s)
    return signal(dev, derived, model::PulseSchedule::ramsey(t), options);
  return signal(dev, derived,
                model::PulseSchedule::echo(schedule.t1_s, t - schedule.t1_s),
                options);
}

} // namespace echolab::gaussian
