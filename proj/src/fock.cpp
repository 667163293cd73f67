#include "echolab/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "echolab/constants.hpp"
#include "echolab/errors.hpp"

namespace echolab::fock {

namespace {
constexpr cplx kI(0.0, 1.0);

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}
}

// ---------------------------------------------------------------------------
// FockMatrix basics

FockMatrix FockMatrix::identity(int dim) {
  FockMatrix m(dim);
  for (int j = 0; j < dim; ++j) m(j, j) = 1.0;
  return m;
}

cplx FockMatrix::trace() const {
  cplx t = 0.0;
  for (int j = 0; j < dim_; ++j) t += (*this)(j, j);
  return t;
}

double FockMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& v : a_) s += std::norm(v);
  return std::sqrt(s);
}

double FockMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& v : a_) m = std::max(m, std::abs(v));
  return m;
}

FockMatrix FockMatrix::dagger() const {
  FockMatrix out(dim_);
  for (int j = 0; j < dim_; ++j)
    for (int k = 0; k < dim_; ++k) out(k, j) = std::conj((*this)(j, k));
  return out;
}

double FockMatrix::hermiticity_defect() const {
  double m = 0.0;
  for (int j = 0; j < dim_; ++j)
    for (int k = j; k < dim_; ++k)
      m = std::max(m, std::abs((*this)(j, k) - std::conj((*this)(k, j))));
  return m;
}

double FockMatrix::min_diagonal() const {
  double m = dim_ > 0 ? (*this)(0, 0).real() : 0.0;
  for (int j = 1; j < dim_; ++j) m = std::min(m, (*this)(j, j).real());
  return m;
}

void FockMatrix::scale(cplx factor) {
  for (cplx& v : a_) v *= factor;
}

// ---------------------------------------------------------------------------
// matmul kernels

FockMatrix matmul_serial(const FockMatrix& a, const FockMatrix& b) {
  const int n = a.dim();
  FockMatrix c(n);
  const cplx* ap = a.data();
  const cplx* bp = b.data();
  cplx* cp = c.data();
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const cplx aik = ap[std::size_t(i) * n + k];
      if (aik == cplx(0.0)) continue;
      const cplx* brow = bp + std::size_t(k) * n;
      cplx* crow = cp + std::size_t(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

FockMatrix matmul(const FockMatrix& a, const FockMatrix& b, ExecPolicy policy) {
  if (policy == ExecPolicy::serial) return matmul_serial(a, b);
  const int n = a.dim();
  FockMatrix c(n);
  const cplx* ap = a.data();
  const cplx* bp = b.data();
  cplx* cp = c.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const cplx aik = ap[std::size_t(i) * n + k];
      if (aik == cplx(0.0)) continue;
      const cplx* brow = bp + std::size_t(k) * n;
      cplx* crow = cp + std::size_t(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// displacement operator and initial states

namespace {

// out = term * T where T = (alpha a^dag - alpha^* a)/2^s is bidiagonal:
// column c has -conj(as)*sqrt(c) at row c-1 and as*sqrt(c+1) at row c+1.
void bidiagonal_right_mult(const FockMatrix& term, cplx as, FockMatrix& out) {
  const int n = term.dim();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      cplx v = 0.0;
      if (c + 1 < n) v += term(r, c + 1) * (as * std::sqrt(double(c + 1)));
      if (c > 0) v -= term(r, c - 1) * (std::conj(as) * std::sqrt(double(c)));
      out(r, c) = v;
    }
  }
}

} // namespace

FockMatrix displacement_operator(cplx alpha, int dim, ExecPolicy policy) {
  if (dim < 1) throw model::ParameterError("dimension must be >= 1");
  // 1-norm of K: max over columns of |alpha|(sqrt(c) + sqrt(c+1)).
  const double norm1 =
      std::abs(alpha) * (std::sqrt(double(dim - 1)) + std::sqrt(double(dim)));
  int s = 0;
  double scaled = norm1;
  while (scaled > 0.5) {
    scaled *= 0.5;
    ++s;
  }
  const cplx as = alpha / std::pow(2.0, s);

  FockMatrix e = FockMatrix::identity(dim);
  FockMatrix term = FockMatrix::identity(dim);
  FockMatrix next(dim);
  for (int i = 1; i <= 80; ++i) {
    bidiagonal_right_mult(term, as, next);
    const double inv = 1.0 / double(i);
    for (std::size_t idx = 0; idx < next.size(); ++idx) {
      next.data()[idx] *= inv;
      e.data()[idx] += next.data()[idx];
    }
    std::swap(term, next);
    if (term.max_abs() < 1e-18) break;
  }
  for (int i = 0; i < s; ++i) e = matmul(e, e, policy);
  return e;
}

int recommended_dim(cplx alpha0, double mbar) {
  const double load = std::norm(alpha0) + mbar;
  return int(std::ceil(load + 8.0 * std::sqrt(load) + 20.0));
}

double displaced_thermal_population(cplx alpha0, double mbar, int n) {
  const double a2 = std::norm(alpha0);
  if (a2 == 0.0 && mbar <= 0.0) return n == 0 ? 1.0 : 0.0;
  if (mbar <= 0.0) {
    // Poisson
    double logp = -a2;
    for (int k = 1; k <= n; ++k) logp += std::log(a2) - std::log(double(k));
    return std::exp(logp);
  }
  // P(n) = mbar^n/(1+mbar)^(n+1) e^{-a2/(1+mbar)} L_n(-a2/(mbar(1+mbar)))
  const double x = a2 / (mbar * (1.0 + mbar));
  double lprev = 1.0, lcur = 1.0 + x; // L_0(-x), L_1(-x); all terms positive
  double logscale = 0.0;
  if (n == 0) lcur = 1.0;
  for (int k = 1; k < n; ++k) {
    const double lnext =
        ((2.0 * k + 1.0 + x) * lcur - double(k) * lprev) / double(k + 1);
    lprev = lcur;
    lcur = lnext;
    if (lcur > 1e250) {
      lprev /= 1e250;
      lcur /= 1e250;
      logscale += std::log(1e250);
    }
  }
  const double logp = double(n) * std::log(mbar / (1.0 + mbar)) -
                      std::log(1.0 + mbar) - a2 / (1.0 + mbar) +
                      std::log(n == 0 ? 1.0 : lcur) + logscale;
  return std::exp(logp);
}

int leak_safe_dim(cplx alpha0, double mbar, double nbar, double gamma_rad,
                  double duration_s, double leak_budget) {
  int dim = recommended_dim(alpha0, mbar);
  const double occ = std::max(mbar, nbar);
  const double safety = 3.0;
  // The boundary population guards two things: the mass the construction
  // truncates away (which biases Tr[rho_+-] even without damping) and the
  // damping kernel's exact trace-leak rate gamma*nbar*dim*rho_boundary.
  const double tail_budget = 2e-9;
  while (true) {
    const double boundary = displaced_thermal_population(alpha0, occ, dim - 1);
    const double leak =
        safety * gamma_rad * nbar * double(dim) * duration_s * boundary;
    if ((boundary <= tail_budget && leak <= leak_budget) || dim >= 1 << 16)
      return dim;
    dim += std::max(4, dim / 16);
  }
}

FockMatrix thermal_state(double mbar, int dim) {
  if (!(mbar >= 0.0)) throw model::ParameterError("mbar must be >= 0");
  FockMatrix rho(dim);
  double p = 1.0 / (1.0 + mbar);
  const double ratio = mbar / (1.0 + mbar);
  double sum = 0.0;
  for (int n = 0; n < dim; ++n) {
    rho(n, n) = p;
    sum += p;
    p *= ratio;
  }
  const double deficit = 1.0 - sum;
  if (deficit >= 1e-8)
    throw TruncationError("thermal state truncation deficit " + sci(deficit) +
                          " at dim " + std::to_string(dim));
  for (int n = 0; n < dim; ++n) rho(n, n) /= sum;
  return rho;
}

FockMatrix displaced_thermal(cplx alpha0, double mbar, int dim,
                             bool enforce_dim_rule, ExecPolicy policy) {
  if (enforce_dim_rule && dim < recommended_dim(alpha0, mbar))
    throw TruncationError("dim " + std::to_string(dim) +
                          " below recommended " +
                          std::to_string(recommended_dim(alpha0, mbar)));
  FockMatrix rho = thermal_state(mbar, dim);
  if (alpha0 == cplx(0.0)) return rho;
  const FockMatrix d = displacement_operator(alpha0, dim, policy);
  return matmul(matmul(d, rho, policy), d.dagger(), policy);
}

// ---------------------------------------------------------------------------
// Hermitian eigenvalues (cyclic Jacobi)

std::vector<double> hermitian_eigenvalues(const FockMatrix& a0) {
  const int n = a0.dim();
  FockMatrix a = a0;
  const double scale = std::max(1.0, a.frobenius_norm());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) < 1e-13 * scale) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (app - aqq) / (2.0 * mag);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx ph = apq / mag;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const cplx arp = a(r, p);
          const cplx arq = a(r, q);
          a(r, p) = c * arp + s * std::conj(ph) * arq;
          a(r, q) = -s * ph * arp + c * arq;
          a(p, r) = std::conj(a(r, p));
          a(q, r) = std::conj(a(r, q));
        }
        a(p, p) = app + t * mag;
        a(q, q) = aqq - t * mag;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }
  std::vector<double> eig(n);
  for (int j = 0; j < n; ++j) eig[j] = a(j, j).real();
  std::sort(eig.begin(), eig.end());
  return eig;
}

double min_eigenvalue(const FockMatrix& a) {
  const auto eig = hermitian_eigenvalues(a);
  return eig.empty() ? 0.0 : eig.front();
}

// ---------------------------------------------------------------------------
// component stencils and RHS kernels

ComponentStencil make_stencil(ComponentKind kind,
                              const model::DerivedParams& derived, int dim) {
  ComponentStencil st;
  st.dim = dim;
  st.kind = kind;
  st.c0.resize(std::size_t(dim) * dim);
  st.cp.resize(std::size_t(dim) * dim);
  st.cm.resize(std::size_t(dim) * dim);
  const double omega = derived.omega_rad;
  const double omega1 = derived.omega1_rad;
  const double gamma = derived.gamma_rad;
  const double nbar = 0.5 * (derived.big_n - 1.0);
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < dim; ++k) {
      const std::size_t idx = std::size_t(j) * dim + k;
      cplx c0;
      const double dis0 = -0.5 * gamma * (j + k) - gamma * nbar * (j + k + 1);
      switch (kind) {
        case ComponentKind::pp:
          c0 = cplx(dis0, -(omega + omega1) * (j - k));
          break;
        case ComponentKind::mm:
          c0 = cplx(dis0, -(omega - omega1) * (j - k));
          break;
        case ComponentKind::pm:
          // interaction picture: the -(2i Delta/hbar + 1/T2) scalar is
          // reattached after integration
          c0 = cplx(dis0, -omega * (j - k) - omega1 * (j + k + 1));
          break;
      }
      st.c0[idx] = c0;
      st.cp[idx] = (j + 1 < dim && k + 1 < dim)
                       ? gamma * (nbar + 1.0) *
                             std::sqrt(double(j + 1) * double(k + 1))
                       : 0.0;
      st.cm[idx] =
          (j > 0 && k > 0) ? gamma * nbar * std::sqrt(double(j) * double(k)) : 0.0;
      st.max_rate =
          std::max(st.max_rate, std::abs(c0) + st.cp[idx] + st.cm[idx]);
    }
  }
  return st;
}

void component_rhs_serial(const ComponentStencil& st, const FockMatrix& rho,
                          FockMatrix& out) {
  const int n = st.dim;
  const cplx* r = rho.data();
  cplx* o = out.data();
  for (int j = 0; j < n; ++j) {
    const bool up = j + 1 < n;
    const bool dn = j > 0;
    for (int k = 0; k < n; ++k) {
      const std::size_t idx = std::size_t(j) * n + k;
      cplx v = st.c0[idx] * r[idx];
      if (up && k + 1 < n) v += st.cp[idx] * r[idx + n + 1];
      if (dn && k > 0) v += st.cm[idx] * r[idx - n - 1];
      o[idx] = v;
    }
  }
}

// Below this size the stencil is too cheap for thread fork/join to pay off
// (it is bandwidth-bound; a row is only ~20 flops per entry).
constexpr int kParallelMinDim = 192;

void component_rhs(const ComponentStencil& st, const FockMatrix& rho,
                   FockMatrix& out, ExecPolicy policy) {
  if (policy == ExecPolicy::serial || st.dim < kParallelMinDim) {
    component_rhs_serial(st, rho, out);
    return;
  }
  const int n = st.dim;
  const cplx* r = rho.data();
  cplx* o = out.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int j = 0; j < n; ++j) {
    const bool up = j + 1 < n;
    const bool dn = j > 0;
    for (int k = 0; k < n; ++k) {
      const std::size_t idx = std::size_t(j) * n + k;
      cplx v = st.c0[idx] * r[idx];
      if (up && k + 1 < n) v += st.cp[idx] * r[idx + n + 1];
      if (dn && k > 0) v += st.cm[idx] * r[idx - n - 1];
      o[idx] = v;
    }
  }
}

// ---------------------------------------------------------------------------
// RK4 with step doubling

void EvolveDiagnostics::merge(const EvolveDiagnostics& other) {
  steps_accepted += other.steps_accepted;
  steps_rejected += other.steps_rejected;
  max_trace_drift = std::max(max_trace_drift, other.max_trace_drift);
  max_herm_defect = std::max(max_herm_defect, other.max_herm_defect);
  max_diag_negativity = std::max(max_diag_negativity, other.max_diag_negativity);
  max_pm_trace_abs = std::max(max_pm_trace_abs, other.max_pm_trace_abs);
}

namespace {

void lincomb2(FockMatrix& out, const FockMatrix& y, double a,
              const FockMatrix& k) {
  const cplx* yp = y.data();
  const cplx* kp = k.data();
  cplx* op = out.data();
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) op[i] = yp[i] + a * kp[i];
}

void rk4_combine(FockMatrix& out, const FockMatrix& y, double h,
                 const FockMatrix& k1, const FockMatrix& k2,
                 const FockMatrix& k3, const FockMatrix& k4) {
  const cplx* yp = y.data();
  const cplx* k1p = k1.data();
  const cplx* k2p = k2.data();
  const cplx* k3p = k3.data();
  const cplx* k4p = k4.data();
  cplx* op = out.data();
  const double h6 = h / 6.0;
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i)
    op[i] = yp[i] + h6 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
}

struct Rk4Workspace {
  FockMatrix k1, k2, k3, k4, tmp, ybig, ymid, yhalf, k1m;
  explicit Rk4Workspace(int dim)
      : k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), ybig(dim), ymid(dim),
        yhalf(dim), k1m(dim) {}
};

// One classic RK4 step with precomputed k1.
void rk4_step(const ComponentStencil& st, const FockMatrix& y,
              const FockMatrix& k1, double h, FockMatrix& out,
              Rk4Workspace& ws, ExecPolicy policy) {
  lincomb2(ws.tmp, y, 0.5 * h, k1);
  component_rhs(st, ws.tmp, ws.k2, policy);
  lincomb2(ws.tmp, y, 0.5 * h, ws.k2);
  component_rhs(st, ws.tmp, ws.k3, policy);
  lincomb2(ws.tmp, y, h, ws.k3);
  component_rhs(st, ws.tmp, ws.k4, policy);
  rk4_combine(out, y, h, k1, ws.k2, ws.k3, ws.k4);
}

double diff_frobenius(const FockMatrix& a, const FockMatrix& b) {
  const cplx* ap = a.data();
  const cplx* bp = b.data();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(ap[i] - bp[i]);
  return std::sqrt(s);
}

} // namespace

FockMatrix evolve_component(ComponentKind kind, const FockMatrix& rho,
                            double duration,
                            const model::DerivedParams& derived,
                            const model::DeviceParams& dev,
                            const EvolveOptions& options,
                            EvolveDiagnostics* diag) {
  if (!(duration >= 0.0))
    throw model::ParameterError("duration must be >= 0");
  EvolveDiagnostics local;
  FockMatrix y = rho;
  const cplx tr0 = y.trace();

  if (duration > 0.0 && y.max_abs() > 0.0) {
    const ComponentStencil st = make_stencil(kind, derived, y.dim());
    Rk4Workspace ws(y.dim());
    const double tol = options.rel_tol;
    double h = options.initial_step > 0.0
                   ? options.initial_step
                   : std::min(duration, 1.0 / std::max(st.max_rate, 1e-300));
    double t = 0.0;
    while (t < duration) {
      h = std::min(h, duration - t);
      if (h < duration * 1e-15)
        throw NumericalError("evolve_component: step size underflow");
      component_rhs(st, y, ws.k1, options.policy);
      rk4_step(st, y, ws.k1, h, ws.ybig, ws, options.policy);
      rk4_step(st, y, ws.k1, 0.5 * h, ws.ymid, ws, options.policy);
      component_rhs(st, ws.ymid, ws.k1m, options.policy);
      rk4_step(st, ws.ymid, ws.k1m, 0.5 * h, ws.yhalf, ws, options.policy);

      const double err = diff_frobenius(ws.yhalf, ws.ybig) / 15.0;
      const double scale = std::max(1.0, ws.yhalf.frobenius_norm());
      if (!std::isfinite(err))
        throw NumericalError("evolve_component: non-finite state");
      if (err <= tol * scale) {
        // accept with local extrapolation
        const cplx* hp = ws.yhalf.data();
        const cplx* bp = ws.ybig.data();
        cplx* yp = y.data();
        for (std::size_t i = 0; i < y.size(); ++i)
          yp[i] = hp[i] + (hp[i] - bp[i]) / 15.0;
        t += h;
        ++local.steps_accepted;

        if (options.check_invariants) {
          if (kind == ComponentKind::pm) {
            const double tra = std::abs(y.trace());
            local.max_pm_trace_abs = std::max(local.max_pm_trace_abs, tra);
            if (tra > 0.5 + 1e-8)
              throw NumericalError("evolve_component: |Tr rho_+-| exceeds 1/2");
          } else {
            const double drift = std::abs(y.trace() - tr0);
            const double herm = y.hermiticity_defect();
            const double neg = std::max(0.0, -y.min_diagonal());
            local.max_trace_drift = std::max(local.max_trace_drift, drift);
            local.max_herm_defect = std::max(local.max_herm_defect, herm);
            local.max_diag_negativity = std::max(local.max_diag_negativity, neg);
            if (drift > 1e-8)
              throw NumericalError(
                  "evolve_component: trace drift " + sci(drift) +
                  " (dim " + std::to_string(y.dim()) +
                  " too small for this state?)");
            if (herm > 1e-10)
              throw NumericalError("evolve_component: hermiticity defect " +
                                   sci(herm));
            if (neg > 1e-8)
              throw NumericalError("evolve_component: negative population " +
                                   sci(neg));
          }
        }
        const double grow =
            err > 0.0 ? 0.9 * std::pow(tol * scale / err, 0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
      } else {
        ++local.steps_rejected;
        h *= std::clamp(0.9 * std::pow(tol * scale / err, 0.2), 0.1, 0.9);
      }
    }
  }

  if (kind == ComponentKind::pm && duration > 0.0) {
    // reattach the analytically factored fast rotation and T2 decay
    const cplx fast = std::exp(-2.0 * kI * derived.delta_over_hbar_rad * duration);
    const double t2f = dev.t2_is_infinite() ? 1.0 : std::exp(-duration / dev.t2_s);
    y.scale(fast * t2f);
  }
  if (diag) diag->merge(local);
  return y;
}

// ---------------------------------------------------------------------------
// pulse algebra and full sequences

ComponentState apply_rotation(const ComponentState& state, double angle) {
  double c = std::cos(0.5 * angle);
  double s = std::sin(0.5 * angle);
  // Snap values that are zero up to rounding of pi so that pi and 2*pi
  // pulses act exactly (population swap / identity).
  if (std::abs(c) < 1e-15) c = 0.0;
  if (std::abs(s) < 1e-15) s = 0.0;
  const double c2 = c * c, s2 = s * s, cs = c * s;

  const int n = state.rho_pp.dim();
  ComponentState out;
  out.time_s = state.time_s;
  out.rho_pp = FockMatrix(n);
  out.rho_mm = FockMatrix(n);
  out.rho_pm = FockMatrix(n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const cplx pp = state.rho_pp(j, k);
      const cplx mm = state.rho_mm(j, k);
      const cplx pm = state.rho_pm(j, k);
      const cplx mp = std::conj(state.rho_pm(k, j)); // rho_-+ = rho_+-^dag
      out.rho_pp(j, k) = c2 * pp + s2 * mm + kI * cs * (pm - mp);
      out.rho_mm(j, k) = s2 * pp + c2 * mm - kI * cs * (pm - mp);
      out.rho_pm(j, k) = c2 * pm + s2 * mp + kI * cs * (pp - mm);
    }
  }
  return out;
}

FockRunResult run_sequence(const model::DeviceParams& dev,
                           const model::PulseSchedule& schedule, int dim,
                           const EvolveOptions& options) {
  model::validate(schedule);
  const model::DerivedParams derived = model::derive(dev);
  FockRunResult res;

  ComponentState state;
  state.rho_pp = FockMatrix(dim);
  state.rho_mm = displaced_thermal(dev.alpha0, dev.mbar, dim,
                               options.enforce_dim_rule, options.policy);
  state.rho_pm = FockMatrix(dim);
  state.time_s = 0.0;

  state = apply_rotation(state, 0.5 * consts::pi);

  auto evolve_all = [&](double tau) {
    state.rho_pp = evolve_component(ComponentKind::pp, state.rho_pp, tau,
                                    derived, dev, options, &res.diag);
    state.rho_mm = evolve_component(ComponentKind::mm, state.rho_mm, tau,
                                    derived, dev, options, &res.diag);
    state.rho_pm = evolve_component(ComponentKind::pm, state.rho_pm, tau,
                                    derived, dev, options, &res.diag);
    state.time_s += tau;
  };

  const bool echo = schedule.kind == model::PulseSchedule::Kind::echo;
  if (echo) {
    evolve_all(schedule.t1_s);
    state = apply_rotation(state, consts::pi);
    evolve_all(schedule.t2_s);
  } else {
    evolve_all(schedule.t_s);
  }

  const cplx trace_pm = state.rho_pm.trace();
  res.p_plus_trace_identity = 0.5 * (1.0 - 2.0 * trace_pm.imag());

  const ComponentState measured = apply_rotation(state, 0.5 * consts::pi);
  res.p_plus_populations = measured.rho_pp.trace().real();
  res.trace_sum_drift =
      std::abs(state.rho_pp.trace() + state.rho_mm.trace() - 1.0);
  res.min_eigenvalue_pp = min_eigenvalue(state.rho_pp);
  res.min_eigenvalue_mm = min_eigenvalue(state.rho_mm);

  const double total = schedule.total_time_s();
  const double t2_exp = dev.t2_is_infinite() ? 0.0 : total / dev.t2_s;
  analytic::SignalPoint& pt = res.point;
  pt.t_s = total;
  pt.trace_plus_minus = trace_pm;
  pt.p_plus = res.p_plus_populations;
  pt.envelope = 0.5 + std::abs(trace_pm);
  // Recover the slow phase by undoing the fast rotation and T2 factor.
  cplx eitheta;
  if (echo) {
    const double dt = schedule.t1_s - schedule.t2_s;
    eitheta = -2.0 * kI * trace_pm *
              std::exp(-2.0 * kI * derived.delta_over_hbar_rad * dt) *
              std::exp(t2_exp);
  } else {
    eitheta = 2.0 * kI * trace_pm *
              std::exp(2.0 * kI * derived.delta_over_hbar_rad * total) *
              std::exp(t2_exp);
  }
  pt.theta = eitheta == cplx(0.0) ? cplx(0.0) : -kI * std::log(eitheta);
  return res;
}

} // namespace echolab::fock
