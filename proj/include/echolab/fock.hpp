#pragma once

#include <complex>
#include <vector>

#include "echolab/analytic.hpp"
#include "echolab/model.hpp"

namespace echolab::fock {

using model::cplx;

/// Kernel execution policy. `serial` runs the plain reference loops;
/// `parallel` runs the OpenMP variants. Both produce bit-identical results.
enum class ExecPolicy { serial, parallel };

/// Dense complex matrix in the truncated number basis, row-major.
class FockMatrix {
public:
  FockMatrix() = default;
  explicit FockMatrix(int dim) : dim_(dim), a_(std::size_t(dim) * dim) {}
  static FockMatrix identity(int dim);

  int dim() const { return dim_; }
  cplx& operator()(int j, int k) { return a_[std::size_t(j) * dim_ + k]; }
  const cplx& operator()(int j, int k) const {
    return a_[std::size_t(j) * dim_ + k];
  }
  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }
  std::size_t size() const { return a_.size(); }

  cplx trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  FockMatrix dagger() const;
  /// max_jk |A_jk - conj(A_kj)|
  double hermiticity_defect() const;
  /// min over j of Re A_jj (diagonal positivity proxy)
  double min_diagonal() const;
  void scale(cplx factor);

private:
  int dim_ = 0;
  std::vector<cplx> a_;
};

/// C = A*B. The `parallel` kernel splits rows across OpenMP threads; the
/// serial kernel is the reference implementation with identical per-entry
/// arithmetic order.
FockMatrix matmul_serial(const FockMatrix& a, const FockMatrix& b);
FockMatrix matmul(const FockMatrix& a, const FockMatrix& b,
                  ExecPolicy policy = ExecPolicy::parallel);

/// exp(alpha a^dag - alpha^* a) in the truncated basis (scaling and
/// squaring; exactly unitary in the truncated space).
FockMatrix displacement_operator(cplx alpha, int dim,
                                 ExecPolicy policy = ExecPolicy::parallel);

/// Diagonal thermal state with mean occupation mbar, renormalized when the
/// truncation deficit is < 1e-8; throws TruncationError otherwise.
FockMatrix thermal_state(double mbar, int dim);

/// Smallest dimension considered safe for a displaced thermal state.
int recommended_dim(cplx alpha0, double mbar);

/// Exact number-basis population <n|rho|n> of the displaced thermal state
/// (Laguerre recurrence, log-scaled against overflow).
double displaced_thermal_population(cplx alpha0, double mbar, int n);

/// Dimension large enough for an evolution run: the initial state's
/// truncated tail must be negligible (it biases Tr[rho_+-] even without
/// damping) and the truncated damping kernel's exact trace-leak rate
/// gamma*nbar*dim*<boundary population> must stay below leak_budget when
/// integrated over `duration`. Never below recommended_dim. The occupation
/// estimate uses max(mbar, nbar) since the bath can heat the state.
int leak_safe_dim(cplx alpha0, double mbar, double nbar, double gamma_rad,
                  double duration_s, double leak_budget = 1e-10);

/// D(alpha0) rho_th D^dag(alpha0). With enforce_dim_rule the dimension must
/// be >= recommended_dim.
FockMatrix displaced_thermal(cplx alpha0, double mbar, int dim,
                             bool enforce_dim_rule = true,
                             ExecPolicy policy = ExecPolicy::parallel);

/// Eigenvalues of a Hermitian matrix (cyclic Jacobi), ascending.
std::vector<double> hermitian_eigenvalues(const FockMatrix& a);
double min_eigenvalue(const FockMatrix& a);

/// Which component equation to integrate.
enum class ComponentKind { pp, mm, pm };

/// The component Liouvillians act as a 3-point stencil along the diagonal
/// direction: out_jk = c0_jk rho_jk + cp_jk rho_{j+1,k+1} + cm_jk rho_{j-1,k-1}.
/// For pm the fast scalar -(2i Delta/hbar + 1/T2) is factored out
/// (interaction picture) and reattached by evolve_component on return.
struct ComponentStencil {
  int dim = 0;
  ComponentKind kind = ComponentKind::pp;
  std::vector<cplx> c0;
  std::vector<double> cp;
  std::vector<double> cm;
  double max_rate = 0.0; // max |c0| + cp + cm, for the initial step guess
};

ComponentStencil make_stencil(ComponentKind kind,
                              const model::DerivedParams& derived, int dim);

void component_rhs_serial(const ComponentStencil& st, const FockMatrix& rho,
                          FockMatrix& out);
void component_rhs(const ComponentStencil& st, const FockMatrix& rho,
                   FockMatrix& out, ExecPolicy policy = ExecPolicy::parallel);

struct EvolveOptions {
  double rel_tol = 1e-9;     // local tolerance per unit norm
  double initial_step = 0.0; // 0 = automatic
  // Desk-scale evolutions are bandwidth-bound, so the default spends
  // threads at the sweep level; `parallel` pays off for large dimensions.
  ExecPolicy policy = ExecPolicy::serial;
  bool check_invariants = true;
  bool enforce_dim_rule = true; // for the initial-state construction
};

struct EvolveDiagnostics {
  long steps_accepted = 0;
  long steps_rejected = 0;
  double max_trace_drift = 0.0;  // pp/mm: |Tr rho - Tr rho(0)|
  double max_herm_defect = 0.0;  // pp/mm
  double max_diag_negativity = 0.0;
  double max_pm_trace_abs = 0.0; // pm: should stay <= 1/2

  void merge(const EvolveDiagnostics& other);
};

/// Integrates d(rho)/dt for one component over `duration` (classic RK4 with
/// step doubling). Invariants (trace conservation and Hermiticity for
/// pp/mm, |Tr| <= 1/2 for pm) are checked on every accepted step and
/// violation aborts with NumericalError.
FockMatrix evolve_component(ComponentKind kind, const FockMatrix& rho,
                            double duration,
                            const model::DerivedParams& derived,
                            const model::DeviceParams& dev,
                            const EvolveOptions& options = {},
                            EvolveDiagnostics* diag = nullptr);

/// The three qubit-indexed oscillator blocks (rho_-+ = rho_+-^dag is
/// implicit).
struct ComponentState {
  FockMatrix rho_pp, rho_mm, rho_pm;
  double time_s = 0.0;
};

/// Qubit rotation exp(-i angle sigma_x/2) applied exactly to the block
/// structure.
ComponentState apply_rotation(const ComponentState& state, double angle);

struct FockRunResult {
  analytic::SignalPoint point;      // p_plus from explicit pulse algebra
  double p_plus_populations = 0.0;  // Tr[rho_pp] after the final pi/2
  double p_plus_trace_identity = 0.0; // (1 - 2 Im Tr[rho_+-])/2
  double trace_sum_drift = 0.0;     // |Tr pp + Tr mm - 1| at the end
  double min_eigenvalue_pp = 0.0;   // final-state positivity
  double min_eigenvalue_mm = 0.0;
  EvolveDiagnostics diag;
};

/// Full pulse sequence: prepare |-> (x) displaced thermal state, pi/2,
/// evolve (echo: pi at t1, evolve t2), pi/2, measure.
FockRunResult run_sequence(const model::DeviceParams& dev,
                           const model::PulseSchedule& schedule, int dim,
                           const EvolveOptions& options = {});

} // namespace echolab::fock
