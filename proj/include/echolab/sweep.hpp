#pragma once

#include <string>
#include <vector>

#include "echolab/analytic.hpp"
#include "echolab/config.hpp"
#include "echolab/model.hpp"

namespace echolab::sweep {

enum class Engine { analytic, gaussian_oracle, fock_oracle, crosscheck };
Engine engine_from_string(const std::string& name);
std::string to_string(Engine engine);

/// Sweepable quantities. Time axes are in microseconds; for an echo base
/// schedule, t_us means elapsed time with the pi pulse fixed at the base
/// t1 (Ramsey branch before it), t1_us a symmetric echo with t2 = t1, and
/// tf_us a symmetric echo with t1 = t2 = tf/2.
enum class AxisKey {
  alpha0_abs,
  nbar,
  mbar,
  q_factor,
  kappa,
  t1_us,
  tf_us,
  t_us
};
AxisKey axis_key_from_string(const std::string& name);
std::string to_string(AxisKey key);

struct AxisSpec {
  AxisKey key = AxisKey::t_us;
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  double value_at(int i) const;
};

struct SweepSpec {
  model::DeviceParams base;
  model::PulseSchedule schedule;
  std::vector<AxisSpec> axes; // up to 2; row-major order (axis1 outer)
  Engine engine = Engine::analytic;
  std::vector<std::string> outputs; // empty = {envelope, p_plus}
  double crosscheck_tol = 1e-6;
  int fock_dim = 0; // 0 = automatic per point
  bool fock_enforce_dim_rule = true;
  double fock_tol = 1e-9;
  double gaussian_tol = 1e-10;
  bool strict = false;
};

/// Builds a SweepSpec from dotted-key config text; throws ConfigError with
/// key/line diagnostics (including unknown keys).
SweepSpec spec_from_config(const config::KeyValues& cfg);

struct SweepResult {
  std::string csv;
  int rows = 0;
  int regime_failures = 0;
  std::string first_regime_failure;
  double max_crosscheck_discrepancy = 0.0;
  bool crosscheck_ok = true;
};

/// Runs the sweep on a bounded worker pool. Row order is row-major in the
/// axes regardless of worker count; output is byte-deterministic.
/// worker_count 0 means ECHOLAB_WORKERS or the available parallelism.
SweepResult run_sweep(const SweepSpec& spec, int worker_count = 0);

/// One device/schedule evaluation through the selected engine.
analytic::SignalPoint eval_engine(Engine engine,
                                  const model::DeviceParams& dev,
                                  const model::PulseSchedule& schedule,
                                  const SweepSpec& spec);

// --- figure presets ---

struct PresetFile {
  std::string name; // e.g. "fig1.csv"
  std::string csv;
};

struct PresetResult {
  std::string id;
  std::vector<PresetFile> files;
};

std::vector<std::string> preset_ids();

/// Runs a figure preset (fig1..fig4). `points` 0 keeps the preset default
/// grid density. Engine crosscheck is rejected here.
PresetResult run_preset(const std::string& id, Engine engine = Engine::analytic,
                        int worker_count = 0, int points = 0);

/// Writes the preset CSV files into out_dir; returns the paths written.
std::vector<std::string> write_preset_files(const PresetResult& preset,
                                            const std::string& out_dir);

/// Generates a gnuplot script reproducing the preset layout from an
/// existing CSV written by write_preset_files. Validates the file against
/// the preset schema (fig3 expects the *_nbar.csv path and finds its
/// *_alpha0.csv sibling). Throws ConfigError on schema mismatch or empty
/// data.
std::string emit_plot_script(const std::string& csv_path,
                             const std::string& preset_id);

/// emit_plot_script + write to script_path.
void write_plot_script(const std::string& csv_path,
                       const std::string& preset_id,
                       const std::string& script_path);

/// requested > 0 wins; otherwise ECHOLAB_WORKERS; otherwise the hardware
/// parallelism.
int resolve_worker_count(int requested);

} // namespace echolab::sweep
