#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "entangle/exact_diag.hpp"
#include "entangle/ggm.hpp"
#include "entangle/itebd.hpp"
#include "entangle/spin.hpp"

namespace entangle {

// INI file with flat keys. Model couplings sit at the top level under their
// ModelSpec names; everything else lives in [sweep], [itebd], [ggm], [ed]
// and [output]. See configs/ for complete examples.
struct SweepConfig {
  ModelSpec spec;
  std::string axis = "h";  // any ModelSpec coupling key
  double start = 0.0, stop = 0.0, step = 0.1;
  std::vector<double> extra_points;  // merged into the grid, e.g. refinement
  bool run_imps = true;
  bool run_ed = false;
  std::vector<int> ed_sizes;
  Boundary boundary = Boundary::Periodic;
  std::optional<double> degeneracy_tol;
  ItebdConfig itebd;
  int m_cap = 4;
  std::vector<std::string> patterns;
  SymmetryPolicy symmetry = SymmetryPolicy::Unavailable;
  int workers = 1;
  std::string out_dir = ".";
  std::string name = "sweep";

  void validate() const;
  // start, start+step, ... up to stop (inclusive within step/1000), plus the
  // extra points, sorted, duplicates removed
  std::vector<double> grid() const;
  ModelSpec spec_at(double axis_value) const;
  // m_cap, patterns, symmetry policy and the model's on-site group
  GgmOptions ggm_options(const ModelSpec& spec) const;
};

// Coupling fields by their config names (jx, jy, delta, h, gamma, j, jz, k).
// Unknown names throw ConfigError.
double coupling_value(const ModelSpec& spec, const std::string& name);
void set_coupling(ModelSpec& spec, const std::string& name, double value);

SweepConfig parse_sweep_config(std::istream& in);
SweepConfig load_sweep_config(const std::string& path);

// Parameter windows where the ground state is degenerate in the thermodynamic
// limit: transverse Ising with |h/jx| <= 0.8, XYZ with -1 <= delta <= 0.
bool in_degenerate_region(const ModelSpec& spec);

struct SweepRow {
  double axis_value = 0.0;
  std::string method;  // "imps" or "ed"
  int n_sites = 0;     // 0 stands for the infinite chain
  GgmResult ggm;
  double energy_per_site = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";  // ok, unavailable, not_converged, error
  int D = 0;
  double tau_final = std::numeric_limits<double>::quiet_NaN();
  std::string message;
};

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& r);

// One grid point, one method. Never throws; failures end up in status.
SweepRow run_imps_point(const SweepConfig& cfg, double axis_value, const std::string& cache_dir);
SweepRow run_ed_point(const SweepConfig& cfg, double axis_value, int N, const std::string& cache_dir);

struct SweepOutput {
  std::vector<SweepRow> rows;  // ordered by axis value, imps first, then ed by N
  std::string csv_path;
  std::string plot_path;
};

// cache_dir empty: $ENTANGLE_CACHE_DIR, if set. Progress goes to `log`.
SweepOutput run_sweep(const SweepConfig& cfg, const std::string& cache_dir = "", std::ostream* log = nullptr);

// gnuplot script drawing GGM against the axis, one curve per method/size
std::string plot_script(const SweepConfig& cfg, const std::string& csv_name);

// iTEBD result with an optional on-disk cache keyed by spec and solver
// settings: <dir>/imps-<hash>.bin plus a small text sidecar.
GroundState cached_find_ground_state(const ModelSpec& spec, const ItebdConfig& cfg, const std::string& dir);
std::uint64_t imps_cache_key(const ModelSpec& spec, const ItebdConfig& cfg);

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string note;
};

std::vector<CheckResult> validate_references();
// one line per check, then a summary line; returns the number of failures
int print_report(const std::vector<CheckResult>& checks, std::ostream& os);

}  // namespace entangle
