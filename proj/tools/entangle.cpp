// entangle: iTEBD ground states, GGM, exact diagonalization and sweeps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "entangle/errors.hpp"
#include "entangle/exact_diag.hpp"
#include "entangle/ggm.hpp"
#include "entangle/harness.hpp"
#include "entangle/imps.hpp"
#include "entangle/itebd.hpp"
#include "entangle/rdm.hpp"

namespace fs = std::filesystem;
using namespace entangle;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::vector<std::string> sets;
};

SweepConfig load(const Common& c) {
  if (c.config.empty()) throw ConfigError("--config is required");
  SweepConfig cfg = load_sweep_config(c.config);
  if (c.seed) cfg.itebd.seed = *c.seed;
  if (c.workers) cfg.workers = *c.workers;
  if (!c.out.empty()) cfg.out_dir = c.out;
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_coupling(cfg.spec, kv.substr(0, eq), std::stod(kv.substr(eq + 1)));
  }
  cfg.spec = cfg.spec.normalized();
  cfg.validate();
  return cfg;
}

std::string out_dir(const Common& c, const SweepConfig* cfg) {
  std::string dir = !c.out.empty() ? c.out : cfg ? cfg->out_dir : ".";
  fs::create_directories(dir);
  return dir;
}

double axis_value(const SweepConfig& cfg) { return coupling_value(cfg.spec, cfg.axis); }

void print_ggm(const GgmResult& r) {
  if (r.status == GgmStatus::Unavailable) {
    std::printf("ggm: unavailable (%s)\n", r.reason.c_str());
    return;
  }
  std::printf("ggm: %.12g  argmax %s  lambda_max^2 %.12g\n", r.value, r.argmax_label().c_str(), r.lambda_max_sq());
}

void write_ggm_csv(const std::string& path, double param, const GgmResult& r) {
  std::ofstream os(path);
  os << ggm_csv_header() << "\n" << ggm_csv_row(param, r) << "\n";
}

int cmd_ground_state(const Common& c) {
  const SweepConfig cfg = load(c);
  const std::string dir = out_dir(c, &cfg);
  const auto gs = cached_find_ground_state(cfg.spec, cfg.itebd, cache_dir_from_env());
  save_imps(gs.state, (fs::path(dir) / "ground_state.imps").string());
  gs.log.write_csv((fs::path(dir) / "convergence.csv").string());
  std::printf("model %s\nstatus %s after %ld sweeps, tau %.3g\nenergy per site %.12g\nsymmetry deviation %.3g%s\n",
              cfg.spec.key().c_str(), status_name(gs.log.status).c_str(), gs.log.sweeps, gs.log.tau_final,
              gs.log.final_energy(), gs.log.symmetry_deviation, gs.log.symmetry_broken ? " (broken)" : "");
  if (!gs.log.message.empty()) std::printf("%s\n", gs.log.message.c_str());
  return gs.log.status == SolverStatus::Converged ? 0 : 1;
}

int cmd_ggm(const Common& c, const std::string& state_path, bool dump_rdms) {
  const SweepConfig cfg = load(c);
  const std::string dir = out_dir(c, &cfg);
  Imps state;
  if (!state_path.empty()) {
    state = load_imps(state_path);
  } else {
    const auto gs = cached_find_ground_state(cfg.spec, cfg.itebd, cache_dir_from_env());
    std::printf("ground state: %s, energy per site %.12g\n", status_name(gs.log.status).c_str(), gs.log.final_energy());
    state = gs.state;
  }
  const auto opt = cfg.ggm_options(cfg.spec);
  const auto r = ggm_infinite(state, opt);
  print_ggm(r);
  for (const auto& cand : r.candidates) std::printf("  %-16s %.12g\n", cand.label().c_str(), cand.lambda_max_sq);
  write_ggm_csv((fs::path(dir) / "ggm.csv").string(), axis_value(cfg), r);
  if (dump_rdms) {
    const auto env = make_environment(state);
    RdmOptions ro;
    if (cfg.symmetry == SymmetryPolicy::Restore) ro.group = opt.group;
    for (int m = 1; m <= cfg.m_cap; ++m) write_rdm_csv(consecutive_block_rdm(env, m, ro), dir);
    for (const auto& p : opt.patterns) write_rdm_csv(pattern_rdm(env, p, ro), dir);
  }
  return r.status == GgmStatus::Ok ? 0 : 1;
}

int cmd_ed(const Common& c, int sites, const std::string& boundary) {
  const SweepConfig cfg = load(c);
  const std::string dir = out_dir(c, &cfg);
  int n = sites > 0 ? sites : (cfg.ed_sizes.empty() ? 12 : cfg.ed_sizes.back());
  Boundary bc = cfg.boundary;
  if (boundary == "open") bc = Boundary::Open;
  else if (boundary == "periodic") bc = Boundary::Periodic;
  const auto gs = cached_ground_state(cfg.spec, n, bc, cfg.degeneracy_tol);
  std::printf("N %d (%s)\nenergy %.12g, per site %.12g\ngap %.6g%s\n", n, bc == Boundary::Periodic ? "periodic" : "open",
              gs.energy, gs.energy / n, gs.gap, gs.degenerate ? " (degenerate)" : "");
  GgmResult r;
  if (gs.degenerate) {
    r.status = GgmStatus::Unavailable;
    r.reason = "degenerate ground state";
  } else {
    r = ggm_finite(gs.psi, n, gs.d, n / 2, cfg.workers == 1);
  }
  print_ggm(r);
  write_ggm_csv((fs::path(dir) / ("ggm_ed" + std::to_string(n) + ".csv")).string(), axis_value(cfg), r);
  return r.status == GgmStatus::Ok ? 0 : 1;
}

int cmd_sweep(const Common& c) {
  const SweepConfig cfg = load(c);
  const auto out = run_sweep(cfg, "", &std::cerr);
  int bad = 0;
  for (const auto& r : out.rows) bad += r.status == "error";
  std::printf("wrote %s (%zu rows) and %s\n", out.csv_path.c_str(), out.rows.size(), out.plot_path.c_str());
  return bad ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Genuine multipartite entanglement of infinite spin chains"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) {
      sub->add_option("--config", common.config, "INI file (see configs/)")->check(CLI::ExistingFile);
      sub->add_option("--set", common.sets, "override a model coupling, e.g. --set h=1.5");
      sub->add_option("--seed", common.seed, "iTEBD noise seed");
      sub->add_option("--workers", common.workers, "parallel sweep points");
    }
    sub->add_option("--out", common.out, "output directory");
  };

  auto* gs = app.add_subcommand("ground-state", "iTEBD ground state; writes the iMPS and its convergence log");
  add_common(gs, true);

  std::string state_path;
  bool dump_rdms = false;
  auto* gg = app.add_subcommand("ggm", "GGM of one point, or of a saved iMPS");
  add_common(gg, true);
  gg->add_option("--state", state_path, "IMPS file written by ground-state")->check(CLI::ExistingFile);
  gg->add_flag("--rdms", dump_rdms, "also write the block and pattern RDMs");

  int sites = 0;
  std::string boundary;
  auto* ed = app.add_subcommand("ed", "exact diagonalization of a finite chain");
  add_common(ed, true);
  ed->add_option("--sites", sites, "chain length (default: last ed_sizes entry, else 12)");
  ed->add_option("--boundary", boundary, "periodic or open")->check(CLI::IsMember({"periodic", "open"}));

  auto* sw = app.add_subcommand("sweep", "parameter sweep; writes CSV and a gnuplot script");
  add_common(sw, true);

  auto* va = app.add_subcommand("validate", "reference checks");
  add_common(va, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gs) return cmd_ground_state(common);
    if (*gg) return cmd_ggm(common, state_path, dump_rdms);
    if (*ed) return cmd_ed(common, sites, boundary);
    if (*sw) return cmd_sweep(common);
    if (*va) {
      const auto checks = validate_references();
      return print_report(checks, std::cout) ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
