#include "entangle/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "entangle/errors.hpp"

namespace entangle {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not an integer: '" + v + "'");
  }
}

double* coupling_field(ModelSpec& s, const std::string& name) {
  if (name == "jx") return &s.jx;
  if (name == "jy") return &s.jy;
  if (name == "delta") return &s.delta;
  if (name == "h") return &s.h;
  if (name == "gamma") return &s.gamma;
  if (name == "j") return &s.j;
  if (name == "jz") return &s.jz;
  if (name == "k") return &s.k;
  return nullptr;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(const char* f, double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string axis_label(const std::string& axis) {
  if (axis == "h") return "h/J_x";
  if (axis == "delta") return "Delta/J";
  if (axis == "k") return "K/J_z";
  return axis;
}

}  // namespace

// ---------------------------------------------------------------- config

double coupling_value(const ModelSpec& spec, const std::string& name) {
  ModelSpec s = spec;
  const double* f = coupling_field(s, name);
  if (!f) throw ConfigError("unknown coupling '" + name + "'");
  return *f;
}

void set_coupling(ModelSpec& spec, const std::string& name, double value) {
  double* f = coupling_field(spec, name);
  if (!f) throw ConfigError("unknown coupling '" + name + "'");
  *f = value;
}

void SweepConfig::validate() const {
  ModelSpec probe = spec;
  if (!coupling_field(probe, axis)) throw ConfigError("unknown sweep axis '" + axis + "'");
  if (!(step > 0.0)) throw ConfigError("sweep step must be positive");
  if (stop < start) throw ConfigError("sweep stop is below start");
  if (grid().empty()) throw ConfigError("sweep grid is empty");
  if (!run_imps && !run_ed) throw ConfigError("no methods selected");
  const int d = spec.local_dim();
  if (run_ed) {
    if (ed_sizes.empty()) throw ConfigError("ed selected without ed_sizes");
    for (int n : ed_sizes) {
      if (n < 2) throw ConfigError("ed_sizes must be at least 2");
      if (ipow(d, n) > kSparseHamiltonianCap) throw ConfigError("ed size " + std::to_string(n) + " exceeds the size cap");
    }
  }
  if (m_cap < 1) throw ConfigError("m_cap must be positive");
  for (const auto& p : patterns) SitePattern::parse(p);
  if (workers < 1) throw ConfigError("workers must be positive");
  try {
    itebd.validate();
    spec_at(start).validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<double> SweepConfig::grid() const {
  std::vector<double> g;
  if (step > 0.0 && stop >= start) {
    const long n = static_cast<long>(std::floor((stop - start) / step + 1e-3));
    for (long i = 0; i <= n; ++i) g.push_back(std::round((start + i * step) * 1e10) / 1e10);
  }
  g.insert(g.end(), extra_points.begin(), extra_points.end());
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }), g.end());
  return g;
}

ModelSpec SweepConfig::spec_at(double axis_value) const {
  ModelSpec s = spec;
  double* f = coupling_field(s, axis);
  if (!f) throw ConfigError("unknown sweep axis '" + axis + "'");
  *f = axis_value;
  return s.normalized();
}

GgmOptions SweepConfig::ggm_options(const ModelSpec& s) const {
  GgmOptions o;
  o.m_cap = m_cap;
  for (const auto& p : patterns) o.patterns.push_back(SitePattern::parse(p));
  o.symmetry = symmetry;
  o.group = onsite_symmetry_group(s);
  o.symmetry_tol = itebd.symmetry_tol;
  return o;
}

SweepConfig parse_sweep_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  SweepConfig c;
  const std::set<std::string> couplings{"jx", "jy", "delta", "h", "gamma", "j", "jz", "k"};
  const std::map<std::string, std::set<std::string>> sections{
      {"sweep", {"axis", "start", "stop", "step", "extra", "methods", "ed_sizes", "boundary", "workers"}},
      {"itebd", {"D", "tau_schedule", "energy_tol", "max_iters_per_tau", "seed", "noise", "check_every", "symmetry_tol"}},
      {"ggm", {"m_cap", "patterns", "symmetry"}},
      {"ed", {"degeneracy_tol"}},
      {"output", {"dir", "name"}},
  };
  bool have_model = false;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      const std::string v = node.data();
      if (key == "model") {
        try {
          c.spec.model = parse_model(v);
        } catch (const Error& e) {
          throw ConfigError(e.what());
        }
        have_model = true;
      } else if (couplings.count(key)) {
        *coupling_field(c.spec, key) = to_double(key, v);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
      continue;
    }
    auto sec = sections.find(key);
    if (sec == sections.end()) throw ConfigError("unknown section [" + key + "]");
    for (const auto& [k, leaf] : node)
      if (!sec->second.count(k)) throw ConfigError("unknown key '" + k + "' in [" + key + "]");
  }
  if (!have_model) throw ConfigError("missing 'model'");

  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return *v;
    return std::nullopt;
  };
  if (auto v = get("sweep.axis")) c.axis = *v;
  if (auto v = get("sweep.start")) c.start = to_double("start", *v);
  if (auto v = get("sweep.stop")) c.stop = to_double("stop", *v);
  if (auto v = get("sweep.step")) c.step = to_double("step", *v);
  if (auto v = get("sweep.extra"))
    for (const auto& x : split_list(*v)) c.extra_points.push_back(to_double("extra", x));
  if (auto v = get("sweep.methods")) {
    c.run_imps = c.run_ed = false;
    for (const auto& m : split_list(*v)) {
      if (m == "imps") c.run_imps = true;
      else if (m == "ed") c.run_ed = true;
      else throw ConfigError("unknown method '" + m + "'");
    }
  }
  if (auto v = get("sweep.ed_sizes"))
    for (const auto& x : split_list(*v)) c.ed_sizes.push_back(static_cast<int>(to_long("ed_sizes", x)));
  if (auto v = get("sweep.boundary")) {
    if (*v == "periodic") c.boundary = Boundary::Periodic;
    else if (*v == "open") c.boundary = Boundary::Open;
    else throw ConfigError("boundary must be periodic or open");
  }
  if (auto v = get("sweep.workers")) c.workers = static_cast<int>(to_long("workers", *v));

  if (auto v = get("itebd.D")) c.itebd.D = static_cast<int>(to_long("D", *v));
  if (auto v = get("itebd.tau_schedule")) {
    c.itebd.tau_schedule.clear();
    for (const auto& x : split_list(*v)) c.itebd.tau_schedule.push_back(to_double("tau_schedule", x));
  }
  if (auto v = get("itebd.energy_tol")) c.itebd.energy_tol = to_double("energy_tol", *v);
  if (auto v = get("itebd.max_iters_per_tau")) c.itebd.max_iters_per_tau = to_long("max_iters_per_tau", *v);
  if (auto v = get("itebd.seed")) c.itebd.seed = static_cast<std::uint64_t>(to_long("seed", *v));
  if (auto v = get("itebd.noise")) c.itebd.noise = to_double("noise", *v);
  if (auto v = get("itebd.check_every")) c.itebd.check_every = static_cast<int>(to_long("check_every", *v));
  if (auto v = get("itebd.symmetry_tol")) c.itebd.symmetry_tol = to_double("symmetry_tol", *v);

  if (auto v = get("ggm.m_cap")) c.m_cap = static_cast<int>(to_long("m_cap", *v));
  if (auto v = get("ggm.patterns")) c.patterns = split_list(*v);
  if (auto v = get("ggm.symmetry")) {
    if (*v == "unavailable") c.symmetry = SymmetryPolicy::Unavailable;
    else if (*v == "restore") c.symmetry = SymmetryPolicy::Restore;
    else throw ConfigError("symmetry must be unavailable or restore");
  }
  if (auto v = get("ed.degeneracy_tol")) c.degeneracy_tol = to_double("degeneracy_tol", *v);
  if (auto v = get("output.dir")) c.out_dir = *v;
  if (auto v = get("output.name")) c.name = *v;

  c.spec = c.spec.normalized();
  c.validate();
  return c;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_sweep_config(in);
}

bool in_degenerate_region(const ModelSpec& spec) {
  switch (spec.model) {
    case Model::TransverseIsing:
      return spec.jx != 0.0 && std::abs(spec.h / spec.jx) <= 0.8 + 1e-12;
    case Model::XYZ:
      return spec.j != 0.0 && spec.delta / spec.j >= -1.0 - 1e-12 && spec.delta / spec.j <= 1e-12;
    default:
      return false;
  }
}

// ---------------------------------------------------------------- iMPS cache

std::uint64_t imps_cache_key(const ModelSpec& spec, const ItebdConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "imps-v1|" << spec.key() << "|D=" << cfg.D << "|tau=";
  for (double t : cfg.tau_schedule) os << t << ';';
  os << "|tol=" << cfg.energy_tol << "|max=" << cfg.max_iters_per_tau << "|seed=" << cfg.seed
     << "|noise=" << cfg.noise << "|every=" << cfg.check_every << "|sym=" << cfg.symmetry_tol;
  return fnv1a(os.str());
}

namespace {

SolverStatus parse_status(const std::string& s) {
  if (s == "converged") return SolverStatus::Converged;
  if (s == "not_converged") return SolverStatus::NotConverged;
  if (s == "degenerate") return SolverStatus::Degenerate;
  throw FormatError("bad solver status '" + s + "'");
}

std::optional<GroundState> load_cached_imps(const fs::path& bin, const fs::path& meta, const fs::path& log) {
  std::error_code ec;
  if (!fs::exists(meta, ec) || !fs::exists(bin, ec) || !fs::exists(log, ec)) return std::nullopt;
  try {
    GroundState g;
    g.state = load_imps(bin.string());
    std::ifstream m(meta);
    std::string line;
    while (std::getline(m, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string k = line.substr(0, eq), v = line.substr(eq + 1);
      if (k == "status") g.log.status = parse_status(v);
      else if (k == "tau_final") g.log.tau_final = std::stod(v);
      else if (k == "sweeps") g.log.sweeps = std::stol(v);
      else if (k == "symmetry_broken") g.log.symmetry_broken = v == "1";
      else if (k == "symmetry_deviation") g.log.symmetry_deviation = std::stod(v);
      else if (k == "message") g.log.message = v;
    }
    std::ifstream l(log);
    std::getline(l, line);  // header
    while (std::getline(l, line)) {
      ConvergenceRecord r;
      if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%lf", &r.iter, &r.tau, &r.energy_per_site, &r.trunc_err,
                      &r.lambda_delta) != 5)
        return std::nullopt;
      g.log.records.push_back(r);
    }
    return g;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    os << text;
  }
  fs::rename(tmp, path);
}

}  // namespace

GroundState cached_find_ground_state(const ModelSpec& spec, const ItebdConfig& cfg, const std::string& dir) {
  if (dir.empty()) return find_ground_state(spec, cfg);
  const std::string stem = "imps-" + hex64(imps_cache_key(spec, cfg));
  const fs::path bin = fs::path(dir) / (stem + ".bin");
  const fs::path meta = fs::path(dir) / (stem + ".meta");
  const fs::path log = fs::path(dir) / (stem + ".log.csv");
  if (auto g = load_cached_imps(bin, meta, log)) return *g;

  GroundState g = find_ground_state(spec, cfg);
  try {
    fs::create_directories(dir);
    const fs::path tmp_bin = bin.string() + ".tmp";
    save_imps(g.state, tmp_bin.string());
    fs::rename(tmp_bin, bin);
    const fs::path tmp_log = log.string() + ".tmp";
    g.log.write_csv(tmp_log.string());
    fs::rename(tmp_log, log);
    std::ostringstream m;
    m.precision(17);
    m << "spec=" << spec.key() << "\nstatus=" << status_name(g.log.status) << "\ntau_final=" << g.log.tau_final
      << "\nsweeps=" << g.log.sweeps << "\nsymmetry_broken=" << (g.log.symmetry_broken ? 1 : 0)
      << "\nsymmetry_deviation=" << g.log.symmetry_deviation << "\nmessage=" << g.log.message << "\n";
    // written last: its presence marks a complete entry
    write_atomic(meta, m.str());
  } catch (const std::exception&) {
    // a cache that cannot be written is not an error
  }
  return g;
}

// ---------------------------------------------------------------- sweep

std::string sweep_csv_header() {
  return "axis_value,method,n_sites,ggm,argmax_source,lambda_max_sq,energy_per_site,status,D,tau_final";
}

std::string sweep_csv_row(const SweepRow& r) {
  const bool has_value = r.ggm.status == GgmStatus::Ok && std::isfinite(r.ggm.value);
  std::string s = fmt("%.10g", r.axis_value);
  s += "," + r.method;
  s += "," + (r.n_sites == 0 ? std::string("inf") : std::to_string(r.n_sites));
  s += "," + (has_value ? fmt("%.12g", r.ggm.value) : "");
  s += "," + (has_value ? r.ggm.argmax_label() : "");
  s += "," + (has_value ? fmt("%.12g", r.ggm.lambda_max_sq()) : "");
  s += "," + fmt("%.12g", r.energy_per_site);
  s += "," + r.status;
  s += "," + (r.D > 0 ? std::to_string(r.D) : "");
  s += "," + fmt("%.3g", r.tau_final);
  return s;
}

namespace {

void mark_unavailable(SweepRow& row, const std::string& why) {
  row.status = "unavailable";
  row.ggm.status = GgmStatus::Unavailable;
  row.ggm.value = std::numeric_limits<double>::quiet_NaN();
  row.ggm.reason = why;
  row.message = why;
}

}  // namespace

SweepRow run_imps_point(const SweepConfig& cfg, double axis_value, const std::string& cache_dir) {
  SweepRow row;
  row.axis_value = axis_value;
  row.method = "imps";
  row.n_sites = 0;
  row.D = cfg.itebd.D;
  try {
    const ModelSpec spec = cfg.spec_at(axis_value);
    if (in_degenerate_region(spec)) {
      mark_unavailable(row, "degenerate region");
      return row;
    }
    const GroundState gs = cached_find_ground_state(spec, cfg.itebd, cache_dir);
    row.tau_final = gs.log.tau_final;
    row.energy_per_site = gs.log.final_energy();
    if (gs.log.status == SolverStatus::Degenerate) {
      mark_unavailable(row, gs.log.message);
      return row;
    }
    row.ggm = ggm_infinite(gs.state, cfg.ggm_options(spec));
    if (row.ggm.status == GgmStatus::Unavailable) {
      mark_unavailable(row, row.ggm.reason);
    } else if (gs.log.status == SolverStatus::NotConverged) {
      row.status = "not_converged";
      row.message = gs.log.message;
    }
  } catch (const std::exception& e) {
    row.status = "error";
    row.message = e.what();
    row.ggm.value = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

SweepRow run_ed_point(const SweepConfig& cfg, double axis_value, int N, const std::string& cache_dir) {
  SweepRow row;
  row.axis_value = axis_value;
  row.method = "ed";
  row.n_sites = N;
  try {
    const ModelSpec spec = cfg.spec_at(axis_value);
    if (in_degenerate_region(spec)) {
      mark_unavailable(row, "degenerate region");
      return row;
    }
    const auto gs = cached_ground_state(spec, N, cfg.boundary, cfg.degeneracy_tol, cache_dir);
    row.energy_per_site = gs.energy / N;
    if (gs.degenerate) {
      mark_unavailable(row, "degenerate ground state, gap " + fmt("%.3g", gs.gap));
      return row;
    }
    row.ggm = ggm_finite(gs.psi, N, gs.d, N / 2, cfg.workers == 1);
  } catch (const std::exception& e) {
    row.status = "error";
    row.message = e.what();
    row.ggm.value = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

std::string plot_script(const SweepConfig& cfg, const std::string& csv_name) {
  std::ostringstream os;
  const std::string png = cfg.name + ".png";
  os << "# gnuplot " << cfg.name << ".gp\n"
     << "set datafile separator ','\n"
     << "set terminal pngcairo size 900,600\n"
     << "set output '" << png << "'\n"
     << "set xlabel '" << axis_label(cfg.axis) << "'\n"
     << "set ylabel 'GGM'\n"
     << "set key top right\n"
     << "set grid\n";
  std::vector<std::string> curves;
  if (cfg.run_imps)
    curves.push_back("'" + csv_name + "' every ::1 using 1:(strcol(2) eq 'imps' ? ($4) : 1/0) with linespoints lw 2 title 'iMPS, D=" +
                     std::to_string(cfg.itebd.D) + "'");
  if (cfg.run_ed)
    for (int n : cfg.ed_sizes)
      curves.push_back("'" + csv_name + "' every ::1 using 1:(strcol(2) eq 'ed' && strcol(3) eq '" + std::to_string(n) +
                       "' ? ($4) : 1/0) with linespoints title 'N=" + std::to_string(n) + "'");
  os << "plot ";
  for (std::size_t i = 0; i < curves.size(); ++i) os << (i ? ", \\\n     " : "") << curves[i];
  os << "\n";
  return os.str();
}

SweepOutput run_sweep(const SweepConfig& cfg, const std::string& cache_dir, std::ostream* log) {
  cfg.validate();
  const std::string cache = cache_dir.empty() ? cache_dir_from_env() : cache_dir;

  struct Job {
    double x;
    int n;  // 0: iMPS
  };
  std::vector<Job> jobs;
  for (double x : cfg.grid()) {
    if (cfg.run_imps) jobs.push_back({x, 0});
    if (cfg.run_ed)
      for (int n : cfg.ed_sizes) jobs.push_back({x, n});
  }

  SweepOutput out;
  out.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const auto t0 = std::chrono::steady_clock::now();
      SweepRow r = jobs[i].n == 0 ? run_imps_point(cfg, jobs[i].x, cache) : run_ed_point(cfg, jobs[i].x, jobs[i].n, cache);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::lock_guard lock(mu);
      ++done;
      if (log) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "[%zu/%zu] %s=%g %s%s: %s ggm=%s (%.1fs)", done, jobs.size(), cfg.axis.c_str(),
                      r.axis_value, r.method.c_str(), r.n_sites ? (" N=" + std::to_string(r.n_sites)).c_str() : "",
                      r.status.c_str(), r.ggm.status == GgmStatus::Ok ? fmt("%.6g", r.ggm.value).c_str() : "-", secs);
        *log << buf;
        if (!r.message.empty()) *log << " (" << r.message << ")";
        *log << std::endl;
      }
      out.rows[i] = std::move(r);
    }
  };
  const int nw = std::max(1, std::min<int>(cfg.workers, static_cast<int>(jobs.size())));
  if (nw == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  fs::create_directories(cfg.out_dir);
  const std::string csv_name = cfg.name + ".csv";
  out.csv_path = (fs::path(cfg.out_dir) / csv_name).string();
  out.plot_path = (fs::path(cfg.out_dir) / (cfg.name + ".gp")).string();
  std::ostringstream csv;
  csv << sweep_csv_header() << "\n";
  for (const auto& r : out.rows) csv << sweep_csv_row(r) << "\n";
  write_atomic(out.csv_path, csv.str());
  write_atomic(out.plot_path, plot_script(cfg, csv_name));
  return out;
}

int print_report(const std::vector<CheckResult>& checks, std::ostream& os) {
  int failed = 0;
  for (const auto& c : checks) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-4s %-52s measured=%-11.3g tol=%.3g", c.passed ? "ok" : "FAIL", c.name.c_str(),
                  c.measured, c.tolerance);
    os << buf;
    if (!c.note.empty()) os << "  " << c.note;
    os << "\n";
    if (!c.passed) ++failed;
  }
  os << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  return failed;
}

}  // namespace entangle
