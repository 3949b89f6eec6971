#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "entangle/errors.hpp"
#include "entangle/harness.hpp"

using namespace entangle;
namespace fs = std::filesystem;

namespace {

SweepConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_sweep_config(in);
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "entangle_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream is(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

const char* kSmallIsing = R"(model = ising
jx = 1
h = 1.5
[sweep]
axis = h
start = 1.5
stop = 2.0
step = 0.5
methods = imps, ed
ed_sizes = 6
[itebd]
D = 4
tau_schedule = 1e-1 1e-2 1e-3
[output]
name = small
)";

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse(R"(model = xyz
j = 1
gamma = 0.5
delta = 0.2
[sweep]
axis = delta
start = 0.2
stop = 1.0
step = 0.1
extra = 0.25, 0.2
methods = imps ed
ed_sizes = 8 12
boundary = open
workers = 3
[itebd]
D = 12
tau_schedule = 1e-2, 1e-3
seed = 7
[ggm]
m_cap = 3
patterns = 0-2 0-2-5
symmetry = restore
[ed]
degeneracy_tol = 1e-6
[output]
dir = somewhere
name = xyz
)");
  CHECK(c.spec.model == Model::XYZ);
  CHECK(c.spec.jx == doctest::Approx(1.5));
  CHECK(c.spec.jy == doctest::Approx(0.5));
  CHECK(c.axis == "delta");
  CHECK(c.run_imps);
  CHECK(c.run_ed);
  CHECK(c.ed_sizes == std::vector<int>{8, 12});
  CHECK(c.boundary == Boundary::Open);
  CHECK(c.workers == 3);
  CHECK(c.itebd.D == 12);
  CHECK(c.itebd.tau_schedule == std::vector<double>{1e-2, 1e-3});
  CHECK(c.itebd.seed == 7);
  CHECK(c.m_cap == 3);
  CHECK(c.patterns == std::vector<std::string>{"0-2", "0-2-5"});
  CHECK(c.symmetry == SymmetryPolicy::Restore);
  CHECK(c.degeneracy_tol.value() == 1e-6);
  CHECK(c.out_dir == "somewhere");
  CHECK(c.name == "xyz");

  const auto g = c.grid();
  REQUIRE(g.size() == 10);
  CHECK(g[0] == 0.2);
  CHECK(g[1] == 0.25);
  CHECK(g[2] == 0.3);
  CHECK(g.back() == 1.0);

  const auto s = c.spec_at(0.7);
  CHECK(s.delta == 0.7);
  CHECK(s.jx == doctest::Approx(1.5));
  CHECK(c.ggm_options(s).group.size() == 4);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("model = ising\nhx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("jx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("model = ising\n[sweep]\nspeed = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("model = ising\n[plotting]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("model = ising\n[sweep]\nstart = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse("model = ising\n[sweep]\nstart = 2\nstop = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("model = ising\n[sweep]\nmethods = ed\n"), ConfigError);
  CHECK_THROWS_AS(parse("model = ising\n[sweep]\nmethods = ed\ned_sizes = 20\n"), ConfigError);
  CHECK_THROWS_AS(parse("model = ising\n[itebd]\ntau_schedule = 1e-3 1e-2\n"), ConfigError);
  CHECK_THROWS_AS(parse("model = ising\n[ggm]\nsymmetry = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse("model = ising\n[sweep]\naxis = temperature\n"), ConfigError);
  CHECK_THROWS_AS(load_sweep_config("/nonexistent/file.ini"), ConfigError);
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"fig1_ising.ini", "fig2_xyz.ini", "fig2_xxz.ini", "fig3_spin1.ini"}) {
    CAPTURE(name);
    const auto c = load_sweep_config(std::string(ENTANGLE_CONFIG_DIR) + "/" + name);
    CHECK(c.grid().size() >= 9);
  }
  const auto f3 = load_sweep_config(std::string(ENTANGLE_CONFIG_DIR) + "/fig3_spin1.ini");
  CHECK(f3.grid().size() == 33);
}

TEST_CASE("couplings by name") {
  ModelSpec s = ModelSpec::transverse_ising(1, 1);
  set_coupling(s, "h", 1.7);
  CHECK(coupling_value(s, "h") == 1.7);
  CHECK_THROWS_AS(set_coupling(s, "q", 1), ConfigError);
  CHECK_THROWS_AS(coupling_value(s, "q"), ConfigError);
}

TEST_CASE("degenerate regions") {
  CHECK(in_degenerate_region(ModelSpec::transverse_ising(1, 0.5)));
  CHECK(in_degenerate_region(ModelSpec::transverse_ising(1, 0.8)));
  CHECK_FALSE(in_degenerate_region(ModelSpec::transverse_ising(1, 1.1)));
  CHECK(in_degenerate_region(ModelSpec::xyz(1, 0.5, -0.5)));
  CHECK_FALSE(in_degenerate_region(ModelSpec::xyz(1, 0.5, 0.2)));
  CHECK_FALSE(in_degenerate_region(ModelSpec::spin1_sia(1, 2)));
}

TEST_CASE("sweep csv rows") {
  CHECK(sweep_csv_header() == "axis_value,method,n_sites,ggm,argmax_source,lambda_max_sq,energy_per_site,status,D,tau_final");
  SweepRow r;
  r.axis_value = 1.5;
  r.method = "ed";
  r.n_sites = 12;
  r.status = "unavailable";
  r.ggm.status = GgmStatus::Unavailable;
  const auto f = fields(sweep_csv_row(r));
  REQUIRE(f.size() == 10);
  CHECK(f[0] == "1.5");
  CHECK(f[1] == "ed");
  CHECK(f[2] == "12");
  CHECK(f[3] == "");
  CHECK(f[7] == "unavailable");
}

TEST_CASE("points in degenerate regions are reported, not computed") {
  auto c = parse(kSmallIsing);
  const auto row = run_imps_point(c, 0.5, "");
  CHECK(row.status == "unavailable");
  CHECK(row.method == "imps");
  c.ed_sizes = {8};
  const auto ed = run_ed_point(c, 0.2, 8, "");
  CHECK(ed.status == "unavailable");
  CHECK(ed.n_sites == 8);
}

TEST_CASE("a small sweep end to end, with caching") {
  auto c = parse(kSmallIsing);
  const auto out = scratch("sweep_out");
  const auto cache = scratch("sweep_cache");
  c.out_dir = out.string();
  const auto first = run_sweep(c, cache.string());
  REQUIRE(first.rows.size() == 4);
  CHECK(fs::path(first.csv_path) == out / "small.csv");
  CHECK(fs::path(first.plot_path) == out / "small.gp");

  const auto lines = lines_of(first.csv_path);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == sweep_csv_header());
  const auto imps = fields(lines[1]), ed = fields(lines[2]);
  CHECK(imps[0] == "1.5");
  CHECK(imps[1] == "imps");
  CHECK(imps[2] == "inf");
  CHECK(imps[4] == "block(1)");
  CHECK(imps[7] == "ok");
  CHECK(imps[8] == "4");
  CHECK(ed[1] == "ed");
  CHECK(ed[2] == "6");
  CHECK(ed[7] == "ok");
  CHECK(std::stod(imps[3]) == doctest::Approx(1.0 - std::stod(imps[5])).epsilon(1e-10));
  // the infinite chain and a 6-site ring agree roughly at h = 1.5
  CHECK(std::abs(std::stod(imps[3]) - std::stod(ed[3])) < 1e-2);

  const auto plot = lines_of(first.plot_path);
  bool has_plot = false, has_png = false;
  for (const auto& l : plot) {
    has_plot |= l.rfind("plot", 0) == 0;
    has_png |= l.find("small.png") != std::string::npos;
  }
  CHECK(has_plot);
  CHECK(has_png);

  int bins = 0, metas = 0;
  for (const auto& e : fs::directory_iterator(cache)) {
    const auto n = e.path().filename().string();
    bins += n.rfind("imps-", 0) == 0 && e.path().extension() == ".bin";
    metas += e.path().extension() == ".meta";
  }
  CHECK(bins == 2);
  CHECK(metas == 2);

  const auto second = run_sweep(c, cache.string());
  CHECK(lines_of(second.csv_path) == lines);
}

TEST_CASE("cached ground states reload exactly") {
  const auto dir = scratch("imps_cache");
  ItebdConfig cfg;
  cfg.D = 4;
  cfg.tau_schedule = {1e-1, 1e-2};
  const auto spec = ModelSpec::transverse_ising(1, 1.8);
  const auto a = cached_find_ground_state(spec, cfg, dir.string());
  const auto b = cached_find_ground_state(spec, cfg, dir.string());
  CHECK(a.log.final_energy() == b.log.final_energy());
  CHECK(a.log.sweeps == b.log.sweeps);
  CHECK(a.log.status == b.log.status);
  CHECK(a.log.records.size() == b.log.records.size());
  CHECK((a.state.lambda[0] - b.state.lambda[0]).norm() == 0.0);
  ItebdConfig other = cfg;
  other.D = 5;
  CHECK(imps_cache_key(spec, cfg) != imps_cache_key(spec, other));
}

TEST_CASE("reference validation suite passes") {
  const auto checks = validate_references();
  CHECK(checks.size() > 30);
  std::ostringstream os;
  CHECK(print_report(checks, os) == 0);
  for (const auto& c : checks) {
    CAPTURE(c.name);
    CHECK(c.passed);
  }
}
