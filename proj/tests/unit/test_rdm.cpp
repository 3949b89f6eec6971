#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "entangle/errors.hpp"
#include "entangle/imps.hpp"
#include "entangle/rdm.hpp"
#include "entangle/references.hpp"
#include "entangle/spin.hpp"
#include "oracles.hpp"

using namespace entangle;
using oracle::max_abs;

namespace {

void require_state(const CMatrix& rho) {
  const auto c = check_rdm(rho);
  CHECK(c.hermiticity < 1e-10);
  CHECK(c.trace_error < 1e-10);
  CHECK(c.min_eigenvalue > -1e-9);
}

}  // namespace

TEST_CASE("site patterns") {
  const auto p = SitePattern::parse("0-2-5");
  CHECK(p.m() == 3);
  CHECK(p.span() == 6);
  CHECK_FALSE(p.consecutive());
  CHECK(p.label() == "0-2-5");
  CHECK(SitePattern::block(3).consecutive());
  CHECK(SitePattern::block(3).label() == "0-1-2");
  CHECK_THROWS_AS(SitePattern::parse("1-2"), InvalidArgument);
  CHECK_THROWS_AS(SitePattern::parse("0-3-3"), InvalidArgument);
  CHECK_THROWS_AS(SitePattern::parse("0-x"), InvalidArgument);
  CHECK_THROWS_AS(SitePattern({0, 20}), PatternTooLarge);
  CHECK_NOTHROW(SitePattern({0, 20}, 24));
}

TEST_CASE("aklt reduced density matrices") {
  const Imps s = imps_from_uniform(aklt_mps_tensors());
  SUBCASE("single site is maximally mixed") {
    CHECK(max_abs(single_site_rdm(s).rho - CMatrix::Identity(3, 3) / 3.0) < 1e-8);
  }
  SUBCASE("two sites agree with a long ring") {
    CHECK(max_abs(consecutive_block_rdm(s, 2).rho - oracle::imps_block_rdm_avg(s, 2)) < 1e-8);
  }
  SUBCASE("far-apart sites factorize") {
    const CMatrix r1 = single_site_rdm(s).rho;
    CHECK(max_abs(pattern_rdm(s, SitePattern({0, 20}, 24)).rho - oracle::kron(r1, r1)) < 1e-6);
  }
  SUBCASE("two-site correlation <Sz Sz> = -4/9 at distance 1") {
    // the AKLT tensors are ordered m = 0, +1, -1
    CMatrix sz = CMatrix::Zero(3, 3);
    sz(1, 1) = 1.0;
    sz(2, 2) = -1.0;
    const CMatrix rho = consecutive_block_rdm(s, 2).rho;
    CHECK((rho * oracle::kron(sz, sz)).trace().real() == doctest::Approx(-4.0 / 9.0).epsilon(1e-8));
  }
}

TEST_CASE("product state rdms") {
  const Imps s = canonicalize(init_imps(2, 3, 1, 0.0));
  const CMatrix plus = CMatrix::Constant(2, 2, 0.5);
  CHECK(max_abs(single_site_rdm(s).rho - plus) < 1e-12);
  CHECK(max_abs(pattern_rdm(s, SitePattern({0, 5})).rho - oracle::kron(plus, plus)) < 1e-12);
}

TEST_CASE("random iMPS rdms match the ring oracle") {
  for (std::uint64_t seed : {3u, 9u}) {
    const Imps s = canonicalize(init_imps(2, 4, seed, 0.5));
    const auto env = make_environment(s);
    for (int m = 1; m <= 3; ++m) {
      const auto r = consecutive_block_rdm(env, m);
      CHECK(r.pattern.m() == m);
      CHECK(max_abs(r.rho - oracle::imps_block_rdm_avg(s, m)) < 1e-9);
      CHECK(max_abs(rooted_block_rdm(env, 0, m) - oracle::imps_block_rdm(s, 0, m)) < 1e-9);
      CHECK(max_abs(rooted_block_rdm(env, 1, m) - oracle::imps_block_rdm(s, 1, m)) < 1e-9);
    }
  }
}

TEST_CASE("patterns with gaps are partial traces of blocks") {
  const Imps s = canonicalize(init_imps(2, 4, 21, 0.5));
  const auto env = make_environment(s);
  // 0-2-5 from the 6-site block by tracing sites 4, 3 and 1 (highest first)
  CMatrix big = consecutive_block_rdm(env, 6).rho;
  big = trace_out_site(big, 2, 6, 4);
  big = trace_out_site(big, 2, 5, 3);
  big = trace_out_site(big, 2, 4, 1);
  CHECK(max_abs(pattern_rdm(env, SitePattern::parse("0-2-5")).rho - big) < 1e-10);
}

TEST_CASE("every rdm is a state") {
  const Imps s = canonicalize(init_imps(3, 5, 4, 0.4));
  const auto env = make_environment(s);
  for (int m = 1; m <= 3; ++m) require_state(consecutive_block_rdm(env, m).rho);
  for (const char* p : {"0-2", "0-3", "0-1-3", "0-2-4"}) require_state(pattern_rdm(env, SitePattern::parse(p)).rho);
}

TEST_CASE("block rdms are compatible under edge traces") {
  const Imps s = canonicalize(init_imps(3, 4, 2, 0.4));
  const auto env = make_environment(s);
  for (int m = 2; m <= 4; ++m) {
    const CMatrix big = consecutive_block_rdm(env, m).rho, small = consecutive_block_rdm(env, m - 1).rho;
    CHECK(max_abs(trace_out_site(big, 3, m, 0) - small) < 1e-8);
    CHECK(max_abs(trace_out_site(big, 3, m, m - 1) - small) < 1e-8);
  }
}

TEST_CASE("trace_out_site matches a brute-force partial trace") {
  std::mt19937_64 rng(12);
  const auto psi = oracle::random_state(rng, 27);
  const CMatrix full = psi * psi.adjoint();
  CHECK(max_abs(trace_out_site(full, 3, 3, 1) - oracle::rdm(psi, {0, 2}, 3, 3)) < 1e-13);
  CHECK(max_abs(trace_out_site(full, 3, 3, 0) - oracle::rdm(psi, {1, 2}, 3, 3)) < 1e-13);
  CHECK_THROWS_AS(trace_out_site(full, 3, 3, 3), ShapeError);
}

TEST_CASE("symmetrize averages over the group") {
  const auto s = build_spin_operators(2);
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 0) = 0.8;
  rho(1, 1) = 0.2;
  rho(0, 1) = rho(1, 0) = 0.3;
  const CMatrix out = symmetrize(rho, 2, 1, {CMatrix::Identity(2, 2), s.sz});
  CHECK(out(0, 1) == cplx(0.0));
  CHECK(out(0, 0).real() == doctest::Approx(0.8));

  const CMatrix two = oracle::kron(rho, rho);
  const CMatrix sym = symmetrize(two, 2, 2, {CMatrix::Identity(2, 2), s.sx});
  const CMatrix xx = oracle::kron(s.sx, s.sx);
  CHECK(max_abs(sym - 0.5 * (two + xx * two * xx)) < 1e-14);
}

TEST_CASE("rdm csv layout") {
  const Imps s = canonicalize(init_imps(2, 3, 7, 0.4));
  const auto r = pattern_rdm(s, SitePattern::parse("0-2-5"));
  const auto dir = std::filesystem::temp_directory_path() / "entangle_tests" / "rdm";
  const std::string path = write_rdm_csv(r, dir.string());
  CHECK(std::filesystem::path(path).filename() == "rdm_p0-2-5.csv");
  std::ifstream is(path);
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    REQUIRE(v.size() == 16);
    for (int j = 0; j < 8; ++j) {
      CHECK(v[2 * j] == r.rho(rows, j).real());
      CHECK(v[2 * j + 1] == r.rho(rows, j).imag());
    }
    ++rows;
  }
  CHECK(rows == 8);
}
