#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "entangle/errors.hpp"
#include "entangle/imps.hpp"
#include "entangle/references.hpp"
#include "oracles.hpp"

using namespace entangle;
using oracle::max_abs;

namespace {

double state_distance(const Imps& a, const Imps& b) {
  double diff = 0.0;
  for (int t = 0; t < 2; ++t) {
    diff = std::max(diff, (a.lambda[t] - b.lambda[t]).cwiseAbs().maxCoeff());
    for (int i = 0; i < a.d; ++i) diff = std::max(diff, max_abs(a.gamma[t][i] - b.gamma[t][i]));
  }
  return diff;
}

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "entangle_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("noise-free init is a product state") {
  const Imps s = init_imps(2, 6, 3, 0.0);
  CHECK(s.D == 6);
  CHECK(s.lambda[0](0) == doctest::Approx(1.0));
  CHECK(s.lambda[0].tail(5).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.lambda[1].tail(5).cwiseAbs().maxCoeff() == 0.0);
  CHECK_NOTHROW(s.check());
}

TEST_CASE("init depends only on the seed") {
  const Imps a = init_imps(3, 5, 11, 1e-2), b = init_imps(3, 5, 11, 1e-2), c = init_imps(3, 5, 12, 1e-2);
  CHECK(state_distance(a, b) == 0.0);
  CHECK(state_distance(a, c) > 0.0);
  CHECK_THROWS_AS(init_imps(2, 0, 1, 0.0), InvalidArgument);
  CHECK_THROWS_AS(init_imps(2, 2, 1, -1.0), InvalidArgument);
}

TEST_CASE("transfer matrix is sum of A (x) conj A") {
  std::mt19937_64 rng(1);
  std::vector<CMatrix> a;
  for (int i = 0; i < 3; ++i) a.push_back(oracle::random_unitary(rng, 4) * 0.5);
  oracle::Mat want = oracle::Mat::Zero(16, 16);
  for (const auto& m : a) want += oracle::kron(m, m.conjugate());
  CHECK(max_abs(transfer_matrix(a).e - want) < 1e-14);
}

TEST_CASE("ghz transfer matrix is doubly degenerate") {
  CMatrix want = CMatrix::Zero(4, 4);
  want(0, 0) = want(3, 3) = 1.0;
  CHECK(max_abs(transfer_matrix(ghz_mps_tensors()).e - want) < 1e-14);
  CHECK_THROWS_AS(dominant_fixed_points(transfer_matrix(ghz_mps_tensors())), DegenerateTransfer);
}

TEST_CASE("aklt transfer matrix") {
  const auto a = aklt_mps_tensors();
  Eigen::ComplexEigenSolver<CMatrix> es(transfer_matrix(a).e);
  std::vector<double> w;
  for (auto z : es.eigenvalues()) w.push_back(z.real());
  std::sort(w.begin(), w.end());
  CHECK(w[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(w[3] == doctest::Approx(3.0).epsilon(1e-12));

  const auto fp = dominant_fixed_points(transfer_matrix(a));
  CHECK(fp.mu == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fp.gap == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
  const CMatrix l = fp.left(), r = fp.right();
  CHECK(max_abs(l - l(0, 0) * CMatrix::Identity(2, 2)) < 1e-10);
  CHECK(max_abs(r - r(0, 0) * CMatrix::Identity(2, 2)) < 1e-10);
  CHECK(std::abs((fp.l0.transpose() * fp.r0)(0) - 1.0) < 1e-12);
}

TEST_CASE("fixed points of a random channel are eigenvectors") {
  std::mt19937_64 rng(5);
  std::vector<CMatrix> a;
  std::normal_distribution<double> g;
  for (int i = 0; i < 2; ++i) {
    CMatrix m(3, 3);
    for (auto& x : m.reshaped()) x = cplx(g(rng), g(rng));
    a.push_back(m);
  }
  const auto tm = transfer_matrix(a);
  const CMatrix& e = tm.e;
  const auto fp = dominant_fixed_points(tm);
  CHECK((e * fp.r0 - fp.mu * fp.r0).norm() < 1e-9 * fp.r0.norm());
  CHECK((e.transpose() * fp.l0 - fp.mu * fp.l0).norm() < 1e-9 * fp.l0.norm());
  const auto spec = Eigen::ComplexEigenSolver<CMatrix>(e).eigenvalues();
  CHECK(fp.mu == doctest::Approx(spec.cwiseAbs().maxCoeff()).epsilon(1e-10));
  // the right fixed point of a CP map is PSD once its phase is fixed
  CMatrix r = fp.right();
  r /= r.trace() / std::abs(r.trace());
  CHECK(oracle::eigvals(r).minCoeff() > -1e-10);
}

TEST_CASE("canonicalize") {
  const Imps raw = init_imps(2, 4, 5, 0.3);
  const Imps a = canonicalize(raw);

  SUBCASE("schmidt values are normalized and sorted") {
    for (int t = 0; t < 2; ++t) {
      CHECK(a.lambda[t].squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
      for (int i = 1; i < a.D; ++i) CHECK(a.lambda[t](i) <= a.lambda[t](i - 1) + 1e-15);
    }
  }
  SUBCASE("orthonormality holds") { CHECK(orthonormality_error(a) < 1e-10); }
  SUBCASE("idempotent") { CHECK(state_distance(a, canonicalize(a)) < 1e-10); }
  SUBCASE("the physical state is unchanged") {
    for (int m = 1; m <= 2; ++m)
      CHECK(max_abs(oracle::imps_block_rdm_avg(raw, m) - oracle::imps_block_rdm_avg(a, m)) < 1e-10);
  }
  SUBCASE("half-cut spectrum is the schmidt vector") {
    const RVector l = half_cut_spectrum(a, Bond::AB);
    CHECK(l.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((l - a.lambda_on(Bond::AB).head(l.size())).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("aklt as a Vidal iMPS") {
  const Imps s = imps_from_uniform(aklt_mps_tensors());
  CHECK(s.d == 3);
  for (Bond b : {Bond::AB, Bond::BA}) {
    const RVector l = half_cut_spectrum(s, b);
    REQUIRE(l.size() >= 2);
    CHECK(l(0) * l(0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(l(1) * l(1) == doctest::Approx(0.5).epsilon(1e-8));
  }
  CHECK(orthonormality_error(s) < 1e-10);
}

TEST_CASE("site tensors reproduce the Vidal chain") {
  const Imps s = canonicalize(init_imps(2, 3, 8, 0.5));
  const auto t = site_tensors(s);
  REQUIRE(t.cell_size() == 2);
  // blocked A^{i j} = A_0^i A_1^j, unit spectral radius
  const auto blocked = t.blocked();
  REQUIRE(blocked.size() == 4);
  CHECK(max_abs(blocked[1] - t.cell[0][0] * t.cell[1][1]) < 1e-14);
  const auto ev = Eigen::ComplexEigenSolver<CMatrix>(transfer_matrix(t).e).eigenvalues();
  CHECK(ev.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("IMPS files round trip") {
  const Imps s = canonicalize(init_imps(3, 4, 2, 0.3));
  const auto path = temp_path("roundtrip.imps");
  save_imps(s, path.string());
  const Imps r = load_imps(path.string());
  CHECK(r.d == 3);
  CHECK(r.D == 4);
  CHECK(state_distance(s, r) == 0.0);

  std::ifstream is(path, std::ios::binary);
  char magic[8];
  is.read(magic, 8);
  CHECK(std::string(magic, 8) == "IMPS0001");
  // header + gammas (re, im) + lambdas
  CHECK(std::filesystem::file_size(path) == 8 + 4 + 4 + 2 * 3 * 16 * 16 + 2 * 4 * 8);
}

TEST_CASE("corrupt IMPS files are rejected") {
  const auto bad_magic = temp_path("bad_magic.imps");
  {
    std::ofstream os(bad_magic, std::ios::binary);
    os << "IMPS0002 and more bytes";
  }
  CHECK_THROWS_AS(load_imps(bad_magic.string()), FormatError);

  const Imps s = canonicalize(init_imps(2, 3, 2, 0.3));
  const auto truncated = temp_path("truncated.imps");
  save_imps(s, truncated.string());
  std::filesystem::resize_file(truncated, 40);
  CHECK_THROWS_AS(load_imps(truncated.string()), FormatError);
  CHECK_THROWS_AS(load_imps(temp_path("missing.imps").string()), FormatError);
}
