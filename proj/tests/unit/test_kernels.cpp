#include <doctest.h>

#include "entangle/ggm.hpp"
#include "entangle/kernels.hpp"
#include "oracles.hpp"

using namespace entangle;
using oracle::max_abs;

TEST_CASE("bond lists") {
  CHECK(kernels::bonds(4, Boundary::Periodic).size() == 4);
  CHECK(kernels::bonds(4, Boundary::Open).size() == 3);
  CHECK(kernels::bonds(4, Boundary::Periodic).back() == std::pair<int, int>{3, 0});
}

TEST_CASE("serial and openmp assembly are identical") {
  for (const auto& spec : {ModelSpec::xyz(1, 0.5, 0.4), ModelSpec::spin1_sia(1, 2), ModelSpec::transverse_ising(1, 1.1)}) {
    for (auto bc : {Boundary::Periodic, Boundary::Open}) {
      const int N = spec.local_dim() == 3 ? 5 : 9;
      const auto terms = model_terms(spec);
      const CMatrix a = CMatrix(kernels::assemble_serial(terms, N, bc));
      const CMatrix b = CMatrix(kernels::assemble_omp(terms, N, bc));
      CHECK(max_abs(a - b) == 0.0);
    }
  }
}

TEST_CASE("serial and openmp partial traces are identical and correct") {
  std::mt19937_64 rng(2);
  const auto psi = oracle::random_state(rng, 1 << 7);
  for (const std::vector<int>& keep : {std::vector<int>{3}, {0, 6}, {4, 1, 2}}) {
    const CMatrix a = kernels::partial_trace_serial(psi, 7, 2, keep);
    CHECK(max_abs(a - kernels::partial_trace_omp(psi, 7, 2, keep)) == 0.0);
    CHECK(max_abs(a - oracle::rdm(psi, keep, 7, 2)) < 1e-13);
  }
}

TEST_CASE("serial and openmp subset scans are identical and correct") {
  std::mt19937_64 rng(5);
  const auto psi = oracle::random_state(rng, 1 << 8);
  const auto subsets = enumerate_subsets(8, 4);
  const auto a = kernels::subset_scan_serial(psi, 8, 2, subsets);
  const auto b = kernels::subset_scan_omp(psi, 8, 2, subsets);
  REQUIRE(a.size() == subsets.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(a[i] == doctest::Approx(oracle::schmidt_top_sq(psi, 8, 2, subsets[i])).epsilon(1e-12));
  }
}

TEST_CASE("bipartite matrix reshape") {
  std::mt19937_64 rng(9);
  const auto psi = oracle::random_state(rng, 27);
  const CMatrix m = kernels::bipartite_matrix(psi, 3, 3, {2});
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 9);
  // psi[i0 i1 i2] -> m(i2, i0 i1)
  for (int x = 0; x < 27; ++x) CHECK(m(x % 3, x / 3) == psi(x));
}
