#include <doctest.h>

#include "entangle/errors.hpp"
#include "entangle/spin.hpp"
#include "oracles.hpp"

using namespace entangle;
using oracle::max_abs;

TEST_CASE("pauli matrices match the textbook ones") {
  const auto s = build_spin_operators(2);
  CHECK(max_abs(s.sx - oracle::pauli('x')) == 0.0);
  CHECK(max_abs(s.sy - oracle::pauli('y')) == 0.0);
  CHECK(max_abs(s.sz - oracle::pauli('z')) == 0.0);
  CHECK(max_abs(s.sx * s.sy - s.sy * s.sx - 2.0 * kI * s.sz) < 1e-14);
  CHECK(max_abs(s.sx * s.sx - CMatrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("spin-1 matrices satisfy the su(2) algebra") {
  const auto s = build_spin_operators(3);
  CHECK(max_abs(s.sx - oracle::spin1('x')) < 1e-15);
  CHECK(max_abs(s.sy - oracle::spin1('y')) < 1e-15);
  CHECK(max_abs(s.sz - oracle::spin1('z')) < 1e-15);
  CHECK(max_abs(s.sx * s.sy - s.sy * s.sx - kI * s.sz) < 1e-14);
  CHECK(max_abs(s.sy * s.sz - s.sz * s.sy - kI * s.sx) < 1e-14);
  CHECK(max_abs(s.sx * s.sx + s.sy * s.sy + s.sz * s.sz - 2.0 * CMatrix::Identity(3, 3)) < 1e-14);
}

TEST_CASE("other local dimensions are rejected") {
  CHECK_THROWS_AS(build_spin_operators(4), UnsupportedDimension);
  CHECK_THROWS_AS(build_spin_operators(1), UnsupportedDimension);
}

TEST_CASE("bond hamiltonians split the fields half and half") {
  const auto X = oracle::pauli('x'), Y = oracle::pauli('y'), Z = oracle::pauli('z'), I = oracle::pauli('i');

  SUBCASE("transverse ising") {
    const auto hb = build_bond_hamiltonian(ModelSpec::transverse_ising(0.7, 1.3));
    CHECK(hb.d == 2);
    CHECK(max_abs(hb.hbond - (0.7 * oracle::kron(X, X) + 0.65 * (oracle::kron(Z, I) + oracle::kron(I, Z)))) < 1e-14);
  }
  SUBCASE("ising with h = 0 is the bare coupling") {
    CHECK(max_abs(build_bond_hamiltonian(ModelSpec::transverse_ising(1, 0)).hbond - oracle::kron(X, X)) < 1e-14);
  }
  SUBCASE("xyz") {
    const auto hb = build_bond_hamiltonian(ModelSpec::xyz(1.0, 0.5, 0.3));
    CHECK(max_abs(hb.hbond - (1.5 * oracle::kron(X, X) + 0.5 * oracle::kron(Y, Y) + 0.3 * oracle::kron(Z, Z))) < 1e-14);
  }
  SUBCASE("xxz") {
    const auto hb = build_bond_hamiltonian(ModelSpec::xxz(1.0, 0.6));
    CHECK(max_abs(hb.hbond - (oracle::kron(X, X) + oracle::kron(Y, Y) + 0.6 * oracle::kron(Z, Z))) < 1e-14);
  }
  SUBCASE("spin-1 with single-ion anisotropy") {
    const auto Sx = oracle::spin1('x'), Sz = oracle::spin1('z'), I3 = oracle::spin1('i');
    const auto hb = build_bond_hamiltonian(ModelSpec::spin1_sia(1.0, 2.0));
    CHECK(hb.d == 3);
    const auto want = oracle::kron(Sz, Sz) + oracle::kron(Sx * Sx, I3) + oracle::kron(I3, Sx * Sx);
    CHECK(max_abs(hb.hbond - want) < 1e-14);
  }
}

TEST_CASE("a ring of bond hamiltonians reproduces the full spectrum") {
  // N = 4 periodic ising from explicit site operators
  const double jx = 1.0, h = 1.4;
  const int N = 4;
  oracle::Mat H = oracle::Mat::Zero(16, 16);
  for (int i = 0; i < N; ++i)
    H += jx * oracle::embed2(oracle::pauli('x'), i, oracle::pauli('x'), (i + 1) % N, N) +
         h * oracle::embed(oracle::pauli('z'), i, N);
  const auto hb = build_bond_hamiltonian(ModelSpec::transverse_ising(jx, h));
  const auto ring = oracle::ring_hamiltonian(hb.hbond, 2, N, true);
  CHECK(max_abs(ring - H) < 1e-13);
}

TEST_CASE("gates are exp(-tau h)") {
  for (const auto& spec : {ModelSpec::transverse_ising(1, 1.2), ModelSpec::xyz(1, 0.5, 0.8), ModelSpec::spin1_sia(1, 2.5)}) {
    const auto hb = build_bond_hamiltonian(spec);
    for (double tau : {1e-3, 0.05, 0.4}) {
      const CMatrix g = build_gate(hb, tau);
      CHECK(max_abs(g - oracle::expm(-tau * hb.hbond)) < 1e-12);
      CHECK(hermiticity_error(g) < 1e-13);
    }
    CHECK(max_abs(build_gate(hb, 0.0) - CMatrix::Identity(hb.hbond.rows(), hb.hbond.cols())) == 0.0);
  }
  CHECK_THROWS_AS(build_gate(build_bond_hamiltonian(ModelSpec::transverse_ising(1, 1)), -0.1), InvalidArgument);
  BondHamiltonian bad{2, CMatrix::Zero(4, 4)};
  bad.hbond(0, 1) = 1.0;
  CHECK_THROWS_AS(build_gate(bad, 0.1), NotHermitian);
}

TEST_CASE("gate composition is additive in tau") {
  const auto hb = build_bond_hamiltonian(ModelSpec::xyz(1, 0.5, 0.4));
  CHECK(max_abs(build_gate(hb, 0.03) * build_gate(hb, 0.07) - build_gate(hb, 0.1)) < 1e-13);
}

TEST_CASE("on-site symmetry groups leave the bond hamiltonian invariant") {
  for (const auto& spec : {ModelSpec::transverse_ising(1, 1.5), ModelSpec::xyz(1, 0.5, 0.3), ModelSpec::xxz(1, 0.6),
                           ModelSpec::spin1_sia(1, 1.0)}) {
    const auto hb = build_bond_hamiltonian(spec);
    const auto group = onsite_symmetry_group(spec);
    REQUIRE(!group.empty());
    const int d = spec.local_dim();
    CHECK(max_abs(group.front() - CMatrix::Identity(d, d)) == 0.0);
    for (const auto& u : group) {
      CHECK(max_abs(u * u.adjoint() - CMatrix::Identity(d, d)) < 1e-13);
      const CMatrix uu = oracle::kron(u, u);
      CHECK(max_abs(uu * hb.hbond * uu.adjoint() - hb.hbond) < 1e-12);
    }
  }
}

TEST_CASE("model specs") {
  CHECK(parse_model("ising") == Model::TransverseIsing);
  CHECK(parse_model(model_name(Model::Spin1IsingSIA)) == Model::Spin1IsingSIA);
  CHECK_THROWS_AS(parse_model("heisenberg-ladder"), InvalidArgument);

  const auto x = ModelSpec::xyz(1.0, 0.5, 0.2);
  CHECK(x.jx == doctest::Approx(1.5));
  CHECK(x.jy == doctest::Approx(0.5));
  CHECK(ModelSpec::xxz(2.0, 0.1).jx == ModelSpec::xxz(2.0, 0.1).jy);
  CHECK(ModelSpec::spin1_sia(1, 1).local_dim() == 3);

  ModelSpec bad = ModelSpec::transverse_ising(1, 1);
  bad.delta = 0.5;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  ModelSpec bad_xyz = x;
  bad_xyz.jx = 3.0;
  CHECK_THROWS_AS(bad_xyz.validate(), InvalidArgument);
  CHECK_NOTHROW(bad_xyz.normalized().validate());
  CHECK(x.key() != ModelSpec::xyz(1.0, 0.5, 0.2000001).key());
}
