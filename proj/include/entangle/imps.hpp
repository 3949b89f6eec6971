#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "entangle/linalg.hpp"

namespace entangle {

enum class Bond { AB, BA };

// Two-site unit cell in Vidal form:
//   ... lambda[1] gamma[0] lambda[0] gamma[1] lambda[1] gamma[0] ...
// lambda[0] sits on the A-B bond, lambda[1] on the B-A bond.
struct Imps {
  int d = 2;
  int D = 1;
  std::array<std::vector<CMatrix>, 2> gamma;
  std::array<RVector, 2> lambda;

  const RVector& lambda_on(Bond b) const { return lambda[b == Bond::AB ? 0 : 1]; }
  void check() const;
};

Imps init_imps(int d, int D, std::uint64_t seed, double noise);

// Per-site matrices of a translation-invariant chain with a unit cell of
// one or more sites. Normalized so the cell transfer matrix has spectral
// radius 1.
struct SiteTensors {
  int d = 2;
  int D = 1;
  std::vector<std::vector<CMatrix>> cell;

  int cell_size() const { return static_cast<int>(cell.size()); }
  // A^{i1 i2 ...} = A_0^{i1} A_1^{i2} ..., d^cell matrices, i1 most significant
  std::vector<CMatrix> blocked() const;
};

SiteTensors site_tensors(const Imps& s);
SiteTensors uniform_site_tensors(const std::vector<CMatrix>& a);

struct TransferMatrix {
  int D = 1;
  CMatrix e;  // sum_i A^i (x) conj(A^i), index a*D+b
};

TransferMatrix transfer_matrix(const std::vector<CMatrix>& a);
// product over the unit cell
TransferMatrix transfer_matrix(const SiteTensors& t);

struct FixedPoints {
  int D = 1;
  double mu = 1.0;
  CVector l0, r0;  // l0^T r0 = 1
  double gap = 1.0;

  CMatrix left() const { return unvec(l0, D); }
  CMatrix right() const { return unvec(r0, D); }
};

FixedPoints dominant_fixed_points(const TransferMatrix& e, double gap_tol = 1e-6);

Imps canonicalize(const Imps& s);

RVector half_cut_spectrum(const Imps& s, Bond bond);

// Largest deviation from the left/right orthonormality conditions on the
// support of the Schmidt values.
double orthonormality_error(const Imps& s);

// Vidal form of a uniform MPS, canonicalized.
Imps imps_from_uniform(const std::vector<CMatrix>& a);

void save_imps(const Imps& s, const std::string& path);
Imps load_imps(const std::string& path);

}  // namespace entangle
