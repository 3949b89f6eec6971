#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace entangle {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

// Largest elementwise |m - m^dagger|.
double hermiticity_error(const CMatrix& m);

// (m + m^dagger) / 2.
CMatrix hermitian_part(const CMatrix& m);

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
struct HermitianEigen {
  RVector values;
  CMatrix vectors;
};
HermitianEigen eigh(const CMatrix& m);

// Largest eigenvalue of a Hermitian matrix.
double max_eigenvalue(const CMatrix& m);

// exp(scale * m) for Hermitian m via eigendecomposition.
CMatrix hermitian_exp(const CMatrix& m, double scale);

// Factor a Hermitian PSD matrix as F F^dagger, dropping eigenvalues below
// rel_cut * max. F has one column per kept eigenvalue.
CMatrix psd_factor(const CMatrix& m, double rel_cut = 1e-15);

// Row-major D x D view of a length D^2 vector, as used for transfer-matrix
// eigenvectors: v[a * D + b] -> M(a, b).
CMatrix unvec(const CVector& v, int dim);
CVector vec(const CMatrix& m);

// Maps index digits (site 0 most significant) of a base-d integer.
inline std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace entangle
