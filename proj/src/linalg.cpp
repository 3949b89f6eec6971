#include "entangle/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace entangle {

double hermiticity_error(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

HermitianEigen eigh(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  return {es.eigenvalues(), es.eigenvectors()};
}

double max_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

CMatrix hermitian_exp(const CMatrix& m, double scale) {
  auto [w, v] = eigh(m);
  RVector e = (scale * w.array()).exp();
  return v * e.asDiagonal() * v.adjoint();
}

CMatrix psd_factor(const CMatrix& m, double rel_cut) {
  auto [w, v] = eigh(m);
  const double top = std::max(w.maxCoeff(), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) > rel_cut * top && w(i) > 0.0) keep.push_back(i);
  CMatrix f(m.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    f.col(static_cast<Eigen::Index>(k)) = v.col(keep[k]) * std::sqrt(w(keep[k]));
  return f;
}

CMatrix unvec(const CVector& v, int dim) {
  CMatrix m(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) m(a, b) = v(a * dim + b);
  return m;
}

CVector vec(const CMatrix& m) {
  const auto dim = m.rows();
  CVector v(dim * m.cols());
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < m.cols(); ++b) v(a * m.cols() + b) = m(a, b);
  return v;
}

}  // namespace entangle
