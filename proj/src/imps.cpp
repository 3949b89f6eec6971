#include "entangle/imps.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "binio.hpp"
#include "entangle/errors.hpp"

namespace entangle {

namespace {

constexpr int kDenseLimit = 400;  // D^2 at or below: dense eigensolve

void check_shapes(const std::vector<CMatrix>& a) {
  if (a.empty()) throw ShapeError("empty set of site matrices");
  const auto r = a.front().rows(), c = a.front().cols();
  if (r != c) throw ShapeError("site matrices must be square");
  for (const auto& m : a)
    if (m.rows() != r || m.cols() != c) throw ShapeError("site matrices differ in shape");
}

double spectral_radius(const CMatrix& e) {
  if (e.rows() <= kDenseLimit) {
    Eigen::ComplexEigenSolver<CMatrix> es(e, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  CVector v = CVector::Ones(e.rows()).normalized();
  double est = 0.0;
  for (int it = 0; it < 5000; ++it) {
    CVector w = e * v;
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    w /= n;
    if (std::abs(n - est) < 1e-14 * n) return n;
    est = n;
    v = w;
  }
  return est;
}

// Fix the global phase so the trace of the reshaped matrix is real positive.
CVector phase_fix(const CVector& v, int D) {
  cplx tr = 0.0;
  for (int a = 0; a < D; ++a) tr += v(a * D + a);
  if (std::abs(tr) < 1e-300) {
    Eigen::Index k;
    v.cwiseAbs().maxCoeff(&k);
    tr = v(k);
  }
  return v * (std::conj(tr) / std::abs(tr));
}

struct EigTop {
  cplx value;
  CVector vector;
  double second = 0.0;  // modulus of the next eigenvalue
};

EigTop dense_top(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> es(m, true);
  const auto& w = es.eigenvalues();
  std::vector<Eigen::Index> idx(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](auto a, auto b) { return std::abs(w(a)) > std::abs(w(b)); });
  EigTop t;
  t.value = w(idx[0]);
  t.vector = es.eigenvectors().col(idx[0]);
  t.second = w.size() > 1 ? std::abs(w(idx[1])) : 0.0;
  return t;
}

EigTop power_top(const CMatrix& m) {
  const auto n = m.rows();
  CVector v = CVector::Ones(n).normalized();
  cplx mu = 0.0;
  for (int it = 0; it < 100000; ++it) {
    CVector w = m * v;
    const cplx nmu = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) break;
    w /= nw;
    const bool done = (w - v).norm() < 1e-13 || (w + v).norm() < 1e-13;
    v = w;
    mu = nmu;
    if (done && it > 10) break;
  }
  EigTop t;
  t.value = mu;
  t.vector = v;
  return t;
}

// |second eigenvalue| of m after deflating the dominant pair.
double deflated_radius(const CMatrix& m, const EigTop& right, const CVector& left) {
  const cplx norm = left.transpose() * right.vector;
  const auto n = m.rows();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  CVector v(n);
  for (auto i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  v.normalize();
  double logsum = 0.0;
  int count = 0;
  for (int it = 0; it < 600; ++it) {
    CVector w = m * v;
    w -= right.value * right.vector * (cplx(left.transpose() * v) / norm);
    const double nw = w.norm();
    if (nw < 1e-300) return 0.0;
    if (it >= 400) {
      logsum += std::log(nw);
      ++count;
    }
    v = w / nw;
  }
  return std::exp(logsum / count);
}

// Dominant fixed point of x -> sum_k m_k x m_k^dagger (adjoint=false) or
// x -> sum_k m_k^dagger x m_k (adjoint=true), Hermitian PSD, unit trace.
// Restarted Arnoldi for the eigenvalue of largest modulus. Returns false if
// the residual never drops below tol * |value|.
template <class Op>
bool arnoldi_top(const Op& op, CVector v, double tol, cplx& value, CVector& vector) {
  const auto n = v.size();
  const int m = static_cast<int>(std::min<Eigen::Index>(20, n));
  CMatrix basis(n, m + 1);
  CMatrix h = CMatrix::Zero(m + 1, m);
  for (int restart = 0; restart < 60; ++restart) {
    h.setZero();
    basis.col(0) = v / v.norm();
    CVector ritz;
    for (int j = 0; j < m; ++j) {
      CVector w = op(basis.col(j));
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) {
          const cplx c = basis.col(i).dot(w);
          h(i, j) += c;
          w -= c * basis.col(i);
        }
      const double beta = w.norm();
      h(j + 1, j) = beta;
      const bool breakdown = beta < 1e-14 * h.col(j).norm();
      if (!breakdown) basis.col(j + 1) = w / beta;
      // Ritz check every few steps; small Hessenberg solves are cheap
      if (!breakdown && (j + 1) % 4 != 0 && j + 1 != m) continue;
      const int k = j + 1;
      Eigen::ComplexEigenSolver<CMatrix> es(h.topLeftCorner(k, k), true);
      Eigen::Index top;
      es.eigenvalues().cwiseAbs().maxCoeff(&top);
      value = es.eigenvalues()(top);
      ritz = es.eigenvectors().col(top);
      v = basis.leftCols(k) * ritz;
      if (breakdown || beta * std::abs(ritz(k - 1)) < 0.1 * tol * std::abs(value)) break;
    }
    v.normalize();
    if ((op(v) - value * v).norm() < tol * std::abs(value)) {
      vector = v;
      return true;
    }
  }
  return false;
}

CMatrix map_fixed_point(const std::vector<CMatrix>& ms, bool adjoint, CMatrix x, double& eta) {
  const auto D = ms.front().rows();
  auto apply = [&](const CMatrix& in) {
    CMatrix out = CMatrix::Zero(D, D);
    for (const auto& m : ms) out += adjoint ? CMatrix(m.adjoint() * in * m) : CMatrix(m * in * m.adjoint());
    return out;
  };
  auto settle = [&](CMatrix& x, int iters, double& eta) {
    for (int it = 0; it < iters; ++it) {
      CMatrix y = apply(x);
      const cplx tr = y.trace();
      if (std::abs(tr) < 1e-300) return false;
      y = hermitian_part(y / tr);
      const double diff = (y - x).norm();
      x = std::move(y);
      eta = std::abs(tr);
      if (diff < 1e-13) return true;
    }
    return false;
  };
  const cplx tr0 = x.trace();
  if (!(std::abs(tr0) > 0.0)) throw GaugeSingular("fixed-point guess has zero trace");
  x /= tr0;
  // warm starts usually settle in a few applications of the map
  if (settle(x, 16, eta)) return x;
  const int d = static_cast<int>(D);
  cplx value;
  CVector v;
  auto op = [&](const CVector& in) { return vec(apply(unvec(in, d))); };
  if (arnoldi_top(op, vec(x), 1e-13, value, v)) {
    CMatrix f = unvec(phase_fix(v, d), d);
    f = hermitian_part(f);
    f /= f.trace();
    const auto w = eigh(f).values;
    if (w.minCoeff() >= -1e-10 * w.maxCoeff()) {
      eta = std::abs(value);
      return f;
    }
  }
  // Degenerate top eigenvalue (block-diagonal state): Arnoldi lands anywhere
  // in the eigenspace, whereas iterating a positive guess stays positive.
  settle(x, 5000, eta);
  return x;
}

struct SupportFactor {
  CMatrix vecs;   // columns spanning the support
  RVector roots;  // sqrt of kept eigenvalues
};

SupportFactor support_factor(const CMatrix& m) {
  auto [w, v] = eigh(m);
  const double top = w.maxCoeff();
  if (!(top > 0.0) || !std::isfinite(top)) throw GaugeSingular("fixed point is not positive");
  if (w.minCoeff() < -1e-8 * top) throw GaugeSingular("fixed point is not positive semidefinite");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = w.size() - 1; i >= 0; --i)
    if (w(i) > 1e-24 * top) keep.push_back(i);
  SupportFactor f;
  f.vecs.resize(m.rows(), static_cast<Eigen::Index>(keep.size()));
  f.roots.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    f.vecs.col(k) = v.col(keep[k]);
    f.roots(k) = std::sqrt(w(keep[k]));
  }
  return f;
}

// Make the largest-modulus entry of each column real positive; the matching
// columns of `partner` get the same phase.
void fix_column_phases(CMatrix& u, CMatrix& partner) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index k;
    u.col(c).cwiseAbs().maxCoeff(&k);
    const cplx p = u(k, c);
    if (std::abs(p) == 0.0) continue;
    const cplx ph = std::conj(p) / std::abs(p);
    u.col(c) *= ph;
    partner.col(c) *= ph;
  }
}

}  // namespace

void Imps::check() const {
  for (int s = 0; s < 2; ++s) {
    if (static_cast<int>(gamma[s].size()) != d) throw ShapeError("gamma has wrong physical dimension");
    for (const auto& g : gamma[s])
      if (g.rows() != D || g.cols() != D) throw ShapeError("gamma has wrong bond dimension");
    if (lambda[s].size() != D) throw ShapeError("lambda has wrong length");
  }
}

Imps init_imps(int d, int D, std::uint64_t seed, double noise) {
  if (D < 1) throw InvalidArgument("bond dimension must be positive");
  if (d < 1) throw InvalidArgument("local dimension must be positive");
  if (noise < 0.0) throw InvalidArgument("noise must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Imps s;
  s.d = d;
  s.D = D;
  for (int site = 0; site < 2; ++site) {
    s.gamma[site].assign(d, CMatrix::Zero(D, D));
    for (int i = 0; i < d; ++i) {
      auto& m = s.gamma[site][i];
      m(0, 0) = 1.0 / std::sqrt(static_cast<double>(d));
      if (noise > 0.0)
        for (int a = 0; a < D; ++a)
          for (int b = 0; b < D; ++b) m(a, b) += noise * g(rng);
    }
    s.lambda[site] = RVector::Zero(D);
    s.lambda[site](0) = 1.0;
  }
  return s;
}

std::vector<CMatrix> SiteTensors::blocked() const {
  std::vector<CMatrix> out{CMatrix::Identity(D, D)};
  for (const auto& site : cell) {
    std::vector<CMatrix> next;
    next.reserve(out.size() * site.size());
    for (const auto& left : out)
      for (const auto& a : site) next.push_back(left * a);
    out = std::move(next);
  }
  return out;
}

TransferMatrix transfer_matrix(const std::vector<CMatrix>& a) {
  check_shapes(a);
  TransferMatrix t;
  t.D = static_cast<int>(a.front().rows());
  t.e = CMatrix::Zero(t.D * t.D, t.D * t.D);
  for (const auto& m : a) t.e += kron(m, m.conjugate());
  return t;
}

TransferMatrix transfer_matrix(const SiteTensors& t) {
  TransferMatrix out;
  out.D = t.D;
  out.e = CMatrix::Identity(t.D * t.D, t.D * t.D);
  for (const auto& site : t.cell) out.e = out.e * transfer_matrix(site).e;
  return out;
}

SiteTensors uniform_site_tensors(const std::vector<CMatrix>& a) {
  check_shapes(a);
  SiteTensors t;
  t.d = static_cast<int>(a.size());
  t.D = static_cast<int>(a.front().rows());
  t.cell = {a};
  const double rho = spectral_radius(transfer_matrix(a).e);
  if (!(rho > 0.0)) throw NumericalBreakdown("transfer matrix is nilpotent");
  for (auto& m : t.cell[0]) m /= std::sqrt(rho);
  return t;
}

SiteTensors site_tensors(const Imps& s) {
  s.check();
  SiteTensors t;
  t.d = s.d;
  t.D = s.D;
  t.cell.resize(2);
  for (int site = 0; site < 2; ++site)
    for (int i = 0; i < s.d; ++i) t.cell[site].push_back(s.gamma[site][i] * s.lambda[site].asDiagonal());
  const double rho = spectral_radius(transfer_matrix(t).e);
  if (!(rho > 0.0)) throw NumericalBreakdown("transfer matrix is nilpotent");
  const double c = std::pow(rho, -0.25);
  for (auto& site : t.cell)
    for (auto& m : site) m *= c;
  return t;
}

FixedPoints dominant_fixed_points(const TransferMatrix& e, double gap_tol) {
  if (!(gap_tol > 0.0)) throw InvalidArgument("gap_tol must be positive");
  const int D = e.D;
  FixedPoints fp;
  fp.D = D;
  EigTop right, left;
  double second;
  if (D * D <= kDenseLimit) {
    right = dense_top(e.e);
    left = dense_top(e.e.transpose());
    second = right.second;
  } else {
    right = power_top(e.e);
    left = power_top(e.e.transpose());
    second = deflated_radius(e.e, right, left.vector);
  }
  const double mod = std::abs(right.value);
  if (!(mod > 0.0)) throw NumericalBreakdown("transfer matrix has zero spectral radius");
  fp.mu = right.value.real();
  fp.gap = (mod - second) / mod;
  if (fp.gap < gap_tol)
    throw DegenerateTransfer("dominant transfer-matrix eigenvalue is degenerate (gap " +
                             std::to_string(fp.gap) + ")");
  fp.r0 = phase_fix(right.vector, D);
  fp.r0 /= fp.r0.norm();
  fp.l0 = phase_fix(left.vector, D);
  const cplx overlap = fp.l0.transpose() * fp.r0;
  if (std::abs(overlap) < 1e-300) throw NumericalBreakdown("fixed points are orthogonal");
  fp.l0 /= overlap;
  return fp;
}

Imps canonicalize(const Imps& s) {
  s.check();
  const int d = s.d, D = s.D;
  const RVector& la = s.lambda[0];
  const RVector& lb = s.lambda[1];

  std::vector<CMatrix> cell;
  cell.reserve(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) cell.push_back(s.gamma[0][i] * la.asDiagonal() * s.gamma[1][j]);

  std::vector<CMatrix> mr, ml;
  for (const auto& c : cell) {
    mr.push_back(c * lb.asDiagonal());
    ml.push_back(lb.asDiagonal() * c);
  }
  double eta_r = 0.0, eta_l = 0.0;
  CMatrix guess_l = CMatrix::Zero(D, D);
  guess_l.diagonal() = lb.cwiseAbs2().cast<cplx>();
  if (guess_l.trace().real() <= 0.0) guess_l = CMatrix::Identity(D, D);
  const CMatrix vr = map_fixed_point(mr, false, CMatrix::Identity(D, D), eta_r);
  const CMatrix vl = map_fixed_point(ml, true, guess_l, eta_l);
  if (!(eta_r > 0.0) || !std::isfinite(eta_r)) throw GaugeSingular("state has zero norm");

  // vr = X X^dagger, vl = Y^dagger Y
  const auto fr = support_factor(vr);
  const auto fl = support_factor(vl);
  const CMatrix x = fr.vecs * fr.roots.asDiagonal();
  const CMatrix y = fl.roots.asDiagonal() * fl.vecs.adjoint();
  const CMatrix xinv = fr.roots.cwiseInverse().asDiagonal() * fr.vecs.adjoint();
  const CMatrix yinv = fl.vecs * fl.roots.cwiseInverse().asDiagonal();

  Eigen::BDCSVD<CMatrix> svd1(y * lb.asDiagonal() * x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s1 = svd1.singularValues();
  if (s1.size() == 0 || !(s1(0) > 0.0)) throw GaugeSingular("no Schmidt weight on the B-A bond");
  int r = 0;
  while (r < s1.size() && s1(r) > 1e-14 * s1(0)) ++r;
  r = std::min(r, D);
  CMatrix u1 = svd1.matrixU().leftCols(r);
  CMatrix v1 = svd1.matrixV().leftCols(r);
  fix_column_phases(u1, v1);
  const double snorm = s1.head(r).norm();
  const RVector lb_new = s1.head(r) / snorm;
  const double scale = snorm / std::sqrt(eta_r);

  // theta = lb' (V^dagger X^+ cell Y^+ U) lb', as a (d r) x (d r) matrix
  CMatrix theta(d * r, d * r);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      CMatrix c = v1.adjoint() * xinv * cell[i * d + j] * yinv * u1 * scale;
      theta.block(i * r, j * r, r, r) = lb_new.asDiagonal() * c * lb_new.asDiagonal();
    }
  Eigen::BDCSVD<CMatrix> svd2(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s2 = svd2.singularValues();
  if (!(s2(0) > 0.0) || !std::isfinite(s2(0))) throw GaugeSingular("no Schmidt weight on the A-B bond");
  int n = 0;
  while (n < s2.size() && s2(n) > 1e-14 * s2(0)) ++n;
  n = std::min(n, D);
  CMatrix u2 = svd2.matrixU().leftCols(n);
  CMatrix v2 = svd2.matrixV().leftCols(n);
  fix_column_phases(u2, v2);
  const RVector la_new = s2.head(n) / s2.head(n).norm();

  Imps out;
  out.d = d;
  out.D = D;
  out.lambda[0] = RVector::Zero(D);
  out.lambda[1] = RVector::Zero(D);
  out.lambda[0].head(n) = la_new;
  out.lambda[1].head(r) = lb_new;
  for (int site = 0; site < 2; ++site) out.gamma[site].assign(d, CMatrix::Zero(D, D));
  const RVector lb_inv = lb_new.cwiseInverse();
  for (int i = 0; i < d; ++i) {
    out.gamma[0][i].topLeftCorner(r, n) = lb_inv.asDiagonal() * u2.middleRows(i * r, r);
    out.gamma[1][i].topLeftCorner(n, r) = v2.middleRows(i * r, r).adjoint() * lb_inv.asDiagonal();
  }
  return out;
}

RVector half_cut_spectrum(const Imps& s, Bond bond) {
  RVector l = s.lambda_on(bond);
  std::sort(l.data(), l.data() + l.size(), std::greater<>());
  return l;
}

double orthonormality_error(const Imps& s) {
  s.check();
  double err = 0.0;
  const int D = s.D;
  for (int site = 0; site < 2; ++site) {
    const RVector& left = s.lambda[1 - site];  // bond to the left of this site
    const RVector& right = s.lambda[site];
    CMatrix rsum = CMatrix::Zero(D, D), lsum = CMatrix::Zero(D, D);
    for (const auto& g : s.gamma[site]) {
      rsum += g * right.cwiseAbs2().asDiagonal() * g.adjoint();
      lsum += g.adjoint() * left.cwiseAbs2().asDiagonal() * g;
    }
    CMatrix pl = CMatrix::Zero(D, D), pr = CMatrix::Zero(D, D);
    for (int a = 0; a < D; ++a) {
      pl(a, a) = left(a) > 0.0 ? 1.0 : 0.0;
      pr(a, a) = right(a) > 0.0 ? 1.0 : 0.0;
    }
    // only rows/cols on the support carry information
    err = std::max(err, (pl * rsum * pl - pl).cwiseAbs().maxCoeff());
    err = std::max(err, (pr * lsum * pr - pr).cwiseAbs().maxCoeff());
  }
  return err;
}

Imps imps_from_uniform(const std::vector<CMatrix>& a) {
  check_shapes(a);
  Imps s;
  s.d = static_cast<int>(a.size());
  s.D = static_cast<int>(a.front().rows());
  s.gamma[0] = a;
  s.gamma[1] = a;
  s.lambda[0] = RVector::Constant(s.D, 1.0 / std::sqrt(static_cast<double>(s.D)));
  s.lambda[1] = s.lambda[0];
  return canonicalize(s);
}

void save_imps(const Imps& s, const std::string& path) {
  s.check();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path + " for writing");
  binio::put_magic(os, "IMPS0001");
  binio::put<std::int32_t>(os, s.d);
  binio::put<std::int32_t>(os, s.D);
  for (int site = 0; site < 2; ++site)
    for (const auto& g : s.gamma[site])
      for (int a = 0; a < s.D; ++a)
        for (int b = 0; b < s.D; ++b) {
          binio::put<double>(os, g(a, b).real());
          binio::put<double>(os, g(a, b).imag());
        }
  for (int site = 0; site < 2; ++site)
    for (int a = 0; a < s.D; ++a) binio::put<double>(os, s.lambda[site](a));
  if (!os) throw FormatError("write failed for " + path);
}

Imps load_imps(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path);
  binio::expect_magic(is, "IMPS0001");
  Imps s;
  s.d = binio::get<std::int32_t>(is);
  s.D = binio::get<std::int32_t>(is);
  if (s.d < 1 || s.d > 16 || s.D < 1 || s.D > 4096) throw FormatError("implausible dimensions in " + path);
  for (int site = 0; site < 2; ++site) {
    s.gamma[site].assign(s.d, CMatrix::Zero(s.D, s.D));
    for (auto& g : s.gamma[site])
      for (int a = 0; a < s.D; ++a)
        for (int b = 0; b < s.D; ++b) {
          const double re = binio::get<double>(is);
          const double im = binio::get<double>(is);
          g(a, b) = cplx(re, im);
        }
  }
  for (int site = 0; site < 2; ++site) {
    s.lambda[site].resize(s.D);
    for (int a = 0; a < s.D; ++a) s.lambda[site](a) = binio::get<double>(is);
  }
  return s;
}

}  // namespace entangle
