#include "entangle/kernels.hpp"

#include <omp.h>

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "entangle/errors.hpp"

namespace entangle::kernels {

namespace {

struct Split {
  std::vector<std::int64_t> row, col;
  std::int64_t rows = 1, cols = 1;
};

void check(const CVector& psi, int N, int d, const std::vector<int>& subset) {
  if (N < 1 || d < 1) throw ShapeError("bad chain size");
  if (psi.size() != ipow(d, N)) throw ShapeError("state length does not match d^N");
  std::vector<bool> seen(N, false);
  for (int s : subset) {
    if (s < 0 || s >= N) throw ShapeError("site index out of range");
    if (seen[s]) throw ShapeError("repeated site index");
    seen[s] = true;
  }
}

// row/col index of every basis state for the given subset
Split split_indices(int N, int d, const std::vector<int>& subset) {
  std::vector<bool> in(N, false);
  for (int s : subset) in[s] = true;
  std::vector<int> rest;
  for (int s = 0; s < N; ++s)
    if (!in[s]) rest.push_back(s);
  Split sp;
  const std::int64_t dim = ipow(d, N);
  sp.rows = ipow(d, static_cast<int>(subset.size()));
  sp.cols = ipow(d, static_cast<int>(rest.size()));
  sp.row.assign(dim, 0);
  sp.col.assign(dim, 0);
  std::vector<std::int64_t> place(N);
  for (int s = 0; s < N; ++s) place[s] = ipow(d, N - 1 - s);
  for (std::int64_t x = 0; x < dim; ++x) {
    std::int64_t r = 0, c = 0;
    for (int s : subset) r = r * d + (x / place[s]) % d;
    for (int s : rest) c = c * d + (x / place[s]) % d;
    sp.row[x] = r;
    sp.col[x] = c;
  }
  return sp;
}

struct NonZero {
  int p, q;
  cplx v;
};

std::vector<NonZero> nonzeros(const CMatrix& m) {
  std::vector<NonZero> out;
  for (int q = 0; q < m.cols(); ++q)
    for (int p = 0; p < m.rows(); ++p)
      if (m(p, q) != 0.0) out.push_back({p, q, m(p, q)});
  return out;
}

using Triplets = std::vector<Eigen::Triplet<cplx>>;

// entries of column x
void column_entries(const ModelTerms& t, int N, const std::vector<std::pair<int, int>>& bl,
                    const std::vector<std::int64_t>& place, const std::vector<std::vector<NonZero>>& ca,
                    const std::vector<std::vector<NonZero>>& cb, const std::vector<std::vector<NonZero>>& fo,
                    std::int64_t x, Triplets& out) {
  const int d = t.d;
  for (std::size_t k = 0; k < t.couplings.size(); ++k) {
    const double c = t.couplings[k].coef;
    if (c == 0.0) continue;
    for (const auto& [s, u] : bl) {
      const int xs = static_cast<int>((x / place[s]) % d), xu = static_cast<int>((x / place[u]) % d);
      for (const auto& a : ca[k]) {
        if (a.q != xs) continue;
        for (const auto& b : cb[k]) {
          if (b.q != xu) continue;
          const std::int64_t y = x + (a.p - xs) * place[s] + (b.p - xu) * place[u];
          out.emplace_back(y, x, c * a.v * b.v);
        }
      }
    }
  }
  for (std::size_t k = 0; k < t.fields.size(); ++k) {
    const double c = t.fields[k].coef;
    if (c == 0.0) continue;
    for (int s = 0; s < N; ++s) {
      const int xs = static_cast<int>((x / place[s]) % d);
      for (const auto& a : fo[k])
        if (a.q == xs) out.emplace_back(x + (a.p - xs) * place[s], x, c * a.v);
    }
  }
}

struct Prepared {
  std::vector<std::pair<int, int>> bl;
  std::vector<std::int64_t> place;
  std::vector<std::vector<NonZero>> ca, cb, fo;
  std::int64_t dim;
};

Prepared prepare(const ModelTerms& t, int N, Boundary bc) {
  if (N < 2) throw InvalidArgument("chain needs at least two sites");
  Prepared p;
  p.bl = bonds(N, bc);
  p.place.resize(N);
  for (int s = 0; s < N; ++s) p.place[s] = ipow(t.d, N - 1 - s);
  for (const auto& c : t.couplings) {
    p.ca.push_back(nonzeros(c.a));
    p.cb.push_back(nonzeros(c.b));
  }
  for (const auto& f : t.fields) p.fo.push_back(nonzeros(f.op));
  p.dim = ipow(t.d, N);
  return p;
}

}  // namespace

std::vector<std::pair<int, int>> bonds(int N, Boundary bc) {
  std::vector<std::pair<int, int>> b;
  const int n = bc == Boundary::Periodic ? N : N - 1;
  for (int s = 0; s < n; ++s) b.emplace_back(s, (s + 1) % N);
  return b;
}

CMatrix bipartite_matrix(const CVector& psi, int N, int d, const std::vector<int>& subset) {
  check(psi, N, d, subset);
  const auto sp = split_indices(N, d, subset);
  CMatrix m(sp.rows, sp.cols);
  for (std::int64_t x = 0; x < psi.size(); ++x) m(sp.row[x], sp.col[x]) = psi(x);
  return m;
}

double lambda_max_sq(const CVector& psi, int N, int d, const std::vector<int>& subset) {
  const CMatrix m = bipartite_matrix(psi, N, d, subset);
  const CMatrix g = m.rows() <= m.cols() ? CMatrix(m * m.adjoint()) : CMatrix(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

std::vector<double> subset_scan_serial(const CVector& psi, int N, int d, const std::vector<std::vector<int>>& subsets) {
  std::vector<double> out(subsets.size());
  for (std::size_t i = 0; i < subsets.size(); ++i) out[i] = lambda_max_sq(psi, N, d, subsets[i]);
  return out;
}

std::vector<double> subset_scan_omp(const CVector& psi, int N, int d, const std::vector<std::vector<int>>& subsets) {
  for (const auto& s : subsets) check(psi, N, d, s);
  std::vector<double> out(subsets.size());
  const auto n = static_cast<std::int64_t>(subsets.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) out[i] = lambda_max_sq(psi, N, d, subsets[i]);
  return out;
}

CMatrix partial_trace_serial(const CVector& psi, int N, int d, const std::vector<int>& keep) {
  const CMatrix m = bipartite_matrix(psi, N, d, keep);
  const auto r = m.rows(), c = m.cols();
  CMatrix rho(r, r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      cplx v = 0.0;
      for (Eigen::Index k = 0; k < c; ++k) v += m(i, k) * std::conj(m(j, k));
      rho(i, j) = v;
      rho(j, i) = std::conj(v);
    }
  return rho;
}

CMatrix partial_trace_omp(const CVector& psi, int N, int d, const std::vector<int>& keep) {
  check(psi, N, d, keep);
  const auto sp = split_indices(N, d, keep);
  // row-major copy so each output row reads contiguous memory
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(sp.rows, sp.cols);
  const auto dim = psi.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t x = 0; x < dim; ++x) m(sp.row[x], sp.col[x]) = psi(x);
  const auto r = m.rows(), c = m.cols();
  CMatrix rho(r, r);
#pragma omp parallel for schedule(dynamic, 1)
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      cplx v = 0.0;
      for (Eigen::Index k = 0; k < c; ++k) v += m(i, k) * std::conj(m(j, k));
      rho(i, j) = v;
      rho(j, i) = std::conj(v);
    }
  return rho;
}

SparseCMatrix assemble_serial(const ModelTerms& terms, int N, Boundary bc) {
  const auto p = prepare(terms, N, bc);
  Triplets trips;
  for (std::int64_t x = 0; x < p.dim; ++x) column_entries(terms, N, p.bl, p.place, p.ca, p.cb, p.fo, x, trips);
  SparseCMatrix h(p.dim, p.dim);
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

SparseCMatrix assemble_omp(const ModelTerms& terms, int N, Boundary bc) {
  const auto p = prepare(terms, N, bc);
  std::vector<Triplets> parts;
#pragma omp parallel
  {
#pragma omp single
    parts.resize(omp_get_num_threads());
    Triplets& mine = parts[omp_get_thread_num()];
    // static schedule: thread k owns the k-th contiguous range, so
    // concatenating in thread order reproduces the serial order
#pragma omp for schedule(static)
    for (std::int64_t x = 0; x < p.dim; ++x) column_entries(terms, N, p.bl, p.place, p.ca, p.cb, p.fo, x, mine);
  }
  Triplets trips;
  std::size_t total = 0;
  for (const auto& t : parts) total += t.size();
  trips.reserve(total);
  for (const auto& t : parts) trips.insert(trips.end(), t.begin(), t.end());
  SparseCMatrix h(p.dim, p.dim);
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

}  // namespace entangle::kernels
