#include "entangle/ggm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>

#include "entangle/errors.hpp"
#include "entangle/kernels.hpp"

namespace entangle {

namespace {

std::string join(const std::vector<int>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

void pick_argmax(GgmResult& r) {
  double best = -1.0;
  for (const auto& c : r.candidates) best = std::max(best, c.lambda_max_sq);
  r.argmax.clear();
  for (const auto& c : r.candidates)
    if (c.lambda_max_sq >= best - 1e-12) r.argmax.push_back(c);
  r.value = std::max(0.0, 1.0 - best);
}

bool same(const CMatrix& a, const CMatrix& b, double tol) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

}  // namespace

std::string BipartitionCandidate::label() const {
  switch (kind) {
    case CandidateKind::HalfCut: return "half_cut";
    case CandidateKind::Block: return "block(" + std::to_string(sites.size()) + ")";
    case CandidateKind::Pattern: return "pattern(" + join(sites, '-') + ")";
    case CandidateKind::Subset: return "subset(" + join(sites, ' ') + ")";
  }
  return "?";
}

std::string GgmResult::argmax_label() const {
  std::string s;
  for (std::size_t i = 0; i < argmax.size(); ++i) {
    if (i) s += '|';
    s += argmax[i].label();
  }
  return s;
}

double max_schmidt_sq(const CMatrix& rho) { return max_eigenvalue(rho); }

double max_schmidt_sq(const ReducedDensityMatrix& rho) { return max_eigenvalue(rho.rho); }

int symmetry_orbit_size(const ImpsEnvironment& env, const std::vector<CMatrix>& group, double tol) {
  const int n = env.cell_size(), d = env.d();
  std::vector<std::pair<CMatrix, CMatrix>> seen;
  const std::vector<CMatrix> g = group.empty() ? std::vector<CMatrix>{CMatrix::Identity(d, d)} : group;
  for (int t = 0; t < n; ++t) {
    const CMatrix r1 = rooted_block_rdm(env, t, 1);
    const CMatrix r2 = rooted_block_rdm(env, t, 2);
    for (const auto& u : g) {
      const CMatrix a = symmetrize(r1, d, 1, {u});
      const CMatrix b = symmetrize(r2, d, 2, {u});
      const bool known = std::any_of(seen.begin(), seen.end(),
                                     [&](const auto& p) { return same(p.first, a, tol) && same(p.second, b, tol); });
      if (!known) seen.emplace_back(a, b);
    }
  }
  return static_cast<int>(seen.size());
}

GgmResult ggm_infinite(const Imps& s, const GgmOptions& opt) {
  GgmResult r;
  if (opt.m_cap < 1) throw InvalidArgument("m_cap must be at least 1");
  ImpsEnvironment env;
  try {
    env = make_environment(s, opt.gap_tol);
  } catch (const DegenerateTransfer& e) {
    r.status = GgmStatus::Unavailable;
    r.reason = "degenerate transfer matrix";
    return r;
  }
  int orbit = 1;
  RdmOptions ropt;
  if (!opt.group.empty() || env.cell_size() > 1) {
    orbit = symmetry_orbit_size(env, opt.group, opt.symmetry_tol);
    if (orbit > 1) {
      if (opt.symmetry == SymmetryPolicy::Unavailable) {
        r.status = GgmStatus::Unavailable;
        r.reason = "symmetry-broken state (orbit of " + std::to_string(orbit) + ")";
        return r;
      }
      ropt.group = opt.group;
    }
  }

  // two cuts far apart on a ring; the state is an equal-weight superposition
  // of the orbit members, which are orthogonal in that limit
  const RVector ab = half_cut_spectrum(s, Bond::AB), ba = half_cut_spectrum(s, Bond::BA);
  const double top = std::max(ab(0) * ab(0), ba(0) * ba(0));
  r.candidates.push_back({CandidateKind::HalfCut, {}, top * top / orbit});

  for (int m = 1; m <= opt.m_cap; ++m) {
    const auto rho = consecutive_block_rdm(env, m, ropt);
    r.candidates.push_back({CandidateKind::Block, rho.pattern.offsets, max_schmidt_sq(rho)});
  }
  for (const auto& p : opt.patterns) {
    const auto rho = pattern_rdm(env, p, ropt);
    r.candidates.push_back({CandidateKind::Pattern, p.offsets, max_schmidt_sq(rho)});
  }
  pick_argmax(r);
  return r;
}

std::vector<std::vector<int>> enumerate_subsets(int N, int max_subset) {
  std::vector<std::vector<int>> out;
  for (int k = 1; k <= max_subset; ++k) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      if (!(2 * k == N && idx[0] != 0)) out.push_back(idx);
      int i = k - 1;
      while (i >= 0 && idx[i] == N - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

GgmResult ggm_finite(const CVector& psi, int N, int d, int max_subset, bool parallel) {
  if (N < 2 || d < 2) throw ShapeError("need at least two sites of dimension >= 2");
  if (psi.size() != ipow(d, N)) throw ShapeError("state length does not match d^N");
  if (max_subset < 1 || max_subset > N / 2) throw InvalidArgument("max_subset must lie in [1, N/2]");
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw InvalidArgument("state is not normalized");
  const auto subsets = enumerate_subsets(N, max_subset);
  const auto lam = parallel ? kernels::subset_scan_omp(psi, N, d, subsets)
                            : kernels::subset_scan_serial(psi, N, d, subsets);
  GgmResult r;
  r.candidates.reserve(subsets.size());
  for (std::size_t i = 0; i < subsets.size(); ++i)
    r.candidates.push_back({CandidateKind::Subset, subsets[i], lam[i]});
  pick_argmax(r);
  return r;
}

ProductFidelity closest_product_fidelity(const CVector& psi, int N, int d, const std::vector<int>& subset, int iters) {
  if (subset.empty() || static_cast<int>(subset.size()) >= N) throw ShapeError("subset must be a proper bipartition");
  const CMatrix m = kernels::bipartite_matrix(psi, N, d, subset);
  // start from the heaviest column
  Eigen::Index c;
  m.colwise().norm().maxCoeff(&c);
  CVector v = CVector::Zero(m.cols());
  v(c) = 1.0;
  ProductFidelity out;
  double f = 0.0;
  for (int it = 1; it <= iters; ++it) {
    CVector u = m * v;
    const double nu = u.norm();
    if (nu == 0.0) break;
    u /= nu;
    CVector w = m.adjoint() * u;
    const double nf = w.norm();
    w /= nf;
    const double change = (w - v).norm();
    v = std::move(w);
    f = nf;
    out.iterations = it;
    if (change < 1e-12) {
      out.converged = true;
      break;
    }
  }
  out.fidelity = f;
  return out;
}

std::string ggm_csv_header() { return "param,value,argmax_source,lambda_max_sq,status"; }

std::string ggm_csv_row(double param, const GgmResult& r) {
  char buf[256];
  if (r.status == GgmStatus::Unavailable) {
    std::snprintf(buf, sizeof buf, "%.10g,,,,unavailable", param);
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%.10g,%.12g,%s,%.12g,ok", param, r.value, r.argmax_label().c_str(), r.lambda_max_sq());
  return buf;
}

}  // namespace entangle
