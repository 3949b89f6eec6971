#include "entangle/rdm.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "entangle/errors.hpp"

namespace entangle {

namespace {

constexpr std::int64_t kMaxRhoEntries = std::int64_t{1} << 24;

void check_size(int d, int m, int D) {
  const std::int64_t dm = ipow(d, m);
  if (dm * dm > kMaxRhoEntries) throw PatternTooLarge("density matrix on " + std::to_string(m) + " sites is too large");
  (void)D;
}

CMatrix finish(CMatrix rho) {
  rho = hermitian_part(rho);
  const cplx tr = rho.trace();
  if (!(std::abs(tr) > 0.0) || !std::isfinite(tr.real())) throw NumericalBreakdown("density matrix has zero trace");
  return rho / tr.real();
}

// sum_k A^k X A^k^dagger
CMatrix apply_right(const std::vector<CMatrix>& a, const CMatrix& x) {
  CMatrix y = CMatrix::Zero(x.rows(), x.cols());
  for (const auto& m : a) y += m * x * m.adjoint();
  return y;
}

// sum_k A^k^dagger X A^k
CMatrix apply_left(const std::vector<CMatrix>& a, const CMatrix& x) {
  CMatrix y = CMatrix::Zero(x.rows(), x.cols());
  for (const auto& m : a) y += m.adjoint() * x * m;
  return y;
}

}  // namespace

SitePattern::SitePattern(std::vector<int> o, int span_cap) : offsets(std::move(o)) {
  if (offsets.empty()) throw InvalidArgument("site pattern is empty");
  if (offsets.front() != 0) throw InvalidArgument("site pattern must start at 0");
  for (std::size_t i = 1; i < offsets.size(); ++i)
    if (offsets[i] <= offsets[i - 1]) throw InvalidArgument("site pattern must be strictly increasing");
  if (span() > span_cap) throw PatternTooLarge("pattern span " + std::to_string(span()) + " exceeds cap");
}

SitePattern SitePattern::block(int m, int span_cap) {
  if (m < 1) throw InvalidArgument("block length must be positive");
  std::vector<int> o(m);
  for (int i = 0; i < m; ++i) o[i] = i;
  return SitePattern(o, span_cap);
}

SitePattern SitePattern::parse(const std::string& label, int span_cap) {
  std::vector<int> o;
  std::stringstream ss(label);
  std::string tok;
  while (std::getline(ss, tok, '-')) {
    try {
      std::size_t used = 0;
      o.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InvalidArgument("bad site pattern '" + label + "'");
    }
  }
  return SitePattern(o, span_cap);
}

std::string SitePattern::label() const {
  std::string s;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(offsets[i]);
  }
  return s;
}

RdmCheck check_rdm(const CMatrix& rho) {
  RdmCheck c;
  c.hermiticity = hermiticity_error(rho);
  c.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
  c.min_eigenvalue = eigh(rho).values.minCoeff();
  return c;
}

ImpsEnvironment make_environment(const SiteTensors& t, double gap_tol) {
  ImpsEnvironment env;
  env.tensors = t;
  env.fixed_points = dominant_fixed_points(transfer_matrix(t), gap_tol);
  const int n = t.cell_size();
  env.left.resize(n);
  env.right.resize(n);
  env.left[0] = hermitian_part(env.fixed_points.left().transpose());
  for (int s = 0; s + 1 < n; ++s) env.left[s + 1] = apply_left(t.cell[s], env.left[s]);
  env.right[n - 1] = hermitian_part(env.fixed_points.right());
  for (int s = n - 2; s >= 0; --s) env.right[s] = apply_right(t.cell[s + 1], env.right[s + 1]);
  return env;
}

ImpsEnvironment make_environment(const Imps& s, double gap_tol) { return make_environment(site_tensors(s), gap_tol); }

CMatrix rooted_block_rdm(const ImpsEnvironment& env, int root, int m) {
  const int d = env.d(), n = env.cell_size(), D = env.tensors.D;
  if (m < 1) throw InvalidArgument("block length must be positive");
  check_size(d, m, D);
  // L = Lh^dagger Lh, R = Rh Rh^dagger
  const CMatrix lh = psd_factor(env.left[root % n], 1e-15).adjoint();
  const CMatrix rh = psd_factor(env.right[(root + m - 1) % n], 1e-15);
  if (lh.rows() == 0 || rh.cols() == 0) throw NumericalBreakdown("environment has no support");
  std::vector<CMatrix> p{lh};
  for (int k = 0; k < m; ++k) {
    const auto& site = env.tensors.cell[(root + k) % n];
    std::vector<CMatrix> next;
    next.reserve(p.size() * d);
    for (const auto& x : p)
      for (int i = 0; i < d; ++i) next.push_back(x * site[i]);
    p = std::move(next);
  }
  const auto k1 = lh.rows(), k2 = rh.cols();
  CMatrix w(static_cast<Eigen::Index>(p.size()), k1 * k2);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const CMatrix wi = p[i] * rh;
    w.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXcd>(wi.data(), wi.size());
  }
  return finish(w * w.adjoint());
}

CMatrix rooted_pattern_rdm(const ImpsEnvironment& env, int root, const SitePattern& p) {
  const int d = env.d(), n = env.cell_size(), D = env.tensors.D;
  const int m = p.m();
  check_size(d, m, D);
  if (ipow(d, 2 * m) * D * D > (std::int64_t{1} << 26))
    throw PatternTooLarge("pattern environment would hold too many matrices");
  std::vector<CMatrix> envs{env.left[root % n]};
  std::int64_t dk = 1;
  int pos = 0;
  for (int k = 0; k < m; ++k) {
    for (; pos < p.offsets[k]; ++pos) {
      const auto& site = env.tensors.cell[(root + pos) % n];
      for (auto& e : envs) e = apply_left(site, e);
    }
    const auto& site = env.tensors.cell[(root + pos) % n];
    ++pos;
    const std::int64_t nk = dk * d;
    std::vector<CMatrix> next(static_cast<std::size_t>(nk * nk));
    for (std::int64_t I = 0; I < dk; ++I)
      for (std::int64_t J = 0; J < dk; ++J) {
        const CMatrix& e = envs[I * dk + J];
        for (int i = 0; i < d; ++i) {
          const CMatrix ea = e * site[i];
          for (int j = 0; j < d; ++j) next[(I * d + i) * nk + (J * d + j)] = site[j].adjoint() * ea;
        }
      }
    envs = std::move(next);
    dk = nk;
  }
  const CMatrix& r = env.right[(root + p.offsets.back()) % n];
  CMatrix rho(dk, dk);
  for (std::int64_t I = 0; I < dk; ++I)
    for (std::int64_t J = 0; J < dk; ++J) rho(I, J) = (envs[I * dk + J].cwiseProduct(r.transpose())).sum();
  return finish(rho);
}

CMatrix symmetrize(const CMatrix& rho, int d, int m, const std::vector<CMatrix>& group) {
  if (group.empty()) return rho;
  CMatrix acc = CMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& g : group) {
    CMatrix u = CMatrix::Identity(1, 1);
    for (int k = 0; k < m; ++k) u = kron(u, g);
    acc += u * rho * u.adjoint();
  }
  (void)d;
  return acc / static_cast<double>(group.size());
}

namespace {

ReducedDensityMatrix averaged(const ImpsEnvironment& env, const SitePattern& p, const RdmOptions& opt, bool block) {
  const int n = env.cell_size();
  const int roots = opt.sublattice_average ? n : 1;
  CMatrix acc;
  for (int t = 0; t < roots; ++t) {
    CMatrix r = block ? rooted_block_rdm(env, t, p.m()) : rooted_pattern_rdm(env, t, p);
    acc = t == 0 ? r : CMatrix(acc + r);
  }
  acc /= static_cast<double>(roots);
  ReducedDensityMatrix out;
  out.pattern = p;
  out.d = env.d();
  out.rho = finish(symmetrize(acc, env.d(), p.m(), opt.group));
  return out;
}

}  // namespace

ReducedDensityMatrix consecutive_block_rdm(const ImpsEnvironment& env, int m, const RdmOptions& opt) {
  return averaged(env, SitePattern::block(m, std::max(m, 12)), opt, true);
}

ReducedDensityMatrix pattern_rdm(const ImpsEnvironment& env, const SitePattern& p, const RdmOptions& opt) {
  return averaged(env, p, opt, false);
}

ReducedDensityMatrix single_site_rdm(const Imps& s) { return consecutive_block_rdm(make_environment(s), 1); }

ReducedDensityMatrix consecutive_block_rdm(const Imps& s, int m) { return consecutive_block_rdm(make_environment(s), m); }

ReducedDensityMatrix pattern_rdm(const Imps& s, const SitePattern& p) { return pattern_rdm(make_environment(s), p); }

CMatrix trace_out_site(const CMatrix& rho, int d, int m, int site) {
  if (site < 0 || site >= m) throw ShapeError("site index out of range");
  const std::int64_t inner = ipow(d, m - 1 - site);
  const std::int64_t outer = ipow(d, site);
  const std::int64_t dim = outer * inner;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (std::int64_t a = 0; a < outer; ++a)
    for (std::int64_t b = 0; b < inner; ++b)
      for (std::int64_t c = 0; c < outer; ++c)
        for (std::int64_t e = 0; e < inner; ++e) {
          cplx v = 0.0;
          for (int k = 0; k < d; ++k) v += rho((a * d + k) * inner + b, (c * d + k) * inner + e);
          out(a * inner + b, c * inner + e) = v;
        }
  return out;
}

std::string write_rdm_csv(const ReducedDensityMatrix& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / ("rdm_p" + r.pattern.label() + ".csv")).string();
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path);
  char buf[64];
  for (Eigen::Index i = 0; i < r.rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.rho.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", j ? "," : "", r.rho(i, j).real(), r.rho(i, j).imag());
      os << buf;
    }
    os << '\n';
  }
  return path;
}

}  // namespace entangle
