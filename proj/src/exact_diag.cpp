#include "entangle/exact_diag.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include <Eigen/Eigenvalues>

#include "binio.hpp"
#include "entangle/errors.hpp"

namespace entangle {

namespace {

constexpr std::int64_t kDenseSolveCap = 1024;

std::int64_t hilbert_dim(int d, int N) {
  if (N < 2) throw InvalidArgument("chain needs at least two sites");
  if (N > 40) throw TooLarge("chain is too long");
  return ipow(d, N);
}

CMatrix embed_pair(const CMatrix& op, int d, int N, int s) {
  // op acts on sites (s, s+1), s+1 < N
  return kron(kron(CMatrix::Identity(ipow(d, s), ipow(d, s)), op),
              CMatrix::Identity(ipow(d, N - s - 2), ipow(d, N - s - 2)));
}

CMatrix embed_site(const CMatrix& op, int d, int N, int s) {
  return kron(kron(CMatrix::Identity(ipow(d, s), ipow(d, s)), op),
              CMatrix::Identity(ipow(d, N - s - 1), ipow(d, N - s - 1)));
}

// op on sites (N-1, 0): expand in matrix units
CMatrix embed_wrap(const CMatrix& op, int d, int N) {
  const std::int64_t dim = ipow(d, N);
  CMatrix out = CMatrix::Zero(dim, dim);
  const CMatrix mid = CMatrix::Identity(ipow(d, N - 2), ipow(d, N - 2));
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      for (int r = 0; r < d; ++r)
        for (int u = 0; u < d; ++u) {
          const cplx h = op(p * d + q, r * d + u);
          if (h == 0.0) continue;
          CMatrix last = CMatrix::Zero(d, d), first = CMatrix::Zero(d, d);
          last(p, r) = 1.0;
          first(q, u) = 1.0;
          out += h * (N == 2 ? kron(first, last) : kron(kron(first, mid), last));
        }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string key_text(const ModelSpec& spec, int N, Boundary bc) {
  return spec.key() + "|N=" + std::to_string(N) + "|bc=" + (bc == Boundary::Periodic ? "pbc" : "obc");
}

void save_cached(const std::string& path, const std::string& key, const FiniteGroundState& g) {
  const std::string tmp = path + ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) return;
    binio::put_magic(os, "EDGS0001");
    binio::put<std::int32_t>(os, g.N);
    binio::put<std::int32_t>(os, g.d);
    binio::put<std::int32_t>(os, static_cast<std::int32_t>(key.size()));
    os.write(key.data(), static_cast<std::streamsize>(key.size()));
    binio::put<double>(os, g.energy);
    binio::put<double>(os, g.gap);
    binio::put<std::int64_t>(os, g.psi.size());
    for (Eigen::Index i = 0; i < g.psi.size(); ++i) {
      binio::put<double>(os, g.psi(i).real());
      binio::put<double>(os, g.psi(i).imag());
    }
    if (!os) return;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) std::filesystem::remove(tmp, ec);
}

std::optional<FiniteGroundState> load_cached(const std::string& path, const std::string& key) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  try {
    binio::expect_magic(is, "EDGS0001");
    FiniteGroundState g;
    g.N = binio::get<std::int32_t>(is);
    g.d = binio::get<std::int32_t>(is);
    const auto klen = binio::get<std::int32_t>(is);
    if (klen < 0 || klen > 4096) return std::nullopt;
    std::string k(static_cast<std::size_t>(klen), '\0');
    if (!is.read(k.data(), klen) || k != key) return std::nullopt;
    g.energy = binio::get<double>(is);
    g.gap = binio::get<double>(is);
    const auto dim = binio::get<std::int64_t>(is);
    if (dim != ipow(g.d, g.N)) return std::nullopt;
    g.psi.resize(dim);
    for (std::int64_t i = 0; i < dim; ++i) {
      const double re = binio::get<double>(is);
      const double im = binio::get<double>(is);
      g.psi(i) = cplx(re, im);
    }
    return g;
  } catch (const FormatError&) {
    return std::nullopt;
  }
}

}  // namespace

CMatrix build_dense_hamiltonian(const ModelSpec& spec, int N, Boundary bc) {
  const auto hb = build_bond_hamiltonian(spec);
  const int d = hb.d;
  const std::int64_t dim = hilbert_dim(d, N);
  if (dim > kDenseHamiltonianCap) throw TooLarge("dense Hamiltonian of dimension " + std::to_string(dim) + " is too large");
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int s = 0; s + 1 < N; ++s) h += embed_pair(hb.hbond, d, N, s);
  if (bc == Boundary::Periodic) {
    h += embed_wrap(hb.hbond, d, N);
  } else {
    for (const auto& f : model_terms(spec).fields) {
      h += 0.5 * f.coef * embed_site(f.op, d, N, 0);
      h += 0.5 * f.coef * embed_site(f.op, d, N, N - 1);
    }
  }
  return h;
}

SparseCMatrix build_hamiltonian(const ModelSpec& spec, int N, Boundary bc, bool parallel) {
  const auto terms = model_terms(spec);
  const std::int64_t dim = hilbert_dim(terms.d, N);
  if (dim > kSparseHamiltonianCap) throw TooLarge("Hamiltonian of dimension " + std::to_string(dim) + " is too large");
  return parallel ? kernels::assemble_omp(terms, N, bc) : kernels::assemble_serial(terms, N, bc);
}

double default_degeneracy_tol(double e0) { return 1e-4 * std::max(1.0, std::abs(e0)); }

LanczosResult lanczos_lowest(const SparseCMatrix& h, const std::vector<CVector>& deflate, std::uint64_t seed,
                             int max_iter, double tol) {
  const auto n = h.rows();
  auto project = [&](CVector& v) {
    for (const auto& u : deflate) v -= u * u.dot(v);
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(g(rng), 0.0);
  project(v);
  v.normalize();
  const int kmax = static_cast<int>(std::min<std::int64_t>(max_iter, n - static_cast<std::int64_t>(deflate.size())));
  std::vector<CVector> q{v};
  std::vector<double> alpha, beta;
  LanczosResult res;
  Eigen::VectorXd ritz;
  for (int k = 0; k < kmax; ++k) {
    CVector w = h * q[k];
    project(w);
    const double a = q[k].dot(w).real();
    alpha.push_back(a);
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : q) w -= u * u.dot(w);
    const double b = w.norm();
    const int m = k + 1;
    const bool last = (k + 1 == kmax) || b < 1e-14;
    if (m % 5 == 0 || last) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      const double theta = es.eigenvalues()(0);
      ritz = es.eigenvectors().col(0);
      const double resid = b * std::abs(ritz(m - 1));
      res.value = theta;
      res.iterations = m;
      if (resid < tol * std::max(1.0, std::abs(theta)) || last) {
        res.converged = resid < 1e-8 * std::max(1.0, std::abs(theta));
        CVector x = CVector::Zero(n);
        for (int i = 0; i < m; ++i) x += ritz(i) * q[i];
        project(x);
        res.vector = x.normalized();
        return res;
      }
    }
    beta.push_back(b);
    q.push_back(w / b);
  }
  throw NumericalBreakdown("Lanczos produced no iterations");
}

FiniteGroundState ground_state(const ModelSpec& spec, int N, Boundary bc, std::optional<double> degeneracy_tol) {
  const int d = spec.local_dim();
  const std::int64_t dim = hilbert_dim(d, N);
  if (dim > kSparseHamiltonianCap) throw TooLarge("Hilbert space of dimension " + std::to_string(dim) + " is too large");
  FiniteGroundState g;
  g.N = N;
  g.d = d;
  g.bc = bc;
  const auto h = build_hamiltonian(spec, N, bc);
  if (dim <= kDenseSolveCap) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es{CMatrix(h)};
    if (es.info() != Eigen::Success) throw NumericalBreakdown("dense eigensolver failed");
    g.energy = es.eigenvalues()(0);
    g.gap = dim > 1 ? es.eigenvalues()(1) - es.eigenvalues()(0) : 0.0;
    g.psi = es.eigenvectors().col(0);
  } else {
    const auto e0 = lanczos_lowest(h);
    if (!e0.converged) throw NumericalBreakdown("Lanczos did not converge for the ground state");
    const auto e1 = lanczos_lowest(h, {e0.vector}, 4242);
    if (!e1.converged) throw NumericalBreakdown("Lanczos did not converge for the first excited state");
    g.energy = e0.value;
    g.gap = e1.value - e0.value;
    g.psi = e0.vector;
  }
  // deterministic global phase: largest component real positive
  Eigen::Index k;
  g.psi.cwiseAbs().maxCoeff(&k);
  g.psi *= std::conj(g.psi(k)) / std::abs(g.psi(k));
  g.psi.normalize();
  g.gap = std::max(g.gap, 0.0);
  g.degenerate = g.gap < degeneracy_tol.value_or(default_degeneracy_tol(g.energy));
  return g;
}

std::uint64_t ground_state_key(const ModelSpec& spec, int N, Boundary bc) {
  // FNV-1a
  std::uint64_t hsh = 1469598103934665603ull;
  for (unsigned char c : key_text(spec, N, bc)) {
    hsh ^= c;
    hsh *= 1099511628211ull;
  }
  return hsh;
}

std::string cache_dir_from_env() {
  const char* v = std::getenv("ENTANGLE_CACHE_DIR");
  return v ? std::string(v) : std::string();
}

FiniteGroundState cached_ground_state(const ModelSpec& spec, int N, Boundary bc, std::optional<double> degeneracy_tol,
                                      const std::string& dir) {
  const std::string root = dir.empty() ? cache_dir_from_env() : dir;
  if (root.empty()) return ground_state(spec, N, bc, degeneracy_tol);
  const std::string key = key_text(spec, N, bc);
  const auto path = (std::filesystem::path(root) / ("ed-" + hex64(ground_state_key(spec, N, bc)) + ".bin")).string();
  if (auto g = load_cached(path, key)) {
    g->bc = bc;
    g->degenerate = g->gap < degeneracy_tol.value_or(default_degeneracy_tol(g->energy));
    return *g;
  }
  auto g = ground_state(spec, N, bc, degeneracy_tol);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (!ec) save_cached(path, key, g);
  return g;
}

CMatrix partial_trace(const CVector& psi, const std::vector<int>& keep, int N, int d) {
  if (keep.empty()) throw ShapeError("keep set is empty");
  return kernels::partial_trace_omp(psi, N, d, keep);
}

}  // namespace entangle
