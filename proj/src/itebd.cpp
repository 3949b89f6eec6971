#include "entangle/itebd.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <Eigen/SVD>

#include "entangle/errors.hpp"
#include "entangle/rdm.hpp"

namespace entangle {

void ItebdConfig::validate() const {
  if (D < 1) throw InvalidArgument("bond dimension must be positive");
  if (tau_schedule.empty()) throw InvalidArgument("tau schedule is empty");
  for (std::size_t i = 0; i < tau_schedule.size(); ++i) {
    if (!(tau_schedule[i] > 0.0)) throw InvalidArgument("tau schedule must be positive");
    if (i && !(tau_schedule[i] < tau_schedule[i - 1]))
      throw InvalidArgument("tau schedule must be strictly decreasing");
  }
  if (!(energy_tol > 0.0)) throw InvalidArgument("energy_tol must be positive");
  if (max_iters_per_tau < 1) throw InvalidArgument("max_iters_per_tau must be positive");
  if (check_every < 1) throw InvalidArgument("check_every must be positive");
  if (noise < 0.0) throw InvalidArgument("noise must be non-negative");
}

std::string status_name(SolverStatus s) {
  switch (s) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::NotConverged: return "not_converged";
    case SolverStatus::Degenerate: return "degenerate";
  }
  return "?";
}

void ConvergenceLog::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path);
  os << "iter,tau,energy_per_site,trunc_err,lambda_delta\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%ld,%.6g,%.17g,%.6g,%.6g\n", r.iter, r.tau, r.energy_per_site, r.trunc_err,
                  r.lambda_delta);
    os << buf;
  }
}

namespace {

// theta^{kl} = diag(lo) G_a^k diag(mid) G_b^l diag(lo)
std::vector<CMatrix> two_site_theta(const Imps& s, int a) {
  const int b = 1 - a, d = s.d;
  const RVector& lo = s.lambda[b];
  const RVector& mid = s.lambda[a];
  std::vector<CMatrix> left(d);
  for (int k = 0; k < d; ++k) left[k] = lo.asDiagonal() * s.gamma[a][k] * mid.asDiagonal();
  std::vector<CMatrix> th;
  th.reserve(d * d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) th.push_back(left[k] * s.gamma[b][l] * lo.asDiagonal());
  return th;
}

// Two-site RDMs on both bonds straight from the Vidal form, stacked
// side by side. Valid for canonical input only.
CMatrix bond_rdms(const Imps& s) {
  const int d = s.d, dd = d * d;
  CMatrix out(dd, 2 * dd);
  for (int a = 0; a < 2; ++a) {
    const auto th = two_site_theta(s, a);
    CMatrix rho(dd, dd);
    for (int i = 0; i < dd; ++i)
      for (int j = 0; j <= i; ++j) {
        rho(i, j) = th[i].cwiseProduct(th[j].conjugate()).sum();
        rho(j, i) = std::conj(rho(i, j));
      }
    out.middleCols(a * dd, dd) = rho / rho.trace().real();
  }
  return out;
}

}  // namespace

GateResult apply_gate_on_bond(const Imps& s, const CMatrix& gate, Bond bond, int D) {
  const int d = s.d, Din = s.D;
  if (gate.rows() != d * d || gate.cols() != d * d) throw ShapeError("gate has wrong shape");
  if (D < 1) throw InvalidArgument("bond dimension must be positive");
  const int a = bond == Bond::AB ? 0 : 1, b = 1 - a;
  const auto th = two_site_theta(s, a);
  CMatrix m = CMatrix::Zero(d * Din, d * Din);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      auto blk = m.block(i * Din, j * Din, Din, Din);
      for (int kl = 0; kl < d * d; ++kl) {
        const cplx g = gate(i * d + j, kl);
        if (g != 0.0) blk += g * th[kl];
      }
    }
  if (!m.allFinite()) throw NumericalBreakdown("two-site wavefunction is not finite");
  Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  if (!sv.allFinite() || !(sv(0) > 0.0)) throw NumericalBreakdown("SVD of the two-site wavefunction failed");
  int keep = 0;
  while (keep < sv.size() && keep < D && sv(keep) > 1e-13 * sv(0)) ++keep;
  const double total = sv.squaredNorm();
  const double kept = sv.head(keep).squaredNorm();

  GateResult out;
  out.trunc_err = std::max(0.0, (total - kept) / total);
  Imps& r = out.state;
  r.d = d;
  r.D = D;
  const RVector& lo = s.lambda[b];
  RVector lo_new = RVector::Zero(D);
  lo_new.head(std::min(D, Din)) = lo.head(std::min(D, Din));
  RVector lo_inv = RVector::Zero(Din);
  for (int x = 0; x < Din; ++x) lo_inv(x) = lo(x) > 1e-14 ? 1.0 / lo(x) : 0.0;
  r.lambda[a] = RVector::Zero(D);
  r.lambda[a].head(keep) = sv.head(keep) / std::sqrt(kept);
  r.lambda[b] = lo_new;
  r.gamma[a].assign(d, CMatrix::Zero(D, D));
  r.gamma[b].assign(d, CMatrix::Zero(D, D));
  const int rows = std::min(D, Din);
  for (int i = 0; i < d; ++i) {
    const CMatrix ga = lo_inv.asDiagonal() * svd.matrixU().block(i * Din, 0, Din, keep);
    r.gamma[a][i].topLeftCorner(rows, keep) = ga.topRows(rows);
    const CMatrix gb = svd.matrixV().block(i * Din, 0, Din, keep).adjoint() * lo_inv.asDiagonal();
    r.gamma[b][i].topLeftCorner(keep, rows) = gb.leftCols(rows);
  }
  return out;
}

St2Gates st2_gates(const BondHamiltonian& hb, double tau) { return {build_gate(hb, 0.5 * tau), build_gate(hb, tau)}; }

GateResult st2_sweep(const Imps& s, const St2Gates& gates, int D) {
  auto r1 = apply_gate_on_bond(s, gates.half, Bond::AB, D);
  auto r2 = apply_gate_on_bond(r1.state, gates.full, Bond::BA, D);
  auto r3 = apply_gate_on_bond(r2.state, gates.half, Bond::AB, D);
  GateResult out;
  out.state = canonicalize(r3.state);
  out.trunc_err = r1.trunc_err + r2.trunc_err + r3.trunc_err;
  return out;
}

GateResult st2_sweep(const Imps& s, const BondHamiltonian& hb, double tau, int D) {
  return st2_sweep(s, st2_gates(hb, tau), D);
}

double canonical_energy(const Imps& s, const BondHamiltonian& hb) {
  const int d = s.d;
  double e = 0.0;
  for (int a = 0; a < 2; ++a) {
    const auto th = two_site_theta(s, a);
    cplx num = 0.0;
    double den = 0.0;
    for (int ij = 0; ij < d * d; ++ij) {
      den += th[ij].squaredNorm();
      for (int kl = 0; kl < d * d; ++kl) {
        const cplx h = hb.hbond(ij, kl);
        if (h != 0.0) num += h * th[ij].cwiseProduct(th[kl].conjugate()).sum();
      }
    }
    e += num.real() / den;
  }
  return 0.5 * e;
}

double energy_per_site(const Imps& s, const BondHamiltonian& hb) {
  const auto env = make_environment(s);
  double e = 0.0;
  for (int t = 0; t < 2; ++t) e += (rooted_block_rdm(env, t, 2) * hb.hbond).trace().real();
  return 0.5 * e;
}

double symmetry_deviation(const Imps& s, const std::vector<CMatrix>& group) {
  const auto env = make_environment(s);
  const int d = s.d;
  double dev = 0.0;
  for (int m = 1; m <= 2; ++m) {
    const CMatrix ra = rooted_block_rdm(env, 0, m);
    const CMatrix rb = rooted_block_rdm(env, 1, m);
    dev = std::max(dev, (ra - rb).cwiseAbs().maxCoeff());
    for (const auto& g : group) {
      const CMatrix ga = symmetrize(ra, d, m, {g});
      dev = std::max(dev, (ga - ra).cwiseAbs().maxCoeff());
    }
  }
  return dev;
}

GroundState find_ground_state(const ModelSpec& spec, const ItebdConfig& cfg) {
  spec.validate();
  cfg.validate();
  const auto hb = build_bond_hamiltonian(spec);
  const int d = hb.d;
  GroundState gs;
  auto& log = gs.log;
  Imps s = canonicalize(init_imps(d, cfg.D, cfg.seed, cfg.noise));
  long iter = 0;
  auto lambdas = [](const Imps& x) {
    RVector v(2 * x.D);
    v << x.lambda[0], x.lambda[1];
    return v;
  };
  for (double tau : cfg.tau_schedule) {
    const auto gates = st2_gates(hb, tau);
    double e_prev = canonical_energy(s, hb);
    RVector lam_prev = lambdas(s);
    CMatrix rho_prev = bond_rdms(s);
    double trunc = 0.0;
    bool done = false;
    for (long k = 1; k <= cfg.max_iters_per_tau; ++k) {
      auto r = st2_sweep(s, gates, cfg.D);
      s = std::move(r.state);
      trunc += r.trunc_err;
      ++iter;
      if (k % cfg.check_every != 0 && k != cfg.max_iters_per_tau) continue;
      const double e = canonical_energy(s, hb);
      const RVector lam = lambdas(s);
      const CMatrix rho = bond_rdms(s);
      const double ld = (lam - lam_prev).cwiseAbs().maxCoeff();
      log.records.push_back({iter, tau, e, trunc, ld});
      // Rates per unit imaginary time, so tiny tau cannot fake convergence.
      // Energy alone is blind to a leftover symmetry-breaking admixture
      // (second order), the bond RDMs see it at first order.
      const double window = static_cast<double>(k % cfg.check_every == 0 ? cfg.check_every : k % cfg.check_every);
      const double rate_e = std::abs(e - e_prev) / (window * tau);
      const double rate_r = (rho - rho_prev).cwiseAbs().maxCoeff() / (window * tau);
      e_prev = e;
      lam_prev = lam;
      rho_prev = rho;
      trunc = 0.0;
      if (rate_e < cfg.energy_tol && rate_r < cfg.energy_tol) {
        done = true;
        break;
      }
    }
    log.tau_final = tau;
    if (!done) {
      log.status = SolverStatus::NotConverged;
      log.message = "no convergence within max_iters_per_tau at tau=" + std::to_string(tau);
      break;
    }
  }
  log.sweeps = iter;
  try {
    log.symmetry_deviation = symmetry_deviation(s, onsite_symmetry_group(spec));
    log.symmetry_broken = log.symmetry_deviation > cfg.symmetry_tol;
  } catch (const DegenerateTransfer& e) {
    log.status = SolverStatus::Degenerate;
    log.message = e.what();
  }
  gs.state = std::move(s);
  return gs;
}

CVector st2_ring_evolve(const CVector& psi, int N, const BondHamiltonian& hb, double tau, int steps) {
  if (N < 2 || N % 2) throw InvalidArgument("ring length must be even");
  const int d = hb.d;
  if (psi.size() != ipow(d, N)) throw ShapeError("state has wrong length");
  const CMatrix half = build_gate(hb, 0.5 * tau);
  const CMatrix full = build_gate(hb, tau);
  auto apply = [&](CVector& v, const CMatrix& g, int s) {
    const int t = (s + 1) % N;
    const std::int64_t ps = ipow(d, N - 1 - s), pt = ipow(d, N - 1 - t);
    CVector out = CVector::Zero(v.size());
    for (std::int64_t x = 0; x < v.size(); ++x) {
      if (v(x) == 0.0) continue;
      const int xs = static_cast<int>((x / ps) % d), xt = static_cast<int>((x / pt) % d);
      const std::int64_t base = x - xs * ps - xt * pt;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out(base + i * ps + j * pt) += g(i * d + j, xs * d + xt) * v(x);
    }
    v = std::move(out);
  };
  CVector v = psi;
  for (int n = 0; n < steps; ++n) {
    for (int s = 0; s < N; s += 2) apply(v, half, s);
    for (int s = 1; s < N; s += 2) apply(v, full, s);
    for (int s = 0; s < N; s += 2) apply(v, half, s);
    v.normalize();
  }
  return v;
}

}  // namespace entangle
