#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entangle/imps.hpp"
#include "entangle/spin.hpp"

namespace entangle {

struct ItebdConfig {
  int D = 10;
  std::vector<double> tau_schedule{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  // a stage ends once the energy and the bond RDMs change slower than this
  // per unit imaginary time
  double energy_tol = 1e-6;
  long max_iters_per_tau = 200000;
  std::uint64_t seed = 1;
  double noise = 1e-2;
  int check_every = 10;
  // translation/on-site symmetry deviation of the local RDMs above which the
  // state counts as symmetry broken
  double symmetry_tol = 1e-4;

  void validate() const;
};

struct ConvergenceRecord {
  long iter = 0;
  double tau = 0.0;
  double energy_per_site = 0.0;
  double trunc_err = 0.0;     // summed over the sweeps since the previous record
  double lambda_delta = 0.0;  // max Schmidt-value change since the previous record
};

enum class SolverStatus { Converged, NotConverged, Degenerate };
std::string status_name(SolverStatus s);

struct ConvergenceLog {
  std::vector<ConvergenceRecord> records;
  SolverStatus status = SolverStatus::Converged;
  bool symmetry_broken = false;
  double symmetry_deviation = 0.0;
  double tau_final = 0.0;
  long sweeps = 0;
  std::string message;

  double final_energy() const { return records.empty() ? 0.0 : records.back().energy_per_site; }
  void write_csv(const std::string& path) const;
};

struct GateResult {
  Imps state;
  double trunc_err = 0.0;
};

GateResult apply_gate_on_bond(const Imps& s, const CMatrix& gate, Bond bond, int D);

struct St2Gates {
  CMatrix half, full;
};
St2Gates st2_gates(const BondHamiltonian& hb, double tau);

// AB(tau/2) BA(tau) AB(tau/2), then canonicalize
GateResult st2_sweep(const Imps& s, const St2Gates& gates, int D);
GateResult st2_sweep(const Imps& s, const BondHamiltonian& hb, double tau, int D);

// Bond energies from the Vidal form directly; exact only for canonical input.
double canonical_energy(const Imps& s, const BondHamiltonian& hb);

// Average of tr(rho2 hbond) over the two bonds, from transfer-matrix RDMs.
double energy_per_site(const Imps& s, const BondHamiltonian& hb);

struct GroundState {
  Imps state;
  ConvergenceLog log;
};

GroundState find_ground_state(const ModelSpec& spec, const ItebdConfig& cfg);

// Largest change of the rooted 1- and 2-site RDMs under the on-site group and
// under translation by one site.
double symmetry_deviation(const Imps& s, const std::vector<CMatrix>& group);

// Dense reference: `steps` ST2 steps of size tau on an N-site ring, bonds
// (0,1),(2,3),... first. N even.
CVector st2_ring_evolve(const CVector& psi, int N, const BondHamiltonian& hb, double tau, int steps);

}  // namespace entangle
