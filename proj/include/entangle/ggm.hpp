#pragma once

#include <limits>
#include <string>
#include <vector>

#include "entangle/imps.hpp"
#include "entangle/rdm.hpp"

namespace entangle {

enum class CandidateKind { HalfCut, Block, Pattern, Subset };

struct BipartitionCandidate {
  CandidateKind kind = CandidateKind::Block;
  // Block: 0..m-1, Pattern: offsets, Subset: finite-chain sites, HalfCut: empty
  std::vector<int> sites;
  double lambda_max_sq = 0.0;

  std::string label() const;
};

enum class GgmStatus { Ok, Unavailable };

struct GgmResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  std::vector<BipartitionCandidate> argmax;  // every candidate within 1e-12 of the max
  std::vector<BipartitionCandidate> candidates;
  GgmStatus status = GgmStatus::Ok;
  std::string reason;

  double lambda_max_sq() const { return argmax.empty() ? std::numeric_limits<double>::quiet_NaN() : argmax.front().lambda_max_sq; }
  std::string argmax_label() const;
};

double max_schmidt_sq(const CMatrix& rho);
double max_schmidt_sq(const ReducedDensityMatrix& rho);

enum class SymmetryPolicy {
  Unavailable,  // symmetry-broken states get no value
  Restore,      // average the RDMs over the symmetry orbit
};

struct GgmOptions {
  int m_cap = 4;
  std::vector<SitePattern> patterns;
  SymmetryPolicy symmetry = SymmetryPolicy::Unavailable;
  std::vector<CMatrix> group;  // on-site symmetry group, identity included
  double gap_tol = 1e-6;
  double symmetry_tol = 1e-4;
};

GgmResult ggm_infinite(const Imps& s, const GgmOptions& opt = {});

// Number of distinct states among g T^t |psi> (g in group, t a translation),
// told apart by their rooted 1- and 2-site RDMs.
int symmetry_orbit_size(const ImpsEnvironment& env, const std::vector<CMatrix>& group, double tol);

GgmResult ggm_finite(const CVector& psi, int N, int d, int max_subset, bool parallel = true);

// Subsets of size 1..max_subset; those of size N/2 must contain site 0.
std::vector<std::vector<int>> enumerate_subsets(int N, int max_subset);

struct ProductFidelity {
  double fidelity = 0.0;
  bool converged = false;
  int iterations = 0;
};

ProductFidelity closest_product_fidelity(const CVector& psi, int N, int d, const std::vector<int>& subset,
                                         int iters = 10000);

std::string ggm_csv_header();
std::string ggm_csv_row(double param, const GgmResult& r);

}  // namespace entangle
