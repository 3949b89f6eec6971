#pragma once

#include <string>
#include <vector>

#include "entangle/imps.hpp"
#include "entangle/linalg.hpp"

namespace entangle {

struct SitePattern {
  std::vector<int> offsets;

  SitePattern() : offsets{0} {}
  explicit SitePattern(std::vector<int> o, int span_cap = 12);

  static SitePattern block(int m, int span_cap = 12);
  // "0-2-5"
  static SitePattern parse(const std::string& label, int span_cap = 12);

  int m() const { return static_cast<int>(offsets.size()); }
  int span() const { return offsets.back() + 1; }
  bool consecutive() const { return span() == m(); }
  std::string label() const;
};

struct ReducedDensityMatrix {
  SitePattern pattern;
  int d = 2;
  CMatrix rho;
};

struct RdmCheck {
  double hermiticity = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;

  bool ok(double herm_tol = 1e-10, double trace_tol = 1e-10, double psd_tol = 1e-9) const {
    return hermiticity <= herm_tol && trace_error <= trace_tol && min_eigenvalue >= -psd_tol;
  }
};

RdmCheck check_rdm(const CMatrix& rho);

// Site tensors of a chain plus left/right environments for every sublattice.
// left[t]: environment to the left of a site on sublattice t,
// right[t]: environment to the right of a site on sublattice t.
// Contractions use rho_IJ = tr(L A^I R A^J^dagger).
struct ImpsEnvironment {
  SiteTensors tensors;
  FixedPoints fixed_points;
  std::vector<CMatrix> left, right;

  int cell_size() const { return tensors.cell_size(); }
  int d() const { return tensors.d; }
};

ImpsEnvironment make_environment(const SiteTensors& t, double gap_tol = 1e-6);
ImpsEnvironment make_environment(const Imps& s, double gap_tol = 1e-6);

struct RdmOptions {
  bool sublattice_average = true;
  // averaged as (1/|G|) sum_g g^{(x)m} rho g^{(x)m}^dagger when non-empty
  std::vector<CMatrix> group;
};

CMatrix rooted_block_rdm(const ImpsEnvironment& env, int root, int m);
CMatrix rooted_pattern_rdm(const ImpsEnvironment& env, int root, const SitePattern& p);

ReducedDensityMatrix consecutive_block_rdm(const ImpsEnvironment& env, int m, const RdmOptions& opt = {});
ReducedDensityMatrix pattern_rdm(const ImpsEnvironment& env, const SitePattern& p, const RdmOptions& opt = {});

ReducedDensityMatrix single_site_rdm(const Imps& s);
ReducedDensityMatrix consecutive_block_rdm(const Imps& s, int m);
ReducedDensityMatrix pattern_rdm(const Imps& s, const SitePattern& p);

CMatrix symmetrize(const CMatrix& rho, int d, int m, const std::vector<CMatrix>& group);

// Trace out one site (0..m-1) of an m-site density matrix.
CMatrix trace_out_site(const CMatrix& rho, int d, int m, int site);

// Writes <dir>/rdm_p<label>.csv and returns the path.
std::string write_rdm_csv(const ReducedDensityMatrix& r, const std::string& dir);

}  // namespace entangle
