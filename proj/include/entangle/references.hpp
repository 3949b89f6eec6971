#pragma once

#include <string>
#include <vector>

#include "entangle/imps.hpp"
#include "entangle/linalg.hpp"

namespace entangle {

// (|0...0> + |1...1>)/sqrt(2)
CVector ghz_state(int N);
// equal superposition of single excitations
CVector w_state(int N);

// sigma+ sigma_x, sigma- sigma_x
std::vector<CMatrix> ghz_mps_tensors();
// sigma_z, sqrt2 sigma+, -sqrt2 sigma-
std::vector<CMatrix> aklt_mps_tensors();
// per-site matrices {A^0, A^1}: bulk {1, sigma+}, last site {sigma_x, sigma+ sigma_x}
std::vector<std::vector<CMatrix>> w_state_mps(int N);

// amplitudes tr(A_1^{i_1} ... A_N^{i_N}), site 0 most significant, unnormalized
CVector contract_ring(const std::vector<std::vector<CMatrix>>& sites);
CVector contract_ring(const std::vector<CMatrix>& a, int N);

enum class ReferenceName { GHZ, W, AKLT_iMPS, GHZ_iMPS };

struct ReferenceState {
  ReferenceName name = ReferenceName::GHZ;
  int N = 0;
  CVector vector;                                  // GHZ, W
  std::vector<CMatrix> tensors;                    // uniform MPS
  std::vector<std::vector<CMatrix>> site_tensors;  // W as a site-dependent MPS
};

ReferenceState make_reference(ReferenceName name, int N = 0);

}  // namespace entangle
