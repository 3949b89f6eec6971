#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entangle/kernels.hpp"
#include "entangle/linalg.hpp"
#include "entangle/spin.hpp"

namespace entangle {

using SparseCMatrix = kernels::SparseCMatrix;

inline constexpr std::int64_t kDenseHamiltonianCap = 4096;
inline constexpr std::int64_t kSparseHamiltonianCap = 20000;

// Sum of bond Hamiltonians placed by Kronecker embedding. With open ends the
// half of the single-site terms missing on the two edge sites is added back.
CMatrix build_dense_hamiltonian(const ModelSpec& spec, int N, Boundary bc);

// Same operator, assembled directly from the coupling and field terms.
SparseCMatrix build_hamiltonian(const ModelSpec& spec, int N, Boundary bc, bool parallel = true);

struct FiniteGroundState {
  int N = 0;
  int d = 2;
  Boundary bc = Boundary::Periodic;
  double energy = 0.0;
  double gap = 0.0;
  CVector psi;
  bool degenerate = false;
};

double default_degeneracy_tol(double e0);

FiniteGroundState ground_state(const ModelSpec& spec, int N, Boundary bc = Boundary::Periodic,
                               std::optional<double> degeneracy_tol = std::nullopt);

// Looks in `dir` (or $ENTANGLE_CACHE_DIR when dir is empty) before solving;
// stores the result there afterwards. No caching when neither is set.
FiniteGroundState cached_ground_state(const ModelSpec& spec, int N, Boundary bc = Boundary::Periodic,
                                      std::optional<double> degeneracy_tol = std::nullopt,
                                      const std::string& dir = "");

std::uint64_t ground_state_key(const ModelSpec& spec, int N, Boundary bc);

// rho_keep = Tr_rest |psi><psi|; rows follow the order of `keep`.
CMatrix partial_trace(const CVector& psi, const std::vector<int>& keep, int N, int d);

struct LanczosResult {
  double value = 0.0;
  CVector vector;
  int iterations = 0;
  bool converged = false;
};

// Lowest eigenpair, restricted to the orthogonal complement of `deflate`.
LanczosResult lanczos_lowest(const SparseCMatrix& h, const std::vector<CVector>& deflate = {},
                             std::uint64_t seed = 12345, int max_iter = 400, double tol = 1e-12);

std::string cache_dir_from_env();

}  // namespace entangle
