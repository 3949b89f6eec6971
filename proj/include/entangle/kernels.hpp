#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "entangle/linalg.hpp"
#include "entangle/spin.hpp"

// Hot loops in two flavours: a plain serial reference and an OpenMP version.
// Both produce identical results; the serial one is what the tests compare
// against.
namespace entangle::kernels {

using SparseCMatrix = Eigen::SparseMatrix<cplx>;

// Coefficient matrix psi[(subset digits), (rest digits)], subset order kept.
CMatrix bipartite_matrix(const CVector& psi, int N, int d, const std::vector<int>& subset);

double lambda_max_sq(const CVector& psi, int N, int d, const std::vector<int>& subset);

std::vector<double> subset_scan_serial(const CVector& psi, int N, int d, const std::vector<std::vector<int>>& subsets);
std::vector<double> subset_scan_omp(const CVector& psi, int N, int d, const std::vector<std::vector<int>>& subsets);

CMatrix partial_trace_serial(const CVector& psi, int N, int d, const std::vector<int>& keep);
CMatrix partial_trace_omp(const CVector& psi, int N, int d, const std::vector<int>& keep);

SparseCMatrix assemble_serial(const ModelTerms& terms, int N, Boundary bc);
SparseCMatrix assemble_omp(const ModelTerms& terms, int N, Boundary bc);

std::vector<std::pair<int, int>> bonds(int N, Boundary bc);

}  // namespace entangle::kernels
