#include "entangle/references.hpp"

#include <cmath>

#include "entangle/errors.hpp"

namespace entangle {

namespace {

CMatrix sigma_plus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

CMatrix sigma_minus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

CMatrix sigma_x() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

void check_n(int N) {
  if (N < 2 || N > 24) throw InvalidArgument("reference state size must lie in [2, 24]");
}

}  // namespace

CVector ghz_state(int N) {
  check_n(N);
  CVector v = CVector::Zero(ipow(2, N));
  v(0) = v(v.size() - 1) = 1.0 / std::sqrt(2.0);
  return v;
}

CVector w_state(int N) {
  check_n(N);
  CVector v = CVector::Zero(ipow(2, N));
  for (int s = 0; s < N; ++s) v(ipow(2, N - 1 - s)) = 1.0 / std::sqrt(static_cast<double>(N));
  return v;
}

std::vector<CMatrix> ghz_mps_tensors() { return {sigma_plus() * sigma_x(), sigma_minus() * sigma_x()}; }

std::vector<CMatrix> aklt_mps_tensors() {
  CMatrix z = CMatrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return {z, std::sqrt(2.0) * sigma_plus(), -std::sqrt(2.0) * sigma_minus()};
}

std::vector<std::vector<CMatrix>> w_state_mps(int N) {
  check_n(N);
  std::vector<std::vector<CMatrix>> sites(N, {CMatrix::Identity(2, 2), sigma_plus()});
  sites.back() = {sigma_x(), sigma_plus() * sigma_x()};
  return sites;
}

CVector contract_ring(const std::vector<std::vector<CMatrix>>& sites) {
  const int N = static_cast<int>(sites.size());
  if (N < 1) throw ShapeError("empty chain");
  const int d = static_cast<int>(sites.front().size());
  const auto D = sites.front().front().rows();
  std::vector<CMatrix> partial{CMatrix::Identity(D, D)};
  for (const auto& site : sites) {
    if (static_cast<int>(site.size()) != d) throw ShapeError("sites differ in local dimension");
    std::vector<CMatrix> next;
    next.reserve(partial.size() * d);
    for (const auto& p : partial)
      for (const auto& a : site) next.push_back(p * a);
    partial = std::move(next);
  }
  CVector v(static_cast<Eigen::Index>(partial.size()));
  for (std::size_t i = 0; i < partial.size(); ++i) v(static_cast<Eigen::Index>(i)) = partial[i].trace();
  return v;
}

CVector contract_ring(const std::vector<CMatrix>& a, int N) {
  return contract_ring(std::vector<std::vector<CMatrix>>(N, a));
}

ReferenceState make_reference(ReferenceName name, int N) {
  ReferenceState r;
  r.name = name;
  r.N = N;
  switch (name) {
    case ReferenceName::GHZ:
      r.vector = ghz_state(N);
      r.tensors = ghz_mps_tensors();
      break;
    case ReferenceName::W:
      r.vector = w_state(N);
      r.site_tensors = w_state_mps(N);
      break;
    case ReferenceName::AKLT_iMPS:
      r.tensors = aklt_mps_tensors();
      break;
    case ReferenceName::GHZ_iMPS:
      r.tensors = ghz_mps_tensors();
      break;
  }
  return r;
}

}  // namespace entangle
