#include "entangle/spin.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "entangle/errors.hpp"

namespace entangle {

SpinOperators build_spin_operators(int d) {
  SpinOperators s;
  s.d = d;
  if (d == 2) {
    s.sx = CMatrix::Zero(2, 2);
    s.sy = CMatrix::Zero(2, 2);
    s.sz = CMatrix::Zero(2, 2);
    s.sx(0, 1) = s.sx(1, 0) = 1.0;
    s.sy(0, 1) = -kI;
    s.sy(1, 0) = kI;
    s.sz(0, 0) = 1.0;
    s.sz(1, 1) = -1.0;
    return s;
  }
  if (d == 3) {
    const double r = 1.0 / std::sqrt(2.0);
    s.sx = CMatrix::Zero(3, 3);
    s.sy = CMatrix::Zero(3, 3);
    s.sz = CMatrix::Zero(3, 3);
    s.sx(0, 1) = s.sx(1, 0) = s.sx(1, 2) = s.sx(2, 1) = r;
    s.sy(0, 1) = s.sy(1, 2) = -kI * r;
    s.sy(1, 0) = s.sy(2, 1) = kI * r;
    s.sz(0, 0) = 1.0;
    s.sz(2, 2) = -1.0;
    return s;
  }
  throw UnsupportedDimension("local dimension must be 2 or 3, got " + std::to_string(d));
}

std::string model_name(Model m) {
  switch (m) {
    case Model::TransverseIsing: return "ising";
    case Model::XYZ: return "xyz";
    case Model::XXZ: return "xxz";
    case Model::Spin1IsingSIA: return "spin1";
  }
  return "?";
}

Model parse_model(const std::string& name) {
  if (name == "ising" || name == "TransverseIsing" || name == "transverse_ising")
    return Model::TransverseIsing;
  if (name == "xyz" || name == "XYZ") return Model::XYZ;
  if (name == "xxz" || name == "XXZ") return Model::XXZ;
  if (name == "spin1" || name == "Spin1IsingSIA" || name == "spin1_sia") return Model::Spin1IsingSIA;
  throw InvalidArgument("unknown model '" + name + "'");
}

ModelSpec ModelSpec::transverse_ising(double jx, double h) {
  ModelSpec s;
  s.model = Model::TransverseIsing;
  s.jx = jx;
  s.h = h;
  return s;
}

ModelSpec ModelSpec::xyz(double j, double gamma, double delta) {
  ModelSpec s;
  s.model = Model::XYZ;
  s.j = j;
  s.gamma = gamma;
  s.delta = delta;
  return s.normalized();
}

ModelSpec ModelSpec::xxz(double j, double delta) {
  ModelSpec s;
  s.model = Model::XXZ;
  s.j = j;
  s.delta = delta;
  return s.normalized();
}

ModelSpec ModelSpec::spin1_sia(double jz, double k) {
  ModelSpec s;
  s.model = Model::Spin1IsingSIA;
  s.jz = jz;
  s.k = k;
  return s;
}

int ModelSpec::local_dim() const { return model == Model::Spin1IsingSIA ? 3 : 2; }

ModelSpec ModelSpec::normalized() const {
  ModelSpec s = *this;
  switch (model) {
    case Model::TransverseIsing:
      s.jy = s.delta = 0.0;
      break;
    case Model::XXZ:
      s.gamma = 0.0;
      [[fallthrough]];
    case Model::XYZ:
      s.jx = s.j + s.gamma;
      s.jy = s.j - s.gamma;
      s.h = 0.0;
      break;
    case Model::Spin1IsingSIA:
      break;
  }
  return s;
}

void ModelSpec::validate() const {
  const double eps = 1e-12;
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(finite(jx) && finite(jy) && finite(delta) && finite(h) && finite(gamma) && finite(j) &&
        finite(jz) && finite(k)))
    throw InvalidArgument("model couplings must be finite");
  switch (model) {
    case Model::TransverseIsing:
      if (std::abs(jy) > eps || std::abs(delta) > eps)
        throw InvalidArgument("transverse Ising requires jy = delta = 0");
      break;
    case Model::XXZ:
      if (std::abs(gamma) > eps) throw InvalidArgument("XXZ requires gamma = 0");
      [[fallthrough]];
    case Model::XYZ:
      if (std::abs(h) > eps) throw InvalidArgument("XYZ requires h = 0");
      if (std::abs(jx - (j + gamma)) > eps || std::abs(jy - (j - gamma)) > eps)
        throw InvalidArgument("XYZ requires jx = j + gamma and jy = j - gamma");
      break;
    case Model::Spin1IsingSIA:
      break;
  }
}

std::string ModelSpec::key() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s|jx=%.17g|jy=%.17g|delta=%.17g|h=%.17g|gamma=%.17g|j=%.17g|jz=%.17g|k=%.17g",
                model_name(model).c_str(), jx, jy, delta, h, gamma, j, jz, k);
  return buf;
}

ModelTerms model_terms(const ModelSpec& spec) {
  spec.validate();
  const int d = spec.local_dim();
  const auto s = build_spin_operators(d);
  ModelTerms t;
  t.d = d;
  switch (spec.model) {
    case Model::TransverseIsing:
      t.couplings.push_back({spec.jx, s.sx, s.sx});
      t.fields.push_back({spec.h, s.sz});
      break;
    case Model::XYZ:
    case Model::XXZ:
      t.couplings.push_back({spec.jx, s.sx, s.sx});
      t.couplings.push_back({spec.jy, s.sy, s.sy});
      t.couplings.push_back({spec.delta, s.sz, s.sz});
      if (spec.h != 0.0) t.fields.push_back({spec.h, s.sz});
      break;
    case Model::Spin1IsingSIA:
      t.couplings.push_back({spec.jz, s.sz, s.sz});
      t.fields.push_back({spec.k, s.sx * s.sx});
      break;
  }
  return t;
}

BondHamiltonian build_bond_hamiltonian(const ModelSpec& spec) {
  const auto t = model_terms(spec);
  const int d = t.d;
  const CMatrix id = CMatrix::Identity(d, d);
  BondHamiltonian hb;
  hb.d = d;
  hb.hbond = CMatrix::Zero(d * d, d * d);
  for (const auto& c : t.couplings) hb.hbond += c.coef * kron(c.a, c.b);
  for (const auto& f : t.fields) hb.hbond += 0.5 * f.coef * (kron(f.op, id) + kron(id, f.op));
  return hb;
}

CMatrix build_gate(const BondHamiltonian& hb, double tau) {
  if (tau < 0.0) throw InvalidArgument("tau must be non-negative");
  if (hermiticity_error(hb.hbond) > 1e-12) throw NotHermitian("bond Hamiltonian is not Hermitian");
  if (tau == 0.0) return CMatrix::Identity(hb.hbond.rows(), hb.hbond.cols());
  return hermitian_exp(hb.hbond, -tau);
}

std::vector<CMatrix> onsite_symmetry_group(const ModelSpec& spec) {
  const int d = spec.local_dim();
  const auto s = build_spin_operators(d);
  const CMatrix id = CMatrix::Identity(d, d);
  switch (spec.model) {
    case Model::TransverseIsing:
      return {id, s.sz};
    case Model::XYZ:
      if (spec.h != 0.0) return {id, s.sz};
      return {id, s.sx, s.sy, s.sz};
    case Model::XXZ: {
      // U(1) about z sampled at 8 angles, times the spin flip. Averaging over
      // it kills every coherence between blocks whose magnetizations differ
      // by 1..7 flips, so it is the full rotation average for blocks of up
      // to 7 sites.
      std::vector<CMatrix> g;
      for (int flip = 0; flip < (spec.h != 0.0 ? 1 : 2); ++flip)
        for (int k = 0; k < 8; ++k) {
          CMatrix r = CMatrix::Zero(2, 2);
          r(0, 0) = 1.0;
          r(1, 1) = std::polar(1.0, 2.0 * std::numbers::pi * k / 8.0);
          g.push_back(flip ? CMatrix(r * s.sx) : r);
        }
      return g;
    }
    case Model::Spin1IsingSIA: {
      // pi rotations about each axis
      return {id, id - 2.0 * s.sx * s.sx, id - 2.0 * s.sy * s.sy, id - 2.0 * s.sz * s.sz};
    }
  }
  return {id};
}

}  // namespace entangle
