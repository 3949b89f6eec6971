#pragma once

#include <string>
#include <vector>

#include "entangle/linalg.hpp"

namespace entangle {

struct SpinOperators {
  int d = 2;
  CMatrix sx, sy, sz;
};

// Pauli matrices for d=2, S=1 matrices (sz = diag(1,0,-1)) for d=3.
SpinOperators build_spin_operators(int d);

enum class Model { TransverseIsing, XYZ, XXZ, Spin1IsingSIA };

enum class Boundary { Periodic, Open };

std::string model_name(Model m);
Model parse_model(const std::string& name);

struct ModelSpec {
  Model model = Model::TransverseIsing;
  double jx = 1.0;
  double jy = 0.0;
  double delta = 0.0;
  double h = 0.0;
  double gamma = 0.0;
  double j = 1.0;
  double jz = 1.0;
  double k = 0.0;

  static ModelSpec transverse_ising(double jx, double h);
  static ModelSpec xyz(double j, double gamma, double delta);
  static ModelSpec xxz(double j, double delta);
  static ModelSpec spin1_sia(double jz, double k);

  int local_dim() const;
  // throws InvalidArgument if the couplings contradict the model
  void validate() const;
  // recompute derived couplings (jx, jy from j, gamma) after editing fields
  ModelSpec normalized() const;
  // stable text form, used for hashing and logs
  std::string key() const;
};

// H = sum_bonds sum_t coef * a (x) b  +  sum_sites sum_s coef * op
struct ModelTerms {
  int d = 2;
  struct Coupling {
    double coef;
    CMatrix a, b;
  };
  struct Field {
    double coef;
    CMatrix op;
  };
  std::vector<Coupling> couplings;
  std::vector<Field> fields;
};

ModelTerms model_terms(const ModelSpec& spec);

struct BondHamiltonian {
  int d = 2;
  CMatrix hbond;
};

BondHamiltonian build_bond_hamiltonian(const ModelSpec& spec);

// exp(-tau * hbond)
CMatrix build_gate(const BondHamiltonian& hb, double tau);

// On-site unitaries u with (u (x) u) hbond (u (x) u)^dagger = hbond, identity first.
std::vector<CMatrix> onsite_symmetry_group(const ModelSpec& spec);

}  // namespace entangle
