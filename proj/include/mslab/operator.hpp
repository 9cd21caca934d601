#pragma once

#include <memory>
#include <vector>

#include "mslab/linalg.hpp"
#include "mslab/quasiperiodic.hpp"
#include "mslab/report.hpp"

namespace mslab {

// Physical parameters of H = eps*Delta + v(theta + x.omega).
struct Model {
  int dim = 1;
  double epsilon = 0.0;
  Potential potential = Potential::sawtooth();
  Frequency freq = Frequency::golden(1);

  void validate() const;
};
using ModelPtr = std::shared_ptr<const Model>;
ModelPtr make_model(int dim, double epsilon, Potential potential, Frequency freq);

class DirichletOperator {
 public:
  const LatticeSet& domain() const { return domain_; }
  double theta() const { return theta_; }
  Side side() const { return side_; }
  double epsilon() const { return model_->epsilon; }
  const Model& model() const { return *model_; }
  const ModelPtr& model_ptr() const { return model_; }
  const linalg::Matrix& matrix() const { return H_; }
  long size() const { return H_.rows(); }
  bool diagonal() const { return model_->epsilon == 0.0; }

  std::ptrdiff_t index(const Point& p) const { return domain_.index_of(p); }
  // Principal submatrix on sub, which must be a subset of the domain.
  DirichletOperator restricted(const LatticeSet& sub) const;

 private:
  friend DirichletOperator assemble(const LatticeSet&, double, Side, const ModelPtr&);
  LatticeSet domain_{1};
  double theta_ = 0.0;
  Side side_ = Side::Right;
  ModelPtr model_;
  linalg::Matrix H_;
};

// Throws PoleOnLattice if a site's phase hits a pole of an unbounded potential.
DirichletOperator assemble(const LatticeSet& domain, double theta, Side side, const ModelPtr& model);

// Diagonal entry v(theta + x.omega) on the given side, as an extended real.
ExtendedReal site_potential(const Model& model, double theta, const Point& x, Side side);

struct Spectrum {
  linalg::Vector values;   // ascending
  linalg::Matrix vectors;  // orthonormal columns, largest entry of each positive
};

Spectrum spectrum(const DirichletOperator& op);
linalg::Vector eigenvalues(const DirichletOperator& op);
linalg::Vector eigenvalues(const linalg::Matrix& symmetric);

struct GreensFunction {
  double energy = 0.0;
  linalg::Matrix entries;
  double op_norm = 0.0;
  double dist_to_spectrum = 0.0;
};

struct ComplexGreensFunction {
  linalg::Complex energy;
  linalg::CMatrix entries;
  double op_norm = 0.0;
  double dist_to_spectrum = 0.0;
};

GreensFunction greens(const DirichletOperator& op, double E_star);
ComplexGreensFunction greens(const DirichletOperator& op, linalg::Complex E_star);

// 1/2 |ln eps|, and +inf for eps = 0.
double gamma0(double epsilon);

// Worst entry of |G(x,y)| e^{gamma |x-y|_1} over pairs with |x-y|_1 >= min_dist,
// in log space: margin = -max(ln|G(x,y)| + gamma |x-y|_1).
struct DecayCheck {
  double margin = 0.0;  // +inf when every tested entry is exactly zero
  long pairs_tested = 0;
  Point worst_x, worst_y;
  bool holds() const { return margin >= 0.0; }
};

DecayCheck check_decay(const linalg::Matrix& G, const LatticeSet& domain, double gamma, double min_dist);
DecayCheck check_decay(const linalg::CMatrix& G, const LatticeSet& domain, double gamma, double min_dist);

struct NonresonantReport {
  bool nonresonant = false;     // Lambda avoids S_0(theta, E)
  bool energy_close = false;    // |E - E*| < delta0 / 5
  double neumann_ratio = 0.0;   // 4 d eps / delta0
  bool neumann_small = false;   // neumann_ratio <= 1/2
  double norm = 0.0;
  BoundCheck norm_check;        // |G| <= 10 / delta0, margin = 10/delta0 - |G|
  BoundCheck decay_check;       // log-space margin from check_decay
  DecayCheck decay;

  bool premise_ok() const { return nonresonant && energy_close && neumann_small; }
};

NonresonantReport check_nonresonant_bounds(const DirichletOperator& op, double E, double E_star,
                                           double delta0, double gamma0_value);
NonresonantReport check_nonresonant_bounds(const DirichletOperator& op, double E, linalg::Complex E_star,
                                           double delta0, double gamma0_value);

}  // namespace mslab
