#pragma once

#include <cstdint>
#include <vector>

#include "mslab/exec.hpp"
#include "mslab/msa.hpp"
#include "mslab/operator.hpp"

namespace mslab {

struct EigenSystem {
  DirichletOperator op;
  linalg::Vector values;    // ascending
  linalg::Matrix vectors;   // column s is psi_s
  std::vector<long> centre_index;  // argmax_x |psi_s(x)|, first index on ties

  const LatticeSet& box() const { return op.domain(); }
  double theta() const { return op.theta(); }
  long size() const { return op.size(); }
  const Point& centre(long s) const { return box()[static_cast<std::size_t>(centre_index[static_cast<std::size_t>(s)])]; }
};

EigenSystem diagonalize(const LatticeSet& box, double theta, const ModelPtr& model, Side side = Side::Right);
inline EigenSystem diagonalize_box(long L, double theta, const ModelPtr& model) {
  return diagonalize(cube(L, model->dim), theta, model);
}

struct EigenSystemCheck {
  double orthonormality = 0.0;  // max |Psi^T Psi - I|
  double residual = 0.0;        // max_s |H psi_s - mu_s psi_s| / |H|
  bool ok() const { return orthonormality <= 1e-9 && residual <= 1e-9; }
};
EigenSystemCheck check_eigensystem(const EigenSystem& sys);

struct DecayFit {
  double rate = 0.0;       // rho in |psi(x)| ~ C e^{-rho |x - x_s|_1}
  double prefactor = 0.0;  // C
  double r_squared = 0.0;
  long samples_used = 0;
  long near_excluded = 0;
};

struct DecayOptions {
  double floor = 1e-14;
  double near_fraction = 0.1;  // nearest share of the usable samples left out
};

// Least squares of ln|psi| against distance. Throws InsufficientDecaySamples
// below four usable points.
DecayFit fit_decay(const std::vector<double>& distance, const std::vector<double>& magnitude,
                   const DecayOptions& options = {});
DecayFit decay_profile(const linalg::Vector& psi, const LatticeSet& box, const Point& centre,
                       const DecayOptions& options = {});
DecayFit decay_profile(const EigenSystem& sys, long s, const DecayOptions& options = {});

struct ProfileRow {
  long s = 0;
  double mu = 0.0;
  Point centre;
  bool fitted = false;
  DecayFit fit;
};
std::vector<ProfileRow> decay_profiles(const EigenSystem& sys, const DecayOptions& options = {},
                                       Exec exec = Exec::Parallel);

// |psi(x) - (-eps) sum_{(w, w')} G_U(x, w) psi(w')| over the boundary pairs of U in
// the operator's domain. U equal to the domain throws DegenerateSubset.
double poisson_residual(const DirichletOperator& op, const linalg::Vector& psi, double E, const LatticeSet& U,
                        const Point& x);

struct EdlValue {
  Point x, y;
  long distance = 0;
  double sup_sampled = 0.0;  // max_t |<e^{itH} e_x, e_y>|
  double abs_sum = 0.0;      // sum_s |psi_s(x)| |psi_s(y)|
  double spectral_bound = 0.0;
  double worst_pointwise = 0.0;  // max_t |<e^{itH} e_x, e_y>| - abs_sum
};

EdlValue edl_kernel(const EigenSystem& sys, const Point& x, const Point& y, const std::vector<double>& t_samples);
std::vector<EdlValue> edl_table(const EigenSystem& sys, const std::vector<std::pair<Point, Point>>& pairs,
                                const std::vector<double>& t_samples, Exec exec = Exec::Parallel);

// <e^{itH} e_x, e_y> for every y of the box.
linalg::CVector propagator_row(const EigenSystem& sys, const Point& x, double t);

// n logarithmically spaced times in [t_min, t_max] containing both ends.
std::vector<double> log_spaced_times(double t_min, double t_max, std::size_t n);

struct AnnulusReport {
  LatticeSet base{1};   // Q_{98 l_{n+1}} minus Q_{80 l_n}
  LatticeSet annulus{1};
  GoodnessReport goodness;
  bool regularize_ok = true;  // 30 l_n sandwich and regularity
  bool separation_ok = true;  // false: S_k too dense to extend, annulus left at base
  bool sandwich_ok = true;    // base within annulus within Q_{99 l_{n+1}} minus Q_{50 l_n}
  bool window_clear = true;   // (Q_{99 l_{n+1}} minus Q_{50 l_n}) avoids S_n
  bool centre_resonant = false;  // S_n meets Q_{50 l_n}
  std::vector<Point> window_resonances;
};

AnnulusReport annulus_probe(int n, double theta, linalg::Complex E, const RellichEngine& engine,
                            Exec exec = Exec::Parallel);

}  // namespace mslab
