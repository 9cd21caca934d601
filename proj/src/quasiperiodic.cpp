#include "mslab/quasiperiodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mslab/error.hpp"

namespace mslab {

std::string to_string(Side side) { return side == Side::Right ? "right" : "left"; }

double ExtendedReal::value() const {
  if (kind_ != Kind::Finite)
    fail(ErrorCode::SentinelArithmetic, "finite value requested from an infinite sentinel");
  return v_;
}

double ExtendedReal::as_double() const {
  switch (kind_) {
    case Kind::NegInf: return -std::numeric_limits<double>::infinity();
    case Kind::PosInf: return std::numeric_limits<double>::infinity();
    case Kind::Finite: break;
  }
  return v_;
}

ExtendedReal operator-(const ExtendedReal& a, const ExtendedReal& b) {
  if (!a.finite() || !b.finite())
    fail(ErrorCode::SentinelArithmetic, "subtraction involving an infinite sentinel");
  return ExtendedReal(a.v_ - b.v_);
}

ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b) {
  if (!a.finite() || !b.finite())
    fail(ErrorCode::SentinelArithmetic, "addition involving an infinite sentinel");
  return ExtendedReal(a.v_ + b.v_);
}

double reduce_phase(double theta) {
  if (!std::isfinite(theta)) fail(ErrorCode::Domain, "non-finite phase");
  double t = theta - std::floor(theta);
  if (t < kPhaseSnap || t > 1.0 - kPhaseSnap) return 0.0;
  return t;
}

Potential Potential::sawtooth() {
  Potential v;
  v.family_ = Family::Sawtooth;
  v.bound_ = Boundedness::BLM;
  v.lipschitz_ = 1.0;
  return v;
}

Potential Potential::maryland() {
  Potential v;
  v.family_ = Family::Maryland;
  v.bound_ = Boundedness::UBLM;
  // d/dt(-cot(pi t)) = pi / sin^2(pi t) >= pi.
  v.lipschitz_ = std::numbers::pi;
  return v;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::Domain, what);
}

constexpr double kNormalizationTol = 1e-12;

}  // namespace

Potential Potential::piecewise_linear(std::vector<double> breakpoints, std::vector<double> values,
                                      std::vector<double> slopes) {
  const std::size_t K = breakpoints.size();
  require(K >= 1 && values.size() == K && slopes.size() == K,
          "piecewise_linear: breakpoints, values and slopes must have equal nonzero length");
  require(breakpoints.front() == 0.0, "piecewise_linear: first breakpoint must be 0");
  require(breakpoints.back() < 1.0, "piecewise_linear: breakpoints must lie in [0,1)");
  for (std::size_t k = 0; k + 1 < K; ++k)
    require(breakpoints[k] < breakpoints[k + 1], "piecewise_linear: breakpoints must increase");
  for (double s : slopes) require(s > 0.0, "piecewise_linear: slopes must be positive");

  Potential v;
  v.family_ = Family::PiecewiseLinear;
  v.bound_ = Boundedness::BLM;
  v.xs_ = std::move(breakpoints);
  v.vs_ = std::move(values);
  v.slopes_ = std::move(slopes);
  v.lipschitz_ = *std::min_element(v.slopes_.begin(), v.slopes_.end());

  for (std::size_t k = 1; k < K; ++k) {
    const double left = v.vs_[k - 1] + v.slopes_[k - 1] * (v.xs_[k] - v.xs_[k - 1]);
    const double jump = v.vs_[k] - left;
    require(jump >= 0.0, "piecewise_linear: downward jump at interior breakpoint " +
                             std::to_string(v.xs_[k]));
    if (jump > 0.0) v.breaks_.push_back(v.xs_[k]);
  }
  const double end = v.vs_[K - 1] + v.slopes_[K - 1] * (1.0 - v.xs_[K - 1]);
  require(std::abs(v.vs_[0]) <= kNormalizationTol && std::abs(end - 1.0) <= kNormalizationTol,
          "piecewise_linear: bounded family must satisfy v(0)=0 and v(1-0)=1");
  return v;
}

Potential Potential::tabulated(std::vector<double> thetas, std::vector<double> values) {
  const std::size_t n = thetas.size();
  require(n >= 2 && values.size() == n, "tabulated: need at least two samples");
  require(thetas.front() == 0.0 && thetas.back() == 1.0, "tabulated: samples must span [0,1]");
  double lip = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    require(thetas[i] < thetas[i + 1], "tabulated: sample abscissae must increase");
    require(values[i] < values[i + 1], "tabulated: samples must be strictly increasing");
    lip = std::min(lip, (values[i + 1] - values[i]) / (thetas[i + 1] - thetas[i]));
  }
  require(std::abs(values.front()) <= kNormalizationTol &&
              std::abs(values.back() - 1.0) <= kNormalizationTol,
          "tabulated: bounded family must satisfy v(0)=0 and v(1-0)=1");
  Potential v;
  v.family_ = Family::Tabulated;
  v.bound_ = Boundedness::BLM;
  v.xs_ = std::move(thetas);
  v.vs_ = std::move(values);
  v.lipschitz_ = lip;
  return v;
}

std::string Potential::name() const {
  switch (family_) {
    case Family::Sawtooth: return "sawtooth";
    case Family::Maryland: return "maryland";
    case Family::PiecewiseLinear: return "piecewise_linear";
    case Family::Tabulated: return "tabulated";
  }
  return "unknown";
}

ExtendedReal Potential::eval(double theta, Side side) const {
  double t = reduce_phase(theta);
  for (std::size_t k = 1; k < breaks_.size(); ++k)
    if (std::abs(t - breaks_[k]) < kPhaseSnap) t = breaks_[k];
  return eval_reduced(t, side == Side::Left);
}

ExtendedReal Potential::eval_reduced(double t, bool left) const {
  switch (family_) {
    case Family::Sawtooth:
      return (t == 0.0 && left) ? 1.0 : t;

    case Family::Maryland: {
      if (t == 0.0) return left ? ExtendedReal::pos_inf() : ExtendedReal::neg_inf();
      const double pi = std::numbers::pi;
      if (t <= 0.5) return -std::cos(pi * t) / std::sin(pi * t);
      const double u = 1.0 - t;  // exact for t in [1/2, 1)
      return std::cos(pi * u) / std::sin(pi * u);
    }

    case Family::PiecewiseLinear: {
      const std::size_t K = xs_.size();
      if (t == 0.0 && left) return vs_[K - 1] + slopes_[K - 1] * (1.0 - xs_[K - 1]);
      auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
      std::size_t k = static_cast<std::size_t>(it - xs_.begin()) - 1;
      if (left && k > 0 && t == xs_[k]) --k;
      return vs_[k] + slopes_[k] * (t - xs_[k]);
    }

    case Family::Tabulated: {
      if (t == 0.0) return left ? vs_.back() : vs_.front();
      auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
      const std::size_t k = static_cast<std::size_t>(it - xs_.begin()) - 1;
      const double w = (t - xs_[k]) / (xs_[k + 1] - xs_[k]);
      return vs_[k] + w * (vs_[k + 1] - vs_[k]);
    }
  }
  return 0.0;
}

double Frequency::dot(const Point& x) const {
  if (x.dim() != dim()) fail(ErrorCode::Domain, "frequency and point dimensions differ");
  double s = 0.0;
  for (int i = 0; i < x.dim(); ++i) s += static_cast<double>(x[i]) * omega[static_cast<std::size_t>(i)];
  return s;
}

Frequency Frequency::golden(int dim) {
  check_dimension(dim);
  Frequency f;
  switch (dim) {
    case 1: f.omega = {(std::sqrt(5.0) - 1.0) / 2.0}; break;
    case 2: f.omega = {std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0}; break;
    default: f.omega = {std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0, std::sqrt(5.0) - 2.0}; break;
  }
  f.tau = static_cast<double>(dim) + 1.0;
  return f;
}

double torus_norm(const Point& x, const Frequency& freq) {
  const double s = freq.dot(x);
  return std::abs(s - std::nearbyint(s));
}

double estimate_dc_constant(const Frequency& freq, int N) {
  if (N < 1) fail(ErrorCode::Domain, "estimate_dc_constant: N must be positive");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : cube(N, freq.dim())) {
    const long n = x.norm1();
    if (n == 0) continue;
    const double tn = torus_norm(x, freq);
    if (tn == 0.0) fail(ErrorCode::RationalFrequency, "x.omega is an integer at x = " + x.str());
    best = std::min(best, tn * std::pow(static_cast<double>(n), freq.tau));
  }
  return best;
}

Frequency with_estimated_gamma(Frequency freq, int N) {
  freq.gamma = estimate_dc_constant(freq, N);
  freq.provenance = Frequency::Provenance::EmpiricallyEstimated;
  freq.estimate_radius = N;
  return freq;
}

bool satisfies_dc(const Point& x, const Frequency& freq) {
  const long n = x.norm1();
  if (n == 0) return true;
  return torus_norm(x, freq) * std::pow(static_cast<double>(n), freq.tau) >= freq.gamma;
}

}  // namespace mslab
