#include "mslab/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "mslab/error.hpp"

namespace mslab {

void check_dimension(int d) {
  if (d < 1 || d > kMaxDimension)
    fail(ErrorCode::Domain, "dimension must be in [1, 3], got " + std::to_string(d));
}

Point::Point(int dim) : dim_(dim) { check_dimension(dim); }

Point::Point(std::initializer_list<long> coords) : dim_(static_cast<int>(coords.size())) {
  check_dimension(dim_);
  std::copy(coords.begin(), coords.end(), c_.begin());
}

Point Point::from(const std::vector<long>& coords) {
  Point p(static_cast<int>(coords.size()));
  std::copy(coords.begin(), coords.end(), p.c_.begin());
  return p;
}

long Point::norm1() const {
  long s = 0;
  for (int i = 0; i < dim_; ++i) s += std::labs(c_[static_cast<std::size_t>(i)]);
  return s;
}

std::string Point::str() const {
  std::string out = "(";
  for (int i = 0; i < dim_; ++i) {
    if (i) out += ",";
    out += std::to_string(c_[static_cast<std::size_t>(i)]);
  }
  return out + ")";
}

Point operator+(const Point& a, const Point& b) {
  Point r = a;
  for (int i = 0; i < a.dim_; ++i) r[i] += b[i];
  return r;
}

Point operator-(const Point& a, const Point& b) {
  Point r = a;
  for (int i = 0; i < a.dim_; ++i) r[i] -= b[i];
  return r;
}

Point operator-(const Point& a) {
  Point r = a;
  for (int i = 0; i < a.dim_; ++i) r[i] = -r[i];
  return r;
}

bool operator==(const Point& a, const Point& b) { return a.dim_ == b.dim_ && a.c_ == b.c_; }

bool operator<(const Point& a, const Point& b) {
  if (a.dim_ != b.dim_) return a.dim_ < b.dim_;
  return a.c_ < b.c_;
}

long dist1(const Point& a, const Point& b) { return (a - b).norm1(); }

LatticeSet::LatticeSet(int dim) : dim_(dim) { check_dimension(dim); }

LatticeSet::LatticeSet(int dim, std::vector<Point> points) : dim_(dim), pts_(std::move(points)) {
  check_dimension(dim);
  for (const auto& p : pts_)
    if (p.dim() != dim) fail(ErrorCode::Domain, "point " + p.str() + " has wrong dimension");
  std::sort(pts_.begin(), pts_.end());
  pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
}

bool LatticeSet::contains(const Point& p) const {
  return std::binary_search(pts_.begin(), pts_.end(), p);
}

std::ptrdiff_t LatticeSet::index_of(const Point& p) const {
  auto it = std::lower_bound(pts_.begin(), pts_.end(), p);
  if (it == pts_.end() || *it != p) return -1;
  return it - pts_.begin();
}

LatticeSet LatticeSet::translated(const Point& shift) const {
  LatticeSet r(dim_);
  r.pts_.reserve(pts_.size());
  // Translation preserves lexicographic order.
  for (const auto& p : pts_) r.pts_.push_back(p + shift);
  return r;
}

LatticeSet LatticeSet::without(const Point& p) const {
  LatticeSet r(dim_);
  r.pts_.reserve(pts_.size());
  for (const auto& q : pts_)
    if (q != p) r.pts_.push_back(q);
  return r;
}

bool LatticeSet::subset_of(const LatticeSet& other) const {
  return std::includes(other.pts_.begin(), other.pts_.end(), pts_.begin(), pts_.end());
}

namespace {

void same_dim(const LatticeSet& a, const LatticeSet& b) {
  if (a.dim() != b.dim()) fail(ErrorCode::Domain, "lattice sets of different dimension");
}

}  // namespace

LatticeSet set_union(const LatticeSet& a, const LatticeSet& b) {
  same_dim(a, b);
  std::vector<Point> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return LatticeSet(a.dim(), std::move(out));
}

LatticeSet set_difference(const LatticeSet& a, const LatticeSet& b) {
  same_dim(a, b);
  std::vector<Point> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return LatticeSet(a.dim(), std::move(out));
}

LatticeSet set_intersection(const LatticeSet& a, const LatticeSet& b) {
  same_dim(a, b);
  std::vector<Point> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return LatticeSet(a.dim(), std::move(out));
}

LatticeSet cube(long L, const Point& center) {
  if (L < 0) fail(ErrorCode::Domain, "cube radius must be nonnegative");
  const int d = center.dim();
  check_dimension(d);
  std::vector<Point> pts;
  pts.reserve(cube_cardinality(L, d));
  Point p(d);
  // Enumerate in lexicographic order directly; coordinate i ranges over what
  // the remaining l1 budget allows.
  auto rec = [&](auto&& self, int i, long budget) -> void {
    if (i == d) {
      pts.push_back(p + center);
      return;
    }
    for (long c = -budget; c <= budget; ++c) {
      p[i] = c;
      self(self, i + 1, budget - std::labs(c));
    }
    p[i] = 0;
  };
  rec(rec, 0, L);
  return LatticeSet(d, std::move(pts));
}

std::uint64_t cube_cardinality(long L, int dim) {
  check_dimension(dim);
  if (L < 0) return 0;
  // |Q_L| in Z^d = sum_k 2^k C(d,k) C(L,k).
  std::uint64_t total = 0;
  std::uint64_t binom_d = 1;
  for (int k = 0; k <= dim; ++k) {
    if (k > 0) binom_d = binom_d * static_cast<std::uint64_t>(dim - k + 1) / static_cast<std::uint64_t>(k);
    std::uint64_t binom_L = 1;
    for (int j = 0; j < k; ++j) {
      binom_L = binom_L * static_cast<std::uint64_t>(L - j) / static_cast<std::uint64_t>(j + 1);
    }
    if (k > L) binom_L = 0;
    total += (std::uint64_t{1} << k) * binom_d * binom_L;
  }
  return total;
}

std::vector<Point> neighbours(const Point& p) {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(2 * p.dim()));
  for (int i = 0; i < p.dim(); ++i) {
    Point a = p;
    a[i] -= 1;
    out.push_back(a);
    Point b = p;
    b[i] += 1;
    out.push_back(b);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Boundaries boundaries(const LatticeSet& X, const LatticeSet& Y) {
  same_dim(X, Y);
  if (!X.subset_of(Y)) fail(ErrorCode::Domain, "boundaries: X is not a subset of Y");
  std::vector<Point> inner;
  std::vector<Point> outer;
  std::vector<BoundaryPair> pairs;
  for (const auto& x : X) {
    bool on_boundary = false;
    for (const auto& y : neighbours(x)) {
      if (Y.contains(y) && !X.contains(y)) {
        pairs.push_back({x, y});
        outer.push_back(y);
        on_boundary = true;
      }
    }
    if (on_boundary) inner.push_back(x);
  }
  const int d = X.dim();
  return {LatticeSet(d, std::move(inner)), LatticeSet(d, std::move(outer)), std::move(pairs)};
}

LatticeSet dilate(const LatticeSet& B, long R) {
  if (R < 0) fail(ErrorCode::Domain, "dilation radius must be nonnegative");
  std::vector<Point> all(B.points());
  std::vector<Point> frontier(B.points());
  LatticeSet seen = B;
  for (long r = 0; r < R && !frontier.empty(); ++r) {
    std::vector<Point> next;
    for (const auto& p : frontier)
      for (const auto& q : neighbours(p)) next.push_back(q);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    std::vector<Point> fresh;
    std::set_difference(next.begin(), next.end(), seen.begin(), seen.end(), std::back_inserter(fresh));
    seen = set_union(seen, LatticeSet(B.dim(), fresh));
    frontier = std::move(fresh);
  }
  return seen;
}

long dist1(const Point& p, const LatticeSet& Y) {
  if (Y.empty()) fail(ErrorCode::Domain, "dist1 of an empty set");
  long best = std::numeric_limits<long>::max();
  for (const auto& y : Y) best = std::min(best, dist1(p, y));
  return best;
}

long dist1(const LatticeSet& X, const LatticeSet& Y) {
  if (X.empty() || Y.empty()) fail(ErrorCode::Domain, "dist1 of an empty set");
  long best = std::numeric_limits<long>::max();
  for (const auto& x : X) {
    for (const auto& y : Y) {
      best = std::min(best, dist1(x, y));
      if (best == 0) return 0;
    }
  }
  return best;
}

}  // namespace mslab
