#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace mslab {

inline constexpr int kMaxDimension = 3;

void check_dimension(int d);

class Point {
 public:
  Point() = default;
  explicit Point(int dim);  // origin of Z^dim
  Point(std::initializer_list<long> coords);
  static Point from(const std::vector<long>& coords);

  int dim() const { return dim_; }
  long operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  long& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  long norm1() const;
  std::string str() const;

  friend Point operator+(const Point& a, const Point& b);
  friend Point operator-(const Point& a, const Point& b);
  friend Point operator-(const Point& a);
  friend bool operator==(const Point& a, const Point& b);
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
  friend bool operator<(const Point& a, const Point& b);

 private:
  std::array<long, kMaxDimension> c_{};
  int dim_ = 0;
};

long dist1(const Point& a, const Point& b);

// Finite subset of Z^d kept sorted lexicographically without duplicates.
class LatticeSet {
 public:
  explicit LatticeSet(int dim = 1);
  LatticeSet(int dim, std::vector<Point> points);  // sorts and deduplicates

  int dim() const { return dim_; }
  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  const Point& operator[](std::size_t i) const { return pts_[i]; }
  const std::vector<Point>& points() const { return pts_; }
  auto begin() const { return pts_.begin(); }
  auto end() const { return pts_.end(); }

  bool contains(const Point& p) const;
  // Position of p in the ordering, or -1.
  std::ptrdiff_t index_of(const Point& p) const;

  LatticeSet translated(const Point& shift) const;
  LatticeSet without(const Point& p) const;

  bool subset_of(const LatticeSet& other) const;

  friend bool operator==(const LatticeSet& a, const LatticeSet& b) {
    return a.dim_ == b.dim_ && a.pts_ == b.pts_;
  }

 private:
  int dim_;
  std::vector<Point> pts_;
};

LatticeSet set_union(const LatticeSet& a, const LatticeSet& b);
LatticeSet set_difference(const LatticeSet& a, const LatticeSet& b);
LatticeSet set_intersection(const LatticeSet& a, const LatticeSet& b);

// Closed l1 ball {y : |y - center|_1 <= L}.
LatticeSet cube(long L, const Point& center);
inline LatticeSet cube(long L, int dim) { return cube(L, Point(dim)); }

// Number of points in the l1 ball of radius L in Z^d.
std::uint64_t cube_cardinality(long L, int dim);

struct BoundaryPair {
  Point inner;
  Point outer;
};

struct Boundaries {
  LatticeSet inner;
  LatticeSet outer;
  std::vector<BoundaryPair> pairs;  // ordered by (inner, outer)
};

Boundaries boundaries(const LatticeSet& X, const LatticeSet& Y);

long dist1(const LatticeSet& X, const LatticeSet& Y);
long dist1(const Point& p, const LatticeSet& Y);

// {x : dist1(x, B) <= R}, by breadth-first growth on the lattice graph.
LatticeSet dilate(const LatticeSet& B, long R);

// The 2d unit neighbours of p.
std::vector<Point> neighbours(const Point& p);

}  // namespace mslab
