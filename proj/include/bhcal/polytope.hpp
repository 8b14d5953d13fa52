#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bhcal/exterior.hpp"

namespace bhcal {

/// A point of R^2, or a linear functional on R^2 (the dual plane is
/// identified with R^2 through the standard pairing).
template <Scalar T>
struct Vec2 {
  T x{}, y{};

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

template <Scalar T>
Vec2<T> operator+(const Vec2<T>& a, const Vec2<T>& b) {
  return {a.x + b.x, a.y + b.y};
}
template <Scalar T>
Vec2<T> operator-(const Vec2<T>& a, const Vec2<T>& b) {
  return {a.x - b.x, a.y - b.y};
}
template <Scalar T>
Vec2<T> operator-(const Vec2<T>& a) {
  return {-a.x, -a.y};
}
template <Scalar T>
Vec2<T> operator*(const T& s, const Vec2<T>& a) {
  return {s * a.x, s * a.y};
}
template <Scalar T>
T cross(const Vec2<T>& a, const Vec2<T>& b) {
  return a.x * b.y - a.y * b.x;
}
template <Scalar T>
T dot(const Vec2<T>& a, const Vec2<T>& b) {
  return a.x * b.x + a.y * b.y;
}

/// Centrally symmetric convex body {x : |g_j(x)| <= 1 for all j} in R^n.
///
/// Construction validates boundedness (the g_j span the dual space) and
/// removes parallel functionals: of g and c*g only the one with the larger
/// |c| survives, since the other constraint is implied.
template <Scalar T>
class SymPolytope {
 public:
  SymPolytope(std::size_t dim, std::vector<Covector<T>> facets);

  std::size_t dim() const { return dim_; }
  const std::vector<Covector<T>>& facets() const { return facets_; }

  /// max_j |g_j(x)|, the norm whose unit ball this is.
  T norm(const Vec<T>& x) const;

 private:
  std::size_t dim_;
  std::vector<Covector<T>> facets_;
};

/// Basis (u1, u2) of a 2-plane; the plane coordinates (s, t) stand for s*u1 + t*u2.
template <Scalar T>
class PlaneBasis {
 public:
  PlaneBasis(Vec<T> u1, Vec<T> u2);

  const Vec<T>& u1() const { return u1_; }
  const Vec<T>& u2() const { return u2_; }
  std::size_t dim() const { return u1_.dim(); }
  Vec<T> embed(const Vec2<T>& st) const;
  SimpleTwoVector<T> two_vector() const { return {u1_, u2_}; }

 private:
  Vec<T> u1_, u2_;
};

/// Per-edge data for the side [a_i, a_{i+1}], i = 1..n, of a symmetric 2n-gon.
template <Scalar T>
struct PolygonEdge {
  Vec2<T> v;             ///< a_{i+1} - a_i
  Vec2<T> support;       ///< f_i with f_i = 1 on the side
  T twice_triangle_area; ///< |a_i ^ a_{i+1}| = h_i * l_i
  T weight;              ///< p_i = h_i l_i / A(K)
  /// Index of the constraint that produced this side (halfplane_intersection)
  /// or of the ambient facet (section), with the sign used.
  std::optional<std::size_t> source;
  int source_sign = 1;
  std::optional<Covector<T>> ambient;  ///< F_i = +-g_j on the ambient space (section only)

  double length() const;
  double origin_distance() const;
};

/// Centrally symmetric strictly convex polygon a_1 ... a_{2n} (counterclockwise,
/// a_{i+n} = -a_i). Only the first n sides are stored; the rest follow by symmetry.
template <Scalar T>
class SymPolygon {
 public:
  /// Builds the polygon from a_1..a_n. Throws InputError unless the full
  /// cycle is counterclockwise and strictly convex.
  static SymPolygon from_half_vertices(std::vector<Vec2<T>> half);

  std::size_t n() const { return half_.size(); }
  /// a_{i+1} in 0-based indexing, i in [0, 2n).
  Vec2<T> vertex(std::size_t i) const;
  std::vector<Vec2<T>> vertices() const;
  const std::vector<Vec2<T>>& half_vertices() const { return half_; }
  const std::vector<PolygonEdge<T>>& edges() const { return edges_; }
  std::vector<PolygonEdge<T>>& mutable_edges() { return edges_; }
  /// Shoelace area, cached at construction.
  const T& area() const { return area_; }
  Covector<T> support_covector(std::size_t i) const {
    return Covector<T>(std::vector<T>{edges_[i].support.x, edges_[i].support.y});
  }

 private:
  SymPolygon() = default;

  std::vector<Vec2<T>> half_;
  std::vector<PolygonEdge<T>> edges_;
  T area_{};
};

/// Symmetric polygon cut out by |f_j(x)| <= 1. Zero functionals are ignored,
/// redundant and duplicated constraints dropped, collinear sides merged; each
/// side records the index and sign of the constraint realising it (smallest
/// index among identical restrictions). Throws InputError when unbounded.
template <Scalar T>
SymPolygon<T> halfplane_intersection(std::span<const Vec2<T>> constraints);

/// B intersected with the plane, in plane coordinates, with F_i and facet
/// indices attached to each side.
template <Scalar T>
SymPolygon<T> section(const SymPolytope<T>& body, const PlaneBasis<T>& plane);

/// Restriction g o I of the facet functionals to the plane spanned by (v1, v2).
template <Scalar T>
std::vector<Vec2<T>> pull_back(const SymPolytope<T>& body, const Vec<T>& v1, const Vec<T>& v2);

template <Scalar T>
T polygon_area(const SymPolygon<T>& k);

template <Scalar T>
std::vector<T> edge_weights(const SymPolygon<T>& k);

/// K* = {f : f(x) <= 1 on K}; its vertices are +-f_i.
template <Scalar T>
SymPolygon<T> polar_polygon(const SymPolygon<T>& k);

/// Support function h_K(u) = max over K of <x, u>.
template <Scalar T>
T support_value(const SymPolygon<T>& k, const Vec2<T>& u);

/// Mixed area V(K, K2), normalised so that V(K, K) = A(K).
template <Scalar T>
T mixed_area(const SymPolygon<T>& k, const SymPolygon<T>& k2);

/// V(K, K2)^2 - A(K) A(K2); nonnegative by Minkowski's inequality.
template <Scalar T>
T minkowski_gap(const SymPolygon<T>& k, const SymPolygon<T>& k2);

/// Exact vertex-set equality (float mode: within tolerance), ignoring order.
template <Scalar T>
bool same_vertex_set(const SymPolygon<T>& a, const SymPolygon<T>& b);

/// Vertices of a symmetric polytope by brute force over n-subsets of facets.
/// Intended for small cases (cross-validation, n <= 4).
template <Scalar T>
std::vector<Vec<T>> enumerate_vertices(const SymPolytope<T>& body);

}  // namespace bhcal
