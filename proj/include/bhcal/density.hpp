#pragma once

#include <span>
#include <vector>

#include "bhcal/polytope.hpp"

namespace bhcal {

/// A density value; `degenerate` marks v1 ^ v2 = 0, where the value is the
/// continuous extension 0.
template <Scalar T>
struct DensityValue {
  PiScaled<T> value;
  bool degenerate = false;
};

/// Busemann-Hausdorff density: A(v1 ^ v2) = pi / A(K), K = {(s,t) : s v1 + t v2 in B}.
template <Scalar T>
class BHDensity {
 public:
  explicit BHDensity(SymPolytope<T> body) : body_(std::move(body)) {}
  const SymPolytope<T>& body() const { return body_; }

 private:
  SymPolytope<T> body_;
};

/// Holmes-Thompson density: A(v1 ^ v2) = A(K*) / pi.
template <Scalar T>
class HTDensity {
 public:
  explicit HTDensity(SymPolytope<T> body) : body_(std::move(body)) {}
  const SymPolytope<T>& body() const { return body_; }

 private:
  SymPolytope<T> body_;
};

/// alpha(sigma) = pi * sum_{i<j} p_i p_j |(F_i ^ F_j)(sigma)|.
template <Scalar T>
class AlphaDensity {
 public:
  /// Throws InputError unless the weights are nonnegative and sum to 1.
  AlphaDensity(std::vector<Covector<T>> functionals, std::vector<T> weights);

  const std::vector<Covector<T>>& functionals() const { return functionals_; }
  const std::vector<T>& weights() const { return weights_; }
  std::size_t dim() const { return functionals_.front().dim(); }

 private:
  std::vector<Covector<T>> functionals_;
  std::vector<T> weights_;
};

/// K = I^{-1}(B) for I(e1) = v1, I(e2) = v2. Requires independent v1, v2.
template <Scalar T>
SymPolygon<T> pullback_polygon(const SymPolytope<T>& body, const SimpleTwoVector<T>& sigma);

template <Scalar T>
DensityValue<T> bh_eval(const BHDensity<T>& d, const SimpleTwoVector<T>& sigma);

template <Scalar T>
DensityValue<T> ht_eval(const HTDensity<T>& d, const SimpleTwoVector<T>& sigma);

template <Scalar T>
DensityValue<T> alpha_eval(const AlphaDensity<T>& a, const SimpleTwoVector<T>& sigma);

/// Half-space a . x <= b.
template <Scalar T>
struct HalfSpace {
  Covector<T> a;
  T b;
};

/// Volume of a bounded full-dimensional polytope in R^k, k in {2, 3}.
/// k = 2 by the shoelace formula, k = 3 by summing pyramids over the facets.
/// Throws InputError when the region is unbounded or empty; returns 0 for a
/// lower-dimensional region.
template <Scalar T>
T volume_k(std::size_t k, std::span<const HalfSpace<T>> constraints);

/// Convenience for symmetric bodies {x : |f_j(x)| <= 1}.
template <Scalar T>
T volume_symmetric(std::size_t k, std::span<const Covector<T>> functionals);

/// Vertices of {x : a_j . x <= b_j} in R^k by enumeration of k-subsets of constraints.
template <Scalar T>
std::vector<Vec<T>> polytope_vertices(std::size_t k, std::span<const HalfSpace<T>> constraints);

/// True when {a_j . d <= 0} is {0}, i.e. the region is bounded (when nonempty).
bool recession_cone_trivial(std::size_t k, std::span<const HalfSpace<Rational>> constraints);

}  // namespace bhcal
