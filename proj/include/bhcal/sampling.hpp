#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "bhcal/polytope.hpp"

namespace bhcal {

/// splitmix64. Seeds are recorded in every report, and all derived
/// distributions below are implemented here so reports are reproducible
/// across standard libraries.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Independent stream for sub-task `index` (trial, instance, ...).
  SplitMix64 fork(std::uint64_t index) const {
    SplitMix64 child(state_ ^ (0xd1b54a32d192ed03ULL * (index + 1)));
    child();
    return child;
  }

 private:
  std::uint64_t state_;
};

/// Uniform integer in [lo, hi] by rejection.
std::int64_t uniform_int(SplitMix64& rng, std::int64_t lo, std::int64_t hi);

/// Integer vector with entries in [-bound, bound].
template <Scalar T>
Vec<T> random_int_vec(SplitMix64& rng, std::size_t n, std::int64_t bound);

/// Independent pair of integer vectors in [-bound, bound]^n.
template <Scalar T>
SimpleTwoVector<T> random_simple_two_vector(SplitMix64& rng, std::size_t n, std::int64_t bound);

/// Random symmetric strictly convex 2n-gon with half-integer vertices:
/// n integer edge vectors with entries in [-bound, bound] and distinct
/// directions, sorted by angle within a half turn.
template <Scalar T>
SymPolygon<T> random_sym_polygon(SplitMix64& rng, std::size_t n, std::int64_t bound = 6);

/// Random bounded symmetric polytope in R^dim with `pairs` facet functionals
/// (integer entries in [-bound, bound]) plus enough coordinate functionals to
/// guarantee boundedness. The result may have fewer pairs after parallel
/// functionals are merged.
template <Scalar T>
SymPolytope<T> random_sym_polytope(SplitMix64& rng, std::size_t dim, std::size_t pairs,
                                   std::int64_t bound = 3);

/// Probability vector from integer weights in [0 or 1, 9], normalised. With
/// allow_zero some entries may vanish (never all of them).
template <Scalar T>
std::vector<T> random_probability_weights(SplitMix64& rng, std::size_t n, bool allow_zero);

/// Random point of the polar K*: a vertex of K* (a side support of K) with
/// probability 1/3, otherwise a convex combination t a + (1 - t) b of two
/// polar vertices with t in {0, 1/8, ..., 1}.
template <Scalar T>
Covector<T> random_polar_functional(SplitMix64& rng, const SymPolygon<T>& k);

/// l-infinity unit ball in R^dim (coordinate functionals).
template <Scalar T>
SymPolytope<T> linf_ball(std::size_t dim);

/// l1 unit ball in R^dim (functionals (1, +-1, ..., +-1)).
template <Scalar T>
SymPolytope<T> l1_ball(std::size_t dim);

}  // namespace bhcal
