#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bhcal/density.hpp"
#include "bhcal/lp.hpp"

namespace bhcal {

/// omega = pi * sum_{i<j} p_i p_j F_i ^ F_j for the section of B by P.
/// `omega` stores the coefficients in units of pi.
template <Scalar T>
struct Calibrator {
  SymPolytope<T> body;
  PlaneBasis<T> plane;
  SymPolygon<T> polygon;
  TwoForm<T> omega;
};

/// Builds the calibrator and checks omega(u1 ^ u2) = A^bh(u1 ^ u2) before
/// returning (throws std::logic_error otherwise).
template <Scalar T>
Calibrator<T> build_calibrator(const SymPolytope<T>& body, const PlaneBasis<T>& plane);

/// All quantities in units of pi.
template <Scalar T>
struct CalibratorReport {
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  std::int64_t sample_bound = 0;
  std::optional<T> max_violation;  ///< max of |omega(s)| - A^bh(s); empty when n_samples = 0
  T equality_residual{};           ///< |omega(u1 ^ u2)| - A^bh(u1 ^ u2)
  std::optional<SimpleTwoVector<T>> worst_sample;
  T worst_omega{};
  T worst_density{};

  /// max_violation <= 0 and equality_residual = 0 (float mode: within tolerance).
  bool passed() const;
};

/// Compares omega against A^bh on `n_samples` integer 2-vectors drawn from
/// [-sample_bound, sample_bound]^n with the given seed.
template <Scalar T>
CalibratorReport<T> verify_calibrator(const Calibrator<T>& c, std::size_t n_samples, std::uint64_t seed,
                                      std::int64_t sample_bound = 10);

/// sum_{i<j} p_i p_j |f_i ^ f_j| for covectors on R^2.
template <Scalar T>
T lhs_sum(std::span<const Covector<T>> f, std::span<const T> p);

/// |sum_{i<j} p_i p_j f_i ^ f_j| for covectors on R^2.
template <Scalar T>
T lhs_abs(std::span<const Covector<T>> f, std::span<const T> p);

template <Scalar T>
struct MainPropReport {
  T lhs_abs{};
  T lhs_sum{};
  T bound{};  ///< 1 / A(K)
  bool abs_le_sum = false;
  bool sum_le_bound = false;
  bool holds() const { return abs_le_sum && sum_le_bound; }
};

/// Evaluates both inequalities |sum p_i p_j f_i ^ f_j| <= sum p_i p_j |f_i ^ f_j| <= 1/A(K).
/// Throws InputError if some f_i exceeds 1 at a vertex of K or the weights
/// are not a probability vector.
template <Scalar T>
MainPropReport<T> check_main_prop(const SymPolygon<T>& k, std::span<const Covector<T>> f, std::span<const T> p);

/// The support functionals f_1..f_n of K's sides and the weights p_i.
template <Scalar T>
std::pair<std::vector<Covector<T>>, std::vector<T>> equality_configuration(const SymPolygon<T>& k);

template <Scalar T>
struct Lemma1Report {
  T shoelace{};
  T pair_sum{};        ///< sum_{i<j} |v_i ^ v_j|
  T abs_signed_sum{};  ///< |sum_{i<j} v_i ^ v_j|
  bool passed = false;
};

template <Scalar T>
Lemma1Report<T> lemma1_check(const SymPolygon<T>& k);

template <Scalar T>
struct Lemma2Report {
  std::size_t pairs_checked = 0;
  std::size_t pair_failures = 0;
  T sum{};         ///< sum_{i<j} p_i p_j |f_i ^ f_j|
  T signed_abs{};  ///< |sum_{i<j} p_i p_j f_i ^ f_j|
  T bound{};       ///< 1 / A(K)
  bool passed = false;
};

template <Scalar T>
Lemma2Report<T> lemma2_check(const SymPolygon<T>& k);

template <Scalar T>
struct Lemma3Certificate {
  /// Indices of the sides of K kept after dropping zero weights.
  std::vector<std::size_t> kept;
  /// K with the zero-weight sides removed (equal to K when nothing was dropped).
  std::optional<SymPolygon<T>> reduced;
  std::vector<T> p;  ///< weights on the kept sides
  std::vector<T> q;
  std::vector<T> lambda;
  std::vector<Vec2<T>> v_prime;
  std::optional<SymPolygon<T>> k_prime;  ///< empty when fewer than two sides are kept
  T area_k{};                            ///< A(K) of the input polygon
  T area_reduced{};
  T area_k_prime{};
  T mixed{};  ///< V(reduced, K')
  T lhs{};
  T gap{};  ///< minkowski_gap(reduced, K')

  bool mixed_equals_area = false;  ///< V = A(reduced)
  bool lhs_identity = false;       ///< lhs A(reduced)^2 = A(K')
  bool gap_nonnegative = false;
  bool area_bound = false;  ///< A(K') <= A(reduced) and lhs <= 1/A(K)
  bool passed() const { return mixed_equals_area && lhs_identity && gap_nonnegative && area_bound; }
};

/// Certificate for sum p_i p_j |f_i ^ f_j| <= 1/A(K) with f_i the side
/// supports of K. Sides with p_i = 0 are dropped first.
template <Scalar T>
Lemma3Certificate<T> lemma3_certificate(const SymPolygon<T>& k, std::span<const T> p);

/// Merges functionals equal up to sign, adding their weights. Each survivor
/// is normalised so its first nonzero coefficient is positive.
template <Scalar T>
std::pair<std::vector<Covector<T>>, std::vector<T>> reduce_functionals(std::span<const Covector<T>> f,
                                                                        std::span<const T> p);

template <Scalar T>
struct PolarMaximum {
  std::vector<Vec2<T>> vertices;  ///< vertices of K*
  std::vector<T> values;          ///< lhs_sum with f_i replaced by each vertex
  std::size_t argmax = 0;
};

/// Evaluates lhs_sum with f_free ranging over the vertices of K*.
template <Scalar T>
PolarMaximum<T> maximize_over_polar(const SymPolygon<T>& k, std::span<const Covector<T>> f, std::span<const T> p,
                                    std::size_t free_index);

/// Same, with K given by |c_j(x)| <= 1. Throws InputError if K is unbounded.
template <Scalar T>
PolarMaximum<T> maximize_over_polar(std::span<const Vec2<T>> constraints, std::span<const Covector<T>> f,
                                    std::span<const T> p, std::size_t free_index);

/// Density used as the upper bound in the calibrator LP.
using DensityOracle = std::function<PiScaled<Rational>(const SimpleTwoVector<Rational>&)>;

DensityOracle bh_oracle(const SymPolytope<Rational>& body);
DensityOracle ht_oracle(const SymPolytope<Rational>& body);

/// Sampled calibrator LP: variables are the coefficients of omega on
/// dx_i ^ dx_j (i < j, lexicographic), in units of pi^pi_power.
struct LPFeasibility {
  std::size_t dim = 0;
  int pi_power = 1;
  std::vector<std::pair<std::size_t, std::size_t>> variables;
  lp::Problem problem;
  lp::Result result;

  bool feasible() const { return result.status == lp::Status::Feasible; }
  /// Witness as a form; only meaningful when feasible.
  TwoForm<Rational> witness() const;
  /// Coefficient vector of a form in the variable order.
  std::vector<Rational> encode(const TwoForm<Rational>& omega) const;
};

/// Solves omega(u1 ^ u2) = A(u1 ^ u2) and -A(s) <= omega(s) <= A(s) for each
/// sample s. Feasibility is necessary, not sufficient, for a calibrator.
/// Throws InputError on a degenerate sample.
LPFeasibility lp_calibrator_search(const DensityOracle& density, const PlaneBasis<Rational>& plane,
                                   std::span<const SimpleTwoVector<Rational>> samples);

}  // namespace bhcal
