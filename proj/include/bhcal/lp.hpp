#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bhcal/scalar.hpp"

/// Exact-rational linear feasibility.
///
/// Decides whether {x free : a_r . x <= b_r (or = b_r)} is nonempty with a
/// phase-1 simplex on a dense dictionary, using Bland's rule throughout.
/// A feasible outcome carries a witness x; an infeasible one carries a Farkas
/// certificate y (y_r >= 0 on inequality rows, free on equality rows) with
/// sum_r y_r a_r = 0 and sum_r y_r b_r < 0.
namespace bhcal::lp {

struct Row {
  std::vector<Rational> coeffs;
  Rational bound;
  bool equality = false;
  std::string label;
};

struct Problem {
  std::size_t num_vars = 0;
  std::vector<Row> rows;

  void add_leq(std::vector<Rational> coeffs, Rational bound, std::string label = {});
  void add_eq(std::vector<Rational> coeffs, Rational bound, std::string label = {});
};

enum class Status { Feasible, Infeasible };

std::string to_string(Status s);

struct Result {
  Status status = Status::Infeasible;
  std::vector<Rational> witness;      ///< set when feasible
  std::vector<Rational> certificate;  ///< one multiplier per row, set when infeasible
  std::size_t pivots = 0;
};

Result solve_feasibility(const Problem& problem);

/// Index of the first row violated by x, or -1 when x satisfies every row exactly.
long first_violation(const Problem& problem, const std::vector<Rational>& x);

/// Checks a Farkas certificate exactly.
bool verify_certificate(const Problem& problem, const std::vector<Rational>& y);

}  // namespace bhcal::lp
