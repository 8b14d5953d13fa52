#include "bhcal/lp.hpp"

#include <stdexcept>

namespace bhcal::lp {

namespace {

void canonicalize_row(Row& row) {
  for (auto& c : row.coeffs) c.canonicalize();
  row.bound.canonicalize();
}

}  // namespace

void Problem::add_leq(std::vector<Rational> coeffs, Rational bound, std::string label) {
  if (coeffs.size() != num_vars) throw std::invalid_argument("lp row has wrong length");
  rows.push_back({std::move(coeffs), std::move(bound), false, std::move(label)});
  canonicalize_row(rows.back());
}

void Problem::add_eq(std::vector<Rational> coeffs, Rational bound, std::string label) {
  if (coeffs.size() != num_vars) throw std::invalid_argument("lp row has wrong length");
  rows.push_back({std::move(coeffs), std::move(bound), true, std::move(label)});
  canonicalize_row(rows.back());
}

std::string to_string(Status s) { return s == Status::Feasible ? "feasible" : "infeasible"; }

namespace {

// Dictionary: basic[r] = rhs[r] + sum_c a[r][c] * nonbasic[c].
// Every slack is required to be nonnegative; the free x are pivoted into the
// basis first and their rows are never used in a ratio test.
// Variable ids: [0, d) free x, d the auxiliary variable, d + 1 + i the slack
// of inequality i (equalities are split into two inequalities).
class Dictionary {
 public:
  Dictionary(const Problem& p) : d_(p.num_vars) {
    for (std::size_t r = 0; r < p.rows.size(); ++r) {
      add_inequality(p.rows[r].coeffs, p.rows[r].bound, r, 1);
      if (p.rows[r].equality) add_inequality(p.rows[r].coeffs, p.rows[r].bound, r, -1);
    }
    nonbasic_.resize(d_ + 1);
    for (std::size_t c = 0; c <= d_; ++c) nonbasic_[c] = c;
    objective_.assign(d_ + 1, Rational(0));
  }

  Result run() {
    Result out;
    eliminate_free_variables();
    // The auxiliary variable relaxes every remaining (non-free) row.
    const std::size_t aux_col = column_of(d_);
    for (std::size_t r = 0; r < rhs_.size(); ++r) a_[r][aux_col] = free_row_[r] ? Rational(0) : Rational(1);

    long worst = -1;
    for (std::size_t r = 0; r < rhs_.size(); ++r) {
      if (free_row_[r]) continue;
      if (sgn(rhs_[r]) < 0 && (worst < 0 || rhs_[r] < rhs_[static_cast<std::size_t>(worst)] ||
                               (rhs_[r] == rhs_[static_cast<std::size_t>(worst)] &&
                                basic_[r] < basic_[static_cast<std::size_t>(worst)])))
        worst = static_cast<long>(r);
    }
    if (worst >= 0) {
      // Objective w = -aux. While aux is nonbasic its column carries -1.
      objective_[column_of(d_)] = Rational(-1);
      pivot(static_cast<std::size_t>(worst), column_of(d_));
      ++pivots_;
      while (aux_is_basic()) {
        long enter = -1;
        for (std::size_t c = 0; c < nonbasic_.size(); ++c)
          if (sgn(objective_[c]) > 0 && (enter < 0 || nonbasic_[c] < nonbasic_[static_cast<std::size_t>(enter)]))
            enter = static_cast<long>(c);
        if (enter < 0) break;
        const auto ce = static_cast<std::size_t>(enter);
        long leave = -1;
        Rational best;
        for (std::size_t r = 0; r < rhs_.size(); ++r) {
          if (free_row_[r] || sgn(a_[r][ce]) >= 0) continue;
          Rational ratio = rhs_[r] / -a_[r][ce];
          if (leave < 0 || ratio < best ||
              (ratio == best && basic_[r] < basic_[static_cast<std::size_t>(leave)])) {
            leave = static_cast<long>(r);
            best = ratio;
          }
        }
        if (leave < 0) throw std::logic_error("phase-1 objective is unbounded");
        pivot(static_cast<std::size_t>(leave), ce);
        ++pivots_;
      }
    }

    out.pivots = pivots_;
    if (aux_is_basic() && sgn(aux_value()) > 0) {
      out.status = Status::Infeasible;
      out.certificate.assign(num_rows_, Rational(0));
      for (std::size_t c = 0; c < nonbasic_.size(); ++c) {
        std::size_t id = nonbasic_[c];
        if (id <= d_) continue;
        const auto& src = slack_source_[id - d_ - 1];
        out.certificate[src.first] += Rational(-objective_[c]) * src.second;
      }
    } else {
      out.status = Status::Feasible;
      out.witness.assign(d_, Rational(0));
      for (std::size_t r = 0; r < rhs_.size(); ++r)
        if (basic_[r] < d_) out.witness[basic_[r]] = rhs_[r];
    }
    return out;
  }

 private:
  void add_inequality(const std::vector<Rational>& coeffs, const Rational& bound, std::size_t row, int sign) {
    // s = sign*b - sign*a.x; the auxiliary column is filled in after the
    // free variables have been eliminated.
    std::vector<Rational> line(d_ + 1);
    for (std::size_t j = 0; j < d_; ++j) line[j] = -sign * coeffs[j];
    a_.push_back(std::move(line));
    rhs_.push_back(sign * bound);
    basic_.push_back(d_ + 1 + slack_source_.size());
    free_row_.push_back(false);
    slack_source_.emplace_back(row, sign);
    num_rows_ = std::max(num_rows_, row + 1);
  }

  std::size_t column_of(std::size_t id) const {
    for (std::size_t c = 0; c < nonbasic_.size(); ++c)
      if (nonbasic_[c] == id) return c;
    throw std::logic_error("variable is not nonbasic");
  }

  bool aux_is_basic() const {
    for (std::size_t r = 0; r < basic_.size(); ++r)
      if (basic_[r] == d_) return true;
    return false;
  }

  Rational aux_value() const {
    for (std::size_t r = 0; r < basic_.size(); ++r)
      if (basic_[r] == d_) return rhs_[r];
    return Rational(0);
  }

  // Free variables enter the basis first and stay there; their rows are
  // unconstrained and never take part in a ratio test.
  void eliminate_free_variables() {
    for (std::size_t j = 0; j < d_; ++j) {
      std::size_t c = column_of(j);
      for (std::size_t r = 0; r < rhs_.size(); ++r) {
        if (free_row_[r] || sgn(a_[r][c]) == 0) continue;
        pivot(r, c);
        free_row_[r] = true;
        ++pivots_;
        break;
      }
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const Rational p = a_[r][c];
    const std::size_t cols = nonbasic_.size();
    // Solve row r for the entering variable.
    std::vector<Rational> row(cols);
    for (std::size_t k = 0; k < cols; ++k) row[k] = k == c ? Rational(1) / p : Rational(-a_[r][k] / p);
    Rational row_rhs = -rhs_[r] / p;
    auto substitute = [&](std::vector<Rational>& coeffs, Rational* constant) {
      Rational factor = coeffs[c];
      if (sgn(factor) == 0) return;
      for (std::size_t k = 0; k < cols; ++k)
        coeffs[k] = k == c ? Rational(factor * row[k]) : Rational(coeffs[k] + factor * row[k]);
      if (constant) *constant += factor * row_rhs;
    };
    for (std::size_t i = 0; i < rhs_.size(); ++i)
      if (i != r) substitute(a_[i], &rhs_[i]);
    Rational objective_constant = objective_constant_;
    substitute(objective_, &objective_constant);
    objective_constant_ = objective_constant;
    a_[r] = std::move(row);
    rhs_[r] = row_rhs;
    std::swap(basic_[r], nonbasic_[c]);
  }

  std::size_t d_;
  std::size_t num_rows_ = 0;
  std::vector<std::vector<Rational>> a_;
  std::vector<Rational> rhs_;
  std::vector<std::size_t> basic_;
  std::vector<std::size_t> nonbasic_;
  std::vector<bool> free_row_;
  std::vector<std::pair<std::size_t, int>> slack_source_;
  std::vector<Rational> objective_;
  Rational objective_constant_{0};
  std::size_t pivots_ = 0;
};

}  // namespace

Result solve_feasibility(const Problem& input) {
  Problem problem = input;
  for (auto& row : problem.rows) {
    if (row.coeffs.size() != problem.num_vars) throw std::invalid_argument("lp row has wrong length");
    canonicalize_row(row);
  }
  if (problem.rows.empty()) {
    Result out;
    out.status = Status::Feasible;
    out.witness.assign(problem.num_vars, Rational(0));
    return out;
  }
  Dictionary dict(problem);
  Result out = dict.run();
  if (out.status == Status::Feasible && first_violation(problem, out.witness) >= 0)
    throw std::logic_error("simplex produced a witness that violates a constraint");
  if (out.status == Status::Infeasible && !verify_certificate(problem, out.certificate))
    throw std::logic_error("simplex produced an invalid Farkas certificate");
  return out;
}

long first_violation(const Problem& problem, const std::vector<Rational>& x) {
  if (x.size() != problem.num_vars) throw std::invalid_argument("witness has wrong length");
  for (std::size_t r = 0; r < problem.rows.size(); ++r) {
    const auto& row = problem.rows[r];
    Rational lhs(0);
    for (std::size_t j = 0; j < x.size(); ++j) lhs += row.coeffs[j] * x[j];
    if (row.equality ? lhs != row.bound : lhs > row.bound) return static_cast<long>(r);
  }
  return -1;
}

bool verify_certificate(const Problem& problem, const std::vector<Rational>& y) {
  if (y.size() != problem.rows.size()) return false;
  std::vector<Rational> combo(problem.num_vars, Rational(0));
  Rational rhs(0);
  for (std::size_t r = 0; r < y.size(); ++r) {
    const auto& row = problem.rows[r];
    if (!row.equality && sgn(y[r]) < 0) return false;
    for (std::size_t j = 0; j < combo.size(); ++j) combo[j] += y[r] * row.coeffs[j];
    rhs += y[r] * row.bound;
  }
  for (const auto& c : combo)
    if (sgn(c) != 0) return false;
  return sgn(rhs) < 0;
}

}  // namespace bhcal::lp
