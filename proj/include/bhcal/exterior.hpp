#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "bhcal/scalar.hpp"

namespace bhcal {

/// A vector of the ambient space V = R^n.
template <Scalar T>
struct Vec {
  std::vector<T> coords;

  Vec() = default;
  explicit Vec(std::size_t n) : coords(n, T(0)) {}
  explicit Vec(std::vector<T> c) : coords(std::move(c)) {}

  static Vec basis(std::size_t n, std::size_t i) {
    Vec e(n);
    e.coords.at(i) = T(1);
    return e;
  }

  std::size_t dim() const { return coords.size(); }
  const T& operator[](std::size_t i) const { return coords[i]; }
  T& operator[](std::size_t i) { return coords[i]; }

  friend bool operator==(const Vec&, const Vec&) = default;
};

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
}

template <Scalar T>
Vec<T> operator+(const Vec<T>& a, const Vec<T>& b) {
  require_same_dim(a.dim(), b.dim(), "vector sum");
  Vec<T> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
  return out;
}

template <Scalar T>
Vec<T> operator-(const Vec<T>& a, const Vec<T>& b) {
  require_same_dim(a.dim(), b.dim(), "vector difference");
  Vec<T> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
  return out;
}

template <Scalar T>
Vec<T> operator*(const T& s, const Vec<T>& a) {
  Vec<T> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = s * a[i];
  return out;
}

/// A linear function V -> R.
template <Scalar T>
struct Covector {
  std::vector<T> coeffs;

  Covector() = default;
  explicit Covector(std::size_t n) : coeffs(n, T(0)) {}
  explicit Covector(std::vector<T> c) : coeffs(std::move(c)) {}

  std::size_t dim() const { return coeffs.size(); }
  const T& operator[](std::size_t i) const { return coeffs[i]; }
  T& operator[](std::size_t i) { return coeffs[i]; }

  T operator()(const Vec<T>& v) const {
    require_same_dim(dim(), v.dim(), "covector evaluation");
    T acc(0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) acc += coeffs[i] * v[i];
    return acc;
  }

  Covector operator-() const {
    Covector out(dim());
    for (std::size_t i = 0; i < dim(); ++i) out[i] = -coeffs[i];
    return out;
  }

  bool is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const T& c) { return Arith<T>::is_zero(c); });
  }

  friend bool operator==(const Covector&, const Covector&) = default;
};

/// The simple 2-vector v1 ^ v2.
template <Scalar T>
struct SimpleTwoVector {
  Vec<T> v1, v2;

  std::size_t dim() const { return v1.dim(); }
};

/// Pluecker coordinate v1_i v2_j - v1_j v2_i of v1 ^ v2.
template <Scalar T>
T plucker(const SimpleTwoVector<T>& s, std::size_t i, std::size_t j) {
  return s.v1[i] * s.v2[j] - s.v1[j] * s.v2[i];
}

/// True when v1 and v2 are linearly dependent (all Pluecker coordinates vanish).
template <Scalar T>
bool is_degenerate(const SimpleTwoVector<T>& s) {
  require_same_dim(s.v1.dim(), s.v2.dim(), "simple 2-vector");
  double scale = 0;
  if constexpr (!Arith<T>::exact) {
    for (std::size_t i = 0; i < s.dim(); ++i)
      scale = std::max({scale, std::fabs(s.v1[i]), std::fabs(s.v2[i])});
    scale *= scale;
  }
  for (std::size_t i = 0; i < s.dim(); ++i)
    for (std::size_t j = i + 1; j < s.dim(); ++j)
      if (!Arith<T>::negligible(plucker(s, i, j), scale)) return false;
  return true;
}

/// Constant-coefficient 2-form sum c_ij dx_i ^ dx_j over i < j, stored sparsely.
template <Scalar T>
class TwoForm {
 public:
  using Key = std::pair<std::size_t, std::size_t>;

  TwoForm() = default;
  explicit TwoForm(std::size_t n) : dim_(n) {}

  std::size_t dim() const { return dim_; }
  const std::map<Key, T>& coeffs() const { return coeffs_; }

  /// Adds value * dx_i ^ dx_j, folding i > j by antisymmetry.
  void add(std::size_t i, std::size_t j, const T& value) {
    if (i >= dim_ || j >= dim_) throw DimensionError("two-form index out of range");
    if (i == j || Arith<T>::is_zero(value)) return;
    Key key = i < j ? Key{i, j} : Key{j, i};
    T signed_value = i < j ? value : T(-value);
    auto [it, inserted] = coeffs_.try_emplace(key, signed_value);
    if (!inserted) {
      it->second += signed_value;
      if (Arith<T>::is_zero(it->second)) coeffs_.erase(it);
    }
  }

  T coeff(std::size_t i, std::size_t j) const {
    if (i == j) return T(0);
    Key key = i < j ? Key{i, j} : Key{j, i};
    auto it = coeffs_.find(key);
    if (it == coeffs_.end()) return T(0);
    return i < j ? it->second : T(-it->second);
  }

  TwoForm& operator+=(const TwoForm& other) {
    require_same_dim(dim_, other.dim_, "two-form sum");
    for (const auto& [key, value] : other.coeffs_) add(key.first, key.second, value);
    return *this;
  }

  TwoForm scaled(const T& s) const {
    TwoForm out(dim_);
    for (const auto& [key, value] : coeffs_) out.add(key.first, key.second, s * value);
    return out;
  }

  bool is_zero() const { return coeffs_.empty(); }

  friend bool operator==(const TwoForm&, const TwoForm&) = default;

 private:
  std::size_t dim_ = 0;
  std::map<Key, T> coeffs_;
};

template <Scalar T>
TwoForm<T> wedge(const Covector<T>& f, const Covector<T>& g) {
  require_same_dim(f.dim(), g.dim(), "wedge");
  TwoForm<T> out(f.dim());
  for (std::size_t i = 0; i < f.dim(); ++i)
    for (std::size_t j = i + 1; j < f.dim(); ++j) out.add(i, j, f[i] * g[j] - f[j] * g[i]);
  return out;
}

template <Scalar T>
T eval_two_form(const TwoForm<T>& omega, const SimpleTwoVector<T>& s) {
  require_same_dim(omega.dim(), s.v1.dim(), "eval_two_form");
  require_same_dim(omega.dim(), s.v2.dim(), "eval_two_form");
  T acc(0);
  for (const auto& [key, c] : omega.coeffs()) acc += c * plucker(s, key.first, key.second);
  return acc;
}

/// |det [f; g]| for covectors on R^2: the Euclidean norm of f ^ g.
template <Scalar T>
T planar_wedge_norm(const Covector<T>& f, const Covector<T>& g) {
  if (f.dim() != 2 || g.dim() != 2) throw DimensionError("planar_wedge_norm: covectors must live on R^2");
  return Arith<T>::abs(f[0] * g[1] - f[1] * g[0]);
}

/// Determinant of a small square matrix (row-major) by elimination.
template <Scalar T>
T determinant(std::vector<std::vector<T>> m) {
  const std::size_t k = m.size();
  T det(1);
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = k;
    if constexpr (Arith<T>::exact) {
      for (std::size_t r = col; r < k; ++r)
        if (!Arith<T>::is_zero(m[r][col])) { pivot = r; break; }
    } else {
      double best = 0;
      for (std::size_t r = col; r < k; ++r)
        if (std::fabs(m[r][col]) > best) { best = std::fabs(m[r][col]); pivot = r; }
    }
    if (pivot == k) return T(0);
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < k; ++r) {
      if (Arith<T>::is_zero(m[r][col])) continue;
      T factor = m[r][col] / m[col][col];
      for (std::size_t c = col; c < k; ++c) m[r][c] -= factor * m[col][c];
    }
  }
  return det;
}

/// Constant-coefficient k-form keyed by strictly increasing index tuples.
template <Scalar T>
class KForm {
 public:
  using Key = std::vector<std::size_t>;

  KForm() = default;
  KForm(std::size_t k, std::size_t n) : k_(k), dim_(n) {
    if (k < 2 || k > 4) throw std::invalid_argument("KForm: degree must be in 2..4");
    if (k > n) throw DimensionError("KForm: degree exceeds dimension");
  }

  std::size_t degree() const { return k_; }
  std::size_t dim() const { return dim_; }
  const std::map<Key, T>& coeffs() const { return coeffs_; }

  void set(Key key, const T& value) {
    if (key.size() != k_) throw DimensionError("KForm: index tuple has wrong length");
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (key[i] >= dim_) throw DimensionError("KForm: index out of range");
      if (i > 0 && key[i - 1] >= key[i])
        throw std::invalid_argument("KForm: index tuple must be strictly increasing");
    }
    if (Arith<T>::is_zero(value))
      coeffs_.erase(key);
    else
      coeffs_[std::move(key)] = value;
  }

 private:
  std::size_t k_ = 2;
  std::size_t dim_ = 0;
  std::map<Key, T> coeffs_;
};

/// omega(v_1, ..., v_k) via the k x k minors of the vectors' coordinate matrix.
template <Scalar T>
T eval_k_form(const KForm<T>& omega, const std::vector<Vec<T>>& vs) {
  if (vs.size() != omega.degree()) throw DimensionError("eval_k_form: expected k vectors");
  for (const auto& v : vs) require_same_dim(omega.dim(), v.dim(), "eval_k_form");
  const std::size_t k = omega.degree();
  T acc(0);
  std::vector<std::vector<T>> minor(k, std::vector<T>(k));
  for (const auto& [key, c] : omega.coeffs()) {
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t col = 0; col < k; ++col) minor[r][col] = vs[col][key[r]];
    acc += c * determinant(minor);
  }
  return acc;
}

/// Embeds a 2-form as a k = 2 KForm.
template <Scalar T>
KForm<T> as_k_form(const TwoForm<T>& omega) {
  KForm<T> out(2, omega.dim());
  for (const auto& [key, c] : omega.coeffs()) out.set({key.first, key.second}, c);
  return out;
}

}  // namespace bhcal
