#include "bhcal/sampling.hpp"

#include <algorithm>
#include <stdexcept>

namespace bhcal {

std::int64_t uniform_int(SplitMix64& rng, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(rng());
  const std::uint64_t limit = SplitMix64::max() - SplitMix64::max() % span;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

template <Scalar T>
Vec<T> random_int_vec(SplitMix64& rng, std::size_t n, std::int64_t bound) {
  Vec<T> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = T(static_cast<long>(uniform_int(rng, -bound, bound)));
  return v;
}

template <Scalar T>
SimpleTwoVector<T> random_simple_two_vector(SplitMix64& rng, std::size_t n, std::int64_t bound) {
  while (true) {
    SimpleTwoVector<T> s{random_int_vec<T>(rng, n, bound), random_int_vec<T>(rng, n, bound)};
    if (!is_degenerate(s)) return s;
  }
}

template <Scalar T>
SymPolygon<T> random_sym_polygon(SplitMix64& rng, std::size_t n, std::int64_t bound) {
  if (n < 2) throw std::invalid_argument("random_sym_polygon: n must be at least 2");
  std::vector<std::pair<long, long>> dirs;
  auto upper = [](long x, long y) { return y > 0 || (y == 0 && x > 0); };
  std::size_t attempts = 0;
  while (dirs.size() < n) {
    if (++attempts > 100000) throw std::runtime_error("random_sym_polygon: bound too small for n");
    long x = static_cast<long>(uniform_int(rng, -bound, bound));
    long y = static_cast<long>(uniform_int(rng, -bound, bound));
    if (x == 0 && y == 0) continue;
    if (!upper(x, y)) {
      x = -x;
      y = -y;
    }
    bool parallel = std::any_of(dirs.begin(), dirs.end(),
                                [&](const auto& d) { return d.first * y - d.second * x == 0; });
    if (!parallel) dirs.emplace_back(x, y);
  }
  std::sort(dirs.begin(), dirs.end(),
            [](const auto& a, const auto& b) { return a.first * b.second - a.second * b.first > 0; });
  // a_1 = -(v_1 + ... + v_n) / 2, a_{i+1} = a_i + v_i.
  Vec2<T> start{T(0), T(0)};
  for (const auto& d : dirs) start = start - Vec2<T>{T(d.first), T(d.second)};
  const T half_factor = T(1) / T(2);
  start = half_factor * start;
  std::vector<Vec2<T>> half;
  Vec2<T> cur = start;
  for (const auto& d : dirs) {
    half.push_back(cur);
    cur = cur + Vec2<T>{T(d.first), T(d.second)};
  }
  return SymPolygon<T>::from_half_vertices(std::move(half));
}

template <Scalar T>
SymPolytope<T> random_sym_polytope(SplitMix64& rng, std::size_t dim, std::size_t pairs, std::int64_t bound) {
  std::vector<Covector<T>> facets;
  for (std::size_t j = 0; j < pairs; ++j) {
    Covector<T> g(dim);
    do {
      for (std::size_t i = 0; i < dim; ++i) g[i] = T(static_cast<long>(uniform_int(rng, -bound, bound)));
    } while (g.is_zero());
    facets.push_back(std::move(g));
  }
  // Coordinate functionals with a small weight keep the body bounded without
  // usually touching the sections.
  for (std::size_t i = 0; i < dim; ++i) {
    Covector<T> e(dim);
    e[i] = T(1) / T(static_cast<long>(bound) * static_cast<long>(dim) + 1);
    facets.push_back(std::move(e));
  }
  return SymPolytope<T>(dim, std::move(facets));
}

template <Scalar T>
SymPolytope<T> linf_ball(std::size_t dim) {
  std::vector<Covector<T>> facets;
  for (std::size_t i = 0; i < dim; ++i) {
    Covector<T> e(dim);
    e[i] = T(1);
    facets.push_back(std::move(e));
  }
  return SymPolytope<T>(dim, std::move(facets));
}

template <Scalar T>
SymPolytope<T> l1_ball(std::size_t dim) {
  std::vector<Covector<T>> facets;
  for (std::size_t mask = 0; mask < (std::size_t{1} << (dim - 1)); ++mask) {
    Covector<T> g(dim);
    g[0] = T(1);
    for (std::size_t i = 1; i < dim; ++i) g[i] = (mask >> (i - 1)) & 1 ? T(-1) : T(1);
    facets.push_back(std::move(g));
  }
  return SymPolytope<T>(dim, std::move(facets));
}

template <Scalar T>
std::vector<T> random_probability_weights(SplitMix64& rng, std::size_t n, bool allow_zero) {
  if (n == 0) throw InputError("random_probability_weights: n must be positive");
  std::vector<std::int64_t> raw(n);
  std::int64_t total = 0;
  for (auto& w : raw) {
    w = uniform_int(rng, allow_zero ? 0 : 1, 9);
    total += w;
  }
  if (total == 0) {
    raw[0] = 1;
    total = 1;
  }
  std::vector<T> p;
  for (auto w : raw) {
    Rational q(static_cast<long>(w), static_cast<long>(total));
    q.canonicalize();
    p.push_back(Arith<T>::from_rational(q));
  }
  return p;
}

template <Scalar T>
Covector<T> random_polar_functional(SplitMix64& rng, const SymPolygon<T>& k) {
  // The polar vertices are the side supports f_i and -f_i.
  const auto n = static_cast<std::int64_t>(k.n());
  auto vertex = [&]() {
    const auto i = uniform_int(rng, 0, 2 * n - 1);
    auto f = k.support_covector(static_cast<std::size_t>(i % n));
    return i >= n ? -f : f;
  };
  auto a = vertex();
  if (uniform_int(rng, 0, 2) == 0) return a;
  auto b = vertex();
  Rational tq(static_cast<long>(uniform_int(rng, 0, 8)), 8);
  tq.canonicalize();
  const T t = Arith<T>::from_rational(tq);
  Covector<T> out(2);
  for (std::size_t i = 0; i < 2; ++i) out[i] = t * a[i] + (T(1) - t) * b[i];
  return out;
}

#define BHCAL_INSTANTIATE_SAMPLING(T)                                                          \
  template Vec<T> random_int_vec<T>(SplitMix64&, std::size_t, std::int64_t);                   \
  template SimpleTwoVector<T> random_simple_two_vector<T>(SplitMix64&, std::size_t, std::int64_t); \
  template SymPolygon<T> random_sym_polygon<T>(SplitMix64&, std::size_t, std::int64_t);        \
  template SymPolytope<T> random_sym_polytope<T>(SplitMix64&, std::size_t, std::size_t, std::int64_t); \
  template SymPolytope<T> linf_ball<T>(std::size_t);                                           \
  template SymPolytope<T> l1_ball<T>(std::size_t);                                            \
  template std::vector<T> random_probability_weights<T>(SplitMix64&, std::size_t, bool);       \
  template Covector<T> random_polar_functional<T>(SplitMix64&, const SymPolygon<T>&);

BHCAL_INSTANTIATE_SAMPLING(Rational)
BHCAL_INSTANTIATE_SAMPLING(double)

}  // namespace bhcal
