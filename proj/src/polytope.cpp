#include "bhcal/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bhcal/linalg.hpp"

namespace bhcal {

namespace {

template <Scalar T>
double magnitude(const Vec2<T>& p) {
  return std::max(std::fabs(Arith<T>::to_double(p.x)), std::fabs(Arith<T>::to_double(p.y)));
}

// Strict left turn / strict positivity of a cross product; float mode uses
// the merge tolerance relative to scale^2.
template <Scalar T>
bool positive_cross(const T& c, double scale) {
  if constexpr (Arith<T>::exact) {
    (void)scale;
    return sgn(c) > 0;
  } else {
    return c > Arith<double>::merge_eps * std::max(1.0, scale * scale);
  }
}

template <Scalar T>
int half_of(const Vec2<T>& p) {
  int sy = Arith<T>::sign(p.y);
  return (sy > 0 || (sy == 0 && Arith<T>::sign(p.x) > 0)) ? 0 : 1;
}

template <Scalar T>
bool angle_less(const Vec2<T>& a, const Vec2<T>& b) {
  int ha = half_of(a), hb = half_of(b);
  if (ha != hb) return ha < hb;
  return Arith<T>::sign(cross(a, b)) > 0;
}

template <Scalar T>
bool same_direction(const Vec2<T>& a, const Vec2<T>& b) {
  if (half_of(a) != half_of(b)) return false;
  T c = cross(a, b);
  if constexpr (Arith<T>::exact) {
    return sgn(c) == 0;
  } else {
    return std::fabs(c) <= Arith<double>::merge_eps * std::max(1.0, magnitude(a) * magnitude(b));
  }
}

// Vertex x with g.x = 1 and h.x = 1, for g, h consecutive counterclockwise.
template <Scalar T>
Vec2<T> dual_vertex(const Vec2<T>& g, const Vec2<T>& h) {
  T d = cross(g, h);
  return {(h.y - g.y) / d, (g.x - h.x) / d};
}

struct Candidate {
  std::size_t index;
  int sign;
};

}  // namespace

// ---------------------------------------------------------------------------
// SymPolytope / PlaneBasis

template <Scalar T>
SymPolytope<T>::SymPolytope(std::size_t dim, std::vector<Covector<T>> facets) : dim_(dim) {
  if (dim < 2) throw InputError("polytope dimension must be at least 2");
  for (const auto& g : facets) {
    require_same_dim(dim, g.dim(), "SymPolytope facet");
    if (g.is_zero()) continue;
    bool absorbed = false;
    for (auto& kept : facets_) {
      std::size_t lead = 0;
      while (Arith<T>::is_zero(kept[lead])) ++lead;
      T ratio = g[lead] / kept[lead];
      bool parallel = true;
      for (std::size_t a = 0; a < dim && parallel; ++a)
        parallel = Arith<T>::negligible(g[a] - ratio * kept[a],
                                        std::fabs(Arith<T>::to_double(g[a])));
      if (!parallel) continue;
      if (Arith<T>::to_double(Arith<T>::abs(ratio)) > 1.0 &&
          !Arith<T>::eq(Arith<T>::abs(ratio), T(1)))
        kept = g;
      absorbed = true;
      break;
    }
    if (!absorbed) facets_.push_back(g);
  }
  linalg::Matrix<T> rows;
  for (const auto& g : facets_) rows.push_back(g.coeffs);
  if (linalg::rank(rows) != dim)
    throw InputError("facet functionals do not span the dual space: body is unbounded");
}

template <Scalar T>
T SymPolytope<T>::norm(const Vec<T>& x) const {
  T best(0);
  for (const auto& g : facets_) {
    T v = Arith<T>::abs(g(x));
    if (v > best) best = v;
  }
  return best;
}

template <Scalar T>
PlaneBasis<T>::PlaneBasis(Vec<T> u1, Vec<T> u2) : u1_(std::move(u1)), u2_(std::move(u2)) {
  require_same_dim(u1_.dim(), u2_.dim(), "PlaneBasis");
  if (u1_.dim() < 2) throw InputError("plane basis vectors must have dimension >= 2");
  if (is_degenerate(SimpleTwoVector<T>{u1_, u2_}))
    throw InputError("plane basis vectors are linearly dependent");
}

template <Scalar T>
Vec<T> PlaneBasis<T>::embed(const Vec2<T>& st) const {
  Vec<T> out(dim());
  for (std::size_t i = 0; i < dim(); ++i) out[i] = st.x * u1_[i] + st.y * u2_[i];
  return out;
}

// ---------------------------------------------------------------------------
// SymPolygon

template <Scalar T>
double PolygonEdge<T>::length() const {
  double x = Arith<T>::to_double(v.x), y = Arith<T>::to_double(v.y);
  return std::sqrt(x * x + y * y);
}

template <Scalar T>
double PolygonEdge<T>::origin_distance() const {
  return Arith<T>::to_double(twice_triangle_area) / length();
}

template <Scalar T>
SymPolygon<T> SymPolygon<T>::from_half_vertices(std::vector<Vec2<T>> half) {
  const std::size_t n = half.size();
  if (n < 2) throw InputError("a symmetric polygon needs at least 4 vertices");
  SymPolygon poly;
  poly.half_ = std::move(half);

  double scale = 0;
  for (const auto& a : poly.half_) scale = std::max(scale, magnitude(a));

  std::vector<Vec2<T>> sides(n);
  for (std::size_t i = 0; i < n; ++i) sides[i] = poly.vertex(i + 1) - poly.vertex(i);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2<T>& next = i + 1 < n ? sides[i + 1] : Vec2<T>{-sides[0].x, -sides[0].y};
    if (!positive_cross(cross(sides[i], next), 2 * scale))
      throw InputError("polygon is not strictly convex and counterclockwise");
    if (i > 0 && !positive_cross(cross(sides[0], sides[i]), 2 * scale))
      throw InputError("polygon sides wind more than once");
  }

  T twice(0);
  for (std::size_t k = 0; k < 2 * n; ++k) twice += cross(poly.vertex(k), poly.vertex(k + 1));
  poly.area_ = twice / T(2);

  poly.edges_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& e = poly.edges_[i];
    e.v = sides[i];
    e.twice_triangle_area = cross(poly.vertex(i), poly.vertex(i + 1));
    e.support = {e.v.y / e.twice_triangle_area, -e.v.x / e.twice_triangle_area};
    e.weight = e.twice_triangle_area / poly.area_;
  }
  return poly;
}

template <Scalar T>
Vec2<T> SymPolygon<T>::vertex(std::size_t i) const {
  const std::size_t n = half_.size();
  i %= 2 * n;
  return i < n ? half_[i] : -half_[i - n];
}

template <Scalar T>
std::vector<Vec2<T>> SymPolygon<T>::vertices() const {
  std::vector<Vec2<T>> out;
  out.reserve(2 * n());
  for (std::size_t i = 0; i < 2 * n(); ++i) out.push_back(vertex(i));
  return out;
}

// ---------------------------------------------------------------------------
// Half-plane intersection: sort the constraint normals +-f_j by angle, keep
// the tightest one per direction, then walk the boundary of their convex hull
// (the polar polygon). Hull vertices are the non-redundant constraints in
// counterclockwise order; consecutive pairs meet at the vertices of K.

template <Scalar T>
SymPolygon<T> halfplane_intersection(std::span<const Vec2<T>> constraints) {
  std::vector<Vec2<T>> pts;
  std::vector<Candidate> tags;
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    const auto& c = constraints[j];
    if (Arith<T>::is_zero(c.x) && Arith<T>::is_zero(c.y)) continue;
    pts.push_back(c);
    tags.push_back({j, 1});
    pts.push_back(-c);
    tags.push_back({j, -1});
  }
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return angle_less(pts[a], pts[b]); });

  // One candidate per direction: the longest normal (tightest constraint),
  // ties resolved towards the smallest constraint index.
  std::vector<std::size_t> dirs;
  for (std::size_t k = 0; k < order.size();) {
    std::size_t best = order[k];
    std::size_t m = k + 1;
    while (m < order.size() && same_direction(pts[order[k]], pts[order[m]])) {
      std::size_t cand = order[m];
      T lb = dot(pts[best], pts[best]), lc = dot(pts[cand], pts[cand]);
      bool tie = Arith<T>::eq(lb, lc, Arith<T>::to_double(lb));
      if ((!tie && lc > lb) || (tie && tags[cand].index < tags[best].index)) best = cand;
      ++m;
    }
    dirs.push_back(best);
    k = m;
  }
  if (dirs.size() < 4) throw InputError("half-plane constraints do not bound a polygon (rank < 2)");

  double scale = 0;
  for (auto d : dirs) scale = std::max(scale, magnitude(pts[d]));

  // Start from the rightmost (then topmost) normal, which is a hull vertex.
  std::size_t start = 0;
  for (std::size_t k = 1; k < dirs.size(); ++k) {
    const auto& p = pts[dirs[k]];
    const auto& s = pts[dirs[start]];
    if (p.x > s.x || (p.x == s.x && p.y > s.y)) start = k;
  }
  std::vector<std::size_t> hull;
  const std::size_t m = dirs.size();
  for (std::size_t t = 0; t <= m; ++t) {
    std::size_t cur = dirs[(start + t) % m];
    while (hull.size() >= 2) {
      const auto& a = pts[hull[hull.size() - 2]];
      const auto& b = pts[hull.back()];
      if (positive_cross(cross(b - a, pts[cur] - b), 2 * scale)) break;
      hull.pop_back();
    }
    if (t < m) hull.push_back(cur);
  }
  // The closing step may also expose a non-convex turn at the start.
  while (hull.size() >= 3) {
    const auto& a = pts[hull[hull.size() - 1]];
    const auto& b = pts[hull[0]];
    const auto& c = pts[hull[1]];
    if (positive_cross(cross(b - a, c - b), 2 * scale)) break;
    hull.erase(hull.begin());
  }
  if (hull.size() % 2 != 0 || hull.size() < 4)
    throw std::runtime_error("halfplane_intersection: constraint hull lost central symmetry");

  // Rotate so the first side's normal is the first one with angle in [0, pi).
  std::size_t first = 0;
  for (std::size_t k = 0; k < hull.size(); ++k) {
    std::size_t prev = (k + hull.size() - 1) % hull.size();
    if (half_of(pts[hull[k]]) == 0 && half_of(pts[hull[prev]]) == 1) {
      first = k;
      break;
    }
  }
  std::rotate(hull.begin(), hull.begin() + static_cast<long>(first), hull.end());
  const std::size_t n = hull.size() / 2;
  for (std::size_t i = 0; i < n; ++i)
    if (tags[hull[i + n]].index != tags[hull[i]].index)
      throw std::runtime_error("halfplane_intersection: constraint hull lost central symmetry");

  std::vector<Vec2<T>> half(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prev = pts[hull[(i + 2 * n - 1) % (2 * n)]];
    half[i] = dual_vertex(prev, pts[hull[i]]);
  }
  auto poly = SymPolygon<T>::from_half_vertices(std::move(half));
  for (std::size_t i = 0; i < n; ++i) {
    auto& e = poly.mutable_edges()[i];
    e.source = tags[hull[i]].index;
    e.source_sign = tags[hull[i]].sign;
  }
  return poly;
}

template <Scalar T>
std::vector<Vec2<T>> pull_back(const SymPolytope<T>& body, const Vec<T>& v1, const Vec<T>& v2) {
  require_same_dim(body.dim(), v1.dim(), "pull_back");
  require_same_dim(body.dim(), v2.dim(), "pull_back");
  std::vector<Vec2<T>> out;
  out.reserve(body.facets().size());
  for (const auto& g : body.facets()) out.push_back({g(v1), g(v2)});
  return out;
}

template <Scalar T>
SymPolygon<T> section(const SymPolytope<T>& body, const PlaneBasis<T>& plane) {
  auto constraints = pull_back(body, plane.u1(), plane.u2());
  SymPolygon<T> k = [&] {
    try {
      return halfplane_intersection<T>(constraints);
    } catch (const InputError&) {
      throw InputError("section of the body by the plane is unbounded: malformed polytope");
    }
  }();
  for (auto& e : k.mutable_edges()) {
    const auto& g = body.facets()[*e.source];
    e.ambient = e.source_sign > 0 ? g : -g;
  }
  return k;
}

template <Scalar T>
T polygon_area(const SymPolygon<T>& k) {
  return k.area();
}

template <Scalar T>
std::vector<T> edge_weights(const SymPolygon<T>& k) {
  std::vector<T> out;
  for (const auto& e : k.edges()) out.push_back(e.weight);
  return out;
}

template <Scalar T>
SymPolygon<T> polar_polygon(const SymPolygon<T>& k) {
  std::vector<Vec2<T>> half;
  for (const auto& e : k.edges()) half.push_back(e.support);
  return SymPolygon<T>::from_half_vertices(std::move(half));
}

template <Scalar T>
T support_value(const SymPolygon<T>& k, const Vec2<T>& u) {
  T best = Arith<T>::abs(dot(k.half_vertices().front(), u));
  for (const auto& a : k.half_vertices()) {
    T v = Arith<T>::abs(dot(a, u));
    if (v > best) best = v;
  }
  return best;
}

template <Scalar T>
T mixed_area(const SymPolygon<T>& k, const SymPolygon<T>& k2) {
  // (1/2) sum over all 2n sides e of K2 of h_K(outward normal scaled by |e|);
  // opposite sides contribute equally.
  T acc(0);
  for (const auto& e : k2.edges()) acc += support_value(k, Vec2<T>{e.v.y, -e.v.x});
  return acc;
}

template <Scalar T>
T minkowski_gap(const SymPolygon<T>& k, const SymPolygon<T>& k2) {
  T v = mixed_area(k, k2);
  return v * v - k.area() * k2.area();
}

template <Scalar T>
bool same_vertex_set(const SymPolygon<T>& a, const SymPolygon<T>& b) {
  if (a.n() != b.n()) return false;
  double scale = 1;
  for (const auto& p : a.half_vertices()) scale = std::max(scale, magnitude(p));
  auto close = [&](const Vec2<T>& p, const Vec2<T>& q) {
    return Arith<T>::eq(p.x, q.x, scale) && Arith<T>::eq(p.y, q.y, scale);
  };
  for (const auto& p : a.vertices()) {
    auto vs = b.vertices();
    if (std::none_of(vs.begin(), vs.end(), [&](const Vec2<T>& q) { return close(p, q); })) return false;
  }
  return true;
}

template <Scalar T>
std::vector<Vec<T>> enumerate_vertices(const SymPolytope<T>& body) {
  const std::size_t n = body.dim();
  const std::size_t m = body.facets().size();
  std::vector<Vec<T>> out;
  std::vector<std::size_t> pick(n);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  auto advance = [&]() {
    for (std::size_t r = n; r-- > 0;) {
      if (pick[r] < m - n + r) {
        ++pick[r];
        for (std::size_t s = r + 1; s < n; ++s) pick[s] = pick[s - 1] + 1;
        return true;
      }
    }
    return false;
  };
  if (m < n) return out;
  do {
    linalg::Matrix<T> a;
    for (auto j : pick) a.push_back(body.facets()[j].coeffs);
    for (std::size_t signs = 0; signs < (std::size_t{1} << n); ++signs) {
      std::vector<T> rhs(n);
      for (std::size_t r = 0; r < n; ++r) rhs[r] = (signs >> r) & 1 ? T(-1) : T(1);
      auto x = linalg::solve(a, rhs);
      if (!x) break;
      Vec<T> v(std::move(*x));
      if (!Arith<T>::leq(body.norm(v), T(1))) continue;
      bool dup = std::any_of(out.begin(), out.end(), [&](const Vec<T>& w) {
        for (std::size_t i = 0; i < n; ++i)
          if (!Arith<T>::eq(v[i], w[i])) return false;
        return true;
      });
      if (!dup) out.push_back(std::move(v));
    }
  } while (advance());
  return out;
}

#define BHCAL_INSTANTIATE_POLYTOPE(T)                                                        \
  template class SymPolytope<T>;                                                             \
  template class PlaneBasis<T>;                                                              \
  template struct PolygonEdge<T>;                                                            \
  template class SymPolygon<T>;                                                              \
  template SymPolygon<T> halfplane_intersection<T>(std::span<const Vec2<T>>);               \
  template SymPolygon<T> section<T>(const SymPolytope<T>&, const PlaneBasis<T>&);           \
  template std::vector<Vec2<T>> pull_back<T>(const SymPolytope<T>&, const Vec<T>&,          \
                                             const Vec<T>&);                                 \
  template T polygon_area<T>(const SymPolygon<T>&);                                          \
  template std::vector<T> edge_weights<T>(const SymPolygon<T>&);                             \
  template SymPolygon<T> polar_polygon<T>(const SymPolygon<T>&);                             \
  template T support_value<T>(const SymPolygon<T>&, const Vec2<T>&);                         \
  template T mixed_area<T>(const SymPolygon<T>&, const SymPolygon<T>&);                      \
  template T minkowski_gap<T>(const SymPolygon<T>&, const SymPolygon<T>&);                   \
  template bool same_vertex_set<T>(const SymPolygon<T>&, const SymPolygon<T>&);              \
  template std::vector<Vec<T>> enumerate_vertices<T>(const SymPolytope<T>&);

BHCAL_INSTANTIATE_POLYTOPE(Rational)
BHCAL_INSTANTIATE_POLYTOPE(double)

}  // namespace bhcal
