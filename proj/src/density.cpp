#include "bhcal/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "bhcal/linalg.hpp"
#include "bhcal/lp.hpp"

namespace bhcal {

template <Scalar T>
AlphaDensity<T>::AlphaDensity(std::vector<Covector<T>> functionals, std::vector<T> weights)
    : functionals_(std::move(functionals)), weights_(std::move(weights)) {
  if (functionals_.empty() || functionals_.size() != weights_.size())
    throw InputError("alpha density needs one weight per functional");
  T total(0);
  for (const auto& p : weights_) {
    if (Arith<T>::sign(p) < 0) throw InputError("alpha density weights must be nonnegative");
    total += p;
  }
  if (!Arith<T>::eq(total, T(1))) throw InputError("alpha density weights must sum to 1");
  for (const auto& f : functionals_) require_same_dim(functionals_.front().dim(), f.dim(), "AlphaDensity");
}

template <Scalar T>
SymPolygon<T> pullback_polygon(const SymPolytope<T>& body, const SimpleTwoVector<T>& sigma) {
  if (is_degenerate(sigma)) throw InputError("pullback_polygon: v1 and v2 are dependent");
  auto constraints = pull_back(body, sigma.v1, sigma.v2);
  return halfplane_intersection<T>(constraints);
}

template <Scalar T>
DensityValue<T> bh_eval(const BHDensity<T>& d, const SimpleTwoVector<T>& sigma) {
  require_same_dim(d.body().dim(), sigma.v1.dim(), "bh_eval");
  require_same_dim(d.body().dim(), sigma.v2.dim(), "bh_eval");
  if (is_degenerate(sigma)) return {{T(0), 1}, true};
  auto k = pullback_polygon(d.body(), sigma);
  return {{T(1) / k.area(), 1}, false};
}

template <Scalar T>
DensityValue<T> ht_eval(const HTDensity<T>& d, const SimpleTwoVector<T>& sigma) {
  require_same_dim(d.body().dim(), sigma.v1.dim(), "ht_eval");
  require_same_dim(d.body().dim(), sigma.v2.dim(), "ht_eval");
  if (is_degenerate(sigma)) return {{T(0), -1}, true};
  auto k = pullback_polygon(d.body(), sigma);
  return {{polar_polygon(k).area(), -1}, false};
}

template <Scalar T>
DensityValue<T> alpha_eval(const AlphaDensity<T>& a, const SimpleTwoVector<T>& sigma) {
  require_same_dim(a.dim(), sigma.v1.dim(), "alpha_eval");
  require_same_dim(a.dim(), sigma.v2.dim(), "alpha_eval");
  const auto& fs = a.functionals();
  const auto& ps = a.weights();
  std::vector<T> at1, at2;
  for (const auto& f : fs) {
    at1.push_back(f(sigma.v1));
    at2.push_back(f(sigma.v2));
  }
  T acc(0);
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = i + 1; j < fs.size(); ++j)
      acc += ps[i] * ps[j] * Arith<T>::abs(at1[i] * at2[j] - at2[i] * at1[j]);
  return {{acc, 1}, is_degenerate(sigma)};
}

bool recession_cone_trivial(std::size_t k, std::span<const HalfSpace<Rational>> constraints) {
  for (std::size_t c = 0; c < k; ++c) {
    for (int s : {1, -1}) {
      lp::Problem p;
      p.num_vars = k;
      for (const auto& h : constraints) p.add_leq(h.a.coeffs, Rational(0));
      std::vector<Rational> unit(k, Rational(0));
      unit[c] = 1;
      p.add_eq(unit, Rational(s));
      if (lp::solve_feasibility(p).status == lp::Status::Feasible) return false;
    }
  }
  return true;
}

namespace {

template <Scalar T>
bool on_boundary(const HalfSpace<T>& h, const Vec<T>& v) {
  return Arith<T>::eq(h.a(v), h.b, std::fabs(Arith<T>::to_double(h.b)));
}

template <Scalar T>
int half_of(const T& x, const T& y) {
  int sy = Arith<T>::sign(y);
  return (sy > 0 || (sy == 0 && Arith<T>::sign(x) > 0)) ? 0 : 1;
}

// Sorts 2D points counterclockwise around their centroid.
template <Scalar T>
void sort_around_centroid(std::vector<std::pair<Vec2<T>, std::size_t>>& pts) {
  Vec2<T> c{T(0), T(0)};
  for (const auto& p : pts) c = c + p.first;
  T inv = T(1) / T(static_cast<long>(pts.size()));
  c = inv * c;
  std::sort(pts.begin(), pts.end(), [&](const auto& a, const auto& b) {
    Vec2<T> da = a.first - c, db = b.first - c;
    int ha = half_of(da.x, da.y), hb = half_of(db.x, db.y);
    if (ha != hb) return ha < hb;
    return Arith<T>::sign(cross(da, db)) > 0;
  });
}

template <Scalar T>
std::vector<HalfSpace<Rational>> to_rational(std::span<const HalfSpace<T>> hs) {
  std::vector<HalfSpace<Rational>> out;
  for (const auto& h : hs) {
    Covector<Rational> a(h.a.dim());
    for (std::size_t i = 0; i < h.a.dim(); ++i) a[i] = Rational(h.a[i]);
    out.push_back({std::move(a), Rational(h.b)});
  }
  return out;
}

}  // namespace

template <Scalar T>
std::vector<Vec<T>> polytope_vertices(std::size_t k, std::span<const HalfSpace<T>> constraints) {
  std::vector<Vec<T>> out;
  const std::size_t m = constraints.size();
  if (m < k) return out;
  for (const auto& h : constraints) require_same_dim(k, h.a.dim(), "polytope_vertices");
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  while (true) {
    linalg::Matrix<T> a;
    std::vector<T> b;
    for (auto j : pick) {
      a.push_back(constraints[j].a.coeffs);
      b.push_back(constraints[j].b);
    }
    if (auto x = linalg::solve(a, b)) {
      Vec<T> v(std::move(*x));
      bool feasible = std::all_of(constraints.begin(), constraints.end(), [&](const HalfSpace<T>& h) {
        return Arith<T>::leq(h.a(v), h.b, std::fabs(Arith<T>::to_double(h.b)));
      });
      if (feasible) {
        bool dup = std::any_of(out.begin(), out.end(), [&](const Vec<T>& w) {
          for (std::size_t i = 0; i < k; ++i)
            if (!Arith<T>::eq(v[i], w[i])) return false;
          return true;
        });
        if (!dup) out.push_back(std::move(v));
      }
    }
    std::size_t r = k;
    while (r-- > 0) {
      if (pick[r] < m - k + r) {
        ++pick[r];
        for (std::size_t s = r + 1; s < k; ++s) pick[s] = pick[s - 1] + 1;
        break;
      }
      if (r == 0) return out;
    }
  }
}

template <Scalar T>
T volume_k(std::size_t k, std::span<const HalfSpace<T>> constraints) {
  if (k != 2 && k != 3) throw std::invalid_argument("volume_k supports k = 2 and k = 3");
  auto exact = to_rational(constraints);
  if (!recession_cone_trivial(k, exact)) throw InputError("volume_k: region is unbounded");
  auto verts = polytope_vertices(k, constraints);
  if (verts.empty()) throw InputError("volume_k: region is empty");
  if (verts.size() < k + 1) return T(0);

  Vec<T> centroid(k);
  for (const auto& v : verts) centroid = centroid + v;
  const T inv = T(1) / T(static_cast<long>(verts.size()));
  centroid = inv * centroid;

  if (k == 2) {
    std::vector<std::pair<Vec2<T>, std::size_t>> pts;
    for (std::size_t i = 0; i < verts.size(); ++i) pts.push_back({{verts[i][0], verts[i][1]}, i});
    sort_around_centroid(pts);
    T twice(0);
    for (std::size_t i = 0; i < pts.size(); ++i)
      twice += cross(pts[i].first, pts[(i + 1) % pts.size()].first);
    return Arith<T>::abs(twice) / T(2);
  }

  T six_vol(0);
  std::set<std::vector<std::size_t>> seen;
  for (const auto& h : constraints) {
    std::vector<std::size_t> on;
    for (std::size_t i = 0; i < verts.size(); ++i)
      if (on_boundary(h, verts[i])) on.push_back(i);
    if (on.size() < 3 || !seen.insert(on).second) continue;
    std::size_t drop = 0;
    for (std::size_t c = 1; c < 3; ++c)
      if (Arith<T>::abs(h.a[c]) > Arith<T>::abs(h.a[drop])) drop = c;
    std::size_t c0 = drop == 0 ? 1 : 0, c1 = drop == 2 ? 1 : 2;
    std::vector<std::pair<Vec2<T>, std::size_t>> pts;
    for (auto i : on) pts.push_back({{verts[i][c0], verts[i][c1]}, i});
    sort_around_centroid(pts);
    const Vec<T> p0 = verts[pts[0].second] - centroid;
    for (std::size_t t = 1; t + 1 < pts.size(); ++t) {
      const Vec<T> p1 = verts[pts[t].second] - centroid;
      const Vec<T> p2 = verts[pts[t + 1].second] - centroid;
      six_vol += Arith<T>::abs(determinant<T>({p0.coords, p1.coords, p2.coords}));
    }
  }
  return six_vol / T(6);
}

template <Scalar T>
T volume_symmetric(std::size_t k, std::span<const Covector<T>> functionals) {
  if (k == 2) {
    std::vector<Vec2<T>> c;
    for (const auto& f : functionals) {
      require_same_dim(2, f.dim(), "volume_symmetric");
      c.push_back({f[0], f[1]});
    }
    return halfplane_intersection<T>(c).area();
  }
  std::vector<HalfSpace<T>> hs;
  for (const auto& f : functionals) {
    hs.push_back({f, T(1)});
    hs.push_back({-f, T(1)});
  }
  return volume_k<T>(k, hs);
}

#define BHCAL_INSTANTIATE_DENSITY(T)                                                              \
  template class AlphaDensity<T>;                                                                 \
  template SymPolygon<T> pullback_polygon<T>(const SymPolytope<T>&, const SimpleTwoVector<T>&);   \
  template DensityValue<T> bh_eval<T>(const BHDensity<T>&, const SimpleTwoVector<T>&);            \
  template DensityValue<T> ht_eval<T>(const HTDensity<T>&, const SimpleTwoVector<T>&);            \
  template DensityValue<T> alpha_eval<T>(const AlphaDensity<T>&, const SimpleTwoVector<T>&);      \
  template T volume_k<T>(std::size_t, std::span<const HalfSpace<T>>);                             \
  template T volume_symmetric<T>(std::size_t, std::span<const Covector<T>>);                      \
  template std::vector<Vec<T>> polytope_vertices<T>(std::size_t, std::span<const HalfSpace<T>>);

BHCAL_INSTANTIATE_DENSITY(Rational)
BHCAL_INSTANTIATE_DENSITY(double)

}  // namespace bhcal
