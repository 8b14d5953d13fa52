#include "bhcal/calibrate.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "bhcal/sampling.hpp"

namespace bhcal {

namespace {

template <Scalar T>
T det2(const Covector<T>& f, const Covector<T>& g) {
  if (f.dim() != 2 || g.dim() != 2) throw DimensionError("functionals must live on R^2");
  return f[0] * g[1] - f[1] * g[0];
}

template <Scalar T>
void require_probability(std::span<const T> p, std::size_t expected) {
  if (p.size() != expected) throw InputError("expected one weight per functional");
  T total(0);
  for (const auto& w : p) {
    if (Arith<T>::sign(w) < 0) throw InputError("weights must be nonnegative");
    total += w;
  }
  if (!Arith<T>::eq(total, T(1))) throw InputError("weights must sum to 1");
}

template <Scalar T>
double magnitude(const T& x) {
  return std::fabs(Arith<T>::to_double(x));
}

template <Scalar T>
Covector<T> as_covector(const Vec2<T>& v) {
  return Covector<T>(std::vector<T>{v.x, v.y});
}

}  // namespace

template <Scalar T>
Calibrator<T> build_calibrator(const SymPolytope<T>& body, const PlaneBasis<T>& plane) {
  require_same_dim(body.dim(), plane.dim(), "build_calibrator");
  SymPolygon<T> k = section(body, plane);
  TwoForm<T> omega(body.dim());
  const auto& edges = k.edges();
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      const T w = edges[i].weight * edges[j].weight;
      omega += wedge(*edges[i].ambient, *edges[j].ambient).scaled(w);
    }
  const T on_plane = eval_two_form(omega, plane.two_vector());
  const T expected = T(1) / k.area();
  if (!Arith<T>::eq(on_plane, expected, magnitude(expected)))
    throw std::logic_error("calibrator does not attain the density on its plane");
  return Calibrator<T>{body, plane, std::move(k), std::move(omega)};
}

template <Scalar T>
bool CalibratorReport<T>::passed() const {
  if (!Arith<T>::eq(equality_residual, T(0), magnitude(worst_density))) return false;
  if (!max_violation) return true;
  return Arith<T>::leq(*max_violation, T(0), magnitude(worst_density));
}

template <Scalar T>
CalibratorReport<T> verify_calibrator(const Calibrator<T>& c, std::size_t n_samples, std::uint64_t seed,
                                      std::int64_t sample_bound) {
  CalibratorReport<T> report;
  report.seed = seed;
  report.n_samples = n_samples;
  report.sample_bound = sample_bound;
  BHDensity<T> density(c.body);
  const auto u = c.plane.two_vector();
  report.equality_residual =
      Arith<T>::abs(eval_two_form(c.omega, u)) - bh_eval(density, u).value.coeff;

  SplitMix64 rng(seed);
  for (std::size_t s = 0; s < n_samples; ++s) {
    auto sigma = random_simple_two_vector<T>(rng, c.body.dim(), sample_bound);
    const T w = eval_two_form(c.omega, sigma);
    const T a = bh_eval(density, sigma).value.coeff;
    const T violation = Arith<T>::abs(w) - a;
    if (!report.max_violation || violation > *report.max_violation) {
      report.max_violation = violation;
      report.worst_sample = sigma;
      report.worst_omega = w;
      report.worst_density = a;
    }
  }
  return report;
}

template <Scalar T>
T lhs_sum(std::span<const Covector<T>> f, std::span<const T> p) {
  if (f.size() != p.size()) throw InputError("expected one weight per functional");
  T acc(0);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j) acc += p[i] * p[j] * Arith<T>::abs(det2(f[i], f[j]));
  return acc;
}

template <Scalar T>
T lhs_abs(std::span<const Covector<T>> f, std::span<const T> p) {
  if (f.size() != p.size()) throw InputError("expected one weight per functional");
  T acc(0);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j) acc += p[i] * p[j] * det2(f[i], f[j]);
  return Arith<T>::abs(acc);
}

template <Scalar T>
MainPropReport<T> check_main_prop(const SymPolygon<T>& k, std::span<const Covector<T>> f, std::span<const T> p) {
  require_probability(p, f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].dim() != 2) throw DimensionError("check_main_prop: functionals must live on R^2");
    for (const auto& a : k.vertices()) {
      const T value = f[i][0] * a.x + f[i][1] * a.y;
      if (!Arith<T>::leq(value, T(1)))
        throw InputError("functional " + std::to_string(i) + " exceeds 1 on the polygon");
    }
  }
  MainPropReport<T> r;
  r.lhs_abs = lhs_abs(f, p);
  r.lhs_sum = lhs_sum(f, p);
  r.bound = T(1) / k.area();
  const double scale = magnitude(r.bound);
  r.abs_le_sum = Arith<T>::leq(r.lhs_abs, r.lhs_sum, scale);
  r.sum_le_bound = Arith<T>::leq(r.lhs_sum, r.bound, scale);
  return r;
}

template <Scalar T>
std::pair<std::vector<Covector<T>>, std::vector<T>> equality_configuration(const SymPolygon<T>& k) {
  std::vector<Covector<T>> f;
  std::vector<T> p;
  for (std::size_t i = 0; i < k.n(); ++i) {
    f.push_back(k.support_covector(i));
    p.push_back(k.edges()[i].weight);
  }
  return {std::move(f), std::move(p)};
}

template <Scalar T>
Lemma1Report<T> lemma1_check(const SymPolygon<T>& k) {
  Lemma1Report<T> r;
  r.shoelace = k.area();
  T signed_sum(0);
  const auto& e = k.edges();
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      const T c = cross(e[i].v, e[j].v);
      r.pair_sum += Arith<T>::abs(c);
      signed_sum += c;
    }
  r.abs_signed_sum = Arith<T>::abs(signed_sum);
  const double scale = magnitude(r.shoelace);
  r.passed = Arith<T>::eq(r.shoelace, r.pair_sum, scale) && Arith<T>::eq(r.shoelace, r.abs_signed_sum, scale);
  return r;
}

template <Scalar T>
Lemma2Report<T> lemma2_check(const SymPolygon<T>& k) {
  Lemma2Report<T> r;
  const auto& e = k.edges();
  const T area_sq = k.area() * k.area();
  r.bound = T(1) / k.area();
  const double scale = magnitude(r.bound);
  T signed_sum(0);
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      const T wedge_fg = det2(k.support_covector(i), k.support_covector(j));
      const T lhs = e[i].weight * e[j].weight * Arith<T>::abs(wedge_fg);
      const T rhs = Arith<T>::abs(cross(e[i].v, e[j].v)) / area_sq;
      ++r.pairs_checked;
      if (!Arith<T>::eq(lhs, rhs, scale)) ++r.pair_failures;
      r.sum += lhs;
      signed_sum += e[i].weight * e[j].weight * wedge_fg;
    }
  r.signed_abs = Arith<T>::abs(signed_sum);
  r.passed = r.pair_failures == 0 && Arith<T>::eq(r.sum, r.bound, scale) && Arith<T>::eq(r.signed_abs, r.bound, scale);
  return r;
}

template <Scalar T>
Lemma3Certificate<T> lemma3_certificate(const SymPolygon<T>& k, std::span<const T> p) {
  require_probability(p, k.n());
  Lemma3Certificate<T> cert;
  cert.area_k = k.area();
  for (std::size_t i = 0; i < k.n(); ++i)
    if (Arith<T>::sign(p[i]) > 0) cert.kept.push_back(i);

  if (cert.kept.size() < 2) {
    // A single functional: the left-hand side is an empty sum.
    cert.p.assign(cert.kept.size(), T(1));
    cert.lhs = T(0);
    cert.mixed_equals_area = cert.lhs_identity = cert.gap_nonnegative = cert.area_bound = true;
    return cert;
  }

  SymPolygon<T> reduced = k;
  if (cert.kept.size() == k.n()) {
    cert.p.assign(p.begin(), p.end());
  } else {
    std::vector<Vec2<T>> supports;
    for (auto i : cert.kept) supports.push_back(k.edges()[i].support);
    reduced = halfplane_intersection<T>(supports);
    if (reduced.n() != cert.kept.size())
      throw std::logic_error("lemma3_certificate: a kept side became redundant");
    for (const auto& e : reduced.edges()) cert.p.push_back(p[cert.kept[*e.source]]);
  }
  cert.area_reduced = reduced.area();

  const auto& e = reduced.edges();
  const std::size_t n = e.size();
  Vec2<T> start{T(0), T(0)};
  for (std::size_t i = 0; i < n; ++i) {
    cert.q.push_back(e[i].weight);
    cert.lambda.push_back(cert.p[i] / e[i].weight);
    cert.v_prime.push_back(cert.lambda[i] * e[i].v);
    start = start - cert.v_prime.back();
  }
  const T half = T(1) / T(2);
  std::vector<Vec2<T>> half_vertices;
  Vec2<T> cur = half * start;
  for (const auto& v : cert.v_prime) {
    half_vertices.push_back(cur);
    cur = cur + v;
  }
  SymPolygon<T> k_prime = SymPolygon<T>::from_half_vertices(std::move(half_vertices));

  std::vector<Covector<T>> f;
  for (std::size_t i = 0; i < n; ++i) f.push_back(reduced.support_covector(i));
  cert.lhs = lhs_sum<T>(f, cert.p);
  cert.area_k_prime = k_prime.area();
  cert.mixed = mixed_area(reduced, k_prime);
  cert.gap = minkowski_gap(reduced, k_prime);

  const double scale = magnitude(cert.area_reduced);
  cert.mixed_equals_area = Arith<T>::eq(cert.mixed, cert.area_reduced, scale);
  cert.lhs_identity = Arith<T>::eq(cert.lhs * cert.area_reduced * cert.area_reduced, cert.area_k_prime, scale * scale);
  cert.gap_nonnegative = Arith<T>::leq(T(0), cert.gap, scale * scale);
  const T bound = T(1) / cert.area_k;
  cert.area_bound = Arith<T>::leq(cert.area_k_prime, cert.area_reduced, scale) &&
                    Arith<T>::leq(cert.lhs, bound, magnitude(bound));
  cert.reduced = std::move(reduced);
  cert.k_prime = std::move(k_prime);
  return cert;
}

template <Scalar T>
std::pair<std::vector<Covector<T>>, std::vector<T>> reduce_functionals(std::span<const Covector<T>> f,
                                                                        std::span<const T> p) {
  if (f.size() != p.size()) throw InputError("expected one weight per functional");
  std::vector<Covector<T>> out_f;
  std::vector<T> out_p;
  auto same = [](const Covector<T>& a, const Covector<T>& b) {
    if (a.dim() != b.dim()) return false;
    for (std::size_t i = 0; i < a.dim(); ++i)
      if (!Arith<T>::eq(a[i], b[i], std::max(magnitude(a[i]), magnitude(b[i])))) return false;
    return true;
  };
  for (std::size_t i = 0; i < f.size(); ++i) {
    Covector<T> g = f[i];
    for (std::size_t c = 0; c < g.dim(); ++c) {
      if (Arith<T>::negligible(g[c], 1.0)) continue;
      if (Arith<T>::sign(g[c]) < 0) g = -g;
      break;
    }
    auto it = std::find_if(out_f.begin(), out_f.end(), [&](const Covector<T>& h) { return same(g, h); });
    if (it == out_f.end()) {
      out_f.push_back(std::move(g));
      out_p.push_back(p[i]);
    } else {
      out_p[static_cast<std::size_t>(it - out_f.begin())] += p[i];
    }
  }
  return {std::move(out_f), std::move(out_p)};
}

template <Scalar T>
PolarMaximum<T> maximize_over_polar(const SymPolygon<T>& k, std::span<const Covector<T>> f, std::span<const T> p,
                                    std::size_t free_index) {
  if (free_index >= f.size()) throw std::out_of_range("maximize_over_polar: free index out of range");
  PolarMaximum<T> out;
  out.vertices = polar_polygon(k).vertices();
  std::vector<Covector<T>> trial(f.begin(), f.end());
  for (std::size_t v = 0; v < out.vertices.size(); ++v) {
    trial[free_index] = as_covector(out.vertices[v]);
    out.values.push_back(lhs_sum<T>(trial, p));
    if (out.values[v] > out.values[out.argmax]) out.argmax = v;
  }
  return out;
}

template <Scalar T>
PolarMaximum<T> maximize_over_polar(std::span<const Vec2<T>> constraints, std::span<const Covector<T>> f,
                                    std::span<const T> p, std::size_t free_index) {
  return maximize_over_polar(halfplane_intersection<T>(constraints), f, p, free_index);
}

DensityOracle bh_oracle(const SymPolytope<Rational>& body) {
  return [d = BHDensity<Rational>(body)](const SimpleTwoVector<Rational>& s) { return bh_eval(d, s).value; };
}

DensityOracle ht_oracle(const SymPolytope<Rational>& body) {
  return [d = HTDensity<Rational>(body)](const SimpleTwoVector<Rational>& s) { return ht_eval(d, s).value; };
}

TwoForm<Rational> LPFeasibility::witness() const {
  TwoForm<Rational> omega(dim);
  if (!feasible()) return omega;
  for (std::size_t v = 0; v < variables.size(); ++v)
    omega.add(variables[v].first, variables[v].second, result.witness[v]);
  return omega;
}

std::vector<Rational> LPFeasibility::encode(const TwoForm<Rational>& omega) const {
  require_same_dim(dim, omega.dim(), "LPFeasibility::encode");
  std::vector<Rational> x;
  for (const auto& [i, j] : variables) x.push_back(omega.coeff(i, j));
  return x;
}

LPFeasibility lp_calibrator_search(const DensityOracle& density, const PlaneBasis<Rational>& plane,
                                   std::span<const SimpleTwoVector<Rational>> samples) {
  LPFeasibility out;
  out.dim = plane.dim();
  for (std::size_t i = 0; i < out.dim; ++i)
    for (std::size_t j = i + 1; j < out.dim; ++j) out.variables.emplace_back(i, j);
  out.problem.num_vars = out.variables.size();

  auto row_for = [&](const SimpleTwoVector<Rational>& s) {
    std::vector<Rational> a;
    for (const auto& [i, j] : out.variables) a.push_back(plucker(s, i, j));
    return a;
  };

  const auto u = plane.two_vector();
  const auto on_plane = density(u);
  out.pi_power = on_plane.pi_power;
  out.problem.add_eq(row_for(u), on_plane.coeff, "plane");

  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    require_same_dim(out.dim, s.dim(), "lp_calibrator_search");
    if (is_degenerate(s)) throw InputError("lp_calibrator_search: sample " + std::to_string(k) + " is degenerate");
    const auto value = density(s);
    if (value.pi_power != out.pi_power) throw std::logic_error("density oracle changed its power of pi");
    auto a = row_for(s);
    std::vector<Rational> neg;
    for (const auto& c : a) neg.push_back(-c);
    out.problem.add_leq(std::move(a), value.coeff, "sample " + std::to_string(k) + " upper");
    out.problem.add_leq(std::move(neg), value.coeff, "sample " + std::to_string(k) + " lower");
  }
  out.result = lp::solve_feasibility(out.problem);
  return out;
}

#define BHCAL_INSTANTIATE_CALIBRATE(T)                                                                           \
  template struct CalibratorReport<T>;                                                                           \
  template Calibrator<T> build_calibrator<T>(const SymPolytope<T>&, const PlaneBasis<T>&);                     \
  template CalibratorReport<T> verify_calibrator<T>(const Calibrator<T>&, std::size_t, std::uint64_t,          \
                                                    std::int64_t);                                               \
  template T lhs_sum<T>(std::span<const Covector<T>>, std::span<const T>);                                      \
  template T lhs_abs<T>(std::span<const Covector<T>>, std::span<const T>);                                      \
  template MainPropReport<T> check_main_prop<T>(const SymPolygon<T>&, std::span<const Covector<T>>,            \
                                                std::span<const T>);                                             \
  template std::pair<std::vector<Covector<T>>, std::vector<T>> equality_configuration<T>(const SymPolygon<T>&); \
  template Lemma1Report<T> lemma1_check<T>(const SymPolygon<T>&);                                               \
  template Lemma2Report<T> lemma2_check<T>(const SymPolygon<T>&);                                               \
  template Lemma3Certificate<T> lemma3_certificate<T>(const SymPolygon<T>&, std::span<const T>);               \
  template std::pair<std::vector<Covector<T>>, std::vector<T>> reduce_functionals<T>(                           \
      std::span<const Covector<T>>, std::span<const T>);                                                         \
  template PolarMaximum<T> maximize_over_polar<T>(const SymPolygon<T>&, std::span<const Covector<T>>,           \
                                                  std::span<const T>, std::size_t);                              \
  template PolarMaximum<T> maximize_over_polar<T>(std::span<const Vec2<T>>, std::span<const Covector<T>>,      \
                                                  std::span<const T>, std::size_t);

BHCAL_INSTANTIATE_CALIBRATE(Rational)
BHCAL_INSTANTIATE_CALIBRATE(double)

}  // namespace bhcal
