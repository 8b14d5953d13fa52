#include "doctest.h"

#include "bhcal/calibrate.hpp"
#include "bhcal/sampling.hpp"
#include "oracles.hpp"

using namespace bhcal;
using R = Rational;
using V2 = Vec2<R>;

namespace {

Vec<R> vec(std::initializer_list<long> xs) {
  Vec<R> v;
  for (long x : xs) v.coords.emplace_back(x);
  return v;
}

Covector<R> cov(R a, R b) { return Covector<R>(std::vector<R>{a, b}); }

SymPolygon<R> square() { return SymPolygon<R>::from_half_vertices({{R(1), R(-1)}, {R(1), R(1)}}); }
SymPolygon<R> hexagon() { return SymPolygon<R>::from_half_vertices({{R(1), R(0)}, {R(0), R(1)}, {R(-1), R(1)}}); }

// Random point of K*: a convex combination of two polar vertices, or a vertex.
Covector<R> random_polar_point(SplitMix64& rng, const SymPolygon<R>& polar) {
  auto verts = polar.vertices();
  const auto& a = verts[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(verts.size()) - 1))];
  if (uniform_int(rng, 0, 2) == 0) return cov(a.x, a.y);
  const auto& b = verts[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(verts.size()) - 1))];
  R t(static_cast<long>(uniform_int(rng, 0, 8)), 8);
  t.canonicalize();
  return cov(t * a.x + (1 - t) * b.x, t * a.y + (1 - t) * b.y);
}

std::vector<R> random_weights(SplitMix64& rng, std::size_t n, bool allow_zero) {
  std::vector<R> p(n);
  R total = 0;
  for (auto& w : p) {
    w = R(static_cast<long>(uniform_int(rng, allow_zero ? 0 : 1, 9)));
    total += w;
  }
  if (total == 0) {
    p[0] = 1;
    total = 1;
  }
  for (auto& w : p) w /= total;
  return p;
}

}  // namespace

TEST_CASE("square calibrator in the plane and in R^3") {
  auto c2 = build_calibrator(linf_ball<R>(2), PlaneBasis<R>(vec({1, 0}), vec({0, 1})));
  CHECK(c2.omega.coeffs().size() == 1);
  CHECK(c2.omega.coeff(0, 1) == R(1, 4));
  CHECK(edge_weights(c2.polygon) == std::vector<R>{R(1, 2), R(1, 2)});

  auto c3 = build_calibrator(linf_ball<R>(3), PlaneBasis<R>(vec({1, 0, 0}), vec({0, 1, 0})));
  CHECK(c3.omega.coeffs().size() == 1);
  CHECK(c3.omega.coeff(0, 1) == R(1, 4));

  PlaneBasis<R> skew(vec({1, 0}), vec({1, 1}));
  auto cs = build_calibrator(linf_ball<R>(2), skew);
  BHDensity<R> d(linf_ball<R>(2));
  CHECK(eval_two_form(cs.omega, skew.two_vector()) == R(1, 4));
  CHECK(bh_eval(d, skew.two_vector()).value.coeff == R(1, 4));
}

TEST_CASE("verify_calibrator on the square calibrator in R^3") {
  auto c = build_calibrator(linf_ball<R>(3), PlaneBasis<R>(vec({1, 0, 0}), vec({0, 1, 0})));
  auto report = verify_calibrator(c, 2000, 7);
  REQUIRE(report.max_violation.has_value());
  CHECK(*report.max_violation <= 0);
  CHECK(report.equality_residual == 0);
  CHECK(report.passed());

  // The worst sample is independently checkable.
  BHDensity<R> d(linf_ball<R>(3));
  CHECK(bh_eval(d, *report.worst_sample).value.coeff == report.worst_density);

  CHECK(eval_two_form(c.omega, {vec({1, 0, 0}), vec({0, 0, 1})}) == 0);

  auto empty = verify_calibrator(c, 0, 7);
  CHECK_FALSE(empty.max_violation.has_value());
  CHECK(empty.equality_residual == 0);
  CHECK(empty.passed());
}

TEST_CASE("calibrators of random norms pass exact verification") {
  SplitMix64 rng(2718);
  for (int trial = 0; trial < 6; ++trial) {
    std::size_t dim = 3 + trial % 2;
    auto body = random_sym_polytope<R>(rng, dim, 3 + trial);
    auto s = random_simple_two_vector<R>(rng, dim, 3);
    auto c = build_calibrator(body, PlaneBasis<R>(s.v1, s.v2));
    auto report = verify_calibrator(c, 300, 100 + trial);
    CHECK(report.equality_residual == 0);
    CHECK(*report.max_violation <= 0);
  }
}

TEST_CASE("float-mode calibrator agrees with the exact one") {
  auto exact = build_calibrator(l1_ball<R>(3), PlaneBasis<R>(vec({1, 0, 0}), vec({1, 1, 1})));
  Vec<double> u1(std::vector<double>{1, 0, 0}), u2(std::vector<double>{1, 1, 1});
  auto approx = build_calibrator(l1_ball<double>(3), PlaneBasis<double>(u1, u2));
  for (const auto& [key, c] : exact.omega.coeffs())
    CHECK(approx.omega.coeff(key.first, key.second) == doctest::Approx(c.get_d()).epsilon(1e-12));
  CHECK(verify_calibrator(approx, 500, 3).passed());
}

TEST_CASE("main proposition: equality configuration and trivial cases") {
  for (const auto& k : {square(), hexagon()}) {
    auto [f, p] = equality_configuration(k);
    auto r = check_main_prop<R>(k, f, p);
    CHECK(r.lhs_sum * k.area() == 1);
    CHECK(r.lhs_abs == r.lhs_sum);
    CHECK(r.holds());

    std::vector<Covector<R>> halved;
    for (const auto& g : f) halved.push_back(Covector<R>(std::vector<R>{g[0] / 2, g[1] / 2}));
    auto h = check_main_prop<R>(k, halved, p);
    CHECK(h.lhs_sum * 4 == r.lhs_sum);
    CHECK(h.lhs_sum < h.bound);
  }
  std::vector<Covector<R>> one{cov(R(1), R(0))};
  std::vector<R> w{R(1)};
  auto r = check_main_prop<R>(square(), one, w);
  CHECK(r.lhs_sum == 0);
  CHECK(r.holds());

  std::vector<Covector<R>> bad{cov(R(2), R(0)), cov(R(0), R(1))};
  std::vector<R> half{R(1, 2), R(1, 2)};
  CHECK_THROWS_AS(check_main_prop<R>(square(), bad, half), InputError);
  std::vector<R> bad_w{R(1, 2), R(1, 3)};
  CHECK_THROWS_AS(check_main_prop<R>(square(), one, bad_w), InputError);
}

TEST_CASE("main proposition on random functionals from the polar") {
  SplitMix64 rng(44);
  for (int trial = 0; trial < 150; ++trial) {
    auto k = random_sym_polygon<R>(rng, 2 + trial % 6);
    auto polar = polar_polygon(k);
    std::size_t m = 1 + trial % 7;
    std::vector<Covector<R>> f;
    for (std::size_t i = 0; i < m; ++i) f.push_back(random_polar_point(rng, polar));
    auto p = random_weights(rng, m, true);
    auto r = check_main_prop<R>(k, f, p);
    CHECK(r.holds());
    auto [rf, rp] = reduce_functionals<R>(f, p);
    CHECK(lhs_sum<R>(rf, rp) == r.lhs_sum);
  }
}

TEST_CASE("lemma 1 and lemma 2 checks") {
  auto l1 = lemma1_check(square());
  CHECK(l1.passed);
  CHECK(l1.shoelace == 4);
  CHECK(l1.pair_sum == 4);
  auto l2 = lemma2_check(square());
  CHECK(l2.passed);
  CHECK(l2.sum == R(1, 4));
  CHECK(lemma1_check(hexagon()).passed);
  CHECK(lemma2_check(hexagon()).passed);

  SplitMix64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    auto k = random_sym_polygon<R>(rng, 2 + trial % 7);
    auto a = lemma1_check(k);
    CHECK(a.passed);
    // Independent oracle: the area of the convex hull of the vertex set.
    std::vector<oracle::P2> pts;
    for (const auto& v : k.vertices()) pts.push_back({v.x, v.y});
    CHECK(a.pair_sum == oracle::hull_area(pts));
    auto b = lemma2_check(k);
    CHECK(b.passed);
    CHECK(b.pair_failures == 0);
  }
}

TEST_CASE("lemma 3 certificates") {
  auto [f, q] = equality_configuration(square());
  auto eq = lemma3_certificate<R>(square(), q);
  CHECK(eq.passed());
  CHECK(eq.lambda == std::vector<R>{R(1), R(1)});
  CHECK(eq.lhs == R(1, 4));
  CHECK(eq.area_k_prime == 4);

  std::vector<R> p{R(3, 4), R(1, 4)};
  auto c = lemma3_certificate<R>(square(), p);
  CHECK(c.passed());
  CHECK(c.lambda == std::vector<R>{R(3, 2), R(1, 2)});
  CHECK(c.mixed == 4);
  CHECK(c.area_k_prime == 3);
  CHECK(c.lhs == R(3, 16));
  // K' = [-1/2, 1/2] x [-3/2, 3/2]: check the area by an independent shoelace.
  std::vector<oracle::P2> pts;
  for (const auto& v : c.k_prime->vertices()) pts.push_back({v.x, v.y});
  CHECK(oracle::hull_area(pts) == 3);
  CHECK(c.gap == 16 - 12);

  // A zero weight drops a side before certifying.
  std::vector<R> pz{R(1, 2), R(0), R(1, 2)};
  auto z = lemma3_certificate<R>(hexagon(), pz);
  CHECK(z.passed());
  CHECK(z.kept == std::vector<std::size_t>{0, 2});
  REQUIRE(z.reduced.has_value());
  CHECK(z.reduced->n() == 2);
  CHECK(z.area_reduced >= z.area_k);
  std::vector<Covector<R>> hf;
  for (std::size_t i = 0; i < 3; ++i) hf.push_back(hexagon().support_covector(i));
  CHECK(z.lhs == lhs_sum<R>(hf, pz));

  std::vector<R> single{R(0), R(1), R(0)};
  auto s = lemma3_certificate<R>(hexagon(), single);
  CHECK(s.passed());
  CHECK(s.lhs == 0);

  SplitMix64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    auto k = random_sym_polygon<R>(rng, 2 + trial % 7);
    auto w = random_weights(rng, k.n(), trial % 3 == 0);
    auto cert = lemma3_certificate<R>(k, w);
    CHECK(cert.passed());
    if (cert.k_prime) {
      CHECK(cert.mixed == cert.area_reduced);
      CHECK(cert.lhs * cert.area_reduced * cert.area_reduced == cert.area_k_prime);
      CHECK(cert.gap >= 0);
    }
  }
}

TEST_CASE("reduce_functionals") {
  auto f = cov(R(1), R(2));
  std::vector<Covector<R>> dup{f, f};
  std::vector<R> w{R(1, 3), R(2, 3)};
  auto [a, pa] = reduce_functionals<R>(dup, w);
  CHECK(a.size() == 1);
  CHECK(pa == std::vector<R>{R(1)});

  std::vector<Covector<R>> flip{f, -f};
  auto [b, pb] = reduce_functionals<R>(flip, w);
  CHECK(b.size() == 1);
  CHECK(pb == std::vector<R>{R(1)});

  std::vector<Covector<R>> distinct{cov(R(1), R(0)), cov(R(0), R(1))};
  auto [c, pc] = reduce_functionals<R>(distinct, w);
  CHECK(c == distinct);
  CHECK(pc == w);

  std::vector<Covector<R>> negative{cov(R(-1), R(3))};
  std::vector<R> one{R(1)};
  auto [d, pd] = reduce_functionals<R>(negative, one);
  CHECK(d.front() == cov(R(1), R(-3)));
}

TEST_CASE("maximize_over_polar") {
  std::vector<Covector<R>> f{cov(R(1), R(0)), cov(R(1), R(0))};
  std::vector<R> p{R(1, 2), R(1, 2)};
  auto m = maximize_over_polar<R>(square(), f, p, 1);
  CHECK(m.vertices.size() == 4);
  const auto& best = m.vertices[m.argmax];
  CHECK(best.x == 0);
  CHECK(abs(best.y) == 1);
  CHECK(m.values[m.argmax] == R(1, 4));

  std::vector<V2> single{{R(1), R(0)}};
  CHECK_THROWS_AS(maximize_over_polar<R>(single, f, p, 0), InputError);

  SplitMix64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    auto k = random_sym_polygon<R>(rng, 2 + trial % 5);
    auto polar = polar_polygon(k);
    std::size_t n = 2 + trial % 4;
    std::vector<Covector<R>> g;
    for (std::size_t i = 0; i < n; ++i) g.push_back(random_polar_point(rng, polar));
    auto w = random_weights(rng, n, false);
    std::size_t free = static_cast<std::size_t>(trial) % n;
    auto res = maximize_over_polar<R>(k, g, w, free);
    const R top = res.values[res.argmax];
    CHECK(lhs_sum<R>(g, w) <= top);
    CHECK(top <= 1 / k.area());
  }
}

TEST_CASE("LP calibrator search") {
  auto body = linf_ball<R>(3);
  PlaneBasis<R> plane(vec({1, 0, 0}), vec({0, 1, 0}));
  SplitMix64 rng(5);
  std::vector<SimpleTwoVector<R>> samples;
  for (int i = 0; i < 200; ++i) samples.push_back(random_simple_two_vector<R>(rng, 3, 10));
  samples.push_back(plane.two_vector());
  auto res = lp_calibrator_search(bh_oracle(body), plane, samples);
  REQUIRE(res.feasible());
  CHECK(res.problem.rows.size() == 1 + 2 * samples.size());
  CHECK(lp::first_violation(res.problem, res.witness().coeffs().empty() ? std::vector<R>(3, R(0))
                                                                          : res.encode(res.witness())) == -1);
  auto explicit_omega = build_calibrator(body, plane).omega;
  CHECK(lp::first_violation(res.problem, res.encode(explicit_omega)) == -1);

  auto only_plane = lp_calibrator_search(bh_oracle(body), plane, {});
  CHECK(only_plane.feasible());

  std::vector<SimpleTwoVector<R>> degenerate{{vec({1, 1, 0}), vec({2, 2, 0})}};
  CHECK_THROWS_AS(lp_calibrator_search(bh_oracle(body), plane, degenerate), InputError);

  // Holmes-Thompson probe: only the self-checked outcome is asserted.
  SplitMix64 nrng(77);
  auto b4 = random_sym_polytope<R>(nrng, 4, 5);
  auto s = random_simple_two_vector<R>(nrng, 4, 3);
  std::vector<SimpleTwoVector<R>> ht_samples;
  for (int i = 0; i < 100; ++i) ht_samples.push_back(random_simple_two_vector<R>(nrng, 4, 10));
  auto ht = lp_calibrator_search(ht_oracle(b4), PlaneBasis<R>(s.v1, s.v2), ht_samples);
  CHECK(ht.pi_power == -1);
  if (ht.feasible()) CHECK(lp::first_violation(ht.problem, ht.result.witness) == -1);
  else CHECK(lp::verify_certificate(ht.problem, ht.result.certificate));
}
