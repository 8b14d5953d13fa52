#include "doctest.h"

#include "bhcal/kdim.hpp"
#include "oracles.hpp"

using namespace bhcal;
using R = Rational;

namespace {

Covector<R> cov(std::initializer_list<long> xs) {
  Covector<R> f;
  for (long x : xs) f.coeffs.emplace_back(x);
  return f;
}

R frac(long a, long b) {
  R q(a, b);
  q.canonicalize();
  return q;
}

SymPolytope<R> hexagon_body() { return SymPolytope<R>(2, {cov({1, 0}), cov({0, 1}), cov({1, 1})}); }

}  // namespace

TEST_CASE("k-subsets") {
  CHECK(k_subsets(4, 2).size() == 6);
  CHECK(k_subsets(5, 3).size() == 10);
  CHECK(k_subsets(3, 3) == std::vector<std::vector<std::size_t>>{{0, 1, 2}});
  CHECK(k_subsets(2, 3).empty());
  auto s = k_subsets(6, 3);
  CHECK(std::is_sorted(s.begin(), s.end()));
}

TEST_CASE("mu coefficient validation") {
  MuCoefficients<R> mu(2, 3);
  mu.set({0, 2}, R(1));
  CHECK(mu.get({0, 2}) == 1);
  CHECK(mu.get({0, 1}) == 0);
  CHECK_THROWS_AS(mu.set({2, 1}, R(1)), std::invalid_argument);
  CHECK_THROWS_AS(mu.set({0, 3}, R(1)), DimensionError);
  CHECK_THROWS_AS(mu.set({0}, R(1)), DimensionError);
  CHECK_THROWS_AS(MuCoefficients<R>(4, 3), DimensionError);
}

TEST_CASE("l-infinity embedding") {
  auto cube = embed_linf(linf_ball<R>(3));
  CHECK(cube.functionals.size() == 3);
  Vec<R> x(std::vector<R>{R(1), R(-2), frac(1, 3)});
  CHECK(cube.apply(x) == x);

  auto hex = embed_linf(hexagon_body());
  CHECK(hex.body_vertices.size() == 6);
  for (const auto& v : hex.body_vertices) {
    CHECK(hex.apply(v).dim() == 3);
    R m(0);
    for (const auto& c : hex.apply(v).coords) m = std::max(m, R(abs(c)));
    CHECK(m == 1);
  }

  // Relabelling the facets permutes image coordinates.
  auto swapped = embed_linf(SymPolytope<R>(2, {cov({1, 1}), cov({0, 1}), cov({1, 0})}));
  Vec<R> y(std::vector<R>{R(2), R(5)});
  auto a = hex.apply(y), b = swapped.apply(y);
  CHECK(a[0] == b[2]);
  CHECK(a[1] == b[1]);
  CHECK(a[2] == b[0]);

  // |x + y| <= 2 only touches the square at a vertex.
  SymPolytope<R> touching(2, {cov({1, 0}), cov({0, 1}), Covector<R>(std::vector<R>{frac(1, 2), frac(1, 2)})});
  CHECK_THROWS_AS(embed_linf(touching), InputError);
  // |x + 2y| <= 4 misses the square entirely.
  SymPolytope<R> loose(2, {cov({1, 0}), cov({0, 1}), Covector<R>(std::vector<R>{frac(1, 4), frac(1, 2)})});
  CHECK_THROWS_AS(embed_linf(loose), InputError);
}

TEST_CASE("mu_lhs examples") {
  // Square: mu_12 = p_1 p_2 = 1/4 and f = coordinate functionals.
  auto square = SymPolygon<R>::from_half_vertices({{R(1), R(-1)}, {R(1), R(1)}});
  auto mu = product_weights(square);
  CHECK(mu.get({0, 1}) == frac(1, 4));
  auto eq = equality_instance(polygon_body(square));
  CHECK(eq.volume == 4);
  CHECK(mu_lhs(mu, eq) == frac(1, 4));

  CHECK(mu_lhs(MuCoefficients<R>(2, 2), eq) == 0);

  // Cube: mu_123 = 1/8 with the coordinate functionals gives 1/vol.
  MuCoefficients<R> cube_mu(3, 3);
  cube_mu.set({0, 1, 2}, frac(1, 8));
  auto cube_eq = equality_instance(linf_ball<R>(3));
  CHECK(cube_eq.volume == 8);
  CHECK(mu_lhs(cube_mu, cube_eq) == frac(1, 8));
  CHECK(cube_eq.vertices.size() == 8);
}

TEST_CASE("product weights attain equality on random polygons") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    auto k = random_sym_polygon<R>(rng, 2 + trial % 6);
    auto eq = equality_instance(polygon_body(k));
    std::vector<oracle::P2> pts;
    for (const auto& a : k.vertices()) pts.push_back({a.x, a.y});
    const R area = oracle::hull_area(pts);
    CHECK(eq.volume == area);
    CHECK(mu_lhs(product_weights(k), eq) * area == 1);
  }
}

TEST_CASE("sign flip of a functional with its coefficients") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + trial % 2, n = k + 2;
    MuCoefficients<R> mu(k, n);
    for (const auto& key : k_subsets(n, k)) mu.set(key, R(uniform_int(rng, -5, 5)));
    std::vector<Covector<R>> f;
    for (std::size_t i = 0; i < n; ++i) f.push_back(Covector<R>(random_int_vec<R>(rng, k, 4).coords));
    const std::size_t flip = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1));
    auto f2 = f;
    f2[flip] = -f2[flip];
    MuCoefficients<R> mu2(k, n);
    for (const auto& [key, c] : mu.values())
      mu2.set(key, std::find(key.begin(), key.end(), flip) != key.end() ? R(-c) : c);
    CHECK(abs(mu_form_value(mu, f)) == abs(mu_form_value(mu2, f2)));
  }
}

TEST_CASE("instance construction checks its inputs") {
  std::vector<HalfSpace<R>> box{{cov({1, 0}), R(1)}, {cov({-1, 0}), R(1)}, {cov({0, 1}), R(2)}, {cov({0, -1}), R(2)}};
  auto inst = make_instance<R>(2, box, {cov({1, 0}), Covector<R>(std::vector<R>{R(0), frac(1, 2)})});
  CHECK(inst.volume == 8);
  CHECK_THROWS_AS(make_instance<R>(2, box, {cov({0, 1})}), InputError);
  std::vector<HalfSpace<R>> open{{cov({1, 0}), R(1)}, {cov({-1, 0}), R(1)}, {cov({0, 1}), R(1)}};
  CHECK_THROWS_AS(make_instance<R>(2, open, {}), InputError);
  CHECK_THROWS_AS(make_instance<R>(4, box, {}), InputError);
}

TEST_CASE("sampled instances are valid") {
  for (std::size_t k : {2, 3}) {
    auto body = k == 2 ? hexagon_body() : l1_ball<R>(3);
    auto sampler = default_sampler(body);
    SplitMix64 root(17);
    for (std::size_t i = 0; i < 60; ++i) {
      auto rng = root.fork(i);
      auto inst = sampler(rng);
      CHECK(inst.k == k);
      CHECK(inst.f.size() == body.facets().size());
      // Independent recomputation of the volume from the constraint list.
      CHECK(volume_k<R>(k, inst.constraints) == inst.volume);
      CHECK(inst.volume > 0);
      for (const auto& f : inst.f)
        for (const auto& v : inst.vertices) CHECK(f(v) <= 1);
    }
  }
}

TEST_CASE("product weights revalidate on sampled instances") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    auto k = random_sym_polygon<R>(rng, 2 + trial);
    auto sampler = default_sampler(polygon_body(k));
    auto report = revalidate(product_weights(k), sampler, 300, 100 + trial);
    CHECK(report.samples == 300);
    CHECK(report.violations == 0);
    CHECK(report.max_ratio <= 1);
  }
}

TEST_CASE("revalidation finds violations of an oversized witness") {
  auto square = SymPolygon<R>::from_half_vertices({{R(1), R(-1)}, {R(1), R(1)}});
  MuCoefficients<R> mu(2, 2);
  mu.set({0, 1}, R(1));
  auto report = revalidate(mu, default_sampler(polygon_body(square)), 50, 3);
  CHECK(report.violations > 0);
  REQUIRE(report.first_violation.has_value());
  CHECK(report.max_ratio > 1);
}

TEST_CASE("mu search in the plane") {
  auto square_body = linf_ball<R>(2);
  auto report = mu_search(square_body, default_sampler(square_body), 100, 9, 500);
  CHECK(report.status() == "sample-feasible");
  REQUIRE(report.witness.has_value());
  CHECK(report.witness->get({0, 1}) * *report.witness_sign == frac(1, 4));
  CHECK(*report.equality_residual == 0);
  CHECK(report.revalidation->violations == 0);
  REQUIRE(report.searches.size() == 2);
  CHECK(report.searches[0].result.status == lp::Status::Feasible);
  CHECK(report.searches[1].result.status == lp::Status::Feasible);

  SplitMix64 rng(77);
  for (int trial = 0; trial < 4; ++trial) {
    auto k = random_sym_polygon<R>(rng, 3 + trial);
    auto body = polygon_body(k);
    auto r = mu_search(body, default_sampler(body), 80, trial, 300);
    REQUIRE(r.witness.has_value());
    CHECK(*r.equality_residual == 0);
    // A vertex of the sampled feasible region need not survive fresh
    // instances; the report only has to account for every one of them.
    CHECK(r.revalidation->samples == 300);
    CHECK(lp::first_violation(r.searches[0].problem, r.searches[0].result.witness) == -1);
    // The product weights satisfy every sampled row of the positive search.
    std::vector<R> x;
    auto pw = product_weights(k);
    for (const auto& key : r.variables) x.push_back(pw.get(key));
    CHECK(lp::first_violation(r.searches[0].problem, x) == -1);
  }
}

TEST_CASE("mu search in space") {
  auto cube = linf_ball<R>(3);
  auto report = mu_search(cube, default_sampler(cube), 100, 4, 200);
  REQUIRE(report.witness.has_value());
  CHECK(abs(report.witness->get({0, 1, 2})) == frac(1, 8));
  CHECK(report.revalidation->violations == 0);

  auto octa = l1_ball<R>(3);
  auto r = mu_search(octa, default_sampler(octa), 100, 4, 200);
  CHECK(r.n == 4);
  CHECK(r.variables.size() == 4);
  if (r.witness) {
    CHECK(*r.equality_residual == 0);
    CHECK(r.revalidation.has_value());
  } else {
    for (const auto& s : r.searches) CHECK(s.certificate_verified);
  }
}

TEST_CASE("refinement rounds add violated instances as rows") {
  SplitMix64 rng(77);
  auto k = random_sym_polygon<R>(rng, 4);
  auto body = polygon_body(k);
  auto plain = mu_search(body, default_sampler(body), 40, 2, 300);
  auto refined = mu_search(body, default_sampler(body), 40, 2, 300, {.rounds = 6, .batch = 200});
  REQUIRE(refined.witness.has_value());
  CHECK(refined.refine_rounds_used >= 1);
  CHECK(refined.searches[0].problem.rows.size() == 1 + 2 * (40 + refined.cuts_added));
  CHECK(*refined.equality_residual == 0);
  CHECK(refined.revalidation->violations <= plain.revalidation->violations);
}

TEST_CASE("mu search is deterministic") {
  auto octa = l1_ball<R>(3);
  auto a = mu_search(octa, default_sampler(octa), 40, 21, 20);
  auto b = mu_search(octa, default_sampler(octa), 40, 21, 20);
  CHECK(a.status() == b.status());
  CHECK(a.searches[0].result.witness == b.searches[0].result.witness);
  CHECK(a.searches[0].result.certificate == b.searches[0].result.certificate);
}
