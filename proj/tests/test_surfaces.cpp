#include "doctest.h"

#include "bhcal/surfaces.hpp"

using namespace bhcal;
using R = Rational;

namespace {

Vec<R> vec(std::initializer_list<long> xs) {
  Vec<R> v;
  for (long x : xs) v.coords.emplace_back(x);
  return v;
}

PlanarDisc<R> unit_square_disc() {
  return PlanarDisc<R>(PlaneBasis<R>(vec({1, 0, 0}), vec({0, 1, 0})),
                       {{R(0), R(0)}, {R(1), R(0)}, {R(1), R(1)}, {R(0), R(1)}});
}

TriMesh<R> octahedron() {
  TriMesh<R> m;
  m.vertices = {vec({1, 0, 0}), vec({-1, 0, 0}), vec({0, 1, 0}), vec({0, -1, 0}), vec({0, 0, 1}), vec({0, 0, -1})};
  // Outward orientation: (x, y, z) sign patterns.
  const std::size_t X = 0, mX = 1, Y = 2, mY = 3, Z = 4, mZ = 5;
  m.triangles = {{{X, Y, Z}, 1},  {{Y, mX, Z}, 1},  {{mX, mY, Z}, 1},  {{mY, X, Z}, 1},
                 {{Y, X, mZ}, 1}, {{mX, Y, mZ}, 1}, {{mY, mX, mZ}, 1}, {{X, mY, mZ}, 1}};
  return m;
}

}  // namespace

TEST_CASE("boundary operator") {
  TriMesh<R> one;
  one.vertices = {vec({0, 0, 0}), vec({1, 0, 0}), vec({0, 1, 0})};
  one.triangles = {{{0, 1, 2}, 1}};
  auto b = boundary(one);
  CHECK(b.size() == 3);
  CHECK(b.at({0, 1}) == 1);
  CHECK(b.at({1, 2}) == 1);
  CHECK(b.at({0, 2}) == -1);

  TriMesh<R> two = one;
  two.vertices.push_back(vec({1, 1, 0}));
  two.triangles.push_back({{1, 3, 2}, 1});
  auto b2 = boundary(two);
  CHECK(b2.count({1, 2}) == 0);
  CHECK(b2.size() == 4);

  CHECK(boundary(octahedron()).empty());
  auto z2 = octahedron();
  z2.ring = Ring::Z2;
  std::swap(z2.triangles[3].v[0], z2.triangles[3].v[1]);
  CHECK(boundary(z2).empty());
  auto z = octahedron();
  std::swap(z.triangles[3].v[0], z.triangles[3].v[1]);
  CHECK_FALSE(boundary(z).empty());
}

TEST_CASE("normalisation over the ring") {
  TriMesh<R> m;
  m.vertices = {vec({0, 0, 0}), vec({1, 0, 0}), vec({0, 1, 0})};
  m.triangles = {{{0, 1, 2}, 2}};
  m.ring = Ring::Z2;
  m.normalize();
  CHECK(m.triangles.empty());
  TriMesh<R> bad = m;
  bad.triangles = {{{0, 1, 7}, 1}};
  CHECK_THROWS_AS(bad.normalize(), InputError);
  bad.triangles = {{{0, 1, 1}, 1}};
  CHECK_THROWS_AS(bad.normalize(), InputError);
}

TEST_CASE("BH area of the unit square disc") {
  auto body = linf_ball<R>(3);
  auto disc = unit_square_disc();
  auto fan = disc.fan_mesh();
  CHECK(fan.triangles.size() == 2);
  auto a = bh_area(fan, body);
  CHECK(a.coeff == R(1, 4));
  CHECK(a.pi_power == 1);
  CHECK(bh_area(disc.refined_mesh(), body).coeff == R(1, 4));

  auto doubled = fan;
  for (auto& t : doubled.triangles) t.coeff = 2;
  CHECK(bh_area(doubled, body).coeff == R(1, 2));

  auto with_sliver = fan;
  with_sliver.vertices.push_back(vec({2, 0, 0}));
  with_sliver.triangles.push_back({{0, 1, 4}, 1});
  CHECK(bh_area(with_sliver, body).coeff == R(1, 4));
}

TEST_CASE("tent competitor over the unit square") {
  auto body = linf_ball<R>(3);
  auto disc = unit_square_disc();
  auto tent = tent_competitor(disc, vec({0, 0, 1}), R(1));
  // Each face spans a parallelogram K of area 4: pi/4 per unit parallelogram,
  // pi/8 per triangle.
  CHECK(bh_area(tent, body).coeff == R(1, 2));
  CHECK(boundary(tent) == boundary(disc.fan_mesh()));
  auto flat = tent_competitor(disc, vec({0, 0, 1}), R(0));
  CHECK(bh_area(flat, body).coeff == R(1, 4));

  auto alpha = alpha_for_plane(body, disc.plane());
  CHECK(alpha_area(disc.fan_mesh(), alpha).coeff == R(1, 4));
  CHECK(alpha_area(tent, alpha).coeff <= bh_area(tent, body).coeff);
  CHECK(alpha_area(TriMesh<R>{}, alpha).coeff == 0);

  // Pushforward under F_ij of a tent covers the image of the disc.
  const auto& f = alpha.functionals();
  CHECK(pushforward_area(tent, f[0], f[1]) >= pushforward_area(disc.fan_mesh(), f[0], f[1]));
  CHECK(pushforward_area(tent, f[0], f[0]) == 0);
}

TEST_CASE("alpha area decomposes into pushforward areas") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t dim = 3 + trial % 2;
    auto body = random_sym_polytope<R>(rng, dim, 3 + trial % 3);
    auto s = random_simple_two_vector<R>(rng, dim, 3);
    PlanarDisc<R> disc(PlaneBasis<R>(s.v1, s.v2), random_convex_polygon<R>(rng));
    auto alpha = alpha_for_plane(body, disc.plane());
    auto mesh = perturbed_competitor(disc, rng, R(1, 2));
    CHECK(alpha_area(mesh, alpha).coeff == alpha_area_by_pushforward(mesh, alpha).coeff);
    CHECK(alpha_area(mesh, alpha).coeff <= bh_area(mesh, body).coeff);
    // Retriangulating the planar disc does not change its area.
    CHECK(bh_area(disc.fan_mesh(), body).coeff == bh_area(disc.refined_mesh(), body).coeff);
    CHECK(alpha_area(disc.refined_mesh(), alpha).coeff == bh_area(disc.refined_mesh(), body).coeff);
  }
}

TEST_CASE("planar disc validation") {
  PlaneBasis<R> plane(vec({1, 0, 0}), vec({0, 1, 0}));
  CHECK_THROWS_AS(PlanarDisc<R>(plane, {{R(0), R(0)}, {R(1), R(0)}}), InputError);
  CHECK_THROWS_AS(PlanarDisc<R>(plane, {{R(0), R(0)}, {R(0), R(1)}, {R(1), R(1)}, {R(1), R(0)}}), InputError);
  CHECK_THROWS_AS(PlanarDisc<R>(plane, {{R(0), R(0)}, {R(1), R(0)}, {R(2), R(0)}, {R(0), R(1)}}), InputError);
}

TEST_CASE("semi-ellipticity experiments over Z and Z2") {
  SplitMix64 rng(12);
  for (Ring ring : {Ring::Z, Ring::Z2}) {
    for (int trial = 0; trial < 4; ++trial) {
      std::size_t dim = 3 + trial % 2;
      auto body = random_sym_polytope<R>(rng, dim, 4);
      auto s = random_simple_two_vector<R>(rng, dim, 3);
      PlanarDisc<R> disc(PlaneBasis<R>(s.v1, s.v2), random_convex_polygon<R>(rng), random_int_vec<R>(rng, dim, 2));
      GeneratorSpec spec;
      spec.ring = ring;
      auto report = semi_ellipticity_experiment(body, disc, spec, 25, 1000 + trial);
      CHECK(report.passed());
      CHECK(report.boundary_mismatches == 0);
      REQUIRE(report.min_gap.has_value());
      CHECK(*report.min_gap >= 0);
      CHECK(report.alpha_area_d.coeff == report.bh_area_d.coeff);
    }
  }
}

TEST_CASE("experiments are reproducible") {
  auto body = l1_ball<R>(3);
  auto disc = unit_square_disc();
  GeneratorSpec spec;
  spec.ring = Ring::Z2;
  auto a = semi_ellipticity_experiment(body, disc, spec, 10, 5);
  auto b = semi_ellipticity_experiment(body, disc, spec, 10, 5);
  REQUIRE(a.trials.size() == b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].generator == b.trials[i].generator);
    CHECK(a.trials[i].bh_area_s.coeff == b.trials[i].bh_area_s.coeff);
  }
}
