#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bhcal/calibrate.hpp"
#include "bhcal/density.hpp"
#include "bhcal/sampling.hpp"

namespace bhcal {

enum class Ring { Z, Z2 };

std::string to_string(Ring r);
Ring parse_ring(std::string_view s);

struct Triangle {
  std::array<std::size_t, 3> v{};
  long coeff = 1;

  friend bool operator==(const Triangle&, const Triangle&) = default;
};

/// Triangulated chain sum coeff * [v0, v1, v2] over Z or Z2.
template <Scalar T>
struct TriMesh {
  std::vector<Vec<T>> vertices;
  std::vector<Triangle> triangles;
  Ring ring = Ring::Z;

  /// Validates indices and dimensions, reduces coefficients over the ring
  /// (mod 2 for Z2) and drops zero terms. Throws InputError on bad input.
  void normalize();
};

/// Edge chain keyed by (a, b) with a < b. Over Z the value is the signed
/// multiplicity of a -> b; over Z2 it is always 1.
using EdgeChain = std::map<std::pair<std::size_t, std::size_t>, long>;

template <Scalar T>
EdgeChain boundary(const TriMesh<T>& mesh);

/// sum |coeff| * A^bh(e1 ^ e2) / 2 over triangles with edge vectors e1, e2.
template <Scalar T>
PiScaled<T> bh_area(const TriMesh<T>& mesh, const SymPolytope<T>& body);

template <Scalar T>
PiScaled<T> alpha_area(const TriMesh<T>& mesh, const AlphaDensity<T>& alpha);

/// sum |coeff| * Euclidean area of the image triangle under x -> (F_i(x), F_j(x)).
template <Scalar T>
T pushforward_area(const TriMesh<T>& mesh, const Covector<T>& fi, const Covector<T>& fj);

/// pi * sum_{i<j} p_i p_j pushforward_area(mesh, F_i, F_j); equals alpha_area.
template <Scalar T>
PiScaled<T> alpha_area_by_pushforward(const TriMesh<T>& mesh, const AlphaDensity<T>& alpha);

/// The alpha density built from the section of B by P (the F_i and p_i of
/// the calibrator).
template <Scalar T>
AlphaDensity<T> alpha_for_plane(const SymPolytope<T>& body, const PlaneBasis<T>& plane);

/// Convex polygon in the plane offset + span(u1, u2), in plane coordinates.
template <Scalar T>
class PlanarDisc {
 public:
  /// Requires a counterclockwise strictly convex vertex cycle (>= 3 vertices).
  PlanarDisc(PlaneBasis<T> plane, std::vector<Vec2<T>> polygon, std::optional<Vec<T>> offset = std::nullopt);

  const PlaneBasis<T>& plane() const { return plane_; }
  const std::vector<Vec2<T>>& polygon() const { return polygon_; }
  const Vec<T>& offset() const { return offset_; }
  Vec2<T> centroid() const;
  Vec<T> embed(const Vec2<T>& st) const;

  /// Fan from the first vertex. Boundary vertices are 0..m-1.
  TriMesh<T> fan_mesh(Ring ring = Ring::Z) const;
  /// Boundary vertices 0..m-1, an inner ring m..2m-1 halfway to the centroid
  /// and the centroid 2m: an annulus of 2m triangles plus a fan of m.
  TriMesh<T> refined_mesh(Ring ring = Ring::Z) const;

 private:
  PlaneBasis<T> plane_;
  std::vector<Vec2<T>> polygon_;
  Vec<T> offset_;
};

/// Cone over the disc boundary with apex centroid + height * direction.
template <Scalar T>
TriMesh<T> tent_competitor(const PlanarDisc<T>& disc, const Vec<T>& direction, const T& height, Ring ring = Ring::Z);

/// Refined mesh with every interior vertex moved by an integer vector with
/// entries in [-bound, bound] scaled by `scale`.
template <Scalar T>
TriMesh<T> perturbed_competitor(const PlanarDisc<T>& disc, SplitMix64& rng, const T& scale, std::int64_t bound = 3,
                                Ring ring = Ring::Z);

/// Z2 only: reverses the orientation of random triangles.
template <Scalar T>
void flip_random_orientations(TriMesh<T>& mesh, SplitMix64& rng);

/// Appends the boundary of a tetrahedron (a closed sheet) with vertex `at`
/// and three edges along `edges`.
template <Scalar T>
void glue_closed_sheet(TriMesh<T>& mesh, const Vec<T>& at, const std::array<Vec<T>, 3>& edges);

/// Exact boundary equality over the mesh ring.
bool same_boundary(const EdgeChain& a, const EdgeChain& b);

enum class CompetitorKind { Tent, Perturb, Mixed };
std::string to_string(CompetitorKind k);
CompetitorKind parse_competitor_kind(std::string_view s);

struct GeneratorSpec {
  CompetitorKind kind = CompetitorKind::Mixed;
  Ring ring = Ring::Z;
  std::int64_t max_height = 4;   ///< tent heights are k/2 for k in [0, 2*max_height]
  std::int64_t displacement = 3; ///< perturbation entries in [-d, d] / 2
  bool glue_sheets = true;       ///< Z2 only
};

template <Scalar T>
struct TrialResult {
  std::string generator;
  std::size_t triangles = 0;
  bool boundary_ok = false;
  PiScaled<T> bh_area_s;
  PiScaled<T> alpha_area_s;
  T gap{};  ///< bh_area(S) - bh_area(D), units of pi
  bool bh_ge_alpha = false;
  bool alpha_ge_disc = false;  ///< alpha_area(S) >= alpha_area(D); reported only
};

template <Scalar T>
struct ExperimentReport {
  std::uint64_t seed = 0;
  Ring ring = Ring::Z;
  PiScaled<T> bh_area_d;
  PiScaled<T> alpha_area_d;
  std::vector<TrialResult<T>> trials;
  std::optional<T> min_gap;
  bool disc_equality = false;  ///< alpha_area(D) = bh_area(D)
  std::size_t boundary_mismatches = 0;

  /// Boundaries matched, every gap >= 0, bh >= alpha on S, equality on D.
  bool passed() const;
};

template <Scalar T>
ExperimentReport<T> semi_ellipticity_experiment(const SymPolytope<T>& body, const PlanarDisc<T>& disc,
                                                const GeneratorSpec& spec, std::size_t trials, std::uint64_t seed);

/// Random convex polygon in plane coordinates: a random symmetric polygon
/// with some vertices removed, scaled and shifted by small rationals.
template <Scalar T>
std::vector<Vec2<T>> random_convex_polygon(SplitMix64& rng, std::size_t max_pairs = 4);

}  // namespace bhcal
