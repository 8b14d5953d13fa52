#include "bhcal/surfaces.hpp"

#include <algorithm>
#include <stdexcept>

namespace bhcal {

std::string to_string(Ring r) { return r == Ring::Z ? "Z" : "Z2"; }

Ring parse_ring(std::string_view s) {
  if (s == "Z" || s == "z") return Ring::Z;
  if (s == "Z2" || s == "z2") return Ring::Z2;
  throw InputError("unknown ring '" + std::string(s) + "' (expected Z or Z2)");
}

std::string to_string(CompetitorKind k) {
  switch (k) {
    case CompetitorKind::Tent: return "tent";
    case CompetitorKind::Perturb: return "perturb";
    case CompetitorKind::Mixed: return "mixed";
  }
  return "mixed";
}

CompetitorKind parse_competitor_kind(std::string_view s) {
  if (s == "tent") return CompetitorKind::Tent;
  if (s == "perturb") return CompetitorKind::Perturb;
  if (s == "mixed") return CompetitorKind::Mixed;
  throw InputError("unknown competitor kind '" + std::string(s) + "'");
}

namespace {

template <Scalar T>
int half_plane(const Vec2<T>& p) {
  int sy = Arith<T>::sign(p.y);
  return (sy > 0 || (sy == 0 && Arith<T>::sign(p.x) > 0)) ? 0 : 1;
}

template <Scalar T>
bool angle_less(const Vec2<T>& a, const Vec2<T>& b) {
  int ha = half_plane(a), hb = half_plane(b);
  if (ha != hb) return ha < hb;
  return Arith<T>::sign(cross(a, b)) > 0;
}

long reduce(long c, Ring ring) { return ring == Ring::Z2 ? ((c % 2) + 2) % 2 : c; }

template <Scalar T>
SimpleTwoVector<T> edge_pair(const TriMesh<T>& mesh, const Triangle& t) {
  const auto& a = mesh.vertices[t.v[0]];
  return {mesh.vertices[t.v[1]] - a, mesh.vertices[t.v[2]] - a};
}

}  // namespace

template <Scalar T>
void TriMesh<T>::normalize() {
  if (vertices.empty() && !triangles.empty()) throw InputError("mesh has triangles but no vertices");
  for (const auto& v : vertices) require_same_dim(vertices.front().dim(), v.dim(), "mesh vertices");
  std::vector<Triangle> kept;
  for (const auto& t : triangles) {
    for (auto i : t.v)
      if (i >= vertices.size()) throw InputError("triangle vertex index out of range");
    if (t.v[0] == t.v[1] || t.v[1] == t.v[2] || t.v[0] == t.v[2])
      throw InputError("triangle repeats a vertex index");
    Triangle r = t;
    r.coeff = reduce(t.coeff, ring);
    if (r.coeff != 0) kept.push_back(r);
  }
  triangles = std::move(kept);
}

template <Scalar T>
EdgeChain boundary(const TriMesh<T>& mesh) {
  EdgeChain chain;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      std::size_t a = t.v[k], b = t.v[(k + 1) % 3];
      long sign = a < b ? 1 : -1;
      if (mesh.ring == Ring::Z2) sign = 1;
      chain[{std::min(a, b), std::max(a, b)}] += sign * t.coeff;
    }
  }
  for (auto it = chain.begin(); it != chain.end();) {
    it->second = reduce(it->second, mesh.ring);
    it = it->second == 0 ? chain.erase(it) : std::next(it);
  }
  return chain;
}

bool same_boundary(const EdgeChain& a, const EdgeChain& b) { return a == b; }

template <Scalar T>
PiScaled<T> bh_area(const TriMesh<T>& mesh, const SymPolytope<T>& body) {
  BHDensity<T> density(body);
  T acc(0);
  for (const auto& t : mesh.triangles) {
    auto d = bh_eval(density, edge_pair(mesh, t));
    acc += T(std::labs(t.coeff)) * d.value.coeff;
  }
  return {acc / T(2), 1};
}

template <Scalar T>
PiScaled<T> alpha_area(const TriMesh<T>& mesh, const AlphaDensity<T>& alpha) {
  T acc(0);
  for (const auto& t : mesh.triangles) acc += T(std::labs(t.coeff)) * alpha_eval(alpha, edge_pair(mesh, t)).value.coeff;
  return {acc / T(2), 1};
}

template <Scalar T>
T pushforward_area(const TriMesh<T>& mesh, const Covector<T>& fi, const Covector<T>& fj) {
  T acc(0);
  for (const auto& t : mesh.triangles) {
    auto s = edge_pair(mesh, t);
    Vec2<T> a{fi(s.v1), fj(s.v1)}, b{fi(s.v2), fj(s.v2)};
    acc += T(std::labs(t.coeff)) * Arith<T>::abs(cross(a, b));
  }
  return acc / T(2);
}

template <Scalar T>
PiScaled<T> alpha_area_by_pushforward(const TriMesh<T>& mesh, const AlphaDensity<T>& alpha) {
  const auto& f = alpha.functionals();
  const auto& p = alpha.weights();
  T acc(0);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j) acc += p[i] * p[j] * pushforward_area(mesh, f[i], f[j]);
  return {acc, 1};
}

template <Scalar T>
AlphaDensity<T> alpha_for_plane(const SymPolytope<T>& body, const PlaneBasis<T>& plane) {
  auto k = section(body, plane);
  std::vector<Covector<T>> f;
  std::vector<T> p;
  for (const auto& e : k.edges()) {
    f.push_back(*e.ambient);
    p.push_back(e.weight);
  }
  return AlphaDensity<T>(std::move(f), std::move(p));
}

template <Scalar T>
PlanarDisc<T>::PlanarDisc(PlaneBasis<T> plane, std::vector<Vec2<T>> polygon, std::optional<Vec<T>> offset)
    : plane_(std::move(plane)), polygon_(std::move(polygon)), offset_(offset ? *offset : Vec<T>(plane_.dim())) {
  require_same_dim(plane_.dim(), offset_.dim(), "PlanarDisc offset");
  const std::size_t m = polygon_.size();
  if (m < 3) throw InputError("disc boundary needs at least three vertices");
  std::size_t wraps = 0;
  for (std::size_t k = 0; k < m; ++k) {
    Vec2<T> e0 = polygon_[(k + 1) % m] - polygon_[k];
    Vec2<T> e1 = polygon_[(k + 2) % m] - polygon_[(k + 1) % m];
    if (Arith<T>::sign(cross(e0, e1)) <= 0) throw InputError("disc boundary must be strictly convex and counterclockwise");
    if (angle_less(e1, e0)) ++wraps;
  }
  if (wraps != 1) throw InputError("disc boundary winds more than once");
}

template <Scalar T>
Vec2<T> PlanarDisc<T>::centroid() const {
  Vec2<T> c{T(0), T(0)};
  for (const auto& p : polygon_) c = c + p;
  const T inv = T(1) / T(static_cast<long>(polygon_.size()));
  return inv * c;
}

template <Scalar T>
Vec<T> PlanarDisc<T>::embed(const Vec2<T>& st) const {
  return offset_ + plane_.embed(st);
}

template <Scalar T>
TriMesh<T> PlanarDisc<T>::fan_mesh(Ring ring) const {
  TriMesh<T> mesh;
  mesh.ring = ring;
  for (const auto& p : polygon_) mesh.vertices.push_back(embed(p));
  for (std::size_t k = 1; k + 1 < polygon_.size(); ++k) mesh.triangles.push_back({{0, k, k + 1}, 1});
  return mesh;
}

template <Scalar T>
TriMesh<T> PlanarDisc<T>::refined_mesh(Ring ring) const {
  TriMesh<T> mesh;
  mesh.ring = ring;
  const std::size_t m = polygon_.size();
  const Vec2<T> c = centroid();
  const T half = T(1) / T(2);
  for (const auto& p : polygon_) mesh.vertices.push_back(embed(p));
  for (const auto& p : polygon_) mesh.vertices.push_back(embed(half * (p + c)));
  mesh.vertices.push_back(embed(c));
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t k1 = (k + 1) % m;
    mesh.triangles.push_back({{k, k1, m + k1}, 1});
    mesh.triangles.push_back({{k, m + k1, m + k}, 1});
    mesh.triangles.push_back({{2 * m, m + k, m + k1}, 1});
  }
  return mesh;
}

template <Scalar T>
TriMesh<T> tent_competitor(const PlanarDisc<T>& disc, const Vec<T>& direction, const T& height, Ring ring) {
  TriMesh<T> mesh;
  mesh.ring = ring;
  const std::size_t m = disc.polygon().size();
  for (const auto& p : disc.polygon()) mesh.vertices.push_back(disc.embed(p));
  mesh.vertices.push_back(disc.embed(disc.centroid()) + height * direction);
  for (std::size_t k = 0; k < m; ++k) mesh.triangles.push_back({{k, (k + 1) % m, m}, 1});
  return mesh;
}

template <Scalar T>
TriMesh<T> perturbed_competitor(const PlanarDisc<T>& disc, SplitMix64& rng, const T& scale, std::int64_t bound,
                                Ring ring) {
  TriMesh<T> mesh = disc.refined_mesh(ring);
  const std::size_t m = disc.polygon().size();
  for (std::size_t i = m; i < mesh.vertices.size(); ++i)
    mesh.vertices[i] = mesh.vertices[i] + scale * random_int_vec<T>(rng, mesh.vertices[i].dim(), bound);
  return mesh;
}

template <Scalar T>
void flip_random_orientations(TriMesh<T>& mesh, SplitMix64& rng) {
  if (mesh.ring != Ring::Z2) throw std::invalid_argument("orientation flips change the boundary over Z");
  for (auto& t : mesh.triangles)
    if (uniform_int(rng, 0, 1) == 1) std::swap(t.v[1], t.v[2]);
}

template <Scalar T>
void glue_closed_sheet(TriMesh<T>& mesh, const Vec<T>& at, const std::array<Vec<T>, 3>& edges) {
  const std::size_t b = mesh.vertices.size();
  mesh.vertices.push_back(at);
  for (const auto& e : edges) mesh.vertices.push_back(at + e);
  // Consistently oriented faces of the tetrahedron b, b+1, b+2, b+3.
  mesh.triangles.push_back({{b, b + 2, b + 1}, 1});
  mesh.triangles.push_back({{b, b + 1, b + 3}, 1});
  mesh.triangles.push_back({{b, b + 3, b + 2}, 1});
  mesh.triangles.push_back({{b + 1, b + 2, b + 3}, 1});
}

template <Scalar T>
bool ExperimentReport<T>::passed() const {
  if (!disc_equality || boundary_mismatches != 0) return false;
  for (const auto& t : trials) {
    if (!t.boundary_ok || !t.bh_ge_alpha) return false;
    if (!Arith<T>::leq(T(0), t.gap, std::fabs(Arith<T>::to_double(bh_area_d.coeff)))) return false;
  }
  return true;
}

template <Scalar T>
ExperimentReport<T> semi_ellipticity_experiment(const SymPolytope<T>& body, const PlanarDisc<T>& disc,
                                                const GeneratorSpec& spec, std::size_t trials, std::uint64_t seed) {
  require_same_dim(body.dim(), disc.plane().dim(), "semi_ellipticity_experiment");
  ExperimentReport<T> report;
  report.seed = seed;
  report.ring = spec.ring;
  const auto alpha = alpha_for_plane(body, disc.plane());
  const TriMesh<T> d = disc.refined_mesh(spec.ring);
  const EdgeChain d_boundary = boundary(d);
  report.bh_area_d = bh_area(d, body);
  report.alpha_area_d = alpha_area(d, alpha);
  const double scale = std::fabs(Arith<T>::to_double(report.bh_area_d.coeff));
  report.disc_equality = Arith<T>::eq(report.alpha_area_d.coeff, report.bh_area_d.coeff, scale);

  const SplitMix64 root(seed);
  const std::size_t dim = body.dim();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    SplitMix64 rng = root.fork(trial);
    bool tent = spec.kind == CompetitorKind::Tent ||
                (spec.kind == CompetitorKind::Mixed && uniform_int(rng, 0, 1) == 0);
    TrialResult<T> r;
    TriMesh<T> s;
    if (tent) {
      Vec<T> direction = random_int_vec<T>(rng, dim, 3);
      T height = T(static_cast<long>(uniform_int(rng, 0, 2 * spec.max_height))) / T(2);
      s = tent_competitor(disc, direction, height, spec.ring);
      r.generator = "tent(h=" + Arith<T>::to_string(height) + ")";
    } else {
      s = perturbed_competitor(disc, rng, T(T(1) / T(2)), spec.displacement, spec.ring);
      r.generator = "perturb";
    }
    if (spec.ring == Ring::Z2) {
      flip_random_orientations(s, rng);
      r.generator += "+flip";
      if (spec.glue_sheets && uniform_int(rng, 0, 1) == 1) {
        Vec<T> at = disc.embed(disc.centroid()) + random_int_vec<T>(rng, dim, 2);
        std::array<Vec<T>, 3> edges{random_int_vec<T>(rng, dim, 2), random_int_vec<T>(rng, dim, 2),
                                    random_int_vec<T>(rng, dim, 2)};
        glue_closed_sheet(s, at, edges);
        r.generator += "+sheet";
      }
    }
    s.normalize();
    r.triangles = s.triangles.size();
    r.boundary_ok = same_boundary(boundary(s), d_boundary);
    if (!r.boundary_ok) {
      ++report.boundary_mismatches;
      report.trials.push_back(std::move(r));
      continue;
    }
    r.bh_area_s = bh_area(s, body);
    r.alpha_area_s = alpha_area(s, alpha);
    r.gap = r.bh_area_s.coeff - report.bh_area_d.coeff;
    r.bh_ge_alpha = Arith<T>::leq(r.alpha_area_s.coeff, r.bh_area_s.coeff, scale);
    r.alpha_ge_disc = Arith<T>::leq(report.alpha_area_d.coeff, r.alpha_area_s.coeff, scale);
    if (!report.min_gap || r.gap < *report.min_gap) report.min_gap = r.gap;
    report.trials.push_back(std::move(r));
  }
  return report;
}

template <Scalar T>
std::vector<Vec2<T>> random_convex_polygon(SplitMix64& rng, std::size_t max_pairs) {
  const auto n = static_cast<std::size_t>(uniform_int(rng, 2, static_cast<std::int64_t>(std::max<std::size_t>(2, max_pairs))));
  auto base = random_sym_polygon<T>(rng, n, 4).vertices();
  std::vector<Vec2<T>> kept;
  for (const auto& v : base)
    if (uniform_int(rng, 0, 3) != 0) kept.push_back(v);
  if (kept.size() < 3) kept = base;
  const T scale = T(static_cast<long>(uniform_int(rng, 1, 8))) / T(4);
  const Vec2<T> shift{T(static_cast<long>(uniform_int(rng, -4, 4))) / T(2),
                      T(static_cast<long>(uniform_int(rng, -4, 4))) / T(2)};
  for (auto& v : kept) v = scale * v + shift;
  return kept;
}

#define BHCAL_INSTANTIATE_SURFACES(T)                                                                          \
  template struct TriMesh<T>;                                                                                  \
  template class PlanarDisc<T>;                                                                                \
  template struct ExperimentReport<T>;                                                                         \
  template EdgeChain boundary<T>(const TriMesh<T>&);                                                           \
  template PiScaled<T> bh_area<T>(const TriMesh<T>&, const SymPolytope<T>&);                                   \
  template PiScaled<T> alpha_area<T>(const TriMesh<T>&, const AlphaDensity<T>&);                               \
  template T pushforward_area<T>(const TriMesh<T>&, const Covector<T>&, const Covector<T>&);                   \
  template PiScaled<T> alpha_area_by_pushforward<T>(const TriMesh<T>&, const AlphaDensity<T>&);                \
  template AlphaDensity<T> alpha_for_plane<T>(const SymPolytope<T>&, const PlaneBasis<T>&);                    \
  template TriMesh<T> tent_competitor<T>(const PlanarDisc<T>&, const Vec<T>&, const T&, Ring);                 \
  template TriMesh<T> perturbed_competitor<T>(const PlanarDisc<T>&, SplitMix64&, const T&, std::int64_t, Ring); \
  template void flip_random_orientations<T>(TriMesh<T>&, SplitMix64&);                                         \
  template void glue_closed_sheet<T>(TriMesh<T>&, const Vec<T>&, const std::array<Vec<T>, 3>&);                \
  template ExperimentReport<T> semi_ellipticity_experiment<T>(const SymPolytope<T>&, const PlanarDisc<T>&,     \
                                                              const GeneratorSpec&, std::size_t, std::uint64_t); \
  template std::vector<Vec2<T>> random_convex_polygon<T>(SplitMix64&, std::size_t);

BHCAL_INSTANTIATE_SURFACES(Rational)
BHCAL_INSTANTIATE_SURFACES(double)

}  // namespace bhcal
