#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bhcal/density.hpp"
#include "bhcal/lp.hpp"
#include "bhcal/polytope.hpp"
#include "bhcal/sampling.hpp"

/// Experiment harness for the k-dimensional coefficient criterion: a body
/// K in R^k with facet functionals f_1^K..f_n^K, and coefficients mu_T over
/// k-subsets T of {0..n-1}, tested against |sum mu_T det(f_T)| <= 1/vol(K')
/// on sampled pairs (K', f). Sampled feasibility is evidence, never a proof.
namespace bhcal {

/// Coefficients keyed by strictly increasing k-tuples of indices below n.
template <Scalar T>
class MuCoefficients {
 public:
  using Key = std::vector<std::size_t>;

  MuCoefficients(std::size_t k, std::size_t n);

  std::size_t k() const { return k_; }
  std::size_t n() const { return n_; }
  const std::map<Key, T>& values() const { return values_; }
  /// Throws DimensionError or std::invalid_argument on a malformed key.
  void set(Key key, const T& value);
  T get(const Key& key) const;

 private:
  std::size_t k_;
  std::size_t n_;
  std::map<Key, T> values_;
};

/// All strictly increasing k-tuples below n, in lexicographic order.
std::vector<std::vector<std::size_t>> k_subsets(std::size_t n, std::size_t k);

/// A test pair: a bounded polytope K' = {a_j . x <= b_j} in R^k and n
/// functionals with f_i <= 1 on K'. Vertices and volume are computed once.
template <Scalar T>
struct KInstance {
  std::size_t k = 0;
  std::vector<HalfSpace<T>> constraints;
  std::vector<Covector<T>> f;
  std::vector<Vec<T>> vertices;
  T volume{};
};

/// Computes vertices and volume and checks the support condition at every
/// vertex. Throws InputError when K' is unbounded, empty or flat, or some
/// f_i exceeds 1 at a vertex. k must be 2 or 3.
template <Scalar T>
KInstance<T> make_instance(std::size_t k, std::vector<HalfSpace<T>> constraints, std::vector<Covector<T>> f);

/// x -> (f_1^K(x), ..., f_n^K(x)) for a symmetric body K in R^k.
template <Scalar T>
struct LinfEmbedding {
  std::size_t k = 0;
  std::vector<Covector<T>> functionals;
  std::vector<Vec<T>> body_vertices;

  Vec<T> apply(const Vec<T>& x) const;
  /// max_i |f_i^K(x)|.
  T linf_norm_of_image(const Vec<T>& x) const;
};

/// Throws InputError unless every functional of K is a facet functional
/// (its face f = 1 has dimension k - 1) and every vertex maps to a point of
/// l-infinity norm 1.
template <Scalar T>
LinfEmbedding<T> embed_linf(const SymPolytope<T>& body);

/// sum_T mu_T det(f_T) with f_T the k x k matrix of the selected functionals.
template <Scalar T>
T mu_form_value(const MuCoefficients<T>& mu, const std::vector<Covector<T>>& f);

/// |sum_T mu_T det(f_T)|.
template <Scalar T>
T mu_lhs(const MuCoefficients<T>& mu, const KInstance<T>& inst);

/// mu_ij = p_i p_j for a symmetric polygon, functionals in edge order.
template <Scalar T>
MuCoefficients<T> product_weights(const SymPolygon<T>& k);

/// The body of a symmetric polygon as a SymPolytope with its edge supports.
template <Scalar T>
SymPolytope<T> polygon_body(const SymPolygon<T>& k);

/// The instance (K, f^K) where equality is demanded.
KInstance<Rational> equality_instance(const SymPolytope<Rational>& body);

using InstanceSampler = std::function<KInstance<Rational>(SplitMix64&)>;

struct SamplerSpec {
  std::size_t max_slabs = 2;      ///< extra slab pairs |h(x)| <= 1 intersected with K
  std::int64_t slab_bound = 3;    ///< integer entries of h before normalisation
  bool rescale_body = true;       ///< K' scaled by t in {1/2, 1, 3/2, 2}
};

/// K' = t * (K intersected with random slabs cutting K); each f_i is either
/// f_i^K rescaled to be tight on K', or a point of the polar of K' (a scaled
/// constraint functional or a convex combination of two).
InstanceSampler default_sampler(const SymPolytope<Rational>& body, SamplerSpec spec = {});

struct RevalidationReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::optional<std::size_t> first_violation;
  /// max over samples of mu_lhs * vol(K'); <= 1 means no violation.
  Rational max_ratio{0};
};

/// Checks mu_lhs(mu, K') <= 1/vol(K') on `count` instances drawn from the
/// sampler with streams root.fork(i) of SplitMix64(seed).
RevalidationReport revalidate(const MuCoefficients<Rational>& mu, const InstanceSampler& sampler, std::size_t count,
                              std::uint64_t seed);

struct SignedSearch {
  int sign = 1;
  lp::Problem problem;
  lp::Result result;
  bool certificate_verified = false;
};

struct KdimSearchReport {
  std::size_t k = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  Rational body_volume{0};
  std::vector<std::vector<std::size_t>> variables;
  std::vector<SignedSearch> searches;  ///< sign +1 then -1
  std::optional<MuCoefficients<Rational>> witness;
  std::optional<int> witness_sign;
  /// mu_lhs(witness, (K, f^K)) - 1/vol(K); zero when the witness attains equality.
  std::optional<Rational> equality_residual;
  std::optional<RevalidationReport> revalidation;
  std::size_t refine_rounds_used = 0;
  std::size_t cuts_added = 0;

  /// "sample-feasible" or "sampled-infeasible". Neither is a theorem.
  std::string status() const;
};

struct RefineSpec {
  std::size_t rounds = 0;  ///< constraint-generation rounds after the first solve
  std::size_t batch = 200; ///< fresh instances screened per round
};

/// Exact LP over mu: sign * sum mu_T det(f^K_T) = 1/vol(K), and
/// +-sum mu_T det(f_T) <= 1/vol(K') for every sampled instance. Both signs
/// are attempted; the first feasible one supplies the witness. Each refine
/// round screens a batch of fresh instances, adds the ones the witness
/// violates as rows and solves again; it stops early when none is violated.
/// The final witness is revalidated on `revalidation` instances from a
/// third, disjoint stream. k must be 2 or 3.
KdimSearchReport mu_search(const SymPolytope<Rational>& body, const InstanceSampler& sampler, std::size_t n_samples,
                           std::uint64_t seed, std::size_t revalidation = 10000, RefineSpec refine = {});

}  // namespace bhcal
