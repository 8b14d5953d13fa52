#include "bhcal/kdim.hpp"

#include <algorithm>
#include <stdexcept>

#include "bhcal/exterior.hpp"
#include "bhcal/linalg.hpp"

namespace bhcal {

namespace {

Rational frac(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

template <Scalar T>
Covector<T> scaled(const Covector<T>& f, const T& s) {
  Covector<T> out(f.dim());
  for (std::size_t i = 0; i < f.dim(); ++i) out[i] = s * f[i];
  return out;
}

template <Scalar T>
T det_of(const std::vector<Covector<T>>& f, const std::vector<std::size_t>& key) {
  std::vector<std::vector<T>> m;
  m.reserve(key.size());
  for (auto i : key) m.push_back(f[i].coeffs);
  return determinant(std::move(m));
}

template <Scalar T>
T max_abs_on(const Covector<T>& f, const std::vector<Vec<T>>& vertices) {
  T best(0);
  for (const auto& v : vertices) {
    const T x = Arith<T>::abs(f(v));
    if (x > best) best = x;
  }
  return best;
}

template <Scalar T>
void check_support(const KInstance<T>& inst) {
  for (std::size_t i = 0; i < inst.f.size(); ++i) {
    require_same_dim(inst.k, inst.f[i].dim(), "instance functional");
    for (const auto& v : inst.vertices)
      if (!Arith<T>::leq(inst.f[i](v), T(1)))
        throw InputError("instance functional " + std::to_string(i) + " exceeds 1 on K'");
  }
}

/// Geometry of the symmetric body {|g_j(x)| <= 1} in R^k, k in {2, 3}.
KInstance<Rational> symmetric_instance(std::size_t k, const std::vector<Covector<Rational>>& g) {
  KInstance<Rational> inst;
  inst.k = k;
  for (const auto& gj : g) {
    inst.constraints.push_back({gj, Rational(1)});
    inst.constraints.push_back({-gj, Rational(1)});
  }
  if (k == 2) {
    std::vector<Vec2<Rational>> planar;
    for (const auto& gj : g) planar.push_back({gj[0], gj[1]});
    auto poly = halfplane_intersection<Rational>(planar);
    for (const auto& a : poly.vertices()) inst.vertices.push_back(Vec<Rational>(std::vector<Rational>{a.x, a.y}));
    inst.volume = poly.area();
  } else {
    inst.vertices = polytope_vertices<Rational>(k, inst.constraints);
    inst.volume = volume_k<Rational>(k, inst.constraints);
  }
  return inst;
}

}  // namespace

template <Scalar T>
MuCoefficients<T>::MuCoefficients(std::size_t k, std::size_t n) : k_(k), n_(n) {
  if (k < 1) throw std::invalid_argument("MuCoefficients: k must be positive");
  if (k > n) throw DimensionError("MuCoefficients: k exceeds n");
}

template <Scalar T>
void MuCoefficients<T>::set(Key key, const T& value) {
  if (key.size() != k_) throw DimensionError("MuCoefficients: key has wrong length");
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key[i] >= n_) throw DimensionError("MuCoefficients: index out of range");
    if (i > 0 && key[i - 1] >= key[i]) throw std::invalid_argument("MuCoefficients: key must be strictly increasing");
  }
  if (Arith<T>::is_zero(value))
    values_.erase(key);
  else
    values_[std::move(key)] = value;
}

template <Scalar T>
T MuCoefficients<T>::get(const Key& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? T(0) : it->second;
}

std::vector<std::vector<std::size_t>> k_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k == 0 || k > n) return out;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    out.push_back(pick);
    std::size_t r = k;
    while (r-- > 0) {
      if (pick[r] < n - k + r) break;
      if (r == 0) return out;
    }
    ++pick[r];
    for (std::size_t s = r + 1; s < k; ++s) pick[s] = pick[s - 1] + 1;
  }
}

template <Scalar T>
KInstance<T> make_instance(std::size_t k, std::vector<HalfSpace<T>> constraints, std::vector<Covector<T>> f) {
  if (k != 2 && k != 3) throw InputError("instances are supported for k = 2 and k = 3");
  KInstance<T> inst;
  inst.k = k;
  inst.volume = volume_k<T>(k, constraints);
  if (!(inst.volume > T(0))) throw InputError("K' is not full-dimensional");
  inst.vertices = polytope_vertices<T>(k, constraints);
  inst.constraints = std::move(constraints);
  inst.f = std::move(f);
  check_support(inst);
  return inst;
}

template <Scalar T>
Vec<T> LinfEmbedding<T>::apply(const Vec<T>& x) const {
  Vec<T> out(functionals.size());
  for (std::size_t i = 0; i < functionals.size(); ++i) out[i] = functionals[i](x);
  return out;
}

template <Scalar T>
T LinfEmbedding<T>::linf_norm_of_image(const Vec<T>& x) const {
  T best(0);
  for (const auto& f : functionals) {
    const T v = Arith<T>::abs(f(x));
    if (v > best) best = v;
  }
  return best;
}

template <Scalar T>
LinfEmbedding<T> embed_linf(const SymPolytope<T>& body) {
  LinfEmbedding<T> out;
  out.k = body.dim();
  out.functionals = body.facets();
  out.body_vertices = enumerate_vertices(body);
  for (const auto& v : out.body_vertices)
    if (!Arith<T>::eq(out.linf_norm_of_image(v), T(1)))
      throw InputError("embed_linf: a vertex does not map to the unit sphere");
  for (std::size_t i = 0; i < out.functionals.size(); ++i) {
    std::vector<const Vec<T>*> face;
    for (const auto& v : out.body_vertices)
      if (Arith<T>::eq(out.functionals[i](v), T(1))) face.push_back(&v);
    linalg::Matrix<T> diffs;
    for (std::size_t a = 1; a < face.size(); ++a) diffs.push_back((*face[a] - *face[0]).coords);
    if (face.empty() || linalg::rank(diffs) + 1 != out.k)
      throw InputError("embed_linf: functional " + std::to_string(i) + " does not define a facet");
  }
  return out;
}

template <Scalar T>
T mu_form_value(const MuCoefficients<T>& mu, const std::vector<Covector<T>>& f) {
  if (f.size() < mu.n()) throw DimensionError("mu_form_value: fewer functionals than coefficients expect");
  for (const auto& fi : f) require_same_dim(mu.k(), fi.dim(), "mu_form_value");
  T acc(0);
  for (const auto& [key, c] : mu.values()) acc += c * det_of(f, key);
  return acc;
}

template <Scalar T>
T mu_lhs(const MuCoefficients<T>& mu, const KInstance<T>& inst) {
  return Arith<T>::abs(mu_form_value(mu, inst.f));
}

template <Scalar T>
MuCoefficients<T> product_weights(const SymPolygon<T>& k) {
  MuCoefficients<T> mu(2, k.n());
  for (std::size_t i = 0; i < k.n(); ++i)
    for (std::size_t j = i + 1; j < k.n(); ++j) mu.set({i, j}, T(k.edges()[i].weight * k.edges()[j].weight));
  return mu;
}

template <Scalar T>
SymPolytope<T> polygon_body(const SymPolygon<T>& k) {
  std::vector<Covector<T>> f;
  for (std::size_t i = 0; i < k.n(); ++i) f.push_back(k.support_covector(i));
  return SymPolytope<T>(2, std::move(f));
}

KInstance<Rational> equality_instance(const SymPolytope<Rational>& body) {
  const std::size_t k = body.dim();
  if (k != 2 && k != 3) throw InputError("k must be 2 or 3");
  auto inst = symmetric_instance(k, body.facets());
  inst.f = body.facets();
  check_support(inst);
  return inst;
}

InstanceSampler default_sampler(const SymPolytope<Rational>& body, SamplerSpec spec) {
  const std::size_t k = body.dim();
  if (k != 2 && k != 3) throw InputError("k must be 2 or 3");
  auto body_vertices = enumerate_vertices(body);
  return [body, body_vertices, spec, k](SplitMix64& rng) {
    std::vector<Covector<Rational>> g = body.facets();
    const auto slabs = uniform_int(rng, 0, static_cast<std::int64_t>(spec.max_slabs));
    for (std::int64_t s = 0; s < slabs; ++s) {
      Covector<Rational> h;
      do {
        h = Covector<Rational>(random_int_vec<Rational>(rng, k, spec.slab_bound).coords);
      } while (h.is_zero());
      // |h| <= r * max_K |h| with r <= 1 cuts K (or touches it when r = 1).
      const Rational r = frac(uniform_int(rng, 1, 4), 4);
      const Rational reach = r * max_abs_on(h, body_vertices);
      g.push_back(scaled(h, Rational(1 / reach)));
    }
    if (spec.rescale_body) {
      const Rational t = frac(uniform_int(rng, 1, 4), 2);
      const Rational inv = 1 / t;
      for (auto& gj : g) gj = scaled(gj, inv);
    }
    auto inst = symmetric_instance(k, g);

    std::vector<Covector<Rational>> pool;
    for (const auto& gj : g) {
      pool.push_back(gj);
      pool.push_back(-gj);
    }
    auto pick = [&]() -> const Covector<Rational>& {
      return pool[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(pool.size()) - 1))];
    };
    for (const auto& fk : body.facets()) {
      switch (uniform_int(rng, 0, 2)) {
        case 0:
          inst.f.push_back(scaled(fk, Rational(1 / max_abs_on(fk, inst.vertices))));
          break;
        case 1:
          inst.f.push_back(scaled(pick(), frac(uniform_int(rng, 1, 4), 4)));
          break;
        default: {
          const Rational lam = frac(uniform_int(rng, 1, 3), 4);
          const auto& a = pick();
          const auto& b = pick();
          Covector<Rational> c(k);
          for (std::size_t i = 0; i < k; ++i) c[i] = lam * a[i] + (1 - lam) * b[i];
          inst.f.push_back(std::move(c));
        }
      }
    }
    check_support(inst);
    return inst;
  };
}

RevalidationReport revalidate(const MuCoefficients<Rational>& mu, const InstanceSampler& sampler, std::size_t count,
                              std::uint64_t seed) {
  RevalidationReport out;
  const SplitMix64 root(seed);
  for (std::size_t i = 0; i < count; ++i) {
    auto rng = root.fork(i);
    const auto inst = sampler(rng);
    const Rational ratio = mu_lhs(mu, inst) * inst.volume;
    if (ratio > out.max_ratio || i == 0) out.max_ratio = ratio;
    if (ratio > 1) {
      ++out.violations;
      if (!out.first_violation) out.first_violation = i;
    }
    ++out.samples;
  }
  return out;
}

std::string KdimSearchReport::status() const { return witness ? "sample-feasible" : "sampled-infeasible"; }

KdimSearchReport mu_search(const SymPolytope<Rational>& body, const InstanceSampler& sampler, std::size_t n_samples,
                           std::uint64_t seed, std::size_t revalidation, RefineSpec refine) {
  KdimSearchReport out;
  out.k = body.dim();
  out.n = body.facets().size();
  out.seed = seed;
  out.n_samples = n_samples;
  if (out.k != 2 && out.k != 3) throw InputError("mu_search supports k = 2 and k = 3");
  out.variables = k_subsets(out.n, out.k);

  const auto eq = equality_instance(body);
  out.body_volume = eq.volume;
  auto dets = [&](const std::vector<Covector<Rational>>& f) {
    std::vector<Rational> row;
    row.reserve(out.variables.size());
    for (const auto& key : out.variables) row.push_back(det_of(f, key));
    return row;
  };
  auto draw = [&](SplitMix64& rng) {
    auto inst = sampler(rng);
    if (inst.f.size() != out.n || inst.k != out.k) throw InputError("sampler produced an instance of the wrong shape");
    return inst;
  };

  // Streams: LP samples use fork(i), refinement fork(2^40 + i), revalidation
  // a seed drawn from fork(2^41).
  const SplitMix64 root(seed);
  const std::uint64_t refine_base = std::uint64_t{1} << 40;
  std::vector<std::pair<std::vector<Rational>, Rational>> rows;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n_samples; ++i) {
    auto rng = root.fork(i);
    const auto inst = draw(rng);
    rows.emplace_back(dets(inst.f), Rational(1 / inst.volume));
    labels.push_back("sample " + std::to_string(i));
  }

  const auto eq_row = dets(eq.f);
  const Rational eq_bound = 1 / eq.volume;
  auto solve_all = [&]() {
    out.searches.clear();
    out.witness.reset();
    out.witness_sign.reset();
    for (int sign : {1, -1}) {
      SignedSearch search;
      search.sign = sign;
      search.problem.num_vars = out.variables.size();
      std::vector<Rational> row;
      for (const auto& c : eq_row) row.push_back(sign * c);
      search.problem.add_eq(std::move(row), eq_bound, "equality");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& [a, b] = rows[i];
        std::vector<Rational> neg;
        for (const auto& c : a) neg.push_back(-c);
        search.problem.add_leq(a, b, labels[i] + " upper");
        search.problem.add_leq(std::move(neg), b, labels[i] + " lower");
      }
      search.result = lp::solve_feasibility(search.problem);
      if (search.result.status == lp::Status::Infeasible)
        search.certificate_verified = lp::verify_certificate(search.problem, search.result.certificate);
      if (search.result.status == lp::Status::Feasible && !out.witness) {
        MuCoefficients<Rational> mu(out.k, out.n);
        for (std::size_t v = 0; v < out.variables.size(); ++v) mu.set(out.variables[v], search.result.witness[v]);
        out.witness = std::move(mu);
        out.witness_sign = sign;
      }
      out.searches.push_back(std::move(search));
    }
  };

  solve_all();
  std::size_t screened = 0;
  for (std::size_t round = 0; round < refine.rounds && out.witness; ++round) {
    std::size_t added = 0;
    for (std::size_t j = 0; j < refine.batch; ++j, ++screened) {
      auto rng = root.fork(refine_base + screened);
      const auto inst = draw(rng);
      if (mu_lhs(*out.witness, inst) * inst.volume > 1) {
        rows.emplace_back(dets(inst.f), Rational(1 / inst.volume));
        labels.push_back("cut " + std::to_string(screened));
        ++added;
      }
    }
    ++out.refine_rounds_used;
    if (added == 0) break;
    out.cuts_added += added;
    solve_all();
  }

  if (out.witness) {
    out.equality_residual = mu_lhs(*out.witness, eq) - eq_bound;
    const std::uint64_t fresh_seed = root.fork(std::uint64_t{1} << 41)();
    out.revalidation = revalidate(*out.witness, sampler, revalidation, fresh_seed);
  }
  return out;
}

#define BHCAL_INSTANTIATE_KDIM(T)                                                                          \
  template class MuCoefficients<T>;                                                                        \
  template struct LinfEmbedding<T>;                                                                        \
  template KInstance<T> make_instance<T>(std::size_t, std::vector<HalfSpace<T>>, std::vector<Covector<T>>); \
  template LinfEmbedding<T> embed_linf<T>(const SymPolytope<T>&);                                          \
  template T mu_form_value<T>(const MuCoefficients<T>&, const std::vector<Covector<T>>&);                  \
  template T mu_lhs<T>(const MuCoefficients<T>&, const KInstance<T>&);                                     \
  template MuCoefficients<T> product_weights<T>(const SymPolygon<T>&);                                     \
  template SymPolytope<T> polygon_body<T>(const SymPolygon<T>&);

BHCAL_INSTANTIATE_KDIM(Rational)
BHCAL_INSTANTIATE_KDIM(double)

}  // namespace bhcal
