#include "bhcal/cli.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "bhcal/calibrate.hpp"
#include "bhcal/io.hpp"
#include "bhcal/kdim.hpp"
#include "bhcal/surfaces.hpp"

namespace bhcal::cli {

namespace {

using io::Json;
using io::num;

struct Scenario {
  std::string command;
  std::string norm = "linf";
  std::size_t dim = 3;
  std::size_t facets = 6;
  std::optional<std::uint64_t> norm_seed;
  std::string plane = "e1,e2";
  std::string sigma;
  std::string mode = "exact";
  long samples = -1;  ///< -1: command default
  std::uint64_t seed = 1;
  std::int64_t sample_bound = 10;
  std::string output;
  std::string csv;
  bool json = false;
  // density
  std::string density = "bh";
  // prop-check
  std::size_t random_polygons = 100;
  std::size_t max_pairs = 8;
  std::size_t polar_instances = 100;
  std::string polygon;
  // semi-elliptic
  std::size_t trials = 100;
  std::string ring = "z";
  std::string kind = "mixed";
  std::string disc;
  std::string mesh;
  // kdim-search
  std::size_t revalidate = 10000;
  std::size_t refine_rounds = 0;
  std::size_t refine_batch = 200;
  std::string witness = "lp";
};

struct Outcome {
  bool ok = true;
  Json report;
  std::string summary;
  std::string csv;
};

std::size_t samples_or(const Scenario& s, std::size_t fallback) {
  return s.samples < 0 ? fallback : static_cast<std::size_t>(s.samples);
}

Json scenario_json(const Scenario& s) {
  Json j{{"command", s.command}, {"norm", s.norm}, {"dim", s.dim}, {"facets", s.facets},
         {"plane", s.plane},     {"mode", s.mode}, {"seed", s.seed}};
  if (s.norm_seed) j["norm_seed"] = *s.norm_seed;
  if (s.samples >= 0) j["samples"] = s.samples;
  if (!s.sigma.empty()) j["sigma"] = s.sigma;
  return j;
}

std::string vec_text(const Vec<Rational>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.dim(); ++i) out += (i ? ";" : "") + num(v[i]);
  return out;
}

template <Scalar T>
std::string vec_text(const Vec<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.dim(); ++i) out += (i ? ";" : "") + num(v[i]);
  return out;
}

/// The norm named by the scenario, in exact arithmetic. Files set the dimension.
SymPolytope<Rational> exact_norm(Scenario& s) {
  if (s.norm == "linf") return linf_ball<Rational>(s.dim);
  if (s.norm == "l1") return l1_ball<Rational>(s.dim);
  if (s.norm == "random") {
    SplitMix64 rng(s.norm_seed.value_or(s.seed));
    return random_sym_polytope<Rational>(rng, s.dim, s.facets);
  }
  auto body = io::read_polytope(io::load_json_file(s.norm));
  s.dim = body.dim();
  return body;
}

PlaneBasis<Rational> exact_plane(const Scenario& s, std::size_t dim) {
  if (s.plane == "random") {
    SplitMix64 rng = SplitMix64(s.seed).fork(std::uint64_t{1} << 33);
    while (true) {
      auto sigma = random_simple_two_vector<Rational>(rng, dim, 3);
      if (!is_degenerate(sigma)) return PlaneBasis<Rational>(sigma.v1, sigma.v2);
    }
  }
  auto [u1, u2] = io::parse_vector_pair(s.plane, dim);
  return PlaneBasis<Rational>(u1, u2);
}

template <Scalar T>
PlaneBasis<T> plane_as(const PlaneBasis<Rational>& p) {
  return PlaneBasis<T>(io::convert<T>(p.u1()), io::convert<T>(p.u2()));
}

template <Scalar T>
Json polygon_json(const SymPolygon<T>& k) {
  Json verts = Json::array();
  for (const auto& a : k.vertices()) verts.push_back(io::vec2_json(a));
  Json edges = Json::array();
  for (const auto& e : k.edges()) {
    Json je{{"support", io::vec2_json(e.support)}, {"weight", num(e.weight)}};
    if (e.ambient) je["ambient"] = io::vec_json(e.ambient->coeffs);
    if (e.source) je["source"] = Json{{"index", *e.source}, {"sign", e.source_sign}};
    edges.push_back(je);
  }
  return Json{{"vertices", verts}, {"area", num(k.area())}, {"edges", edges}};
}

// ---------------------------------------------------------------- section

template <Scalar T>
Outcome run_section(Scenario& s) {
  const auto body_q = exact_norm(s);
  const auto plane_q = exact_plane(s, body_q.dim());
  const auto body = io::convert<T>(body_q);
  const auto plane = plane_as<T>(plane_q);
  const auto k = section(body, plane);

  T total(0);
  bool restrictions_ok = true;
  for (const auto& e : k.edges()) {
    total += e.weight;
    if (e.ambient)
      restrictions_ok = restrictions_ok && Arith<T>::eq((*e.ambient)(plane.u1()), e.support.x) &&
                        Arith<T>::eq((*e.ambient)(plane.u2()), e.support.y);
  }
  const bool weights_ok = Arith<T>::eq(total, T(1));

  Outcome o;
  o.ok = weights_ok && restrictions_ok;
  o.report = Json{{"command", "section"},
                  {"scenario", scenario_json(s)},
                  {"body", io::polytope_json(body)},
                  {"plane", Json::array({io::vec_json(plane.u1().coords), io::vec_json(plane.u2().coords)})},
                  {"area_normalization", "Euclidean area in the coordinates (s, t) of s*u1 + t*u2"},
                  {"polygon", polygon_json(k)},
                  {"checks", Json{{"weights_sum_to_one", weights_ok}, {"ambient_restricts_to_support", restrictions_ok}}},
                  {"passed", o.ok}};
  std::ostringstream sum;
  sum << "section: " << 2 * k.n() << "-gon, area " << num(k.area()) << ", weights";
  for (const auto& e : k.edges()) sum << " " << num(e.weight);
  o.summary = sum.str();
  return o;
}

// ---------------------------------------------------------------- density

template <Scalar T>
Outcome run_density(Scenario& s) {
  if (s.sigma.empty()) throw InputError("density needs --sigma");
  const auto body_q = exact_norm(s);
  const auto body = io::convert<T>(body_q);
  auto [v1, v2] = io::parse_vector_pair(s.sigma, body.dim());
  const SimpleTwoVector<T> sigma{io::convert<T>(v1), io::convert<T>(v2)};

  std::vector<std::string> which;
  if (s.density == "all")
    which = {"bh", "ht", "alpha"};
  else if (s.density == "bh" || s.density == "ht" || s.density == "alpha")
    which = {s.density};
  else
    throw InputError("unknown density '" + s.density + "' (bh, ht, alpha, all)");

  Outcome o;
  Json values = Json::object();
  std::vector<std::string> lines;
  for (const auto& w : which) {
    DensityValue<T> v;
    if (w == "bh") {
      v = bh_eval(BHDensity<T>(body), sigma);
    } else if (w == "ht") {
      v = ht_eval(HTDensity<T>(body), sigma);
    } else {
      const auto plane = plane_as<T>(exact_plane(s, body.dim()));
      v = alpha_eval(alpha_for_plane(body, plane), sigma);
    }
    values[w] = io::pi_json(v.value);
    values[w]["degenerate"] = v.degenerate;
    lines.push_back(which.size() == 1 ? v.value.to_string() : w + " " + v.value.to_string());
  }
  o.report = Json{{"command", "density"},
                  {"scenario", scenario_json(s)},
                  {"sigma", Json::array({io::vec_json(sigma.v1.coords), io::vec_json(sigma.v2.coords)})},
                  {"values", values},
                  {"passed", true}};
  for (std::size_t i = 0; i < lines.size(); ++i) o.summary += (i ? "\n" : "") + lines[i];
  return o;
}

// ---------------------------------------------------------------- calibrate

template <Scalar T>
Json form_json(const TwoForm<T>& omega) {
  Json out = Json::array();
  for (const auto& [key, c] : omega.coeffs())
    out.push_back(Json{{"i", key.first + 1}, {"j", key.second + 1}, {"coeff", num(c)}});
  return out;
}

template <Scalar T>
Outcome run_calibrate(Scenario& s) {
  const auto body_q = exact_norm(s);
  const auto body = io::convert<T>(body_q);
  const auto plane = plane_as<T>(exact_plane(s, body.dim()));
  const std::size_t n = samples_or(s, 10000);

  Outcome o;
  Json base{{"command", "calibrate"}, {"scenario", scenario_json(s)}, {"body", io::polytope_json(body)}};
  std::optional<Calibrator<T>> built;
  try {
    built = build_calibrator(body, plane);
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::logic_error& e) {
    // The equality check on the plane failed: report it as a violation.
    o.ok = false;
    o.report = base;
    o.report["error"] = e.what();
    o.report["passed"] = false;
    o.summary = std::string("calibrate: FAIL ") + e.what();
    return o;
  }
  const auto& c = *built;
  const auto r = verify_calibrator(c, n, s.seed, s.sample_bound);
  o.ok = r.passed();
  o.report = base;
  o.report["omega_units"] = "pi";
  o.report["omega"] = form_json(c.omega);
  o.report["section"] = polygon_json(c.polygon);
  o.report["equality_residual"] = num(r.equality_residual);
  o.report["n_samples"] = r.n_samples;
  o.report["sample_bound"] = r.sample_bound;
  o.report["max_violation"] = r.max_violation ? Json(num(*r.max_violation)) : Json(nullptr);
  if (r.worst_sample)
    o.report["worst"] = Json{{"v1", io::vec_json(r.worst_sample->v1.coords)},
                             {"v2", io::vec_json(r.worst_sample->v2.coords)},
                             {"omega", num(r.worst_omega)},
                             {"bh", num(r.worst_density)}};
  o.report["passed"] = o.ok;

  if (!s.csv.empty()) {
    std::ostringstream csv;
    csv << "index,v1,v2,omega,bh,violation\n";
    BHDensity<T> density(body);
    SplitMix64 rng(s.seed);
    for (std::size_t i = 0; i < n; ++i) {
      auto sigma = random_simple_two_vector<T>(rng, body.dim(), s.sample_bound);
      const T w = eval_two_form(c.omega, sigma);
      const T a = bh_eval(density, sigma).value.coeff;
      const T viol = Arith<T>::abs(w) - a;
      csv << i << "," << vec_text(sigma.v1) << "," << vec_text(sigma.v2) << "," << num(w) << "," << num(a) << ","
          << num(viol) << "\n";
    }
    o.csv = csv.str();
  }
  o.summary = std::string("calibrate: ") + (o.ok ? "PASS" : "FAIL") + " samples=" + std::to_string(n) +
              " max_violation=" + (r.max_violation ? num(*r.max_violation) : std::string("none")) +
              " equality_residual=" + num(r.equality_residual);
  return o;
}

// ---------------------------------------------------------------- prop-check

template <Scalar T>
Json half_vertices_json(const SymPolygon<T>& k) {
  Json out = Json::array();
  for (const auto& a : k.half_vertices()) out.push_back(io::vec2_json(a));
  return out;
}

struct Counter {
  std::size_t cases = 0;
  std::size_t failures = 0;
  Json to_json() const { return Json{{"cases", cases}, {"failures", failures}}; }
};

template <Scalar T>
Outcome run_prop_check(Scenario& s) {
  if (s.max_pairs < 2) throw InputError("--max-pairs must be at least 2");
  std::vector<SymPolygon<T>> fixed;
  if (!s.polygon.empty()) fixed.push_back(io::convert<T>(io::read_sym_polygon(io::load_json_file(s.polygon))));

  Counter lemma1, lemma2, lemma3, lemma3_equal, main_prop, reduction, polar;
  Json first_failure = nullptr;
  std::ostringstream csv;
  csv << "index,n,area,lemma1,lemma2,lemma3,lemma3_equal,main_prop,lhs_sum,bound\n";
  const SplitMix64 root(s.seed);
  const std::size_t total = fixed.size() + s.random_polygons;

  auto record = [&](Counter& c, bool ok, const char* name, std::size_t index, const SymPolygon<T>& k) {
    ++c.cases;
    if (ok) return;
    ++c.failures;
    if (first_failure.is_null())
      first_failure = Json{{"check", name}, {"polygon_index", index}, {"half_vertices", half_vertices_json(k)}};
  };

  for (std::size_t idx = 0; idx < total; ++idx) {
    SplitMix64 rng = root.fork(idx);
    const SymPolygon<T> k = idx < fixed.size()
                                ? fixed[idx]
                                : random_sym_polygon<T>(rng, static_cast<std::size_t>(uniform_int(
                                                                 rng, 2, static_cast<std::int64_t>(s.max_pairs))));
    const bool l1 = lemma1_check(k).passed;
    const bool l2 = lemma2_check(k).passed;
    record(lemma1, l1, "lemma1", idx, k);
    record(lemma2, l2, "lemma2", idx, k);

    const auto p = random_probability_weights<T>(rng, k.n(), idx % 3 == 0);
    const auto cert = lemma3_certificate<T>(k, p);
    record(lemma3, cert.passed(), "lemma3", idx, k);

    std::vector<T> q;
    for (const auto& e : k.edges()) q.push_back(e.weight);
    const auto cert_q = lemma3_certificate<T>(k, q);
    const bool eq_ok = cert_q.passed() && Arith<T>::eq(cert_q.lhs, T(T(1) / k.area()));
    record(lemma3_equal, eq_ok, "lemma3_equality", idx, k);

    const auto m = static_cast<std::size_t>(uniform_int(rng, 1, 8));
    std::vector<Covector<T>> f;
    for (std::size_t i = 0; i < m; ++i) f.push_back(random_polar_functional<T>(rng, k));
    const auto w = random_probability_weights<T>(rng, m, true);
    const auto mp = check_main_prop<T>(k, f, w);
    record(main_prop, mp.holds(), "main_prop", idx, k);
    const auto [rf, rw] = reduce_functionals<T>(f, w);
    // Merging f with -f keeps sum p_i p_j |f_i ^ f_j| but not the signed sum.
    const bool red_ok = Arith<T>::eq(lhs_sum<T>(rf, rw), mp.lhs_sum);
    record(reduction, red_ok, "reduce_functionals", idx, k);

    if (idx < s.polar_instances) {
      const auto nf = static_cast<std::size_t>(uniform_int(rng, 2, 5));
      std::vector<Covector<T>> g;
      for (std::size_t i = 0; i < nf; ++i) g.push_back(random_polar_functional<T>(rng, k));
      const auto gw = random_probability_weights<T>(rng, nf, false);
      const auto free = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(nf) - 1));
      const auto res = maximize_over_polar<T>(k, g, gw, free);
      const T top = res.values[res.argmax];
      bool ok = Arith<T>::leq(lhs_sum<T>(g, gw), top) && Arith<T>::leq(top, T(T(1) / k.area()));
      // A convex function of f_free on K* peaks at a vertex of K*.
      for (int probe = 0; probe < 8 && ok; ++probe) {
        auto h = g;
        h[free] = random_polar_functional<T>(rng, k);
        ok = Arith<T>::leq(lhs_sum<T>(h, gw), top);
      }
      record(polar, ok, "polar_vertex_maximum", idx, k);
    }
    csv << idx << "," << k.n() << "," << num(k.area()) << "," << l1 << "," << l2 << "," << cert.passed() << ","
        << eq_ok << "," << mp.holds() << "," << num(mp.lhs_sum) << "," << num(mp.bound) << "\n";
  }

  Outcome o;
  o.ok = lemma1.failures + lemma2.failures + lemma3.failures + lemma3_equal.failures + main_prop.failures +
             reduction.failures + polar.failures ==
         0;
  o.report = Json{{"command", "prop-check"},
                  {"scenario", scenario_json(s)},
                  {"polygons", total},
                  {"max_pairs", s.max_pairs},
                  {"lemma1", lemma1.to_json()},
                  {"lemma2", lemma2.to_json()},
                  {"lemma3", lemma3.to_json()},
                  {"lemma3_equality", lemma3_equal.to_json()},
                  {"main_prop", main_prop.to_json()},
                  {"reduce_functionals", reduction.to_json()},
                  {"polar_vertex_maximum", polar.to_json()},
                  {"first_failure", first_failure},
                  {"passed", o.ok}};
  if (!s.csv.empty()) o.csv = csv.str();
  o.summary = std::string("prop-check: ") + (o.ok ? "PASS" : "FAIL") + " polygons=" + std::to_string(total) +
              " main_prop=" + std::to_string(main_prop.cases) + " polar=" + std::to_string(polar.cases);
  return o;
}

// ---------------------------------------------------------------- semi-elliptic

template <Scalar T>
Outcome run_semi_elliptic(Scenario& s) {
  const auto body = io::convert<T>(exact_norm(s));
  const auto plane = plane_as<T>(exact_plane(s, body.dim()));
  std::vector<Vec2<T>> cycle;
  if (!s.disc.empty()) {
    for (const auto& a : io::read_polygon_cycle(io::load_json_file(s.disc))) cycle.push_back(io::convert<T>(a));
  } else {
    SplitMix64 rng = SplitMix64(s.seed).fork(std::uint64_t{1} << 34);
    cycle = random_convex_polygon<T>(rng);
  }
  const PlanarDisc<T> disc(plane, cycle);
  GeneratorSpec spec;
  spec.kind = parse_competitor_kind(s.kind);
  spec.ring = parse_ring(s.ring);
  const auto r = semi_ellipticity_experiment(body, disc, spec, s.trials, s.seed);

  Outcome o;
  o.ok = r.passed();
  Json trials = Json::array();
  std::ostringstream csv;
  csv << "trial,generator,triangles,boundary_ok,bh_area,alpha_area,gap,bh_ge_alpha,alpha_ge_disc\n";
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    const auto& t = r.trials[i];
    trials.push_back(Json{{"generator", t.generator},
                          {"triangles", t.triangles},
                          {"boundary_ok", t.boundary_ok},
                          {"bh_area", io::pi_json(t.bh_area_s)},
                          {"alpha_area", io::pi_json(t.alpha_area_s)},
                          {"gap", num(t.gap)},
                          {"bh_ge_alpha", t.bh_ge_alpha},
                          {"alpha_ge_disc", t.alpha_ge_disc}});
    csv << i << "," << t.generator << "," << t.triangles << "," << t.boundary_ok << "," << num(t.bh_area_s.coeff)
        << "," << num(t.alpha_area_s.coeff) << "," << num(t.gap) << "," << t.bh_ge_alpha << "," << t.alpha_ge_disc
        << "\n";
  }
  Json disc_json = Json::array();
  for (const auto& a : cycle) disc_json.push_back(io::vec2_json(a));
  o.report = Json{{"command", "semi-elliptic"},
                  {"scenario", scenario_json(s)},
                  {"ring", to_string(r.ring)},
                  {"generator", to_string(spec.kind)},
                  {"body", io::polytope_json(body)},
                  {"disc", disc_json},
                  {"bh_area_disc", io::pi_json(r.bh_area_d)},
                  {"alpha_area_disc", io::pi_json(r.alpha_area_d)},
                  {"disc_equality", r.disc_equality},
                  {"min_gap", r.min_gap ? Json(num(*r.min_gap)) : Json(nullptr)},
                  {"boundary_mismatches", r.boundary_mismatches},
                  {"trials", trials}};

  if (!s.mesh.empty()) {
    const auto mesh = io::convert<T>(io::read_mesh(io::load_json_file(s.mesh)));
    const bool bd = same_boundary(boundary(mesh), boundary(disc.fan_mesh(mesh.ring)));
    const auto bh = bh_area(mesh, body);
    const auto al = alpha_area(mesh, alpha_for_plane(body, plane));
    const T gap = bh.coeff - r.bh_area_d.coeff;
    const bool ok = bd && Arith<T>::leq(T(0), gap) && Arith<T>::leq(al.coeff, bh.coeff);
    o.report["mesh"] = Json{{"boundary_ok", bd},
                            {"bh_area", io::pi_json(bh)},
                            {"alpha_area", io::pi_json(al)},
                            {"gap", num(gap)},
                            {"passed", ok}};
    o.ok = o.ok && ok;
  }
  o.report["passed"] = o.ok;
  if (!s.csv.empty()) o.csv = csv.str();
  o.summary = std::string("semi-elliptic: ") + (o.ok ? "PASS" : "FAIL") + " trials=" + std::to_string(r.trials.size()) +
              " ring=" + to_string(r.ring) + " min_gap=" + (r.min_gap ? num(*r.min_gap) : std::string("none"));
  return o;
}

// ---------------------------------------------------------------- lp-search

Json certificate_json(const lp::Problem& problem, const lp::Result& result) {
  Json out = Json::array();
  for (std::size_t r = 0; r < result.certificate.size(); ++r)
    if (sgn(result.certificate[r]) != 0)
      out.push_back(Json{{"row", problem.rows[r].label}, {"multiplier", num(result.certificate[r])}});
  return out;
}

Outcome run_lp_search(Scenario& s) {
  if (s.mode != "exact") throw InputError("lp-search runs in exact mode only");
  const auto body = exact_norm(s);
  const auto plane = exact_plane(s, body.dim());
  const std::size_t n = samples_or(s, 200);
  const bool bh = s.density == "bh";
  if (!bh && s.density != "ht") throw InputError("lp-search --density must be bh or ht");

  std::vector<SimpleTwoVector<Rational>> samples;
  SplitMix64 rng(s.seed);
  while (samples.size() < n) {
    auto sigma = random_simple_two_vector<Rational>(rng, body.dim(), s.sample_bound);
    if (!is_degenerate(sigma)) samples.push_back(std::move(sigma));
  }
  const auto lpf = lp_calibrator_search(bh ? bh_oracle(body) : ht_oracle(body), plane, samples);

  Outcome o;
  o.report = Json{{"command", "lp-search"},
                  {"scenario", scenario_json(s)},
                  {"density", s.density},
                  {"variables", lpf.variables.size()},
                  {"rows", lpf.problem.rows.size()},
                  {"pi_power", lpf.pi_power},
                  {"status", lp::to_string(lpf.result.status)},
                  {"pivots", lpf.result.pivots}};
  bool verified = false;
  if (lpf.feasible()) {
    verified = lp::first_violation(lpf.problem, lpf.result.witness) == -1;
    o.report["witness"] = form_json(lpf.witness());
    o.report["witness_verified"] = verified;
  } else {
    verified = lp::verify_certificate(lpf.problem, lpf.result.certificate);
    o.report["certificate"] = certificate_json(lpf.problem, lpf.result);
    o.report["certificate_verified"] = verified;
  }
  o.ok = verified;
  if (bh) {
    // The constructed calibrator must satisfy every sampled row.
    const auto c = build_calibrator(body, plane);
    const long row = lp::first_violation(lpf.problem, lpf.encode(c.omega));
    o.report["explicit_calibrator"] = form_json(c.omega);
    o.report["explicit_calibrator_first_violated_row"] = row;
    o.ok = o.ok && lpf.feasible() && row == -1;
  }
  o.report["passed"] = o.ok;
  o.summary = std::string("lp-search: ") + (o.ok ? "PASS" : "FAIL") + " density=" + s.density +
              " status=" + lp::to_string(lpf.result.status) + " samples=" + std::to_string(n);
  return o;
}

// ---------------------------------------------------------------- kdim-search

Json mu_json(const MuCoefficients<Rational>& mu) {
  Json out = Json::array();
  for (const auto& [key, v] : mu.values()) {
    Json idx = Json::array();
    for (auto i : key) idx.push_back(i + 1);
    out.push_back(Json{{"index", idx}, {"value", num(v)}});
  }
  return out;
}

Json revalidation_json(const RevalidationReport& r) {
  return Json{{"samples", r.samples},
              {"violations", r.violations},
              {"first_violation", r.first_violation ? Json(*r.first_violation) : Json(nullptr)},
              {"max_ratio", num(r.max_ratio)}};
}

Outcome run_kdim_search(Scenario& s) {
  if (s.mode != "exact") throw InputError("kdim-search runs in exact mode only");
  std::optional<SymPolygon<Rational>> polygon;
  SymPolytope<Rational> body = [&]() -> SymPolytope<Rational> {
    if (!s.polygon.empty()) {
      s.dim = 2;
      return polygon_body(io::read_sym_polygon(io::load_json_file(s.polygon)));
    }
    if (s.norm == "random") {
      SplitMix64 rng(s.norm_seed.value_or(s.seed));
      if (s.dim == 2) return polygon_body(random_sym_polygon<Rational>(rng, s.facets));
      for (int attempt = 0; attempt < 200; ++attempt) {
        auto b = random_sym_polytope<Rational>(rng, s.dim, s.facets);
        try {
          embed_linf(b);
          return b;
        } catch (const InputError&) {
        }
      }
      throw InputError("no random body with facet functionals only was found");
    }
    return exact_norm(s);
  }();
  if (body.dim() != 2 && body.dim() != 3) throw InputError("kdim-search supports k = 2 and k = 3");
  if (body.dim() == 2) {
    // Facet order follows the polygon's sides so product weights line up.
    std::vector<Vec2<Rational>> planar;
    for (const auto& g : body.facets()) planar.push_back({g[0], g[1]});
    polygon = halfplane_intersection<Rational>(planar);
    body = polygon_body(*polygon);
  }
  embed_linf(body);  // throws InputError unless every functional is a facet
  const auto sampler = default_sampler(body);
  const std::size_t n_samples = samples_or(s, 500);

  Outcome o;
  o.report = Json{{"command", "kdim-search"},
                  {"scenario", scenario_json(s)},
                  {"k", body.dim()},
                  {"n", body.facets().size()},
                  {"seed", s.seed},
                  {"body", io::polytope_json(body)},
                  {"witness_source", s.witness}};
  const Rational bound = 1 / equality_instance(body).volume;

  if (s.witness == "product") {
    if (!polygon) throw InputError("--witness product needs k = 2");
    const auto mu = product_weights(*polygon);
    const auto reval = revalidate(mu, sampler, s.revalidate, s.seed);
    const Rational residual = mu_lhs(mu, equality_instance(body)) - bound;
    o.ok = reval.violations == 0 && sgn(residual) == 0;
    o.report["n_samples"] = 0;
    o.report["status"] = "candidate";
    o.report["witness"] = mu_json(mu);
    o.report["equality_residual"] = num(residual);
    o.report["revalidation"] = revalidation_json(reval);
    o.report["revalidation_violations"] = reval.violations;
  } else if (s.witness == "lp") {
    const auto r = mu_search(body, sampler, n_samples, s.seed, s.revalidate, {s.refine_rounds, s.refine_batch});
    o.report["n_samples"] = r.n_samples;
    o.report["status"] = r.status();
    Json searches = Json::array();
    bool certificates_ok = true;
    for (const auto& sr : r.searches) {
      Json js{{"sign", sr.sign},
              {"status", lp::to_string(sr.result.status)},
              {"rows", sr.problem.rows.size()},
              {"pivots", sr.result.pivots}};
      if (sr.result.status == lp::Status::Infeasible) {
        js["certificate_verified"] = sr.certificate_verified;
        js["certificate"] = certificate_json(sr.problem, sr.result);
        certificates_ok = certificates_ok && sr.certificate_verified;
      }
      searches.push_back(js);
    }
    o.report["searches"] = searches;
    o.report["refine"] = Json{{"rounds_requested", s.refine_rounds},
                              {"rounds_used", r.refine_rounds_used},
                              {"batch", s.refine_batch},
                              {"cuts_added", r.cuts_added}};
    o.report["witness"] = r.witness ? mu_json(*r.witness) : Json(nullptr);
    o.report["witness_sign"] = r.witness_sign ? Json(*r.witness_sign) : Json(nullptr);
    o.report["equality_residual"] = r.equality_residual ? Json(num(*r.equality_residual)) : Json(nullptr);
    o.report["revalidation"] = r.revalidation ? revalidation_json(*r.revalidation) : Json(nullptr);
    o.report["revalidation_violations"] = r.revalidation ? Json(r.revalidation->violations) : Json(nullptr);
    o.ok = certificates_ok;
    if (r.witness) o.ok = o.ok && sgn(*r.equality_residual) == 0 && r.revalidation->violations == 0;
    // In the plane a valid collection always exists, so infeasibility is a violation.
    if (!r.witness && body.dim() == 2) o.ok = false;
  } else {
    throw InputError("--witness must be lp or product");
  }
  o.report["claim"] = "sampled evidence only; no statement about all polytopes and functionals";
  o.report["passed"] = o.ok;
  o.summary = std::string("kdim-search: ") + o.report["status"].get<std::string>() + " k=" +
              std::to_string(body.dim()) + " n=" + std::to_string(body.facets().size()) + " revalidation_violations=" +
              (o.report["revalidation_violations"].is_null() ? std::string("none")
                                                              : o.report["revalidation_violations"].dump());
  return o;
}

// ---------------------------------------------------------------- driver

template <template <class> class Runner>
Outcome dispatch_mode(Scenario& s) {
  if (s.mode == "exact") return Runner<Rational>::run(s);
  if (s.mode == "float") return Runner<double>::run(s);
  throw InputError("--mode must be exact or float");
}

template <class T> struct SectionRunner { static Outcome run(Scenario& s) { return run_section<T>(s); } };
template <class T> struct DensityRunner { static Outcome run(Scenario& s) { return run_density<T>(s); } };
template <class T> struct CalibrateRunner { static Outcome run(Scenario& s) { return run_calibrate<T>(s); } };
template <class T> struct PropRunner { static Outcome run(Scenario& s) { return run_prop_check<T>(s); } };
template <class T> struct SemiRunner { static Outcome run(Scenario& s) { return run_semi_elliptic<T>(s); } };

const std::set<std::string> kCommands{"section",       "density",   "calibrate",  "prop-check",
                                      "semi-elliptic", "lp-search", "kdim-search"};

/// Splices a JSON config into the argument list. Command-line options win.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw InputError("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;
  const Json cfg = io::load_json_file(path);
  if (!cfg.is_object()) throw InputError("config must be a JSON object");
  if (rest.empty() || kCommands.count(rest.front()) == 0) {
    if (!cfg.contains("command")) throw InputError("no subcommand on the command line or in the config");
    rest.insert(rest.begin(), cfg.at("command").get<std::string>());
  }
  auto given = [&](const std::string& flag) {
    return std::any_of(rest.begin(), rest.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") continue;
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) rest.push_back(flag);
    } else if (value.is_string()) {
      rest.push_back(flag);
      rest.push_back(value.get<std::string>());
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      rest.push_back(flag);
      rest.push_back(value.dump());
    } else {
      throw InputError("config field '" + key + "' must be a string, integer or boolean");
    }
  }
  return rest;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Scenario s;
  CLI::App app{"Area densities, calibrators and semi-ellipticity experiments for polyhedral norms", "bhcal"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--norm", s.norm, "linf, l1, random or a polytope JSON file")->capture_default_str();
    sub->add_option("--dim", s.dim, "Ambient dimension for builtin norms")->capture_default_str();
    sub->add_option("--facets", s.facets, "Facet pairs of the random norm")->capture_default_str();
    sub->add_option("--norm-seed", s.norm_seed, "Seed of the random norm (default: --seed)");
    sub->add_option("--plane", s.plane, "Plane basis: e1,e2 or '1,0,0;0,1,1' or random")->capture_default_str();
    sub->add_option("--mode", s.mode, "exact or float")->capture_default_str();
    sub->add_option("--samples", s.samples, "Sample count (command default when omitted)");
    sub->add_option("--seed", s.seed, "Seed recorded in the report")->capture_default_str();
    sub->add_option("--sample-bound", s.sample_bound, "Integer range of sampled vectors")->capture_default_str();
    sub->add_option("--output", s.output, "Report JSON path (written atomically)");
    sub->add_option("--csv", s.csv, "Per-sample CSV path");
    sub->add_flag("--json", s.json, "Print the report JSON instead of the summary");
  };

  auto* section_cmd = app.add_subcommand("section", "Section of the unit ball by a plane, with p_i and F_i");
  auto* density_cmd = app.add_subcommand("density", "BH, HT or alpha density of a 2-vector");
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Build the calibrator for a plane and verify it");
  auto* prop_cmd = app.add_subcommand("prop-check", "Polygon lemmas and the polygon inequality on random input");
  auto* semi_cmd = app.add_subcommand("semi-elliptic", "Competitor surfaces against a planar disc");
  auto* lp_cmd = app.add_subcommand("lp-search", "Sampled calibrator LP for the BH or HT density");
  auto* kdim_cmd = app.add_subcommand("kdim-search", "Coefficient search in dimension k = 2, 3");
  for (auto* sub : {section_cmd, density_cmd, calibrate_cmd, prop_cmd, semi_cmd, lp_cmd, kdim_cmd}) common(sub);

  density_cmd->add_option("--sigma", s.sigma, "2-vector v1 ^ v2: e1,e2 or '1,0;1,1'");
  density_cmd->add_option("--density", s.density, "bh, ht, alpha or all")->capture_default_str();
  lp_cmd->add_option("--density", s.density, "bh or ht")->capture_default_str();

  prop_cmd->add_option("--random-polygons", s.random_polygons, "Random symmetric polygons")->capture_default_str();
  prop_cmd->add_option("--max-pairs", s.max_pairs, "Largest n of a random 2n-gon")->capture_default_str();
  prop_cmd->add_option("--polar-instances", s.polar_instances, "Polygons used for the polar maximum check")
      ->capture_default_str();
  prop_cmd->add_option("--polygon", s.polygon, "Extra symmetric polygon JSON file");

  semi_cmd->add_option("--trials", s.trials, "Competitors per run")->capture_default_str();
  semi_cmd->add_option("--ring", s.ring, "z or z2")->capture_default_str();
  semi_cmd->add_option("--generator", s.kind, "tent, perturb or mixed")->capture_default_str();
  semi_cmd->add_option("--disc", s.disc, "Convex disc polygon JSON file (default: random)");
  semi_cmd->add_option("--mesh", s.mesh, "Extra competitor mesh JSON file");

  kdim_cmd->add_option("--polygon", s.polygon, "Symmetric polygon JSON file (k = 2)");
  kdim_cmd->add_option("--revalidate", s.revalidate, "Fresh instances for revalidation")->capture_default_str();
  kdim_cmd->add_option("--refine-rounds", s.refine_rounds, "Constraint-generation rounds")->capture_default_str();
  kdim_cmd->add_option("--refine-batch", s.refine_batch, "Instances screened per round")->capture_default_str();
  kdim_cmd->add_option("--witness", s.witness, "lp or product (k = 2)")->capture_default_str();

  std::vector<std::string> args;
  try {
    args = apply_config(raw_args);
  } catch (const std::exception& e) {
    err << "bhcal: " << e.what() << "\n";
    return kExitInputError;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }
  s.command = app.get_subcommands().front()->get_name();

  Outcome o;
  try {
    if (s.command == "section")
      o = dispatch_mode<SectionRunner>(s);
    else if (s.command == "density")
      o = dispatch_mode<DensityRunner>(s);
    else if (s.command == "calibrate")
      o = dispatch_mode<CalibrateRunner>(s);
    else if (s.command == "prop-check")
      o = dispatch_mode<PropRunner>(s);
    else if (s.command == "semi-elliptic")
      o = dispatch_mode<SemiRunner>(s);
    else if (s.command == "lp-search")
      o = run_lp_search(s);
    else
      o = run_kdim_search(s);
  } catch (const InputError& e) {
    err << "bhcal: input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DimensionError& e) {
    err << "bhcal: input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "bhcal: input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const Json::exception& e) {
    err << "bhcal: input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::logic_error& e) {
    err << "bhcal: invariant violated: " << e.what() << "\n";
    return kExitViolation;
  } catch (const std::exception& e) {
    err << "bhcal: error: " << e.what() << "\n";
    return kExitInputError;
  }

  const std::string report = o.report.dump(2) + "\n";
  try {
    if (!s.output.empty()) io::write_atomic(s.output, report);
    if (!s.csv.empty()) {
      if (o.csv.empty()) throw InputError("--csv is not supported by " + s.command);
      io::write_atomic(s.csv, o.csv);
    }
  } catch (const InputError& e) {
    err << "bhcal: " << e.what() << "\n";
    return kExitInputError;
  }
  if (s.json)
    out << report;
  else
    out << o.summary << "\n";
  return o.ok ? kExitOk : kExitViolation;
}

}  // namespace bhcal::cli
