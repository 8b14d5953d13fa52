#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "bhcal/polytope.hpp"
#include "bhcal/surfaces.hpp"
#include "json.hpp"

/// File formats and report serialization. Exact values are written as
/// strings "p/q", float values as decimal strings with 17 significant digits.
namespace bhcal::io {

using Json = nlohmann::ordered_json;

template <Scalar T>
std::string num(const T& x) {
  return Arith<T>::to_string(x);
}

/// {"coeff": "1/4", "pi_power": 1, "text": "pi/4"}
template <Scalar T>
Json pi_json(const PiScaled<T>& v) {
  return Json{{"coeff", num(v.coeff)}, {"pi_power", v.pi_power}, {"text", v.to_string()}};
}

template <Scalar T>
Json vec_json(const std::vector<T>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(num(x));
  return out;
}

template <Scalar T>
Json vec2_json(const Vec2<T>& a) {
  return Json::array({num(a.x), num(a.y)});
}

/// Rational from a JSON string ("3/4", "0.125", "-2") or integer.
Rational parse_scalar(const Json& j);
std::vector<Rational> parse_scalar_list(const Json& j);

/// {"dim": n, "facets": [[g_1...], ...]}: the body {|g_j(x)| <= 1}.
SymPolytope<Rational> read_polytope(const Json& j);
template <Scalar T>
Json polytope_json(const SymPolytope<T>& body);

/// {"half_vertices": [[x, y], ...]}: a_1..a_n of a symmetric polygon.
SymPolygon<Rational> read_sym_polygon(const Json& j);

/// {"polygon": [[s, t], ...]}: a convex polygon in plane coordinates.
std::vector<Vec2<Rational>> read_polygon_cycle(const Json& j);

/// {"ring": "z" | "z2", "vertices": [[x...], ...], "triangles": [[a, b, c] or [a, b, c, coeff], ...]}
TriMesh<Rational> read_mesh(const Json& j);

/// Parses a JSON file; InputError when it is missing or malformed.
Json load_json_file(const std::string& path);

/// Writes to a temporary file next to `path` and renames it into place.
void write_atomic(const std::string& path, const std::string& text);

/// "e2" (1-based basis vector) or "1,-1/2,0".
Vec<Rational> parse_vector(std::string_view text, std::size_t dim);

/// "e1,e2" or "1,0,0;0,1,1".
std::pair<Vec<Rational>, Vec<Rational>> parse_vector_pair(std::string_view text, std::size_t dim);

template <Scalar T>
Vec<T> convert(const Vec<Rational>& v) {
  Vec<T> out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = Arith<T>::from_rational(v[i]);
  return out;
}

template <Scalar T>
Covector<T> convert(const Covector<Rational>& f) {
  Covector<T> out(f.dim());
  for (std::size_t i = 0; i < f.dim(); ++i) out[i] = Arith<T>::from_rational(f[i]);
  return out;
}

template <Scalar T>
Vec2<T> convert(const Vec2<Rational>& a) {
  return {Arith<T>::from_rational(a.x), Arith<T>::from_rational(a.y)};
}

template <Scalar T>
SymPolytope<T> convert(const SymPolytope<Rational>& body) {
  std::vector<Covector<T>> facets;
  for (const auto& g : body.facets()) facets.push_back(convert<T>(g));
  return SymPolytope<T>(body.dim(), std::move(facets));
}

template <Scalar T>
SymPolygon<T> convert(const SymPolygon<Rational>& k) {
  std::vector<Vec2<T>> half;
  for (const auto& a : k.half_vertices()) half.push_back(convert<T>(a));
  return SymPolygon<T>::from_half_vertices(std::move(half));
}

template <Scalar T>
TriMesh<T> convert(const TriMesh<Rational>& mesh) {
  TriMesh<T> out;
  out.ring = mesh.ring;
  out.triangles = mesh.triangles;
  for (const auto& v : mesh.vertices) out.vertices.push_back(convert<T>(v));
  return out;
}

}  // namespace bhcal::io
