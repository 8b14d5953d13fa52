#include "bhcal/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace bhcal::io {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Rational parse_scalar(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(mpz_class(std::to_string(j.get<std::int64_t>()), 10));
  if (j.is_number_unsigned()) return Rational(mpz_class(std::to_string(j.get<std::uint64_t>()), 10));
  throw InputError("expected an integer or a rational string, got " + j.dump());
}

std::vector<Rational> parse_scalar_list(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of numbers, got " + j.dump());
  std::vector<Rational> out;
  for (const auto& x : j) out.push_back(parse_scalar(x));
  return out;
}

SymPolytope<Rational> read_polytope(const Json& j) {
  const auto dim = field(j, "dim");
  if (!dim.is_number_unsigned()) throw InputError("'dim' must be a positive integer");
  const std::size_t n = dim.get<std::size_t>();
  std::vector<Covector<Rational>> facets;
  for (const auto& row : field(j, "facets")) {
    auto c = parse_scalar_list(row);
    if (c.size() != n) throw InputError("facet " + row.dump() + " does not have " + std::to_string(n) + " entries");
    facets.emplace_back(std::move(c));
  }
  return SymPolytope<Rational>(n, std::move(facets));
}

template <Scalar T>
Json polytope_json(const SymPolytope<T>& body) {
  Json facets = Json::array();
  for (const auto& g : body.facets()) facets.push_back(vec_json(g.coeffs));
  return Json{{"dim", body.dim()}, {"facets", facets}};
}

template Json polytope_json<Rational>(const SymPolytope<Rational>&);
template Json polytope_json<double>(const SymPolytope<double>&);

namespace {

std::vector<Vec2<Rational>> read_points(const Json& arr) {
  if (!arr.is_array()) throw InputError("expected an array of points");
  std::vector<Vec2<Rational>> out;
  for (const auto& p : arr) {
    auto c = parse_scalar_list(p);
    if (c.size() != 2) throw InputError("expected a point with two coordinates, got " + p.dump());
    out.push_back({c[0], c[1]});
  }
  return out;
}

}  // namespace

SymPolygon<Rational> read_sym_polygon(const Json& j) {
  return SymPolygon<Rational>::from_half_vertices(read_points(field(j, "half_vertices")));
}

std::vector<Vec2<Rational>> read_polygon_cycle(const Json& j) { return read_points(field(j, "polygon")); }

TriMesh<Rational> read_mesh(const Json& j) {
  TriMesh<Rational> mesh;
  mesh.ring = j.contains("ring") ? parse_ring(j.at("ring").get<std::string>()) : Ring::Z;
  for (const auto& v : field(j, "vertices")) mesh.vertices.emplace_back(parse_scalar_list(v));
  for (const auto& t : field(j, "triangles")) {
    if (!t.is_array() || (t.size() != 3 && t.size() != 4)) throw InputError("bad triangle " + t.dump());
    Triangle tri;
    for (std::size_t a = 0; a < 3; ++a) {
      if (!t[a].is_number_unsigned()) throw InputError("bad vertex index in " + t.dump());
      tri.v[a] = t[a].get<std::size_t>();
    }
    if (t.size() == 4) {
      if (!t[3].is_number_integer()) throw InputError("bad coefficient in " + t.dump());
      tri.coeff = t[3].get<long>();
    }
    mesh.triangles.push_back(tri);
  }
  mesh.normalize();
  return mesh;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw InputError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot move report into '" + path + "': " + ec.message());
  }
}

Vec<Rational> parse_vector(std::string_view text, std::size_t dim) {
  std::string s;
  for (char c : text)
    if (c != ' ') s += c;
  if (!s.empty() && (s[0] == 'e' || s[0] == 'E')) {
    std::size_t idx = 0;
    try {
      idx = std::stoul(s.substr(1));
    } catch (const std::exception&) {
      throw InputError("bad basis vector '" + s + "'");
    }
    if (idx < 1 || idx > dim) throw InputError("basis vector '" + s + "' is out of range for dimension " + std::to_string(dim));
    return Vec<Rational>::basis(dim, idx - 1);
  }
  std::vector<Rational> c;
  for (const auto& tok : split(s, ',')) c.push_back(parse_rational(tok));
  if (c.size() != dim)
    throw InputError("vector '" + s + "' has " + std::to_string(c.size()) + " entries, expected " + std::to_string(dim));
  return Vec<Rational>(std::move(c));
}

std::pair<Vec<Rational>, Vec<Rational>> parse_vector_pair(std::string_view text, std::size_t dim) {
  std::vector<std::string> parts;
  if (text.find(';') != std::string_view::npos) {
    parts = split(text, ';');
  } else {
    parts = split(text, ',');
    for (const auto& p : parts)
      if (p.empty() || (p[0] != 'e' && p[0] != 'E'))
        throw InputError("'" + std::string(text) + "': use e_i,e_j or two comma lists separated by ';'");
  }
  if (parts.size() != 2) throw InputError("'" + std::string(text) + "' does not name exactly two vectors");
  return {parse_vector(parts[0], dim), parse_vector(parts[1], dim)};
}

}  // namespace bhcal::io
