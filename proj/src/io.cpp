#include "dhj/io.hpp"

#include <fstream>

namespace dhj {

namespace {

CubeShape shape_from_json(const Json& j) {
  if (!j.contains("k") || !j.contains("n")) throw InvalidArgument("JSON object needs integer fields \"k\" and \"n\"");
  return CubeShape(j.at("k").get<int>(), j.at("n").get<int>());
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw InvalidArgument("bad hex digit '" + std::string(1, c) + "'");
}

}  // namespace

Json set_to_json(const CubeSet& a) {
  Json points = Json::array();
  a.for_each([&](Index i) { points.push_back(Point::from_index(a.shape(), i).str()); });
  return Json{{"k", a.shape().k()}, {"n", a.shape().n()}, {"points", points}};
}

std::string bitset_hex(const CubeSet& a) {
  static const char* digits = "0123456789abcdef";
  std::size_t bytes = static_cast<std::size_t>((a.shape().size() + 7) / 8);
  std::string out;
  out.reserve(bytes * 2);
  auto words = a.words();
  for (std::size_t b = 0; b < bytes; ++b) {
    unsigned v = static_cast<unsigned>((words[b / 8] >> (8 * (b % 8))) & 0xff);
    out.push_back(digits[v >> 4]);
    out.push_back(digits[v & 15]);
  }
  return out;
}

Json set_to_json_bitset(const CubeSet& a) {
  return Json{{"k", a.shape().k()}, {"n", a.shape().n()}, {"bitset_hex", bitset_hex(a)}};
}

CubeSet set_from_json(const Json& j) {
  CubeShape shape = shape_from_json(j);
  CubeSet out(shape);
  if (j.contains("points")) {
    for (const auto& p : j.at("points")) out.insert(Point::parse(shape, p.get<std::string>()).index());
  } else if (j.contains("bitset_hex")) {
    auto hex = j.at("bitset_hex").get<std::string>();
    if (hex.size() % 2 != 0) throw InvalidArgument("bitset_hex must have an even number of digits");
    for (std::size_t b = 0; b * 2 < hex.size(); ++b) {
      int v = hex_value(hex[2 * b]) * 16 + hex_value(hex[2 * b + 1]);
      for (int bit = 0; bit < 8; ++bit) {
        if (!((v >> bit) & 1)) continue;
        Index i = b * 8 + static_cast<Index>(bit);
        if (i >= shape.size()) throw InvalidArgument("bitset_hex sets a bit beyond k^n");
        out.insert(i);
      }
    }
  } else {
    throw InvalidArgument("set JSON needs \"points\" or \"bitset_hex\"");
  }
  return out;
}

Json distribution_to_json(const Distribution& d) {
  Json probs = Json::object();
  for (Index i = 0; i < d.shape().size(); ++i)
    if (d[i] != 0) probs[Point::from_index(d.shape(), i).str()] = to_string(d[i]);
  return Json{{"k", d.shape().k()}, {"n", d.shape().n()}, {"probs", probs}};
}

Distribution distribution_from_json(const Json& j) {
  CubeShape shape = shape_from_json(j);
  Distribution d(shape);
  for (const auto& [key, value] : j.at("probs").items()) {
    Rational p = value.is_string() ? parse_rational(value.get<std::string>()) : Rational(value.get<long>());
    d[Point::parse(shape, key).index()] = p;
  }
  if (d.total() != 1) throw InvalidArgument("distribution probabilities sum to " + to_string(d.total()) + ", not 1");
  return d;
}

Json subspace_to_json(const Subspace& v) {
  Json wild = Json::array();
  for (const auto& w : v.wildcard_sets()) {
    Json coords = Json::array();
    for (int c : w) coords.push_back(c + 1);
    wild.push_back(coords);
  }
  Json fixed = Json::object();
  for (auto [c, val] : v.fixed()) fixed[std::to_string(c + 1)] = val;
  return Json{{"template", v.str()}, {"dim", v.dim()}, {"fixed", fixed}, {"wildcards", wild}};
}

Json line_to_json(const LinePattern& l) {
  Json points = Json::array();
  for (const auto& p : l.points()) points.push_back(p.str());
  return Json{{"pattern", l.str()}, {"degenerate", l.degenerate()}, {"points", points}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

}  // namespace dhj
