#pragma once

// Internal helpers shared by the serializers; not part of the public headers.

#include <nlohmann/json.hpp>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "partbench/error.hpp"
#include "partbench/io.hpp"
#include "partbench/math.hpp"
#include "partbench/scene.hpp"

namespace partbench::detail {

using json = nlohmann::json;

// Floats go out with 9 significant digits: rounding first makes the shortest round-trip
// representation nlohmann emits at most 9 digits long.
inline json number(double v) { return round_sig9(v); }
// json::dump, except that floating-point literals are re-printed with at most 9 significant digits:
// the library's shortest-representation search occasionally emits 17 digits.
inline std::string dump(const json& j, int indent = -1) {
  const auto text = j.dump(indent);
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  for (std::size_t i = 0; i < text.size();) {
    char ch = text[i];
    if (in_string) {
      out += ch;
      if (ch == '\\' && i + 1 < text.size()) out += text[++i];
      else if (ch == '"') in_string = false;
      ++i;
      continue;
    }
    if (ch == '"') {
      in_string = true;
      out += ch;
      ++i;
      continue;
    }
    if (ch == '-' || std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i + 1;
      bool is_float = false;
      while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.' || text[j] == 'e' ||
                                 text[j] == 'E' || text[j] == '+' || text[j] == '-')) {
        is_float = is_float || !std::isdigit(static_cast<unsigned char>(text[j]));
        ++j;
      }
      auto token = text.substr(i, j - i);
      if (is_float) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", std::strtod(token.c_str(), nullptr));
        std::string s = buf;
        // Keep a float marker so the value reads back as floating point.
        if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
        out += s;
      } else {
        out += token;
      }
      i = j;
      continue;
    }
    out += ch;
    ++i;
  }
  return out;
}

inline json vec3(Vec3 v) { return json::array({number(v.x), number(v.y), number(v.z)}); }

inline Vec3 to_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error("bad-format", "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline json rle_json(const Rle& r) { return json{{"size", {r.height, r.width}}, {"counts", r.counts}}; }
inline Rle rle_from(const json& j) {
  Rle r;
  r.height = j.at("size").at(0).get<int>();
  r.width = j.at("size").at(1).get<int>();
  r.counts = j.at("counts").get<std::vector<std::uint32_t>>();
  return r;
}

inline json parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error("bad-format", what + ": " + e.what());
  }
}

}  // namespace partbench::detail
