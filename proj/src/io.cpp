#include "rectikernel/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace rectikernel {

namespace {

using nlohmann::json;

double parse_double(std::string_view field, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
    field.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw IoError("csv line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  return v;
}

json point_json(Point2 p) { return json::array({p.x, p.y}); }

Point2 point_from(const json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("spec: missing '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw std::invalid_argument(std::string("spec: '") + key + "' must be [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

template <typename T>
T value_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("spec: bad type for '") + key + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::logic_error("format_double: buffer too small");
  return {buf, ptr};
}

std::string measure_to_csv(const DiscreteMeasure& mu) {
  std::string out = "x,y,w\n";
  for (std::size_t i = 0; i < mu.size(); ++i) {
    out += format_double(mu.point(i).x);
    out += ',';
    out += format_double(mu.point(i).y);
    out += ',';
    out += format_double(mu.weight(i));
    out += '\n';
  }
  return out;
}

DiscreteMeasure measure_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string row;
  std::size_t line = 0;
  bool header_seen = false;
  std::vector<Point2> pts;
  std::vector<double> ws;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    if (!header_seen) {
      std::string compact;
      for (char c : row)
        if (c != ' ') compact += c;
      if (compact != "x,y,w") throw IoError("csv: expected header 'x,y,w'");
      header_seen = true;
      continue;
    }
    const std::string_view sv(row);
    const auto c1 = sv.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : sv.find(',', c1 + 1);
    if (c2 == std::string_view::npos || sv.find(',', c2 + 1) != std::string_view::npos)
      throw IoError("csv line " + std::to_string(line) + ": expected three fields");
    pts.push_back({parse_double(sv.substr(0, c1), line), parse_double(sv.substr(c1 + 1, c2 - c1 - 1), line)});
    ws.push_back(parse_double(sv.substr(c2 + 1), line));
  }
  if (!header_seen) throw IoError("csv: empty file");
  return build_measure(std::move(pts), std::move(ws));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void save_measure(const DiscreteMeasure& mu, const std::filesystem::path& path) {
  write_text(path, measure_to_csv(mu));
}

DiscreteMeasure load_measure(const std::filesystem::path& path) { return measure_from_csv(read_text(path)); }

json spec_to_json(const GeneratorSpec& spec) {
  json params;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SegmentParams>) {
          params = {{"a", point_json(p.a)}, {"b", point_json(p.b)}};
        } else if constexpr (std::is_same_v<T, LipschitzGraphParams>) {
          params = {{"u0", p.u0},
                    {"u1", p.u1},
                    {"slope", p.slope},
                    {"frequencies", p.frequencies},
                    {"amplitude", p.amplitude}};
        } else if constexpr (std::is_same_v<T, CircleArcParams>) {
          params = {{"center", point_json(p.center)},
                    {"radius", p.radius},
                    {"angle0", p.angle0},
                    {"angle1", p.angle1}};
        } else if constexpr (std::is_same_v<T, CantorParams>) {
          params = {{"depth", p.depth}};
        } else {
          json verts = json::array();
          for (Point2 v : p.vertices) verts.push_back(point_json(v));
          params = {{"vertices", verts}};
        }
      },
      spec.variant);
  json j = {{"variant", spec.variant_name()},
            {"params", params},
            {"n_points", spec.n_points},
            {"seed", spec.seed},
            {"weight_rule", spec.weight_rule == WeightRule::Arclength ? "arclength" : "uniform"},
            {"noise_sigma", spec.noise_sigma}};
  if (spec.mass) j["mass"] = *spec.mass;
  return j;
}

GeneratorSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("spec: top level must be an object");
  if (!j.contains("variant") || !j.at("variant").is_string())
    throw std::invalid_argument("spec: missing string 'variant'");
  const std::string name = j.at("variant").get<std::string>();
  const json params = j.contains("params") ? j.at("params") : json::object();
  if (!params.is_object()) throw std::invalid_argument("spec: 'params' must be an object");

  GeneratorSpec spec;
  if (name == "segment") {
    SegmentParams p;
    if (params.contains("a")) p.a = point_from(params, "a");
    if (params.contains("b")) p.b = point_from(params, "b");
    spec.variant = p;
  } else if (name == "lipschitz_graph") {
    LipschitzGraphParams p;
    p.u0 = value_or(params, "u0", p.u0);
    p.u1 = value_or(params, "u1", p.u1);
    p.slope = value_or(params, "slope", p.slope);
    p.frequencies = value_or(params, "frequencies", p.frequencies);
    p.amplitude = value_or(params, "amplitude", p.amplitude);
    spec.variant = p;
  } else if (name == "circle_arc") {
    CircleArcParams p;
    if (params.contains("center")) p.center = point_from(params, "center");
    p.radius = value_or(params, "radius", p.radius);
    p.angle0 = value_or(params, "angle0", p.angle0);
    p.angle1 = value_or(params, "angle1", p.angle1);
    spec.variant = p;
  } else if (name == "cantor_four_corner") {
    CantorParams p;
    p.depth = value_or(params, "depth", p.depth);
    spec.variant = p;
    spec.n_points = std::size_t{1} << (2 * std::clamp(p.depth, 0, kMaxCantorDepth));
  } else if (name == "ad_regular_curve") {
    PolylineParams p;
    if (params.contains("vertices")) {
      p.vertices.clear();
      const json& v = params.at("vertices");
      if (!v.is_array()) throw std::invalid_argument("spec: 'vertices' must be an array");
      for (const json& q : v) {
        if (!q.is_array() || q.size() != 2 || !q[0].is_number() || !q[1].is_number())
          throw std::invalid_argument("spec: vertex must be [x, y]");
        p.vertices.push_back({q[0].get<double>(), q[1].get<double>()});
      }
    }
    spec.variant = p;
  } else {
    throw std::invalid_argument("spec: unknown variant '" + name + "'");
  }

  if (j.contains("n_points")) {
    const json& n = j.at("n_points");
    if (!n.is_number_integer() || n.get<long long>() < 1)
      throw std::invalid_argument("spec: n_points must be a positive integer");
    spec.n_points = n.get<std::size_t>();
  }
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0))
      throw std::invalid_argument("spec: seed must be a non-negative integer");
    spec.seed = s.get<std::uint64_t>();
  }
  const std::string rule = value_or<std::string>(j, "weight_rule", "arclength");
  if (rule == "arclength") {
    spec.weight_rule = WeightRule::Arclength;
  } else if (rule == "uniform") {
    spec.weight_rule = WeightRule::Uniform;
  } else {
    throw std::invalid_argument("spec: weight_rule must be 'arclength' or 'uniform'");
  }
  spec.noise_sigma = value_or(j, "noise_sigma", 0.0);
  if (j.contains("mass")) spec.mass = value_or(j, "mass", 1.0);
  validate(spec);
  return spec;
}

void save_spec(const GeneratorSpec& spec, const std::filesystem::path& path) {
  write_text(path, spec_to_json(spec).dump(2) + "\n");
}

GeneratorSpec load_spec(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("spec: invalid JSON: ") + e.what());
  }
  return spec_from_json(j);
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rectikernel
