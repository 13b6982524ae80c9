#include "mtwlab/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mtwlab/report.hpp"

namespace mtw {

using nlohmann::ordered_json;

namespace {

Vec vec_from_json(const ordered_json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("json: point must be a nonempty array of numbers");
  std::vector<double> c;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError("json: point coordinates must be numbers");
    c.push_back(v.get<double>());
  }
  if (c.size() > static_cast<std::size_t>(kMaxDim)) throw ConfigError("json: point dimension exceeds 8");
  return Vec(std::span<const double>(c));
}

PointList points_from_json(const ordered_json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("json: 'points' must be a nonempty array");
  PointList pts;
  for (const auto& p : j) pts.push_back(vec_from_json(p));
  for (const Vec& p : pts)
    if (p.dim() != pts.front().dim()) throw ConfigError("json: points have mixed dimensions");
  return pts;
}

std::vector<double> numbers_from_json(const ordered_json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string("json: '") + what + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(std::string("json: '") + what + "' entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void check_on_space(const GroundSpace& sp, const PointList& pts) {
  for (const Vec& p : pts) {
    if (sp.is_sphere() && std::abs(norm(p) - 1.0) > 1e-9) throw ConfigError("json: sphere point is not unit length");
    if (!sp.contains(p)) throw ConfigError("json: point outside the ground space");
  }
}

}  // namespace

GroundSpace space_from_json(const ordered_json& j, int dim) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "sphere")) return GroundSpace::sphere(dim);
  if (j.is_object() && j.contains("lower") && j.contains("upper")) {
    const Vec lo = vec_from_json(j.at("lower"));
    const Vec hi = vec_from_json(j.at("upper"));
    if (lo.dim() != dim || hi.dim() != dim) throw ConfigError("json: box corners do not match point dimension");
    return GroundSpace::box(lo, hi);
  }
  throw ConfigError("json: 'space' must be \"sphere\" or {\"lower\": [...], \"upper\": [...]}");
}

ordered_json space_to_json(const GroundSpace& space) {
  if (space.is_sphere()) return "sphere";
  return {{"lower", json_vec(space.lower())}, {"upper", json_vec(space.upper())}};
}

DiscreteMeasure measure_from_json(const ordered_json& j) {
  if (!j.is_object()) throw ConfigError("json: measure must be an object");
  const PointList pts = points_from_json(j.at("points"));
  const GroundSpace sp = space_from_json(j.value("space", ordered_json()), pts.front().dim());
  check_on_space(sp, pts);
  if (!j.contains("weights")) return DiscreteMeasure::uniform(sp, pts);
  return {sp, pts, numbers_from_json(j.at("weights"), "weights")};
}

ordered_json measure_to_json(const DiscreteMeasure& mu) {
  ordered_json j;
  j["space"] = space_to_json(mu.space);
  j["points"] = ordered_json::array();
  for (const Vec& p : mu.points) j["points"].push_back(json_vec(p));
  j["weights"] = ordered_json::array();
  for (double w : mu.weights) j["weights"].push_back(w);
  return j;
}

Potential potential_from_json(const ordered_json& j, GroundSpace* space) {
  if (!j.is_object()) throw ConfigError("json: potential must be an object");
  PointList pts = points_from_json(j.at("points"));
  const GroundSpace sp = space_from_json(j.value("space", ordered_json()), pts.front().dim());
  check_on_space(sp, pts);
  std::vector<double> vals = numbers_from_json(j.at("values"), "values");
  if (vals.size() != pts.size()) throw ConfigError("json: 'values' and 'points' differ in length");
  if (space) *space = sp;
  return {std::move(pts), std::move(vals)};
}

ordered_json potential_to_json(const GroundSpace& space, const Potential& psi) {
  ordered_json j;
  j["space"] = space_to_json(space);
  j["points"] = ordered_json::array();
  for (const Vec& p : psi.points) j["points"].push_back(json_vec(p));
  j["values"] = ordered_json::array();
  for (double v : psi.values) j["values"].push_back(json_number(v));
  return j;
}

ordered_json plan_to_json(const TransportPlan& plan) {
  ordered_json j;
  j["rows"] = plan.rows;
  j["cols"] = plan.cols;
  j["entries"] = ordered_json::array();
  for (const auto& e : plan.entries) j["entries"].push_back({{"i", e.i}, {"j", e.j}, {"mass", json_number(e.mass)}});
  return j;
}

ConvexBody body_from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("vertices")) throw ConfigError("json: body must be {\"vertices\": [...]}");
  return ConvexBody(points_from_json(j.at("vertices")));
}

ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return ordered_json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw ConfigError("write failed for " + path);
}

ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

ordered_json json_vec(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.dim(); ++i) a.push_back(json_number(v[i]));
  return a;
}

}  // namespace mtw
