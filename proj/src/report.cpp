#include "mtwlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mtwlab/error.hpp"

namespace mtw {

double default_slack(double rhs) { return 1e-7 * (1.0 + std::abs(rhs)); }

BoundRow make_row(std::string label, double t, double lhs, double rhs, std::map<std::string, double> constants,
                  double extra_slack) {
  BoundRow r;
  r.label = std::move(label);
  r.t = t;
  r.lhs = lhs;
  r.rhs = rhs;
  if (rhs > 0.0) {
    r.ratio = lhs / rhs;
  } else {
    r.ratio = lhs <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  r.pass = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs + default_slack(rhs) + extra_slack;
  r.constants = std::move(constants);
  return r;
}

ReportSummary summarize(const std::vector<BoundRow>& rows) {
  ReportSummary s;
  s.rows = static_cast<int>(rows.size());
  for (const auto& r : rows) {
    s.pass_count += r.pass;
    s.worst_ratio = std::max(s.worst_ratio, r.ratio);
  }
  return s;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

using nlohmann::ordered_json;

ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double from_json_number(const ordered_json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

}  // namespace

std::string render_report(const std::vector<BoundRow>& rows, ReportFormat format) {
  if (rows.empty()) throw ConfigError("emit_report: no rows");
  const ReportSummary s = summarize(rows);
  if (format == ReportFormat::Json) {
    ordered_json doc;
    doc["rows"] = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json jr;
      jr["label"] = r.label;
      jr["t"] = number(r.t);
      jr["lhs"] = number(r.lhs);
      jr["rhs"] = number(r.rhs);
      jr["ratio"] = number(r.ratio);
      jr["pass"] = r.pass;
      ordered_json c = ordered_json::object();
      for (const auto& [k, v] : r.constants) c[k] = number(v);
      jr["constants"] = c;
      doc["rows"].push_back(jr);
    }
    doc["summary"] = {{"rows", s.rows}, {"pass_count", s.pass_count}, {"worst_ratio", number(s.worst_ratio)}};
    return doc.dump(2) + "\n";
  }
  std::set<std::string> keys;
  for (const auto& r : rows)
    for (const auto& kv : r.constants) keys.insert(kv.first);
  std::ostringstream os;
  os << "t,lhs,rhs,ratio,pass,label";
  for (const auto& k : keys) os << ',' << k;
  os << '\n';
  for (const auto& r : rows) {
    os << format_number(r.t) << ',' << format_number(r.lhs) << ',' << format_number(r.rhs) << ','
       << format_number(r.ratio) << ',' << (r.pass ? "true" : "false") << ',' << r.label;
    for (const auto& k : keys) {
      os << ',';
      if (auto it = r.constants.find(k); it != r.constants.end()) os << format_number(it->second);
    }
    os << '\n';
  }
  os << "# summary: rows=" << s.rows << " pass_count=" << s.pass_count
     << " worst_ratio=" << format_number(s.worst_ratio) << '\n';
  return os.str();
}

void emit_report(const std::vector<BoundRow>& rows, const std::string& path, ReportFormat format) {
  const std::string text = render_report(rows, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("emit_report: cannot write " + path);
  out << text;
  if (!out) throw ConfigError("emit_report: write failed for " + path);
}

std::vector<BoundRow> parse_json_report(const std::string& text) {
  const ordered_json doc = ordered_json::parse(text);
  std::vector<BoundRow> rows;
  for (const auto& jr : doc.at("rows")) {
    BoundRow r;
    r.label = jr.at("label").get<std::string>();
    r.t = from_json_number(jr.at("t"));
    r.lhs = from_json_number(jr.at("lhs"));
    r.rhs = from_json_number(jr.at("rhs"));
    r.ratio = from_json_number(jr.at("ratio"));
    r.pass = jr.at("pass").get<bool>();
    for (const auto& [k, v] : jr.at("constants").items()) r.constants[k] = from_json_number(v);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace mtw
