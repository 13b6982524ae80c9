#pragma once

#include <map>
#include <string>
#include <vector>

namespace mtw {

/// One instantiated inequality lhs <= rhs (+ slack).
struct BoundRow {
  std::string label;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs; 0 when both vanish, +inf when only rhs does
  bool pass = false;
  std::map<std::string, double> constants;

  friend bool operator==(const BoundRow&, const BoundRow&) = default;
};

/// Default additive slack 1e-7 (1 + |rhs|).
[[nodiscard]] double default_slack(double rhs);
/// Fills ratio and pass (lhs <= rhs + slack).
[[nodiscard]] BoundRow make_row(std::string label, double t, double lhs, double rhs,
                                std::map<std::string, double> constants = {}, double extra_slack = 0.0);

struct ReportSummary {
  int rows = 0;
  int pass_count = 0;
  double worst_ratio = 0.0;
};
[[nodiscard]] ReportSummary summarize(const std::vector<BoundRow>& rows);

enum class ReportFormat { Csv, Json };

/// Writes rows; CSV columns: t, lhs, rhs, ratio, pass, label, then constants (sorted), followed by a
/// "# summary" comment line. JSON: {"rows": [...], "summary": {...}}.
void emit_report(const std::vector<BoundRow>& rows, const std::string& path, ReportFormat format);
[[nodiscard]] std::string render_report(const std::vector<BoundRow>& rows, ReportFormat format);
[[nodiscard]] std::vector<BoundRow> parse_json_report(const std::string& text);

/// 12 significant digits.
[[nodiscard]] std::string format_number(double v);

}  // namespace mtw
