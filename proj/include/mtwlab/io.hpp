#pragma once

#include <string>

#include <json.hpp>

#include "mtwlab/applications.hpp"
#include "mtwlab/concavity.hpp"
#include "mtwlab/ot_core.hpp"

namespace mtw {

// Ground space: "sphere" (dimension taken from the points) or {"lower": [...], "upper": [...]}.
[[nodiscard]] GroundSpace space_from_json(const nlohmann::ordered_json& j, int dim);
[[nodiscard]] nlohmann::ordered_json space_to_json(const GroundSpace& space);

// {"space": ..., "points": [[...], ...], "weights": [...]}; weights default to uniform.
[[nodiscard]] DiscreteMeasure measure_from_json(const nlohmann::ordered_json& j);
[[nodiscard]] nlohmann::ordered_json measure_to_json(const DiscreteMeasure& mu);

// {"space": ..., "points": [[...], ...], "values": [...]}
[[nodiscard]] Potential potential_from_json(const nlohmann::ordered_json& j, GroundSpace* space = nullptr);
[[nodiscard]] nlohmann::ordered_json potential_to_json(const GroundSpace& space, const Potential& psi);

[[nodiscard]] nlohmann::ordered_json plan_to_json(const TransportPlan& plan);

// {"vertices": [[...], ...]}
[[nodiscard]] ConvexBody body_from_json(const nlohmann::ordered_json& j);

[[nodiscard]] nlohmann::ordered_json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Numbers rounded to 12 significant digits; non-finite values become null.
[[nodiscard]] nlohmann::ordered_json json_number(double v);
[[nodiscard]] nlohmann::ordered_json json_vec(const Vec& v);

}  // namespace mtw
