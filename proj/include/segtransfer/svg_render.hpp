#pragma once

#include <string>

#include <json.hpp>

namespace segtransfer {

// Static SVG charts rendered from a report document. Rendering is a pure
// function of the report content; every number displayed as text is the
// report's own JSON serialization of that value.

std::string render_radar(const nlohmann::ordered_json& report,
                         const std::string& cls);
std::string render_boxplot(const nlohmann::ordered_json& report,
                           const std::string& cls);
std::string render_scatter(const nlohmann::ordered_json& report);

// kind: radar | boxplot | scatter (cls ignored for scatter). Throws Usage
// for an unknown kind or class.
std::string render_svg(const nlohmann::ordered_json& report,
                       const std::string& kind, const std::string& cls);

}  // namespace segtransfer
