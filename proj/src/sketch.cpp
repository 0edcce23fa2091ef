#include "chairsearch/sketch.hpp"

#include "chairsearch/error.hpp"

#include <json.hpp>

#include <cmath>

namespace chairsearch {

void Stroke::validate() const {
    if (points.size() < 2) throw Error(ErrorCode::InvalidInput, "stroke needs at least 2 points");
    if (!(width > 0) || !std::isfinite(width)) throw Error(ErrorCode::InvalidInput, "stroke width must be positive");
    for (const auto& p : points)
        for (double c : {p.x, p.y, p.z})
            if (!std::isfinite(c) || std::abs(c) > kWorkingVolumeHalf)
                throw Error(ErrorCode::InvalidInput, "stroke point outside the working volume");
}

void Sketch::validate() const {
    for (const auto& s : strokes) s.validate();
}

void to_json(nlohmann::json& j, const Stroke& s) {
    auto points = nlohmann::json::array();
    for (const auto& p : s.points) points.push_back({p.x, p.y, p.z});
    j = nlohmann::json{{"points", std::move(points)}, {"color", code(s.color)}, {"width", s.width}};
}

void from_json(const nlohmann::json& j, Stroke& s) {
    s.points.clear();
    for (const auto& p : j.at("points")) {
        if (!p.is_array() || p.size() != 3) throw Error(ErrorCode::InvalidInput, "stroke point must be [x, y, z]");
        s.points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    const auto& c = j.at("color");
    std::optional<ColorId> color = c.is_string() ? color_from_name(c.get<std::string>()) : color_from_code(c.get<int>());
    if (!color) throw Error(ErrorCode::InvalidInput, "stroke color must be a palette color");
    s.color = *color;
    s.width = j.at("width").get<double>();
}

void to_json(nlohmann::json& j, const Sketch& s) {
    j = nlohmann::json::array();
    for (const auto& stroke : s.strokes) j.push_back(stroke);
}

void from_json(const nlohmann::json& j, Sketch& s) {
    if (!j.is_array()) throw Error(ErrorCode::InvalidInput, "sketch must be an array of strokes");
    s.strokes.clear();
    for (const auto& stroke : j) s.strokes.push_back(stroke.get<Stroke>());
}

} // namespace chairsearch
