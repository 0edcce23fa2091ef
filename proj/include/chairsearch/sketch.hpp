#pragma once

#include "chairsearch/types.hpp"

#include <json.hpp>
#include <vector>

namespace chairsearch {

/// Half-size of the cube strokes must stay within, chair-local units.
inline constexpr double kWorkingVolumeHalf = 1.5;

struct Stroke {
    std::vector<Vec3> points;
    ColorId color = ColorId::Red;
    double width = 0.03;

    /// Throws InvalidInput: fewer than 2 points, width <= 0, or a point outside the working volume.
    void validate() const;

    friend bool operator==(const Stroke&, const Stroke&) = default;
};

struct Sketch {
    std::vector<Stroke> strokes;

    [[nodiscard]] bool empty() const noexcept { return strokes.empty(); }
    void validate() const;

    friend bool operator==(const Sketch&, const Sketch&) = default;
};

// Wire format: {"points": [[x, y, z], ...], "color": <0..5>, "width": w}; a sketch is an array of strokes.
void to_json(nlohmann::json& j, const Stroke& s);
void from_json(const nlohmann::json& j, Stroke& s);
void to_json(nlohmann::json& j, const Sketch& s);
void from_json(const nlohmann::json& j, Sketch& s);

} // namespace chairsearch
