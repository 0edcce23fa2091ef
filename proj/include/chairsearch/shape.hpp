#pragma once

#include "chairsearch/concepts.hpp"
#include "chairsearch/mesh.hpp"
#include "chairsearch/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace chairsearch {

/// Parametric chair style. Every continuous field is a dimensionless value in [0, 1]
/// that the generator maps onto geometry; the same value maps onto a concept level
/// through `level_from_value`.
struct StyleParams {
    double seat_width = 0.5;
    double seat_depth = 0.5;
    double seat_height = 0.5;
    double seat_thickness = 0.5;
    double seat_roundness = 0.5;
    double seat_tilt = 0.5;
    double back_height = 0.5;
    double back_curvature = 0.5;
    double back_tilt = 0.5;
    double back_width = 0.5;
    double back_solidity = 0.5;
    double leg_thickness = 0.5;
    double leg_splay = 0.5;
    double leg_taper = 0.5;
    double leg_bracing = 0.5;
    double arm_length = 0.5;
    double arm_thickness = 0.5;
    double arm_height = 0.5;
    double ornament = 0.5;
    bool arm_presence = true;

    friend bool operator==(const StyleParams&, const StyleParams&) = default;
};

struct StyleField {
    std::string_view name;
    double StyleParams::*member;
    Concept attr;
};

/// Continuous style fields in serialization order, each paired with the concept it drives.
const std::array<StyleField, 19>& style_fields() noexcept;

/// Threshold table: [0,0.2) -> 0, [0.2,0.4) -> 1, [0.4,0.6) -> 2, [0.6,0.8) -> 3, [0.8,1] -> 4.
int level_from_value(double v) noexcept;
/// Midpoint of a level's interval; `level_from_value(value_for_level(l)) == l`.
double value_for_level(int level) noexcept;

ConceptLevels derive_levels(const StyleParams& style) noexcept;

struct ChairShape {
    int shape_id = 0;
    std::array<PartMesh, kPartCount> parts;  // indexed by part code; empty = absent
    std::optional<StyleParams> style;        // empty for imported meshes
    ConceptLevels levels{};

    [[nodiscard]] bool has_part(PartKind p) const noexcept { return !parts[code(p)].empty(); }
    [[nodiscard]] std::vector<PartKind> present_parts() const;
    [[nodiscard]] std::size_t triangle_count() const noexcept;

    friend bool operator==(const ChairShape&, const ChairShape&) = default;
};

/// Throws InvalidInput when a style field is outside [0, 1] or not finite.
ChairShape generate_parametric_shape(const StyleParams& style, int shape_id);

/// Style of the fixed scene placeholder: every field at 0.5, arms present.
StyleParams placeholder_style() noexcept;
inline constexpr int kPlaceholderShapeId = -1;

/// Styles of the 45-shape reference set; deterministic, four parts each,
/// pairwise-distinct concept levels, none equal to the placeholder's.
std::vector<StyleParams> reference_styles(std::size_t count = 45, std::uint64_t seed = 20210507);
std::vector<ChairShape> reference_shapes(std::size_t count = 45, std::uint64_t seed = 20210507);

} // namespace chairsearch
