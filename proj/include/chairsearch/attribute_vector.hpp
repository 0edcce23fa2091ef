#pragma once

#include "chairsearch/assignment.hpp"
#include "chairsearch/concepts.hpp"
#include "chairsearch/types.hpp"

#include <array>
#include <optional>
#include <vector>

namespace chairsearch {

class DatasetManifest;
struct ChairInstance;
struct ChairShape;

inline constexpr int kColorBlockDims = kPartCount * kColorCount;            // 24
inline constexpr int kSemanticDims = kColorBlockDims + kConceptCount;       // 44
/// Concept levels are divided by this before distances so that a full level range
/// weighs the same as one color bit.
inline constexpr double kLevelScale = 4.0;

using SemanticPoint = std::array<float, kSemanticDims>;

/// Part-color one-hots plus bounded discrete concept levels.
class AttributeVector {
public:
    [[nodiscard]] std::optional<ColorId> color(PartKind p) const noexcept { return colors_[code(p)]; }
    void set_color(PartKind p, std::optional<ColorId> c) noexcept { colors_[code(p)] = c; }

    [[nodiscard]] int level(Concept c) const noexcept { return levels_[code(c)]; }
    /// Clamped to [0, kMaxLevel].
    void set_level(Concept c, int level) noexcept;
    void step(Concept c, int delta) noexcept { set_level(c, level(c) + delta); }
    [[nodiscard]] const ConceptLevels& levels() const noexcept { return levels_; }

    /// [24 color one-hots, part-major] ++ [20 levels / kLevelScale].
    [[nodiscard]] SemanticPoint flatten() const noexcept;

    friend bool operator==(const AttributeVector&, const AttributeVector&) = default;

private:
    std::array<std::optional<ColorId>, kPartCount> colors_{};
    ConceptLevels levels_{};
};

AttributeVector semantic_vector(const ChairShape& shape, const ColorAssignment& assignment);
/// Throws NotFound when the instance's shape is not in the manifest.
AttributeVector semantic_vector(const ChairInstance& instance, const DatasetManifest& manifest);

} // namespace chairsearch
