#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace chairsearch {

/// Shape concepts of the semantic descriptor. Order is the layout of the
/// concept block and must not change without bumping the manifest version.
enum class Concept : std::uint8_t {
    Armed,
    Wide,
    Deep,
    Tall,
    Plush,
    Round,
    Sloped,
    High,
    Curvy,
    Reclined,
    Broad,
    Solid,
    Thick,
    Splayed,
    Tapered,
    Braced,
    Long,
    Bulky,
    Raised,
    Classic,
};

inline constexpr int kConceptCount = 20;
inline constexpr int kLevelCount = 5;
inline constexpr int kMaxLevel = kLevelCount - 1;

using ConceptLevels = std::array<int, kConceptCount>;

std::string_view concept_id(Concept c) noexcept;
std::optional<Concept> concept_from_id(std::string_view id) noexcept;

constexpr int code(Concept c) noexcept { return static_cast<int>(c); }

} // namespace chairsearch
