#pragma once

#include "chairsearch/types.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace chairsearch {

/// Part -> color map over a shape's present parts; absent parts hold nullopt.
struct ColorAssignment {
    std::array<std::optional<ColorId>, kPartCount> colors{};

    [[nodiscard]] std::optional<ColorId> operator[](PartKind p) const noexcept { return colors[code(p)]; }
    [[nodiscard]] bool injective() const noexcept;

    friend bool operator==(const ColorAssignment&, const ColorAssignment&) = default;
};

/// All injective assignments of the six colors to `parts`, lexicographic by
/// (part code, color code). Throws InvalidInput on an empty or repeated part set.
std::vector<ColorAssignment> enumerate_assignments(std::span<const PartKind> parts);

/// 6! / (6 - k)!
std::size_t assignment_count(std::size_t part_count);

} // namespace chairsearch
