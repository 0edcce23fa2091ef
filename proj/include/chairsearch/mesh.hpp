#pragma once

#include "chairsearch/types.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace chairsearch {

using Triangle = std::array<std::uint32_t, 3>;

struct PartMesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;

    [[nodiscard]] bool empty() const noexcept { return triangles.empty(); }
    /// Every index refers to an existing vertex.
    [[nodiscard]] bool indices_valid() const noexcept;

    /// Appends a closed hexahedron. Corner order: bottom face (y-) counter-clockwise
    /// seen from above, then the top face in the same order.
    void add_hexahedron(const std::array<Vec3, 8>& corners);
    /// Appends a closed prism over a convex polygon, extruded from `bottom` to `top`.
    void add_prism(std::span<const Vec3> bottom, std::span<const Vec3> top);

    friend bool operator==(const PartMesh&, const PartMesh&) = default;
};

/// Axis-aligned box helper for hexahedra.
std::array<Vec3, 8> box_corners(Vec3 lo, Vec3 hi) noexcept;

} // namespace chairsearch
