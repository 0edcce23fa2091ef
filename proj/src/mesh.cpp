#include "chairsearch/mesh.hpp"

namespace chairsearch {

bool PartMesh::indices_valid() const noexcept {
    for (const auto& t : triangles)
        for (auto i : t)
            if (i >= vertices.size()) return false;
    return true;
}

void PartMesh::add_hexahedron(const std::array<Vec3, 8>& c) {
    const auto base = static_cast<std::uint32_t>(vertices.size());
    vertices.insert(vertices.end(), c.begin(), c.end());
    // Bottom 0-3, top 4-7.
    constexpr std::array<std::array<std::uint32_t, 4>, 6> faces{{
        {0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7},
    }};
    for (const auto& f : faces) {
        triangles.push_back({base + f[0], base + f[1], base + f[2]});
        triangles.push_back({base + f[0], base + f[2], base + f[3]});
    }
}

void PartMesh::add_prism(std::span<const Vec3> bottom, std::span<const Vec3> top) {
    const auto n = static_cast<std::uint32_t>(bottom.size());
    if (n < 3 || top.size() != bottom.size()) return;
    const auto base = static_cast<std::uint32_t>(vertices.size());
    vertices.insert(vertices.end(), bottom.begin(), bottom.end());
    vertices.insert(vertices.end(), top.begin(), top.end());
    for (std::uint32_t i = 1; i + 1 < n; ++i) {
        triangles.push_back({base, base + i + 1, base + i});
        triangles.push_back({base + n, base + n + i, base + n + i + 1});
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t j = (i + 1) % n;
        triangles.push_back({base + i, base + j, base + n + j});
        triangles.push_back({base + i, base + n + j, base + n + i});
    }
}

std::array<Vec3, 8> box_corners(Vec3 lo, Vec3 hi) noexcept {
    return {{
        {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, lo.y, hi.z}, {lo.x, lo.y, hi.z},
        {lo.x, hi.y, lo.z}, {hi.x, hi.y, lo.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z},
    }};
}

} // namespace chairsearch
