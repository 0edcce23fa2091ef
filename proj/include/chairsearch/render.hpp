#pragma once

#include "chairsearch/assignment.hpp"
#include "chairsearch/shape.hpp"
#include "chairsearch/sketch.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chairsearch {

inline constexpr int kViewCount = 12;
inline constexpr int kSnapshotSize = 128;
inline constexpr double kViewElevationDeg = 30.0;
/// Orthographic half-extent; frames the unit cube from every fixed view.
inline constexpr double kViewHalfExtent = 0.8;

struct ViewCamera {
    int view_index = 0;
    double azimuth_deg = 0;
    double elevation_deg = kViewElevationDeg;
    double half_extent = kViewHalfExtent;
    Vec3 right, up, forward;  // forward points away from the camera
};

/// View i: azimuth 30*i degrees, elevation 30 degrees, looking at the origin.
/// Throws OutOfRange for indices outside [0, 12).
const ViewCamera& view_camera(int view_index);

/// Pixel classes: 0 = background, 1 + color code otherwise.
inline constexpr std::uint8_t kBackground = 0;
inline constexpr int kPixelClasses = 1 + kColorCount;

constexpr std::uint8_t pixel_class(ColorId c) noexcept { return static_cast<std::uint8_t>(1 + code(c)); }

struct Snapshot {
    int width = kSnapshotSize;
    int height = kSnapshotSize;
    std::vector<std::uint8_t> pixels = std::vector<std::uint8_t>(kSnapshotSize * kSnapshotSize, kBackground);

    [[nodiscard]] std::uint8_t at(int x, int y) const noexcept { return pixels[static_cast<std::size_t>(y) * width + x]; }
    [[nodiscard]] std::size_t count(std::uint8_t cls) const noexcept;

    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

/// A chair drawn in its part colors.
struct ModelRef {
    const ChairShape* shape = nullptr;
    ColorAssignment assignment;
};

struct Scene {
    const Sketch* sketch = nullptr;
    std::optional<ModelRef> model;
};

/// Flat-filled model triangles (in part order), then strokes as sphere-swept
/// capsules; the nearer fragment wins, earlier draws win exact depth ties.
///
/// Triangle coverage uses 24.8 fixed-point vertex positions and exact integer edge
/// functions; depth and stroke coverage use IEEE double arithmetic in a fixed order.
Snapshot rasterize(const ViewCamera& camera, const Scene& scene);

/// Same coverage as `rasterize` of the model alone, but each pixel holds 1 + part code.
Snapshot rasterize_part_ids(const ViewCamera& camera, const ChairShape& shape);

/// The 12 fixed views; views are rendered concurrently.
std::vector<Snapshot> snapshot_views(const Scene& scene);
/// Serial reference of `snapshot_views`.
std::vector<Snapshot> snapshot_views_serial(const Scene& scene);

/// 8-bit RGB PNG, background white.
std::string encode_png(const Snapshot& snapshot);

} // namespace chairsearch
