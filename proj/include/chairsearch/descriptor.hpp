#pragma once

#include "chairsearch/render.hpp"

#include <span>
#include <vector>

namespace chairsearch {

inline constexpr int kGridCells = 8;
inline constexpr int kCellPixels = kSnapshotSize / kGridCells;  // 16
inline constexpr int kVisualDims = kGridCells * kGridCells * kPixelClasses;  // 448

/// Per-view features or a pooled descriptor: for each grid cell (row-major) the
/// fraction of its pixels in each class (background first, then the six colors).
using FeatureVector = std::vector<float>;

/// Throws InvalidInput unless the snapshot is 128x128.
FeatureVector encode_view(const Snapshot& snapshot);

/// Element-wise maximum; throws InvalidInput unless given 12 vectors of dimension 448.
FeatureVector pool_views(std::span<const FeatureVector> views);

/// snapshot_views -> encode_view -> pool_views.
FeatureVector visual_descriptor(const Scene& scene);
FeatureVector visual_descriptor_serial(const Scene& scene);

/// Per-view part-class pixel counts for every grid cell of one shape, used to
/// derive the descriptors of all its colorings without re-rendering.
struct ShapeViewCounts {
    // [view][cell][class], class 0 = background, 1 + part code otherwise.
    std::vector<std::array<std::array<std::uint16_t, 1 + kPartCount>, kGridCells * kGridCells>> views;
};

ShapeViewCounts shape_view_counts(const ChairShape& shape);

/// Equal bit-for-bit to `visual_descriptor({no sketch, model})`.
FeatureVector descriptor_from_counts(const ShapeViewCounts& counts, const ColorAssignment& assignment);

} // namespace chairsearch
