#include "chairsearch/descriptor.hpp"

#include "chairsearch/error.hpp"

#include <algorithm>

namespace chairsearch {

namespace {

constexpr float kCellArea = static_cast<float>(kCellPixels * kCellPixels);

int cell_of(int x, int y) noexcept { return (y / kCellPixels) * kGridCells + (x / kCellPixels); }

} // namespace

FeatureVector encode_view(const Snapshot& s) {
    if (s.width != kSnapshotSize || s.height != kSnapshotSize ||
        s.pixels.size() != static_cast<std::size_t>(kSnapshotSize * kSnapshotSize))
        throw Error(ErrorCode::InvalidInput, "snapshot must be 128x128");
    std::vector<std::uint16_t> counts(kVisualDims, 0);
    for (int y = 0; y < kSnapshotSize; ++y)
        for (int x = 0; x < kSnapshotSize; ++x) {
            const std::uint8_t cls = s.at(x, y);
            if (cls >= kPixelClasses) throw Error(ErrorCode::InvalidInput, "pixel class out of range");
            ++counts[static_cast<std::size_t>(cell_of(x, y) * kPixelClasses + cls)];
        }
    FeatureVector out(kVisualDims);
    for (int i = 0; i < kVisualDims; ++i) out[i] = static_cast<float>(counts[i]) / kCellArea;
    return out;
}

FeatureVector pool_views(std::span<const FeatureVector> views) {
    if (views.size() != static_cast<std::size_t>(kViewCount))
        throw Error(ErrorCode::InvalidInput, "pool_views needs 12 views, got " + std::to_string(views.size()));
    for (const auto& v : views)
        if (v.size() != static_cast<std::size_t>(kVisualDims))
            throw Error(ErrorCode::InvalidInput, "view feature dimension " + std::to_string(v.size()) + " != 448");
    FeatureVector out = views.front();
    for (std::size_t i = 1; i < views.size(); ++i)
        for (int d = 0; d < kVisualDims; ++d) out[d] = std::max(out[d], views[i][d]);
    return out;
}

FeatureVector visual_descriptor(const Scene& scene) {
    const auto snapshots = snapshot_views(scene);
    std::vector<FeatureVector> features(kViewCount);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < kViewCount; ++i) features[static_cast<std::size_t>(i)] = encode_view(snapshots[static_cast<std::size_t>(i)]);
    return pool_views(features);
}

FeatureVector visual_descriptor_serial(const Scene& scene) {
    std::vector<FeatureVector> features;
    for (const auto& s : snapshot_views_serial(scene)) features.push_back(encode_view(s));
    return pool_views(features);
}

ShapeViewCounts shape_view_counts(const ChairShape& shape) {
    ShapeViewCounts out;
    out.views.resize(kViewCount);
    for (int v = 0; v < kViewCount; ++v) {
        const Snapshot ids = rasterize_part_ids(view_camera(v), shape);
        auto& cells = out.views[static_cast<std::size_t>(v)];
        for (auto& c : cells) c.fill(0);
        for (int y = 0; y < kSnapshotSize; ++y)
            for (int x = 0; x < kSnapshotSize; ++x) ++cells[static_cast<std::size_t>(cell_of(x, y))][ids.at(x, y)];
    }
    return out;
}

FeatureVector descriptor_from_counts(const ShapeViewCounts& counts, const ColorAssignment& assignment) {
    FeatureVector out(kVisualDims, 0.0f);
    std::array<std::uint16_t, kPixelClasses> cell{};
    for (const auto& view : counts.views) {
        for (int c = 0; c < kGridCells * kGridCells; ++c) {
            const auto& parts = view[static_cast<std::size_t>(c)];
            cell.fill(0);
            cell[kBackground] = parts[0];
            for (PartKind p : kAllParts) {
                const auto color = assignment[p];
                const std::uint16_t n = parts[static_cast<std::size_t>(1 + code(p))];
                if (!color) {
                    if (n) throw Error(ErrorCode::InvalidInput, "assignment leaves a visible part uncolored");
                    continue;
                }
                cell[pixel_class(*color)] = static_cast<std::uint16_t>(cell[pixel_class(*color)] + n);
            }
            for (int k = 0; k < kPixelClasses; ++k) {
                float& slot = out[static_cast<std::size_t>(c * kPixelClasses + k)];
                slot = std::max(slot, static_cast<float>(cell[k]) / kCellArea);
            }
        }
    }
    return out;
}

} // namespace chairsearch
