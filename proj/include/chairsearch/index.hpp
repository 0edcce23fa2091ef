#pragma once

#include "chairsearch/attribute_vector.hpp"
#include "chairsearch/dataset.hpp"
#include "chairsearch/descriptor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace chairsearch {

inline constexpr std::size_t kResultCount = 5;

struct Neighbor {
    ChairId chair_id = 0;
    double distance = 0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Ascending distance, ties by ascending chair id.
using ResultSet = std::vector<Neighbor>;

/// Row-major matrix of descriptors with their chair ids.
class DescriptorTable {
public:
    explicit DescriptorTable(std::size_t dims = 0) : dims_(dims) {}

    void append(ChairId id, std::span<const float> row);
    void reserve(std::size_t rows) { ids_.reserve(rows); values_.reserve(rows * dims_); }

    [[nodiscard]] std::size_t dims() const noexcept { return dims_; }
    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] bool empty() const noexcept { return ids_.empty(); }
    [[nodiscard]] ChairId id(std::size_t row) const noexcept { return ids_[row]; }
    [[nodiscard]] std::span<const float> row(std::size_t r) const noexcept {
        return {values_.data() + r * dims_, dims_};
    }
    [[nodiscard]] std::uint64_t digest() const noexcept;

private:
    std::size_t dims_;
    std::vector<ChairId> ids_;
    std::vector<float> values_;
};

/// Squared L2 distance accumulated in double in index order.
double squared_distance(std::span<const float> a, std::span<const float> b) noexcept;

/// Exact top-k over a table; threads scan disjoint row ranges and their local
/// winners are merged. Throws EmptyIndex / DimensionMismatch.
ResultSet knn_scan(const DescriptorTable& table, std::span<const float> query, std::size_t k = kResultCount);
/// Naive reference: every distance, full sort, first k.
ResultSet knn_scan_serial(const DescriptorTable& table, std::span<const float> query,
                          std::size_t k = kResultCount);

class RetrievalIndex {
public:
    RetrievalIndex() : semantic_(kSemanticDims), visual_(kVisualDims) {}

    /// One entry per instance: its semantic vector and the descriptor of the
    /// chair rendered alone. Shapes are processed concurrently.
    static RetrievalIndex build(const DatasetManifest& manifest);
    /// Reference build through the full render pipeline per instance.
    static RetrievalIndex build_serial(const DatasetManifest& manifest);

    [[nodiscard]] std::size_t size() const noexcept { return semantic_.size(); }
    [[nodiscard]] const DescriptorTable& semantic() const noexcept { return semantic_; }
    [[nodiscard]] const DescriptorTable& visual() const noexcept { return visual_; }

    [[nodiscard]] ResultSet knn_semantic(std::span<const float> query, std::size_t k = kResultCount) const {
        return knn_scan(semantic_, query, k);
    }
    [[nodiscard]] ResultSet knn_visual(std::span<const float> query, std::size_t k = kResultCount) const {
        return knn_scan(visual_, query, k);
    }

private:
    DescriptorTable semantic_;
    DescriptorTable visual_;
};

} // namespace chairsearch
