#pragma once

#include "chairsearch/dataset.hpp"
#include "chairsearch/descriptor.hpp"
#include "chairsearch/dictionary.hpp"
#include "chairsearch/index.hpp"

#include <memory>
#include <optional>

namespace chairsearch {

/// Immutable retrieval context shared by all sessions: manifest, dictionary,
/// index, and the fixed non-database placeholder chair.
class Engine {
public:
    /// Throws ChecksumMismatch when the manifest was built against another dictionary.
    Engine(DatasetManifest manifest, Dictionary dictionary);

    static std::shared_ptr<const Engine> reference(std::size_t shape_count = 45);

    [[nodiscard]] const DatasetManifest& manifest() const noexcept { return manifest_; }
    [[nodiscard]] const Dictionary& dictionary() const noexcept { return dictionary_; }
    [[nodiscard]] const RetrievalIndex& index() const noexcept { return index_; }

    [[nodiscard]] bool contains(ChairId id) const noexcept {
        return id == kPlaceholderChairId || manifest_.contains(id);
    }
    /// Resolve database chairs and the placeholder. Throw NotFound.
    [[nodiscard]] const ChairInstance& instance(ChairId id) const;
    [[nodiscard]] const ChairShape& shape_of(ChairId id) const;
    [[nodiscard]] AttributeVector semantic(ChairId id) const;

    [[nodiscard]] FeatureVector sketch_descriptor(const Sketch& sketch, std::optional<ChairId> model) const;
    [[nodiscard]] Snapshot chair_snapshot(ChairId id, int view_index) const;

    [[nodiscard]] ResultSet knn_semantic(const AttributeVector& query) const;
    [[nodiscard]] ResultSet knn_visual(const FeatureVector& query) const;

private:
    DatasetManifest manifest_;
    Dictionary dictionary_;
    RetrievalIndex index_;
    ChairShape placeholder_shape_;
    ChairInstance placeholder_;
};

} // namespace chairsearch
