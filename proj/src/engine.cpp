#include "chairsearch/engine.hpp"

#include "chairsearch/error.hpp"

namespace chairsearch {

Engine::Engine(DatasetManifest manifest, Dictionary dictionary)
    : manifest_(std::move(manifest)), dictionary_(std::move(dictionary)) {
    if (manifest_.dictionary_checksum() != dictionary_.checksum())
        throw Error(ErrorCode::ChecksumMismatch, "manifest was built against dictionary " +
                                                     manifest_.dictionary_checksum() + ", loaded " +
                                                     dictionary_.checksum());
    index_ = RetrievalIndex::build(manifest_);
    placeholder_shape_ = generate_parametric_shape(placeholder_style(), kPlaceholderShapeId);
    const PartKind all[] = {PartKind::Arms, PartKind::Back, PartKind::Seat, PartKind::Legs};
    placeholder_ = {kPlaceholderChairId, kPlaceholderShapeId, enumerate_assignments(all).front()};
}

std::shared_ptr<const Engine> Engine::reference(std::size_t shape_count) {
    const Dictionary& dict = Dictionary::builtin();
    return std::make_shared<const Engine>(build_dataset(reference_shapes(shape_count), dict.checksum()), dict);
}

const ChairInstance& Engine::instance(ChairId id) const {
    if (id == kPlaceholderChairId) return placeholder_;
    return manifest_.instance(id);
}

const ChairShape& Engine::shape_of(ChairId id) const {
    if (id == kPlaceholderChairId) return placeholder_shape_;
    return manifest_.shape(manifest_.instance(id).shape_id);
}

AttributeVector Engine::semantic(ChairId id) const {
    return semantic_vector(shape_of(id), instance(id).assignment);
}

FeatureVector Engine::sketch_descriptor(const Sketch& sketch, std::optional<ChairId> model) const {
    sketch.validate();
    Scene scene{&sketch, std::nullopt};
    if (model) scene.model = ModelRef{&shape_of(*model), instance(*model).assignment};
    return visual_descriptor(scene);
}

Snapshot Engine::chair_snapshot(ChairId id, int view_index) const {
    const Scene scene{nullptr, ModelRef{&shape_of(id), instance(id).assignment}};
    return rasterize(view_camera(view_index), scene);
}

ResultSet Engine::knn_semantic(const AttributeVector& query) const {
    const auto flat = query.flatten();
    return index_.knn_semantic(flat);
}

ResultSet Engine::knn_visual(const FeatureVector& query) const { return index_.knn_visual(query); }

} // namespace chairsearch
