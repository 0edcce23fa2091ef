#include "chairsearch/attribute_vector.hpp"

#include "chairsearch/dataset.hpp"

#include <algorithm>

namespace chairsearch {

void AttributeVector::set_level(Concept c, int level) noexcept {
    levels_[code(c)] = std::clamp(level, 0, kMaxLevel);
}

SemanticPoint AttributeVector::flatten() const noexcept {
    SemanticPoint out{};
    for (int p = 0; p < kPartCount; ++p)
        if (colors_[p]) out[p * kColorCount + code(*colors_[p])] = 1.0f;
    for (int c = 0; c < kConceptCount; ++c)
        out[kColorBlockDims + c] = static_cast<float>(levels_[c] / kLevelScale);
    return out;
}

AttributeVector semantic_vector(const ChairShape& shape, const ColorAssignment& assignment) {
    AttributeVector v;
    for (PartKind p : kAllParts)
        if (shape.has_part(p)) v.set_color(p, assignment[p]);
    for (int c = 0; c < kConceptCount; ++c) v.set_level(static_cast<Concept>(c), shape.levels[c]);
    return v;
}

AttributeVector semantic_vector(const ChairInstance& instance, const DatasetManifest& manifest) {
    return semantic_vector(manifest.shape(instance.shape_id), instance.assignment);
}

} // namespace chairsearch
