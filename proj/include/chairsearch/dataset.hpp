#pragma once

#include "chairsearch/assignment.hpp"
#include "chairsearch/shape.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace chairsearch {

using ChairId = std::int64_t;

/// Variations reserved per shape in the id space: chair_id = shape_id * 360 + rank.
inline constexpr ChairId kMaxVariations = 360;
inline constexpr ChairId kPlaceholderChairId = -1;

struct ChairInstance {
    ChairId chair_id = 0;
    int shape_id = 0;
    ColorAssignment assignment;

    friend bool operator==(const ChairInstance&, const ChairInstance&) = default;
};

inline constexpr std::string_view kManifestVersion = "chairsearch-manifest/1";

class DatasetManifest {
public:
    DatasetManifest() = default;
    DatasetManifest(std::string dictionary_checksum, std::vector<ChairShape> shapes,
                    std::vector<ChairInstance> instances);

    [[nodiscard]] const std::string& version() const noexcept { return version_; }
    [[nodiscard]] const std::string& dictionary_checksum() const noexcept { return dictionary_checksum_; }
    [[nodiscard]] const std::vector<ChairShape>& shapes() const noexcept { return shapes_; }
    [[nodiscard]] const std::vector<ChairInstance>& instances() const noexcept { return instances_; }
    [[nodiscard]] std::size_t shape_count() const noexcept { return shapes_.size(); }
    [[nodiscard]] std::size_t instance_count() const noexcept { return instances_.size(); }

    /// Throws NotFound.
    [[nodiscard]] const ChairShape& shape(int shape_id) const;
    [[nodiscard]] const ChairInstance& instance(ChairId chair_id) const;
    [[nodiscard]] bool contains(ChairId chair_id) const noexcept { return chair_pos_.contains(chair_id); }
    [[nodiscard]] bool contains_shape(int shape_id) const noexcept { return shape_pos_.contains(shape_id); }
    /// Position of the chair in `instances()`.
    [[nodiscard]] std::size_t position(ChairId chair_id) const;

    friend bool operator==(const DatasetManifest& a, const DatasetManifest& b) {
        return a.version_ == b.version_ && a.dictionary_checksum_ == b.dictionary_checksum_ &&
               a.shapes_ == b.shapes_ && a.instances_ == b.instances_;
    }

private:
    void reindex();

    std::string version_{kManifestVersion};
    std::string dictionary_checksum_;
    std::vector<ChairShape> shapes_;
    std::vector<ChairInstance> instances_;
    std::unordered_map<int, std::size_t> shape_pos_;
    std::unordered_map<ChairId, std::size_t> chair_pos_;
};

/// Instances in shape order, each shape contributing all injective colorings of its
/// present parts. Throws InvalidInput on duplicate or negative shape ids.
DatasetManifest build_dataset(std::vector<ChairShape> shapes, std::string dictionary_checksum);

std::string manifest_to_text(const DatasetManifest& manifest);
/// Throws VersionMismatch / ChecksumMismatch / InvalidInput. When
/// `expected_dictionary_checksum` is non-empty it must match the stored one.
DatasetManifest manifest_from_text(std::string_view text, std::string_view expected_dictionary_checksum = {});

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path, std::string_view expected_dictionary_checksum = {});

/// Pre-segmented mesh text format:
///
///     part <arms|back|seat|legs>
///     v <x> <y> <z>
///     f <i> <j> <k>          (0-based, within the current part)
///     level <concept-id> <0..4>
///
/// `#` starts a comment. Vertices are normalized into the unit cube on import.
ChairShape import_part_meshes(std::string_view text, int shape_id);

/// Recenters and uniformly scales all parts so the bounding box fits [-0.5, 0.5]^3.
void normalize_to_unit_cube(std::array<PartMesh, kPartCount>& parts);

} // namespace chairsearch
