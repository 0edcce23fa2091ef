#include "chairsearch/dataset.hpp"

#include "chairsearch/error.hpp"
#include "chairsearch/hash.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace chairsearch {

using ordered_json = nlohmann::ordered_json;

DatasetManifest::DatasetManifest(std::string dictionary_checksum, std::vector<ChairShape> shapes,
                                 std::vector<ChairInstance> instances)
    : dictionary_checksum_(std::move(dictionary_checksum)), shapes_(std::move(shapes)), instances_(std::move(instances)) {
    reindex();
}

void DatasetManifest::reindex() {
    shape_pos_.clear();
    chair_pos_.clear();
    for (std::size_t i = 0; i < shapes_.size(); ++i) {
        if (!shape_pos_.emplace(shapes_[i].shape_id, i).second)
            throw Error(ErrorCode::InvalidInput, "duplicate shape_id " + std::to_string(shapes_[i].shape_id));
    }
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        const auto& inst = instances_[i];
        if (!shape_pos_.contains(inst.shape_id))
            throw Error(ErrorCode::InvalidInput, "instance references unknown shape " + std::to_string(inst.shape_id));
        if (!chair_pos_.emplace(inst.chair_id, i).second)
            throw Error(ErrorCode::InvalidInput, "duplicate chair_id " + std::to_string(inst.chair_id));
    }
}

const ChairShape& DatasetManifest::shape(int shape_id) const {
    auto it = shape_pos_.find(shape_id);
    if (it == shape_pos_.end()) throw Error(ErrorCode::NotFound, "unknown shape " + std::to_string(shape_id));
    return shapes_[it->second];
}

const ChairInstance& DatasetManifest::instance(ChairId chair_id) const { return instances_[position(chair_id)]; }

std::size_t DatasetManifest::position(ChairId chair_id) const {
    auto it = chair_pos_.find(chair_id);
    if (it == chair_pos_.end()) throw Error(ErrorCode::NotFound, "unknown chair " + std::to_string(chair_id));
    return it->second;
}

DatasetManifest build_dataset(std::vector<ChairShape> shapes, std::string dictionary_checksum) {
    std::set<int> ids;
    for (const auto& s : shapes) {
        if (s.shape_id < 0) throw Error(ErrorCode::InvalidInput, "negative shape_id");
        if (!ids.insert(s.shape_id).second)
            throw Error(ErrorCode::InvalidInput, "duplicate shape_id " + std::to_string(s.shape_id));
    }
    std::sort(shapes.begin(), shapes.end(), [](const auto& a, const auto& b) { return a.shape_id < b.shape_id; });

    std::vector<ChairInstance> instances;
    for (const auto& s : shapes) {
        const auto parts = s.present_parts();
        if (parts.empty()) throw Error(ErrorCode::InvalidInput, "shape without parts");
        const auto assignments = enumerate_assignments(parts);
        for (std::size_t rank = 0; rank < assignments.size(); ++rank)
            instances.push_back({s.shape_id * kMaxVariations + static_cast<ChairId>(rank), s.shape_id, assignments[rank]});
    }
    return DatasetManifest(std::move(dictionary_checksum), std::move(shapes), std::move(instances));
}

namespace {

ordered_json mesh_json(const PartMesh& m) {
    ordered_json v = ordered_json::array(), t = ordered_json::array();
    for (const auto& p : m.vertices) {
        v.push_back(p.x);
        v.push_back(p.y);
        v.push_back(p.z);
    }
    for (const auto& tri : m.triangles)
        for (auto i : tri) t.push_back(i);
    return {{"vertices", std::move(v)}, {"triangles", std::move(t)}};
}

PartMesh mesh_from_json(const ordered_json& j) {
    PartMesh m;
    const auto& v = j.at("vertices");
    const auto& t = j.at("triangles");
    if (v.size() % 3 != 0 || t.size() % 3 != 0) throw Error(ErrorCode::InvalidInput, "mesh arrays not multiples of 3");
    for (std::size_t i = 0; i < v.size(); i += 3)
        m.vertices.push_back({v[i].get<double>(), v[i + 1].get<double>(), v[i + 2].get<double>()});
    for (std::size_t i = 0; i < t.size(); i += 3)
        m.triangles.push_back({t[i].get<std::uint32_t>(), t[i + 1].get<std::uint32_t>(), t[i + 2].get<std::uint32_t>()});
    if (!m.indices_valid()) throw Error(ErrorCode::InvalidInput, "mesh index out of range");
    return m;
}

ordered_json shape_json(const ChairShape& s) {
    ordered_json j;
    j["shape_id"] = s.shape_id;
    if (s.style) {
        ordered_json style;
        for (const auto& f : style_fields()) style[std::string(f.name)] = (*s.style).*(f.member);
        style["arm_presence"] = s.style->arm_presence;
        j["style"] = std::move(style);
    } else {
        j["style"] = nullptr;
    }
    j["levels"] = s.levels;
    ordered_json parts = ordered_json::object();
    for (PartKind p : kAllParts)
        if (s.has_part(p)) parts[std::string(name(p))] = mesh_json(s.parts[code(p)]);
    j["parts"] = std::move(parts);
    return j;
}

ChairShape shape_from_json(const ordered_json& j) {
    ChairShape s;
    s.shape_id = j.at("shape_id").get<int>();
    if (!j.at("style").is_null()) {
        StyleParams style;
        const auto& js = j.at("style");
        for (const auto& f : style_fields()) style.*(f.member) = js.at(std::string(f.name)).get<double>();
        style.arm_presence = js.at("arm_presence").get<bool>();
        s.style = style;
    }
    const auto levels = j.at("levels").get<std::vector<int>>();
    if (levels.size() != kConceptCount) throw Error(ErrorCode::InvalidInput, "levels must have 20 entries");
    for (int i = 0; i < kConceptCount; ++i) {
        if (levels[i] < 0 || levels[i] > kMaxLevel) throw Error(ErrorCode::InvalidInput, "level out of range");
        s.levels[i] = levels[i];
    }
    for (const auto& [key, value] : j.at("parts").items()) {
        auto part = part_from_name(key);
        if (!part) throw Error(ErrorCode::InvalidInput, "unknown part '" + key + "'");
        s.parts[code(*part)] = mesh_from_json(value);
    }
    return s;
}

ordered_json instance_json(const ChairInstance& inst) {
    ordered_json colors = ordered_json::array();
    for (const auto& c : inst.assignment.colors) colors.push_back(c ? code(*c) : -1);
    return ordered_json::array({inst.chair_id, inst.shape_id, std::move(colors)});
}

ChairInstance instance_from_json(const ordered_json& j) {
    ChairInstance inst;
    inst.chair_id = j.at(0).get<ChairId>();
    inst.shape_id = j.at(1).get<int>();
    const auto& colors = j.at(2);
    if (colors.size() != kPartCount) throw Error(ErrorCode::InvalidInput, "assignment must have 4 entries");
    for (int p = 0; p < kPartCount; ++p) {
        const int c = colors[p].get<int>();
        if (c == -1) continue;
        auto color = color_from_code(c);
        if (!color) throw Error(ErrorCode::InvalidInput, "bad color code");
        inst.assignment.colors[p] = *color;
    }
    return inst;
}

/// The body lines (shapes then instances) both define the file layout and feed the checksum.
void body_lines(const DatasetManifest& m, std::vector<std::string>& shapes, std::vector<std::string>& instances) {
    for (const auto& s : m.shapes()) shapes.push_back(shape_json(s).dump());
    for (const auto& i : m.instances()) instances.push_back(instance_json(i).dump());
}

std::string content_checksum(const std::vector<std::string>& shapes, const std::vector<std::string>& instances) {
    Fnv1a h;
    for (const auto& l : shapes) {
        h.update(l);
        h.update("\n");
    }
    for (const auto& l : instances) {
        h.update(l);
        h.update("\n");
    }
    return h.hex();
}

void append_array(std::string& out, std::string_view key, const std::vector<std::string>& lines, bool last) {
    out += "\"";
    out += key;
    out += "\": [";
    for (std::size_t i = 0; i < lines.size(); ++i) {
        out += i ? ",\n" : "\n";
        out += lines[i];
    }
    out += lines.empty() ? "]" : "\n]";
    out += last ? "\n" : ",\n";
}

} // namespace

std::string manifest_to_text(const DatasetManifest& m) {
    std::vector<std::string> shapes, instances;
    body_lines(m, shapes, instances);
    std::string out = "{\n";
    out += "\"version\": " + ordered_json(m.version()).dump() + ",\n";
    out += "\"dictionary_checksum\": " + ordered_json(m.dictionary_checksum()).dump() + ",\n";
    out += "\"counts\": " + ordered_json{{"shapes", m.shape_count()}, {"instances", m.instance_count()}}.dump() + ",\n";
    out += "\"content_checksum\": " + ordered_json(content_checksum(shapes, instances)).dump() + ",\n";
    append_array(out, "shapes", shapes, false);
    append_array(out, "instances", instances, true);
    out += "}\n";
    return out;
}

DatasetManifest manifest_from_text(std::string_view text, std::string_view expected_dictionary_checksum) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("manifest is not valid JSON: ") + e.what());
    }
    try {
        const auto version = j.at("version").get<std::string>();
        if (version != kManifestVersion)
            throw Error(ErrorCode::VersionMismatch, "manifest version '" + version + "', expected '" +
                                                        std::string(kManifestVersion) + "'");
        auto dict_checksum = j.at("dictionary_checksum").get<std::string>();
        if (!expected_dictionary_checksum.empty() && dict_checksum != expected_dictionary_checksum)
            throw Error(ErrorCode::ChecksumMismatch, "manifest built against dictionary " + dict_checksum);

        std::vector<ChairShape> shapes;
        for (const auto& s : j.at("shapes")) shapes.push_back(shape_from_json(s));
        std::vector<ChairInstance> instances;
        for (const auto& i : j.at("instances")) instances.push_back(instance_from_json(i));
        const auto& counts = j.at("counts");
        if (counts.at("shapes").get<std::size_t>() != shapes.size() ||
            counts.at("instances").get<std::size_t>() != instances.size())
            throw Error(ErrorCode::InvalidInput, "manifest counts do not match contents");

        DatasetManifest m(std::move(dict_checksum), std::move(shapes), std::move(instances));
        std::vector<std::string> shape_lines, instance_lines;
        body_lines(m, shape_lines, instance_lines);
        if (content_checksum(shape_lines, instance_lines) != j.at("content_checksum").get<std::string>())
            throw Error(ErrorCode::ChecksumMismatch, "manifest content checksum mismatch");
        for (const auto& inst : m.instances()) {
            const auto& shape = m.shape(inst.shape_id);
            if (!inst.assignment.injective()) throw Error(ErrorCode::InvalidInput, "non-injective assignment");
            for (PartKind p : kAllParts)
                if (shape.has_part(p) != inst.assignment[p].has_value())
                    throw Error(ErrorCode::InvalidInput, "assignment does not cover the shape's parts");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("malformed manifest: ") + e.what());
    }
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out << manifest_to_text(manifest);
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& path, std::string_view expected_dictionary_checksum) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return manifest_from_text(ss.str(), expected_dictionary_checksum);
}

void normalize_to_unit_cube(std::array<PartMesh, kPartCount>& parts) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Vec3 lo{inf, inf, inf}, hi{-inf, -inf, -inf};
    bool any = false;
    for (const auto& m : parts)
        for (const auto& v : m.vertices) {
            any = true;
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
        }
    if (!any) return;
    const double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
    if (!(extent > 0)) throw Error(ErrorCode::InvalidInput, "degenerate mesh");
    const Vec3 center = (lo + hi) * 0.5;
    for (auto& m : parts)
        for (auto& v : m.vertices) v = (v - center) * (1.0 / extent);
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line_no) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorCode::InvalidInput, "line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
    return value;
}

} // namespace

ChairShape import_part_meshes(std::string_view text, int shape_id) {
    ChairShape shape;
    shape.shape_id = shape_id;
    std::optional<PartKind> current;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto f = split_ws(line);
        if (f.empty()) continue;
        auto fail = [&](const std::string& what) {
            throw Error(ErrorCode::InvalidInput, "line " + std::to_string(line_no) + ": " + what);
        };
        if (f[0] == "part") {
            if (f.size() != 2) fail("expected 'part <kind>'");
            current = part_from_name(f[1]);
            if (!current) fail("unknown part '" + std::string(f[1]) + "'");
            if (shape.has_part(*current) || !shape.parts[code(*current)].vertices.empty())
                fail("part declared twice");
        } else if (f[0] == "v") {
            if (!current) fail("vertex before any part header");
            if (f.size() != 4) fail("expected 'v x y z'");
            shape.parts[code(*current)].vertices.push_back(
                {parse_number<double>(f[1], line_no), parse_number<double>(f[2], line_no), parse_number<double>(f[3], line_no)});
        } else if (f[0] == "f") {
            if (!current) fail("face before any part header");
            if (f.size() != 4) fail("expected 'f i j k'");
            shape.parts[code(*current)].triangles.push_back({parse_number<std::uint32_t>(f[1], line_no),
                                                             parse_number<std::uint32_t>(f[2], line_no),
                                                             parse_number<std::uint32_t>(f[3], line_no)});
        } else if (f[0] == "level") {
            if (f.size() != 3) fail("expected 'level <concept> <0..4>'");
            auto c = concept_from_id(f[1]);
            if (!c) fail("unknown concept '" + std::string(f[1]) + "'");
            const int level = parse_number<int>(f[2], line_no);
            if (level < 0 || level > kMaxLevel) fail("level out of range");
            shape.levels[code(*c)] = level;
        } else {
            fail("unknown record '" + std::string(f[0]) + "'");
        }
    }
    for (PartKind p : kAllParts) {
        const auto& m = shape.parts[code(p)];
        if (!m.indices_valid()) throw Error(ErrorCode::InvalidInput, "face index out of range in " + std::string(name(p)));
        if (!m.vertices.empty() && m.triangles.empty())
            throw Error(ErrorCode::InvalidInput, "part " + std::string(name(p)) + " has no faces");
    }
    for (PartKind p : {PartKind::Back, PartKind::Seat, PartKind::Legs})
        if (!shape.has_part(p)) throw Error(ErrorCode::InvalidInput, "missing required part " + std::string(name(p)));
    shape.levels[code(Concept::Armed)] = shape.has_part(PartKind::Arms) ? kMaxLevel : 0;
    normalize_to_unit_cube(shape.parts);
    return shape;
}

} // namespace chairsearch
