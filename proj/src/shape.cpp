#include "chairsearch/shape.hpp"

#include "chairsearch/dataset.hpp"
#include "chairsearch/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

namespace chairsearch {

const std::array<StyleField, 19>& style_fields() noexcept {
    static const std::array<StyleField, 19> fields{{
        {"seat_width", &StyleParams::seat_width, Concept::Wide},
        {"seat_depth", &StyleParams::seat_depth, Concept::Deep},
        {"seat_height", &StyleParams::seat_height, Concept::Tall},
        {"seat_thickness", &StyleParams::seat_thickness, Concept::Plush},
        {"seat_roundness", &StyleParams::seat_roundness, Concept::Round},
        {"seat_tilt", &StyleParams::seat_tilt, Concept::Sloped},
        {"back_height", &StyleParams::back_height, Concept::High},
        {"back_curvature", &StyleParams::back_curvature, Concept::Curvy},
        {"back_tilt", &StyleParams::back_tilt, Concept::Reclined},
        {"back_width", &StyleParams::back_width, Concept::Broad},
        {"back_solidity", &StyleParams::back_solidity, Concept::Solid},
        {"leg_thickness", &StyleParams::leg_thickness, Concept::Thick},
        {"leg_splay", &StyleParams::leg_splay, Concept::Splayed},
        {"leg_taper", &StyleParams::leg_taper, Concept::Tapered},
        {"leg_bracing", &StyleParams::leg_bracing, Concept::Braced},
        {"arm_length", &StyleParams::arm_length, Concept::Long},
        {"arm_thickness", &StyleParams::arm_thickness, Concept::Bulky},
        {"arm_height", &StyleParams::arm_height, Concept::Raised},
        {"ornament", &StyleParams::ornament, Concept::Classic},
    }};
    return fields;
}

int level_from_value(double v) noexcept {
    return std::clamp(static_cast<int>(std::floor(v * kLevelCount)), 0, kMaxLevel);
}

double value_for_level(int level) noexcept {
    return (std::clamp(level, 0, kMaxLevel) + 0.5) / kLevelCount;
}

namespace {

bool is_arm_concept(Concept c) noexcept {
    return c == Concept::Long || c == Concept::Bulky || c == Concept::Raised;
}

} // namespace

ConceptLevels derive_levels(const StyleParams& style) noexcept {
    ConceptLevels levels{};
    levels[code(Concept::Armed)] = style.arm_presence ? kMaxLevel : 0;
    for (const auto& f : style_fields()) {
        if (is_arm_concept(f.attr) && !style.arm_presence) continue;
        levels[code(f.attr)] = level_from_value(style.*(f.member));
    }
    return levels;
}

std::vector<PartKind> ChairShape::present_parts() const {
    std::vector<PartKind> out;
    for (PartKind p : kAllParts)
        if (has_part(p)) out.push_back(p);
    return out;
}

std::size_t ChairShape::triangle_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.triangles.size();
    return n;
}

namespace {

constexpr double deg(double d) { return d * std::numbers::pi / 180.0; }

/// Rotation about an x-parallel axis through `pivot` (y, z).
Vec3 rotate_x(Vec3 p, double pivot_y, double pivot_z, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    const double y = p.y - pivot_y, z = p.z - pivot_z;
    return {p.x, pivot_y + y * c - z * s, pivot_z + y * s + z * c};
}

void rotate_mesh_x(PartMesh& mesh, std::size_t first_vertex, double pivot_y, double pivot_z, double angle) {
    for (std::size_t i = first_vertex; i < mesh.vertices.size(); ++i)
        mesh.vertices[i] = rotate_x(mesh.vertices[i], pivot_y, pivot_z, angle);
}

struct Dims {
    double seat_w, seat_d, seat_top, seat_t, chamfer;
};

Dims seat_dims(const StyleParams& s) {
    Dims d{};
    d.seat_w = 0.40 + 0.25 * s.seat_width;
    d.seat_d = 0.38 + 0.22 * s.seat_depth;
    d.seat_top = 0.30 + 0.25 * s.seat_height;
    d.seat_t = 0.03 + 0.09 * s.seat_thickness;
    d.chamfer = (0.02 + 0.45 * s.seat_roundness) * std::min(d.seat_w, d.seat_d) / 2;
    return d;
}

PartMesh build_seat(const StyleParams& s, const Dims& d) {
    const double hw = d.seat_w / 2, hd = d.seat_d / 2, c = d.chamfer;
    const std::array<std::array<double, 2>, 8> outline{{
        {-hw + c, -hd}, {hw - c, -hd}, {hw, -hd + c}, {hw, hd - c},
        {hw - c, hd}, {-hw + c, hd}, {-hw, hd - c}, {-hw, -hd + c},
    }};
    std::array<Vec3, 8> bottom, top;
    for (std::size_t i = 0; i < outline.size(); ++i) {
        bottom[i] = {outline[i][0], d.seat_top - d.seat_t, outline[i][1]};
        top[i] = {outline[i][0], d.seat_top, outline[i][1]};
    }
    PartMesh mesh;
    mesh.add_prism(bottom, top);
    // Front edge up.
    rotate_mesh_x(mesh, 0, d.seat_top - d.seat_t / 2, 0.0, -deg(10.0 * s.seat_tilt));
    return mesh;
}

PartMesh build_back(const StyleParams& s, const Dims& d) {
    constexpr double kThickness = 0.035;
    constexpr double kPost = 0.035;
    constexpr int kSegments = 8;
    const double height = 0.30 + 0.40 * s.back_height;
    const double width = d.seat_w * (0.55 + 0.45 * s.back_width);
    const double sagitta = 0.12 * s.back_curvature * width;
    const double z_back = -d.seat_d / 2;
    const double y0 = d.seat_top;
    const double y_top = y0 + height;
    const double cover = 0.3 + 0.7 * s.back_solidity;
    const double panel_lo = y_top - height * cover;

    // Edges wrap forward around the sitter.
    auto dz = [&](double x) { return sagitta * (2 * x / width) * (2 * x / width); };

    PartMesh mesh;
    for (int i = 0; i < kSegments; ++i) {
        const double x0 = -width / 2 + width * i / kSegments;
        const double x1 = -width / 2 + width * (i + 1) / kSegments;
        const double z0 = z_back + dz(x0), z1 = z_back + dz(x1);
        mesh.add_hexahedron({{
            {x0, panel_lo, z0}, {x1, panel_lo, z1}, {x1, panel_lo, z1 + kThickness}, {x0, panel_lo, z0 + kThickness},
            {x0, y_top, z0}, {x1, y_top, z1}, {x1, y_top, z1 + kThickness}, {x0, y_top, z0 + kThickness},
        }});
    }
    for (double side : {-1.0, 1.0}) {
        const double xc = side * (width / 2 - kPost / 2);
        const double zc = z_back + dz(xc);
        mesh.add_hexahedron(box_corners({xc - kPost / 2, y0 - d.seat_t / 2, zc},
                                        {xc + kPost / 2, y_top, zc + kThickness}));
    }
    if (s.ornament >= 0.2) {
        const double crest_h = 0.10 * s.ornament;
        const double crest_w = width * (0.5 + 0.4 * s.ornament);
        mesh.add_hexahedron(box_corners({-crest_w / 2, y_top, z_back}, {crest_w / 2, y_top + crest_h, z_back + kThickness}));
        if (s.ornament >= 0.6) {
            constexpr double kFinial = 0.045;
            for (double side : {-1.0, 1.0}) {
                const double xc = side * (width / 2 - kPost / 2);
                const double zc = z_back + dz(xc) + kThickness / 2;
                mesh.add_hexahedron(box_corners({xc - kFinial / 2, y_top, zc - kFinial / 2},
                                                {xc + kFinial / 2, y_top + kFinial, zc + kFinial / 2}));
            }
        }
    }
    // Top leans backwards.
    rotate_mesh_x(mesh, 0, y0, z_back, -deg(25.0 * s.back_tilt));
    return mesh;
}

PartMesh build_legs(const StyleParams& s, const Dims& d) {
    const double top_side = 0.025 + 0.05 * s.leg_thickness;
    const double bottom_side = top_side * (1.0 - 0.6 * s.leg_taper);
    const double splay = 0.10 * s.leg_splay;
    const double inset = 0.02 + 0.3 * d.chamfer;
    const double y_top = d.seat_top - d.seat_t / 2;

    struct Leg {
        Vec3 top, bottom;
    };
    std::array<Leg, 4> legs{};
    const std::array<std::array<double, 2>, 4> signs{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
    for (std::size_t i = 0; i < 4; ++i) {
        const double sx = signs[i][0], sz = signs[i][1];
        const Vec3 top{sx * (d.seat_w / 2 - inset - top_side / 2), y_top, sz * (d.seat_d / 2 - inset - top_side / 2)};
        legs[i] = {top, {top.x + sx * splay, 0.0, top.z + sz * splay}};
    }

    PartMesh mesh;
    for (const auto& leg : legs) {
        const double b = bottom_side / 2, t = top_side / 2;
        mesh.add_hexahedron({{
            {leg.bottom.x - b, 0, leg.bottom.z - b}, {leg.bottom.x + b, 0, leg.bottom.z - b},
            {leg.bottom.x + b, 0, leg.bottom.z + b}, {leg.bottom.x - b, 0, leg.bottom.z + b},
            {leg.top.x - t, y_top, leg.top.z - t}, {leg.top.x + t, y_top, leg.top.z - t},
            {leg.top.x + t, y_top, leg.top.z + t}, {leg.top.x - t, y_top, leg.top.z + t},
        }});
    }

    if (s.leg_bracing >= 0.2) {
        const double bar = 0.012 + 0.025 * s.leg_bracing;
        const double y = 0.10 + 0.10 * s.leg_bracing;
        auto at_height = [&](const Leg& leg) {
            const double f = y / y_top;
            return leg.bottom + (leg.top - leg.bottom) * f;
        };
        auto add_bar = [&](const Leg& a, const Leg& b) {
            const Vec3 p = at_height(a), q = at_height(b);
            const Vec3 lo{std::min(p.x, q.x) - bar / 2, y - bar / 2, std::min(p.z, q.z) - bar / 2};
            const Vec3 hi{std::max(p.x, q.x) + bar / 2, y + bar / 2, std::max(p.z, q.z) + bar / 2};
            mesh.add_hexahedron(box_corners(lo, hi));
        };
        add_bar(legs[0], legs[3]);  // left side
        add_bar(legs[1], legs[2]);  // right side
        if (s.leg_bracing >= 0.6) {
            add_bar(legs[0], legs[1]);  // back
            add_bar(legs[3], legs[2]);  // front
        }
    }
    return mesh;
}

PartMesh build_arms(const StyleParams& s, const Dims& d) {
    const double rise = 0.10 + 0.16 * s.arm_height;
    const double length = d.seat_d * (0.45 + 0.5 * s.arm_length);
    const double side = 0.025 + 0.05 * s.arm_thickness;
    const double y_rest = d.seat_top + rise;
    const double z0 = -d.seat_d / 2;

    PartMesh mesh;
    for (double sx : {-1.0, 1.0}) {
        const double xc = sx * (d.seat_w / 2 + side / 2 - 0.01);
        mesh.add_hexahedron(box_corners({xc - side / 2, y_rest - side, z0}, {xc + side / 2, y_rest, z0 + length}));
        const double post = 0.8 * side;
        mesh.add_hexahedron(box_corners({xc - post / 2, d.seat_top - d.seat_t, z0 + length - post},
                                        {xc + post / 2, y_rest - side, z0 + length}));
    }
    return mesh;
}

void check_style(const StyleParams& style) {
    for (const auto& f : style_fields()) {
        const double v = style.*(f.member);
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw Error(ErrorCode::InvalidInput,
                        "style field " + std::string(f.name) + " outside [0, 1]: " + std::to_string(v));
    }
}

} // namespace

ChairShape generate_parametric_shape(const StyleParams& style, int shape_id) {
    check_style(style);
    const Dims d = seat_dims(style);

    ChairShape shape;
    shape.shape_id = shape_id;
    shape.style = style;
    shape.levels = derive_levels(style);
    if (style.arm_presence) shape.parts[code(PartKind::Arms)] = build_arms(style, d);
    shape.parts[code(PartKind::Back)] = build_back(style, d);
    shape.parts[code(PartKind::Seat)] = build_seat(style, d);
    shape.parts[code(PartKind::Legs)] = build_legs(style, d);
    normalize_to_unit_cube(shape.parts);
    return shape;
}

StyleParams placeholder_style() noexcept { return StyleParams{}; }

std::vector<StyleParams> reference_styles(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    // Triangular over 0..4, centered on the placeholder's level.
    auto draw_level = [&] {
        const auto a = rng() % 3;
        const auto b = rng() % 3;
        return static_cast<int>(a + b);
    };

    const ConceptLevels placeholder_levels = derive_levels(placeholder_style());
    std::set<ConceptLevels> seen{placeholder_levels};
    std::vector<StyleParams> styles;
    styles.reserve(count);
    while (styles.size() < count) {
        StyleParams s;
        s.arm_presence = true;
        for (const auto& f : style_fields()) s.*(f.member) = value_for_level(draw_level());
        if (seen.insert(derive_levels(s)).second) styles.push_back(s);
    }
    return styles;
}

std::vector<ChairShape> reference_shapes(std::size_t count, std::uint64_t seed) {
    const auto styles = reference_styles(count, seed);
    std::vector<ChairShape> shapes;
    shapes.reserve(styles.size());
    for (std::size_t i = 0; i < styles.size(); ++i)
        shapes.push_back(generate_parametric_shape(styles[i], static_cast<int>(i)));
    return shapes;
}

} // namespace chairsearch
