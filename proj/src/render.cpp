#include "chairsearch/render.hpp"

#include "chairsearch/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace chairsearch {

namespace {

// Exact-as-IEEE-allows sines and cosines of multiples of 30 degrees, so the
// camera frames do not depend on the platform's libm.
struct SinCos {
    double s, c;
};

SinCos sincos_deg(double degrees) {
    const double half_root3 = std::sqrt(3.0) / 2.0;
    const double k = degrees / 30.0;
    if (k == std::floor(k)) {
        const int i = ((static_cast<int>(k) % 12) + 12) % 12;
        static const std::array<double, 12> kSin{0, 0.5, half_root3, 1, half_root3, 0.5, 0, -0.5, -half_root3, -1, -half_root3, -0.5};
        return {kSin[i], kSin[(i + 3) % 12]};
    }
    const double r = degrees * 3.14159265358979323846 / 180.0;
    return {std::sin(r), std::cos(r)};
}

std::array<ViewCamera, kViewCount> make_cameras() {
    std::array<ViewCamera, kViewCount> cams{};
    const SinCos el = sincos_deg(kViewElevationDeg);
    for (int i = 0; i < kViewCount; ++i) {
        ViewCamera& c = cams[i];
        c.view_index = i;
        c.azimuth_deg = 30.0 * i;
        const SinCos az = sincos_deg(c.azimuth_deg);
        c.forward = {-az.s * el.c, -el.s, -az.c * el.c};
        c.right = {az.c, 0.0, -az.s};
        c.up = {-az.s * el.s, el.c, -az.c * el.s};
    }
    return cams;
}

struct Frame {
    Snapshot image;
    std::vector<double> depth = std::vector<double>(kSnapshotSize * kSnapshotSize, std::numeric_limits<double>::infinity());

    void plot(int x, int y, double z, std::uint8_t cls) {
        const std::size_t i = static_cast<std::size_t>(y) * kSnapshotSize + x;
        if (z < depth[i]) {
            depth[i] = z;
            image.pixels[i] = cls;
        }
    }
};

struct Projected {
    double x, y, z;  // pixel units, y down; z grows away from the camera
};

constexpr double kHalfSize = kSnapshotSize / 2.0;

Projected project(const ViewCamera& cam, Vec3 p) {
    return {(dot(p, cam.right) / cam.half_extent + 1.0) * kHalfSize,
            (1.0 - dot(p, cam.up) / cam.half_extent) * kHalfSize,
            dot(p, cam.forward)};
}

constexpr std::int64_t kSubpixel = 256;

struct Fixed {
    std::int64_t x, y;
    double z;
};

Fixed to_fixed(const Projected& p) {
    return {std::llround(p.x * kSubpixel), std::llround(p.y * kSubpixel), p.z};
}

std::int64_t edge(const Fixed& a, const Fixed& b, std::int64_t px, std::int64_t py) {
    return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

int first_pixel(std::int64_t lo) {  // smallest pixel whose center >= lo
    const std::int64_t v = lo - kSubpixel / 2;
    return static_cast<int>(v >= 0 ? (v + kSubpixel - 1) / kSubpixel : -((-v) / kSubpixel));
}

int last_pixel(std::int64_t hi) {  // largest pixel whose center <= hi
    const std::int64_t v = hi - kSubpixel / 2;
    return static_cast<int>(v >= 0 ? v / kSubpixel : -((-v + kSubpixel - 1) / kSubpixel));
}

void draw_triangle(Frame& f, Fixed a, Fixed b, Fixed c, std::uint8_t cls) {
    std::int64_t area = edge(a, b, c.x, c.y);
    if (area == 0) return;
    if (area < 0) {
        std::swap(b, c);
        area = -area;
    }
    const int x0 = std::max(0, first_pixel(std::min({a.x, b.x, c.x})));
    const int x1 = std::min(kSnapshotSize - 1, last_pixel(std::max({a.x, b.x, c.x})));
    const int y0 = std::max(0, first_pixel(std::min({a.y, b.y, c.y})));
    const int y1 = std::min(kSnapshotSize - 1, last_pixel(std::max({a.y, b.y, c.y})));
    const double inv_area = 1.0 / static_cast<double>(area);
    for (int y = y0; y <= y1; ++y) {
        const std::int64_t py = y * kSubpixel + kSubpixel / 2;
        for (int x = x0; x <= x1; ++x) {
            const std::int64_t px = x * kSubpixel + kSubpixel / 2;
            const std::int64_t w0 = edge(b, c, px, py);
            const std::int64_t w1 = edge(c, a, px, py);
            const std::int64_t w2 = edge(a, b, px, py);
            if (w0 < 0 || w1 < 0 || w2 < 0) continue;
            const double z = (static_cast<double>(w0) * a.z + static_cast<double>(w1) * b.z +
                              static_cast<double>(w2) * c.z) * inv_area;
            f.plot(x, y, z, cls);
        }
    }
}

void draw_mesh(Frame& f, const ViewCamera& cam, const PartMesh& mesh, std::uint8_t cls) {
    std::vector<Fixed> pts;
    pts.reserve(mesh.vertices.size());
    for (const auto& v : mesh.vertices) pts.push_back(to_fixed(project(cam, v)));
    for (const auto& t : mesh.triangles) draw_triangle(f, pts[t[0]], pts[t[1]], pts[t[2]], cls);
}

/// Sphere-swept segment: covered where the pixel center is within the projected
/// radius; depth is the swept tube's front surface.
void draw_capsule(Frame& f, const ViewCamera& cam, const Projected& a, const Projected& b, double width, std::uint8_t cls) {
    const double r = width / 2.0 / cam.half_extent * kHalfSize;
    const double r2 = r * r;
    const double world_per_pixel = cam.half_extent / kHalfSize;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r - 0.5)));
    const int x1 = std::min(kSnapshotSize - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + r - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r - 0.5)));
    const int y1 = std::min(kSnapshotSize - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + r - 0.5)));
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    for (int y = y0; y <= y1; ++y) {
        const double py = y + 0.5;
        for (int x = x0; x <= x1; ++x) {
            const double px = x + 0.5;
            double t = len2 > 0 ? ((px - a.x) * dx + (py - a.y) * dy) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double cx = a.x + t * dx - px, cy = a.y + t * dy - py;
            const double d2 = cx * cx + cy * cy;
            if (d2 > r2) continue;
            const double z = a.z + t * (b.z - a.z) - std::sqrt(r2 - d2) * world_per_pixel;
            f.plot(x, y, z, cls);
        }
    }
}

void draw_sketch(Frame& f, const ViewCamera& cam, const Sketch& sketch) {
    for (const auto& stroke : sketch.strokes) {
        const std::uint8_t cls = pixel_class(stroke.color);
        for (std::size_t i = 0; i + 1 < stroke.points.size(); ++i)
            draw_capsule(f, cam, project(cam, stroke.points[i]), project(cam, stroke.points[i + 1]), stroke.width, cls);
    }
}

} // namespace

const ViewCamera& view_camera(int view_index) {
    static const auto cameras = make_cameras();
    if (view_index < 0 || view_index >= kViewCount)
        throw Error(ErrorCode::OutOfRange, "view index " + std::to_string(view_index) + " outside [0, 12)");
    return cameras[static_cast<std::size_t>(view_index)];
}

std::size_t Snapshot::count(std::uint8_t cls) const noexcept {
    return static_cast<std::size_t>(std::count(pixels.begin(), pixels.end(), cls));
}

Snapshot rasterize(const ViewCamera& camera, const Scene& scene) {
    Frame f;
    if (scene.model && scene.model->shape) {
        const ChairShape& shape = *scene.model->shape;
        for (PartKind p : kAllParts) {
            const auto color = scene.model->assignment[p];
            if (!shape.has_part(p) || !color) continue;
            draw_mesh(f, camera, shape.parts[code(p)], pixel_class(*color));
        }
    }
    if (scene.sketch) draw_sketch(f, camera, *scene.sketch);
    return std::move(f.image);
}

Snapshot rasterize_part_ids(const ViewCamera& camera, const ChairShape& shape) {
    Frame f;
    for (PartKind p : kAllParts)
        if (shape.has_part(p)) draw_mesh(f, camera, shape.parts[code(p)], static_cast<std::uint8_t>(1 + code(p)));
    return std::move(f.image);
}

std::vector<Snapshot> snapshot_views(const Scene& scene) {
    std::vector<Snapshot> views(kViewCount);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < kViewCount; ++i) views[static_cast<std::size_t>(i)] = rasterize(view_camera(i), scene);
    return views;
}

std::vector<Snapshot> snapshot_views_serial(const Scene& scene) {
    std::vector<Snapshot> views;
    views.reserve(kViewCount);
    for (int i = 0; i < kViewCount; ++i) views.push_back(rasterize(view_camera(i), scene));
    return views;
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v >> 24));
    out.push_back(static_cast<char>(v >> 16));
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v));
}

void put_chunk(std::string& out, const char* type, const std::string& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    std::string body(type, 4);
    body += data;
    out += body;
    put_u32(out, static_cast<std::uint32_t>(crc32(0, reinterpret_cast<const Bytef*>(body.data()),
                                                  static_cast<uInt>(body.size()))));
}

} // namespace

std::string encode_png(const Snapshot& s) {
    std::string raw;
    raw.reserve(static_cast<std::size_t>(s.height) * (1 + 3 * s.width));
    for (int y = 0; y < s.height; ++y) {
        raw.push_back(0);  // filter: none
        for (int x = 0; x < s.width; ++x) {
            const std::uint8_t cls = s.at(x, y);
            Rgb c{1, 1, 1};
            if (cls != kBackground) c = rgb(static_cast<ColorId>(cls - 1));
            raw.push_back(static_cast<char>(c.r * 255));
            raw.push_back(static_cast<char>(c.g * 255));
            raw.push_back(static_cast<char>(c.b * 255));
        }
    }
    uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
    std::string packed(packed_size, '\0');
    if (compress2(reinterpret_cast<Bytef*>(packed.data()), &packed_size, reinterpret_cast<const Bytef*>(raw.data()),
                  static_cast<uLong>(raw.size()), Z_BEST_SPEED) != Z_OK)
        throw Error(ErrorCode::Io, "png compression failed");
    packed.resize(packed_size);

    std::string out("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(s.width));
    put_u32(ihdr, static_cast<std::uint32_t>(s.height));
    ihdr += std::string("\x08\x02\x00\x00\x00", 5);  // 8-bit RGB, deflate, no filter, no interlace
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", packed);
    put_chunk(out, "IEND", {});
    return out;
}

} // namespace chairsearch
