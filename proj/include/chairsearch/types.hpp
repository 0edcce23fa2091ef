#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace chairsearch {

enum class PartKind : std::uint8_t { Arms = 0, Back = 1, Seat = 2, Legs = 3 };
inline constexpr int kPartCount = 4;
inline constexpr std::array<PartKind, kPartCount> kAllParts{
    PartKind::Arms, PartKind::Back, PartKind::Seat, PartKind::Legs};

enum class ColorId : std::uint8_t { Red = 0, Green = 1, Blue = 2, Magenta = 3, Yellow = 4, Cyan = 5 };
inline constexpr int kColorCount = 6;
inline constexpr std::array<ColorId, kColorCount> kAllColors{
    ColorId::Red, ColorId::Green, ColorId::Blue, ColorId::Magenta, ColorId::Yellow, ColorId::Cyan};

struct Rgb {
    float r, g, b;
    friend constexpr bool operator==(const Rgb&, const Rgb&) = default;
};

constexpr int code(PartKind p) noexcept { return static_cast<int>(p); }
constexpr int code(ColorId c) noexcept { return static_cast<int>(c); }

constexpr Rgb rgb(ColorId c) noexcept {
    constexpr std::array<Rgb, kColorCount> table{{
        {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 0}, {0, 1, 1},
    }};
    return table[static_cast<std::size_t>(c)];
}

std::string_view name(PartKind p) noexcept;
std::string_view name(ColorId c) noexcept;
std::optional<PartKind> part_from_name(std::string_view s) noexcept;
std::optional<ColorId> color_from_name(std::string_view s) noexcept;
std::optional<PartKind> part_from_code(int c) noexcept;
std::optional<ColorId> color_from_code(int c) noexcept;

struct Vec3 {
    double x = 0, y = 0, z = 0;

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) noexcept { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) noexcept { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return {a.x * s, a.y * s, a.z * s}; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(Vec3 a, Vec3 b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) noexcept {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

} // namespace chairsearch
