#include "chairsearch/concepts.hpp"
#include "chairsearch/error.hpp"
#include "chairsearch/hash.hpp"
#include "chairsearch/types.hpp"

#include <array>
#include <cstdio>

namespace chairsearch {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidInput: return "invalid-input";
        case ErrorCode::NotFound: return "not-found";
        case ErrorCode::Io: return "io-error";
        case ErrorCode::VersionMismatch: return "version-mismatch";
        case ErrorCode::ChecksumMismatch: return "checksum-mismatch";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::EmptyIndex: return "empty-index";
        case ErrorCode::ModeViolation: return "mode-violation";
        case ErrorCode::QueryInFlight: return "query-in-flight";
        case ErrorCode::BudgetExceeded: return "budget-exceeded";
        case ErrorCode::NoPendingSelection: return "no-pending-selection";
        case ErrorCode::OutOfRange: return "out-of-range";
        case ErrorCode::SessionClosed: return "session-closed";
    }
    return "unknown";
}

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string Fnv1a::hex() const { return to_hex(state_); }

namespace {
constexpr std::array<std::string_view, kPartCount> kPartNames{"arms", "back", "seat", "legs"};
constexpr std::array<std::string_view, kColorCount> kColorNames{"red", "green", "blue", "magenta", "yellow", "cyan"};
constexpr std::array<std::string_view, kConceptCount> kConceptIds{
    "armed", "wide", "deep", "tall", "plush", "round", "sloped", "high", "curvy", "reclined",
    "broad", "solid", "thick", "splayed", "tapered", "braced", "long", "bulky", "raised", "classic"};
} // namespace

std::string_view name(PartKind p) noexcept { return kPartNames[code(p)]; }
std::string_view name(ColorId c) noexcept { return kColorNames[code(c)]; }

std::optional<PartKind> part_from_name(std::string_view s) noexcept {
    for (int i = 0; i < kPartCount; ++i)
        if (kPartNames[i] == s) return static_cast<PartKind>(i);
    return std::nullopt;
}

std::optional<ColorId> color_from_name(std::string_view s) noexcept {
    for (int i = 0; i < kColorCount; ++i)
        if (kColorNames[i] == s) return static_cast<ColorId>(i);
    return std::nullopt;
}

std::optional<PartKind> part_from_code(int c) noexcept {
    if (c < 0 || c >= kPartCount) return std::nullopt;
    return static_cast<PartKind>(c);
}

std::optional<ColorId> color_from_code(int c) noexcept {
    if (c < 0 || c >= kColorCount) return std::nullopt;
    return static_cast<ColorId>(c);
}

std::string_view concept_id(Concept c) noexcept { return kConceptIds[code(c)]; }

std::optional<Concept> concept_from_id(std::string_view id) noexcept {
    for (int i = 0; i < kConceptCount; ++i)
        if (kConceptIds[i] == id) return static_cast<Concept>(i);
    return std::nullopt;
}

} // namespace chairsearch
