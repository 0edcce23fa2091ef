#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace chairsearch {

/// 64-bit FNV-1a. Used for checksums and descriptor digests, never for security.
class Fnv1a {
public:
    void update(std::string_view bytes) noexcept {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
    }

    template <typename T>
    void update_pod(const T& value) noexcept {
        char buf[sizeof(T)];
        std::memcpy(buf, &value, sizeof(T));
        update(std::string_view(buf, sizeof(T)));
    }

    template <typename T>
    void update_span(std::span<const T> values) noexcept {
        for (const T& v : values) update_pod(v);
    }

    [[nodiscard]] std::uint64_t digest() const noexcept { return state_; }
    [[nodiscard]] std::string hex() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::uint64_t value);

inline std::uint64_t fnv1a(std::string_view bytes) noexcept {
    Fnv1a h;
    h.update(bytes);
    return h.digest();
}

} // namespace chairsearch
