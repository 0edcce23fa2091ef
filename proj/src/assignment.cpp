#include "chairsearch/assignment.hpp"

#include "chairsearch/error.hpp"

#include <algorithm>

namespace chairsearch {

bool ColorAssignment::injective() const noexcept {
    std::array<bool, kColorCount> used{};
    for (const auto& c : colors) {
        if (!c) continue;
        if (used[code(*c)]) return false;
        used[code(*c)] = true;
    }
    return true;
}

std::size_t assignment_count(std::size_t part_count) {
    std::size_t n = 1;
    for (std::size_t i = 0; i < part_count; ++i) n *= static_cast<std::size_t>(kColorCount) - i;
    return n;
}

namespace {

void extend(std::span<const PartKind> parts, std::size_t depth, ColorAssignment& current,
            std::array<bool, kColorCount>& used, std::vector<ColorAssignment>& out) {
    if (depth == parts.size()) {
        out.push_back(current);
        return;
    }
    for (ColorId c : kAllColors) {
        if (used[code(c)]) continue;
        used[code(c)] = true;
        current.colors[code(parts[depth])] = c;
        extend(parts, depth + 1, current, used, out);
        used[code(c)] = false;
    }
    current.colors[code(parts[depth])].reset();
}

} // namespace

std::vector<ColorAssignment> enumerate_assignments(std::span<const PartKind> parts) {
    if (parts.empty()) throw Error(ErrorCode::InvalidInput, "enumerate_assignments: empty part set");
    std::vector<PartKind> sorted(parts.begin(), parts.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error(ErrorCode::InvalidInput, "enumerate_assignments: repeated part");

    std::vector<ColorAssignment> out;
    out.reserve(assignment_count(sorted.size()));
    ColorAssignment current;
    std::array<bool, kColorCount> used{};
    extend(sorted, 0, current, used, out);
    return out;
}

} // namespace chairsearch
