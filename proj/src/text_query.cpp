#include "chairsearch/text_query.hpp"

#include "chairsearch/dataset.hpp"
#include "chairsearch/error.hpp"

#include <cstdlib>

namespace chairsearch {

namespace {

bool is_word_byte(unsigned char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool is_vowel(char c) noexcept { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool ends_with(std::string_view s, std::string_view suffix) noexcept {
    return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

} // namespace

// Rules, in order: -ies/-ier/-iest -> -y; plural -es and -s; -ing/-ed/-er/-est
// stripped, then with a restored -e, then with a doubled final consonant
// undone; finally a trailing -y.
std::vector<std::string> stem_candidates(std::string_view token) {
    std::vector<std::string> out{std::string(token)};
    auto push = [&](std::string s) {
        if (s.size() >= 2) out.push_back(std::move(s));
    };
    const std::string t(token);
    for (std::string_view suf : {"ies", "ier", "iest"})
        if (ends_with(t, suf)) push(t.substr(0, t.size() - suf.size()) + "y");
    if (ends_with(t, "es")) push(t.substr(0, t.size() - 2));
    if (ends_with(t, "s") && !ends_with(t, "ss")) push(t.substr(0, t.size() - 1));
    for (std::string_view suf : {"ing", "ed", "er", "est"}) {
        if (!ends_with(t, suf)) continue;
        const std::string stem = t.substr(0, t.size() - suf.size());
        push(stem);
        push(stem + "e");
        const std::size_t n = stem.size();
        if (n >= 2 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1])) push(stem.substr(0, n - 1));
    }
    if (ends_with(t, "y")) push(t.substr(0, t.size() - 1));
    return out;
}

NormalizedText normalize(std::string_view text, const Dictionary& dictionary) {
    NormalizedText out;
    std::string word;
    auto flush = [&]() -> bool {  // false once the terminator is seen
        if (word.empty()) return true;
        std::string w;
        w.swap(word);
        if (w == dictionary.terminator()) {
            out.terminated = true;
            return false;
        }
        for (const auto& candidate : stem_candidates(w)) {
            const LexEntry* e = dictionary.lookup(candidate);
            if (!e) continue;
            if (e->role == Role::Terminator) {
                out.terminated = true;
                return false;
            }
            if (e->role != Role::Stop) out.tokens.push_back({e->lemma, e->role, e->id, e->polarity});
            return true;
        }
        ++out.unknown_count;
        return true;
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
        if (c == '\'') continue;  // "chair's" -> "chairs"
        if (is_word_byte(c)) {
            word.push_back(static_cast<char>(c));
        } else if (!flush()) {
            return out;
        }
    }
    flush();
    return out;
}

std::vector<QueryChunk> segment(std::span<const Token> tokens, int n) {
    if (n != 2 && n != 4 && n != 6) throw Error(ErrorCode::InvalidInput, "n-gram size must be 2, 4 or 6");
    auto protected_pair = [&](std::size_t i) {  // tokens[i], tokens[i + 1]
        if (i + 1 >= tokens.size()) return false;
        const Role a = tokens[i].role, b = tokens[i + 1].role;
        return (a == Role::Negation && b == Role::Concept) || (a == Role::Color && b == Role::Part);
    };
    std::vector<QueryChunk> chunks;
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(n), tokens.size() - i);
        if (len > 1 && protected_pair(i + len - 1)) --len;
        chunks.push_back({{tokens.begin() + static_cast<std::ptrdiff_t>(i),
                           tokens.begin() + static_cast<std::ptrdiff_t>(i + len)}});
        i += len;
    }
    return chunks;
}

AttributeVector interpret(std::span<const QueryChunk> chunks, const AttributeVector& current, InterpretStats* stats) {
    AttributeVector v = current;
    InterpretStats local;
    for (const auto& chunk : chunks) {
        const auto& t = chunk.tokens;
        for (std::size_t i = 0; i < t.size(); ++i) {
            switch (t[i].role) {
                case Role::Concept: {
                    int delta = t[i].polarity;
                    if (i > 0 && t[i - 1].role == Role::Negation) delta = -delta;
                    v.step(static_cast<Concept>(t[i].id), delta);
                    break;
                }
                case Role::Negation:
                    if (i + 1 >= t.size() || t[i + 1].role != Role::Concept) ++local.dangling_negations;
                    break;
                case Role::Color: {
                    // Nearest part lemma in the chunk; on a tie the following one.
                    std::optional<std::size_t> best;
                    for (std::size_t j = 0; j < t.size(); ++j) {
                        if (t[j].role != Role::Part) continue;
                        const auto d = j > i ? j - i : i - j;
                        const auto bd = best ? (*best > i ? *best - i : i - *best) : SIZE_MAX;
                        if (d < bd || (d == bd && j > i)) best = j;
                    }
                    if (best) v.set_color(static_cast<PartKind>(t[*best].id), static_cast<ColorId>(t[i].id));
                    else ++local.ambiguous_colors;
                    break;
                }
                default: break;
            }
        }
    }
    if (stats) *stats = local;
    return v;
}

AttributeVector apply_utterance(std::string_view text, int n, const AttributeVector& current,
                                const Dictionary& dictionary, InterpretStats* stats) {
    const auto normalized = normalize(text, dictionary);
    const auto chunks = segment(normalized.tokens, n);
    return interpret(chunks, current, stats);
}

AttributeVector sync_from_selection(ChairId chair_id, const DatasetManifest& manifest) {
    return semantic_vector(manifest.instance(chair_id), manifest);
}

std::size_t code_point_count(std::string_view text) noexcept {
    std::size_t n = 0;
    for (char ch : text)
        if ((static_cast<unsigned char>(ch) & 0xC0) != 0x80) ++n;
    return n;
}

} // namespace chairsearch
