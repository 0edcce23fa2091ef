#pragma once

#include "chairsearch/attribute_vector.hpp"
#include "chairsearch/dataset.hpp"
#include "chairsearch/dictionary.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chairsearch {

/// Text-equivalent of the spoken-query time cap, in code points.
inline constexpr std::size_t kMaxUtteranceChars = 200;

struct Token {
    std::string lemma;
    Role role = Role::Stop;
    int id = -1;
    int polarity = 0;

    friend bool operator==(const Token&, const Token&) = default;
};

struct NormalizedText {
    std::vector<Token> tokens;  // content lemmas only: part, color, concept, negation
    int unknown_count = 0;
    bool terminated = false;
};

/// Lowercases, strips punctuation, drops stop words, stems, and folds synonyms
/// into canonical lemmas. Everything from the first terminator on is ignored.
NormalizedText normalize(std::string_view text, const Dictionary& dictionary);

/// Candidate lemma forms of a lowercase token, in lookup order (the token first).
std::vector<std::string> stem_candidates(std::string_view token);

struct QueryChunk {
    std::vector<Token> tokens;
};

/// Greedy left-to-right grouping into chunks of at most `n` tokens that never
/// separates (negation, concept) or (color, part) neighbours. n in {2, 4, 6}.
std::vector<QueryChunk> segment(std::span<const Token> tokens, int n);

struct InterpretStats {
    int ambiguous_colors = 0;
    int dangling_negations = 0;
};

AttributeVector interpret(std::span<const QueryChunk> chunks, const AttributeVector& current,
                          InterpretStats* stats = nullptr);

/// normalize -> segment -> interpret.
AttributeVector apply_utterance(std::string_view text, int n, const AttributeVector& current,
                                const Dictionary& dictionary, InterpretStats* stats = nullptr);

/// Ground-truth descriptor of a selected chair; throws NotFound.
AttributeVector sync_from_selection(ChairId chair_id, const DatasetManifest& manifest);

/// Number of Unicode code points (invalid bytes count one each).
std::size_t code_point_count(std::string_view text) noexcept;

} // namespace chairsearch
