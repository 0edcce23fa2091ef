#pragma once

#include "chairsearch/concepts.hpp"
#include "chairsearch/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chairsearch {

enum class Role : std::uint8_t { Part, Color, Concept, Negation, Stop, Terminator };

std::string_view to_string(Role role) noexcept;

/// One surface form of the lexicon.
struct LexEntry {
    Role role = Role::Stop;
    std::string lemma;  // canonical lemma the surface form folds into
    int id = -1;        // part / color / concept code, -1 otherwise
    int polarity = 0;   // +1 concept synonym, -1 antonym, 0 otherwise
};

struct ConceptWords {
    Concept attr;
    std::vector<std::string> synonyms;  // first entry is the canonical lemma
    std::vector<std::string> antonyms;  // first entry is the canonical antonym lemma
};

struct GroupWords {
    int id;
    std::vector<std::string> words;  // first entry is the canonical lemma
};

/// Versioned lemma tables. Text form, one table row per line:
///
///     version <n>
///     part <arms|back|seat|legs> <lemma>...
///     color <red|...> <lemma>...
///     concept <concept-id> + <lemma>... - <lemma>...
///     negation <lemma>...
///     stop <lemma>...
///     terminator <lemma>
///     checksum <16 hex digits>
///
/// The checksum is FNV-1a over every preceding non-comment line joined by '\n'.
class Dictionary {
public:
    static Dictionary parse(std::string_view text);
    static const Dictionary& builtin();
    static std::string_view builtin_text() noexcept;

    [[nodiscard]] const LexEntry* lookup(std::string_view surface) const noexcept;
    [[nodiscard]] const std::string& checksum() const noexcept { return checksum_; }
    [[nodiscard]] int version() const noexcept { return version_; }
    [[nodiscard]] const std::string& terminator() const noexcept { return terminator_; }

    [[nodiscard]] const std::vector<ConceptWords>& concepts() const noexcept { return concepts_; }
    [[nodiscard]] const std::vector<GroupWords>& parts() const noexcept { return parts_; }
    [[nodiscard]] const std::vector<GroupWords>& colors() const noexcept { return colors_; }
    [[nodiscard]] const std::vector<std::string>& negations() const noexcept { return negations_; }
    [[nodiscard]] const std::vector<std::string>& stop_words() const noexcept { return stop_words_; }

    [[nodiscard]] const std::string& part_lemma(PartKind p) const;
    [[nodiscard]] const std::string& color_lemma(ColorId c) const;
    [[nodiscard]] const std::string& concept_lemma(Concept c) const;
    [[nodiscard]] const std::string& antonym_lemma(Concept c) const;

    /// Canonical text rendering (what `parse` accepts, checksum line included).
    [[nodiscard]] std::string to_text() const;

private:
    void add(std::string_view surface, LexEntry entry);

    int version_ = 0;
    std::string checksum_;
    std::string terminator_;
    std::vector<ConceptWords> concepts_;
    std::vector<GroupWords> parts_;
    std::vector<GroupWords> colors_;
    std::vector<std::string> negations_;
    std::vector<std::string> stop_words_;
    std::map<std::string, LexEntry, std::less<>> lexicon_;
};

} // namespace chairsearch
