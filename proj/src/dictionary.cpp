#include "chairsearch/dictionary.hpp"

#include "chairsearch/error.hpp"
#include "chairsearch/hash.hpp"

#include <cctype>
#include <sstream>

namespace chairsearch {

std::string_view to_string(Role role) noexcept {
    switch (role) {
        case Role::Part: return "part";
        case Role::Color: return "color";
        case Role::Concept: return "concept";
        case Role::Negation: return "negation";
        case Role::Stop: return "stop";
        case Role::Terminator: return "terminator";
    }
    return "unknown";
}

namespace {

// Lines without the trailing checksum; `builtin_text()` appends it.
constexpr std::string_view kBuiltinBody = R"(# chairsearch dictionary: parts, colors, 20 shape concepts, stop words
version 1
part arms arms arm armrest
part back back backrest
part seat seat saddle
part legs legs leg base feet foot stand
color red red crimson scarlet
color green green lime emerald
color blue blue navy azure
color magenta magenta pink fuchsia
color yellow yellow gold golden
color cyan cyan turquoise aqua teal
concept armed + armed armchair - armless
concept wide + wide large big roomy - narrow small tiny
concept deep + deep - shallow
concept tall + tall elevated lofty - squat stubby
concept plush + plush padded cushioned cushy - hard firm
concept round + round rounded circular oval - square angular boxy rectangular
concept sloped + sloped slanted inclined angled - level horizontal
concept high + high - low
concept curvy + curvy wavy curved bent arched - straight
concept reclined + reclined recline reclining leaning tilted - upright vertical
concept broad + broad expansive - compact
concept solid + solid closed full - open slatted hollow airy
concept thick + thick chunky sturdy heavy stout - thin skinny slender delicate
concept splayed + splayed flared spread - parallel
concept tapered + tapered pointed - uniform blunt
concept braced + braced reinforced - unbraced
concept long + long extended lengthy - short
concept bulky + bulky massive fat - slim lean
concept raised + raised lifted - lowered sunken
concept classic + classic classical ornate vintage antique traditional decorated fancy old - modern minimal minimalist plain contemporary simple new
negation not no less
stop a an the and or with is are it its of to in on at i want need has have be should chair please very more much colored coloured color colour that this some but also like looking for me my which made make kind one quite really bit
terminator stop)";

std::string checksum_of(const std::vector<std::string>& lines) {
    Fnv1a h;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) h.update("\n");
        h.update(lines[i]);
    }
    return h.hex();
}

std::vector<std::string> fields(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

const std::string& builtin_text_storage() {
    static const std::string text = [] {
        std::vector<std::string> content;
        std::istringstream in{std::string(kBuiltinBody)};
        for (std::string line; std::getline(in, line);)
            if (!line.empty() && line[0] != '#') content.push_back(line);
        return std::string(kBuiltinBody) + "\nchecksum " + checksum_of(content) + "\n";
    }();
    return text;
}

} // namespace

std::string_view Dictionary::builtin_text() noexcept { return builtin_text_storage(); }

const Dictionary& Dictionary::builtin() {
    static const Dictionary d = parse(builtin_text());
    return d;
}

void Dictionary::add(std::string_view surface, LexEntry entry) {
    for (char c : surface)
        if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c))))
            throw Error(ErrorCode::InvalidInput, "dictionary lemma '" + std::string(surface) + "' must be lowercase");
    if (!lexicon_.emplace(std::string(surface), std::move(entry)).second)
        throw Error(ErrorCode::InvalidInput, "dictionary lemma '" + std::string(surface) + "' appears twice");
}

Dictionary Dictionary::parse(std::string_view text) {
    Dictionary d;
    std::vector<std::string> content;
    std::optional<std::string> declared;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto f = fields(line);
        if (f.empty() || f[0][0] == '#') continue;
        auto fail = [&](const std::string& what) {
            throw Error(ErrorCode::InvalidInput, "dictionary: " + what + " in '" + line + "'");
        };
        if (declared) fail("content after checksum");
        if (f[0] == "checksum") {
            if (f.size() != 2) fail("expected 'checksum <hex>'");
            declared = f[1];
            continue;
        }
        content.push_back(line);
        if (f[0] == "version") {
            if (f.size() != 2) fail("expected 'version <n>'");
            d.version_ = std::stoi(f[1]);
        } else if (f[0] == "part" || f[0] == "color") {
            if (f.size() < 3) fail("expected at least one lemma");
            const bool is_part = f[0] == "part";
            const int id = is_part ? (part_from_name(f[1]) ? code(*part_from_name(f[1])) : -1)
                                   : (color_from_name(f[1]) ? code(*color_from_name(f[1])) : -1);
            if (id < 0) fail("unknown " + f[0] + " '" + f[1] + "'");
            GroupWords g{id, {f.begin() + 2, f.end()}};
            for (const auto& w : g.words)
                d.add(w, {is_part ? Role::Part : Role::Color, g.words.front(), id, 0});
            (is_part ? d.parts_ : d.colors_).push_back(std::move(g));
        } else if (f[0] == "concept") {
            auto c = f.size() > 1 ? concept_from_id(f[1]) : std::nullopt;
            if (!c) fail("unknown concept");
            ConceptWords cw{*c, {}, {}};
            int sign = 0;
            for (std::size_t i = 2; i < f.size(); ++i) {
                if (f[i] == "+") sign = 1;
                else if (f[i] == "-") sign = -1;
                else if (sign == 1) cw.synonyms.push_back(f[i]);
                else if (sign == -1) cw.antonyms.push_back(f[i]);
                else fail("lemma before '+' or '-'");
            }
            if (cw.synonyms.empty()) fail("concept needs at least one synonym");
            for (const auto& w : cw.synonyms) d.add(w, {Role::Concept, cw.synonyms.front(), code(*c), +1});
            for (const auto& w : cw.antonyms) d.add(w, {Role::Concept, cw.antonyms.front(), code(*c), -1});
            d.concepts_.push_back(std::move(cw));
        } else if (f[0] == "negation") {
            for (std::size_t i = 1; i < f.size(); ++i) {
                d.add(f[i], {Role::Negation, f[i], -1, 0});
                d.negations_.push_back(f[i]);
            }
        } else if (f[0] == "stop") {
            for (std::size_t i = 1; i < f.size(); ++i) {
                d.add(f[i], {Role::Stop, f[i], -1, 0});
                d.stop_words_.push_back(f[i]);
            }
        } else if (f[0] == "terminator") {
            if (f.size() != 2) fail("expected 'terminator <lemma>'");
            d.terminator_ = f[1];
            d.add(f[1], {Role::Terminator, f[1], -1, 0});
        } else {
            fail("unknown table '" + f[0] + "'");
        }
    }
    if (!declared) throw Error(ErrorCode::InvalidInput, "dictionary: missing checksum line");
    d.checksum_ = checksum_of(content);
    if (d.checksum_ != *declared)
        throw Error(ErrorCode::ChecksumMismatch, "dictionary checksum " + *declared + " does not match content " + d.checksum_);
    if (d.version_ <= 0) throw Error(ErrorCode::InvalidInput, "dictionary: missing version");
    if (d.terminator_.empty()) throw Error(ErrorCode::InvalidInput, "dictionary: missing terminator");
    if (d.parts_.size() != kPartCount || d.colors_.size() != kColorCount)
        throw Error(ErrorCode::InvalidInput, "dictionary: needs every part and color");
    std::array<bool, kConceptCount> seen{};
    for (const auto& c : d.concepts_) seen[code(c.attr)] = true;
    for (bool s : seen)
        if (!s) throw Error(ErrorCode::InvalidInput, "dictionary: needs all 20 concepts");
    return d;
}

const LexEntry* Dictionary::lookup(std::string_view surface) const noexcept {
    auto it = lexicon_.find(surface);
    return it == lexicon_.end() ? nullptr : &it->second;
}

const std::string& Dictionary::part_lemma(PartKind p) const {
    for (const auto& g : parts_)
        if (g.id == code(p)) return g.words.front();
    throw Error(ErrorCode::NotFound, "part lemma");
}

const std::string& Dictionary::color_lemma(ColorId c) const {
    for (const auto& g : colors_)
        if (g.id == code(c)) return g.words.front();
    throw Error(ErrorCode::NotFound, "color lemma");
}

const std::string& Dictionary::concept_lemma(Concept c) const {
    for (const auto& cw : concepts_)
        if (cw.attr == c) return cw.synonyms.front();
    throw Error(ErrorCode::NotFound, "concept lemma");
}

const std::string& Dictionary::antonym_lemma(Concept c) const {
    for (const auto& cw : concepts_)
        if (cw.attr == c && !cw.antonyms.empty()) return cw.antonyms.front();
    throw Error(ErrorCode::NotFound, "concept has no antonym");
}

std::string Dictionary::to_text() const {
    std::vector<std::string> lines;
    lines.push_back("version " + std::to_string(version_));
    auto join = [](const std::vector<std::string>& words) {
        std::string s;
        for (const auto& w : words) s += " " + w;
        return s;
    };
    for (const auto& g : parts_) lines.push_back("part " + std::string(name(static_cast<PartKind>(g.id))) + join(g.words));
    for (const auto& g : colors_) lines.push_back("color " + std::string(name(static_cast<ColorId>(g.id))) + join(g.words));
    for (const auto& c : concepts_) {
        std::string l = "concept " + std::string(concept_id(c.attr)) + " +" + join(c.synonyms);
        if (!c.antonyms.empty()) l += " -" + join(c.antonyms);
        lines.push_back(l);
    }
    lines.push_back("negation" + join(negations_));
    lines.push_back("stop" + join(stop_words_));
    lines.push_back("terminator " + terminator_);
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    out += "checksum " + checksum_of(lines) + "\n";
    return out;
}

} // namespace chairsearch
