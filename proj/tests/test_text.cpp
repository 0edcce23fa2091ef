#include "support.hpp"

#include "chairsearch/error.hpp"
#include "chairsearch/text_query.hpp"

#include <doctest.h>

#include <cmath>

using namespace chairsearch;

namespace {

const Dictionary& dict() { return Dictionary::builtin(); }

std::vector<std::pair<std::string, Role>> lemmas(std::string_view text) {
    std::vector<std::pair<std::string, Role>> out;
    for (const auto& t : normalize(text, dict()).tokens) out.emplace_back(t.lemma, t.role);
    return out;
}

AttributeVector midpoint() {
    AttributeVector v;
    for (int c = 0; c < kConceptCount; ++c) v.set_level(static_cast<Concept>(c), 2);
    return v;
}

double distance(const AttributeVector& a, const AttributeVector& b) {
    const auto x = a.flatten(), y = b.flatten();
    return std::sqrt(squared_distance(x, y));
}

std::vector<Token> concept_tokens(std::size_t n) {
    std::vector<Token> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({"wide", Role::Concept, code(Concept::Wide), 1});
    return out;
}

} // namespace

TEST_SUITE("semantic-query") {

TEST_CASE("builtin dictionary round trips through its text form") {
    const auto& d = dict();
    CHECK(d.version() == 1);
    CHECK(d.terminator() == "stop");
    CHECK(d.concepts().size() == kConceptCount);
    const auto again = Dictionary::parse(d.to_text());
    CHECK(again.checksum() == d.checksum());
    CHECK(again.to_text() == d.to_text());
}

TEST_CASE("dictionary checksum and structure are enforced") {
    std::string text(Dictionary::builtin_text());
    auto tampered = text;
    tampered.replace(tampered.find("crimson"), 7, "carmine");
    try {
        (void)Dictionary::parse(tampered);
        FAIL("accepted a tampered dictionary");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ChecksumMismatch);
    }
    CHECK_THROWS_AS(Dictionary::parse("version 1\n"), Error);
    CHECK_THROWS_AS(Dictionary::parse(text + "stop extra\n"), Error);
}

TEST_CASE("stemming candidates") {
    auto has = [](std::string_view token, const std::string& form) {
        const auto c = stem_candidates(token);
        return std::find(c.begin(), c.end(), form) != c.end();
    };
    CHECK(stem_candidates("red").front() == "red");
    CHECK(has("curvier", "curvy"));
    CHECK(has("backs", "back"));
    CHECK(has("reclining", "recline"));
    CHECK(has("slanted", "slant"));
    CHECK(has("taller", "tall"));
    CHECK(has("fattest", "fat"));
    CHECK(has("widest", "wide"));
}

TEST_CASE("terminator truncates the utterance") {
    const auto n = normalize("the legs are red stop extra words", dict());
    CHECK(n.terminated);
    CHECK(lemmas("the legs are red stop extra words") ==
          std::vector<std::pair<std::string, Role>>{{"legs", Role::Part}, {"red", Role::Color}});
}

TEST_CASE("inflections fold into lemmas") {
    CHECK(lemmas("curvier backs") ==
          std::vector<std::pair<std::string, Role>>{{"curvy", Role::Concept}, {"back", Role::Part}});
    CHECK(lemmas("Crimson ARMRESTS, please!") ==
          std::vector<std::pair<std::string, Role>>{{"red", Role::Color}, {"arms", Role::Part}});
    CHECK(lemmas("the chair's seat") == std::vector<std::pair<std::string, Role>>{{"seat", Role::Part}});
}

TEST_CASE("unknown words are dropped and counted") {
    const auto n = normalize("purple unicorn", dict());
    CHECK(n.tokens.empty());
    CHECK(n.unknown_count == 2);
    CHECK_FALSE(n.terminated);
}

TEST_CASE("antonyms carry negative polarity") {
    const auto n = normalize("thin", dict());
    REQUIRE(n.tokens.size() == 1);
    CHECK(n.tokens[0].id == code(Concept::Thick));
    CHECK(n.tokens[0].polarity == -1);
}

TEST_CASE("segmentation") {
    CHECK(segment(concept_tokens(6), 6).size() == 1);
    const auto c = segment(concept_tokens(7), 2);
    REQUIRE(c.size() == 4);
    CHECK(c[0].tokens.size() == 2);
    CHECK(c[1].tokens.size() == 2);
    CHECK(c[2].tokens.size() == 2);
    CHECK(c[3].tokens.size() == 1);
    CHECK(segment({}, 4).empty());
    CHECK_THROWS_AS(segment(concept_tokens(1), 3), Error);
}

TEST_CASE("segmentation keeps color-part pairs together") {
    const auto tokens = normalize("red seat blue back", dict()).tokens;
    const auto c = segment(tokens, 2);
    REQUIRE(c.size() == 2);
    CHECK(c[0].tokens[0].lemma == "red");
    CHECK(c[0].tokens[1].lemma == "seat");
    CHECK(c[1].tokens[0].lemma == "blue");
    CHECK(c[1].tokens[1].lemma == "back");

    // "wide red seat" in pairs: the color would end the first chunk, so it moves on.
    const auto shifted = segment(normalize("wide red seat", dict()).tokens, 2);
    REQUIRE(shifted.size() == 2);
    CHECK(shifted[0].tokens.size() == 1);
    CHECK(shifted[1].tokens[0].lemma == "red");
}

TEST_CASE("property: segmentation preserves tokens, bounds chunks, keeps pairs") {
    testing::Gen g(29);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto tokens = normalize(testing::random_word_stream(g, dict(), 16), dict()).tokens;
        for (int n : {2, 4, 6}) {
            const auto chunks = segment(tokens, n);
            std::vector<Token> flat;
            for (const auto& ch : chunks) {
                CHECK(!ch.tokens.empty());
                CHECK(ch.tokens.size() <= static_cast<std::size_t>(n));
                // No chunk ends on a color immediately followed by a part (or a negation before a concept)
                // unless the chunk holds a single token.
                if (ch.tokens.size() > 1 && flat.size() + ch.tokens.size() < tokens.size()) {
                    const Role last = ch.tokens.back().role, next = tokens[flat.size() + ch.tokens.size()].role;
                    CHECK_FALSE((last == Role::Color && next == Role::Part));
                    CHECK_FALSE((last == Role::Negation && next == Role::Concept));
                }
                flat.insert(flat.end(), ch.tokens.begin(), ch.tokens.end());
            }
            CHECK(flat == tokens);
        }
    }
}

TEST_CASE("concept steps clamp at the top level") {
    auto v = midpoint();
    for (int i = 0; i < 3; ++i) v = apply_utterance("curvy", 6, v, dict());
    CHECK(v.level(Concept::Curvy) == 4);
    for (int i = 0; i < 6; ++i) v = apply_utterance("straight", 6, v, dict());
    CHECK(v.level(Concept::Curvy) == 0);
}

TEST_CASE("negation flips a concept step") {
    const auto v = apply_utterance("not curvy", 6, midpoint(), dict());
    CHECK(v.level(Concept::Curvy) == 1);
    InterpretStats stats;
    (void)apply_utterance("not red seat", 6, midpoint(), dict(), &stats);
    CHECK(stats.dangling_negations == 1);
}

TEST_CASE("color statements set one part and nothing else") {
    const auto before = midpoint();
    const auto v = apply_utterance("red seat", 6, before, dict());
    CHECK(v.color(PartKind::Seat) == ColorId::Red);
    auto expected = before;
    expected.set_color(PartKind::Seat, ColorId::Red);
    CHECK(v == expected);
    const auto flat = v.flatten();
    for (int c = 0; c < kColorCount; ++c)
        CHECK(flat[code(PartKind::Seat) * kColorCount + c] == (c == code(ColorId::Red) ? 1.0f : 0.0f));
    // Idempotent.
    CHECK(apply_utterance("red seat", 6, v, dict()) == v);

    InterpretStats stats;
    CHECK(apply_utterance("red", 6, before, dict(), &stats) == before);
    CHECK(stats.ambiguous_colors == 1);
}

TEST_CASE("flattened layout") {
    AttributeVector v;
    v.set_color(PartKind::Legs, ColorId::Cyan);
    v.set_level(Concept::Classic, 3);
    v.set_level(Concept::Armed, 9);  // clamped
    const auto f = v.flatten();
    CHECK(f.size() == 44);
    CHECK(f[code(PartKind::Legs) * 6 + code(ColorId::Cyan)] == 1.0f);
    CHECK(f[24 + code(Concept::Classic)] == 0.75f);
    CHECK(f[24 + code(Concept::Armed)] == 1.0f);
    float sum = 0;
    for (int i = 0; i < 24; ++i) sum += f[i];
    CHECK(sum == 1.0f);  // arms, back and seat uncolored
}

TEST_CASE("property: true statements move the descriptor closer to the target") {
    const auto& engine = *testing::reference_engine();
    const auto& m = engine.manifest();
    testing::Gen g(31);
    int tested = 0;
    while (tested < 300) {
        const auto target = engine.semantic(m.instances()[testing::pick(g, m.instance_count())].chair_id);
        const auto current = engine.semantic(m.instances()[testing::pick(g, m.instance_count())].chair_id);
        // "thin legs blue back" is true of the target relative to current when the target's legs are
        // thinner and its back is blue while the current back is not.
        if (!(target.level(Concept::Thick) < current.level(Concept::Thick) &&
              target.color(PartKind::Back) == ColorId::Blue && current.color(PartKind::Back) != ColorId::Blue))
            continue;
        ++tested;
        for (int n : {2, 4, 6}) {
            const auto moved = apply_utterance("thin legs blue back", n, current, dict());
            CHECK(distance(moved, target) < distance(current, target));
        }
    }
}

TEST_CASE("sync from selection") {
    const auto& engine = *testing::reference_engine();
    const ChairId c = 20 * kMaxVariations + 17;
    const auto synced = sync_from_selection(c, engine.manifest());
    CHECK(synced == engine.semantic(c));
    CHECK(apply_utterance("", 6, synced, dict()) == synced);

    const auto green = apply_utterance("green legs", 6, synced, dict());
    const auto a = synced.flatten(), b = green.flatten();
    for (int i = 0; i < kSemanticDims; ++i) {
        const bool legs_block = i >= code(PartKind::Legs) * 6 && i < (code(PartKind::Legs) + 1) * 6;
        if (!legs_block) CHECK(a[i] == b[i]);
    }
    CHECK(green.color(PartKind::Legs) == ColorId::Green);
    CHECK_THROWS_AS(sync_from_selection(-5, engine.manifest()), Error);
}

TEST_CASE("code points") {
    CHECK(code_point_count("") == 0);
    CHECK(code_point_count("abc") == 3);
    CHECK(code_point_count("\xc3\xa9t\xc3\xa9") == 3);
    CHECK(code_point_count("\xf0\x9f\xaa\x91") == 1);
}

TEST_CASE("fuzz: arbitrary UTF-8 never throws and keeps levels in range") {
    testing::Gen g(37);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::string text = trial % 2 ? testing::random_utf8(g, 80) : testing::random_word_stream(g, dict(), 20);
        AttributeVector v = midpoint();
        const int n = 2 + 2 * static_cast<int>(testing::pick(g, 3));
        REQUIRE_NOTHROW(v = apply_utterance(text, n, v, dict()));
        for (int level : v.levels()) {
            CHECK(level >= 0);
            CHECK(level <= kMaxLevel);
        }
    }
}

TEST_CASE("property: the terminator makes interpretation prefix-closed") {
    testing::Gen g(41);
    const std::vector<std::string> stops{" stop ", " STOP ", " Stop. ", "\nstop\n", ", stop!"};
    for (int trial = 0; trial < 1000; ++trial) {
        const std::string head = testing::random_word_stream(g, dict(), 10);
        const std::string tail = testing::random_word_stream(g, dict(), 10) + " red seat wide";
        const std::string full = head + stops[testing::pick(g, stops.size())] + tail;
        const int n = 2 + 2 * static_cast<int>(testing::pick(g, 3));
        const auto start = midpoint();
        CHECK(apply_utterance(full, n, start, dict()) == apply_utterance(head, n, start, dict()));
        CHECK(normalize(full, dict()).tokens == normalize(head, dict()).tokens);
    }
}

} // TEST_SUITE
