#include "support.hpp"

#include <algorithm>

using namespace chairsearch;

namespace testing {

const std::shared_ptr<const Engine>& reference_engine() {
    static const auto engine = Engine::reference();
    return engine;
}

const SilhouetteLibrary& reference_library() {
    static const auto library = SilhouetteLibrary::build(reference_engine()->manifest());
    return library;
}

std::shared_ptr<const Engine> small_engine(std::size_t shapes) { return Engine::reference(shapes); }

std::size_t pick(Gen& g, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(g); }

double uniform(Gen& g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }

namespace {

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

char32_t random_code_point(Gen& g) {
    switch (pick(g, 8)) {
        case 0: return static_cast<char32_t>(0x20 + pick(g, 0x5F));        // printable ASCII
        case 1: return static_cast<char32_t>('a' + pick(g, 26));
        case 2: return static_cast<char32_t>(pick(g, 0x20));               // controls, NUL included
        case 3: return static_cast<char32_t>(0xC0 + pick(g, 0x180));       // Latin-1 and Extended-A
        case 4: return static_cast<char32_t>(0x300 + pick(g, 0x70));       // combining marks
        case 5: return static_cast<char32_t>(0x4E00 + pick(g, 0x5000));    // CJK
        case 6: return static_cast<char32_t>(0x1F300 + pick(g, 0x300));    // emoji
        default: return U" \t\n.,;!?'\"-"[pick(g, 12)];
    }
}

} // namespace

std::string random_utf8(Gen& g, std::size_t max_code_points) {
    std::string out;
    const std::size_t n = pick(g, max_code_points + 1);
    for (std::size_t i = 0; i < n; ++i) append_utf8(out, random_code_point(g));
    return out;
}

std::string random_word_stream(Gen& g, const Dictionary& dict, std::size_t max_words) {
    std::vector<std::string> surface;
    for (const auto& p : dict.parts()) surface.insert(surface.end(), p.words.begin(), p.words.end());
    for (const auto& c : dict.colors()) surface.insert(surface.end(), c.words.begin(), c.words.end());
    for (const auto& c : dict.concepts()) {
        surface.insert(surface.end(), c.synonyms.begin(), c.synonyms.end());
        surface.insert(surface.end(), c.antonyms.begin(), c.antonyms.end());
    }
    surface.insert(surface.end(), dict.negations().begin(), dict.negations().end());
    surface.insert(surface.end(), dict.stop_words().begin(), dict.stop_words().end());
    static const std::vector<std::string> suffixes{"", "", "", "s", "es", "er", "est", "ier", "ing", "ed", "y"};
    static const std::vector<std::string> separators{" ", " ", " ", ", ", ". ", "! ", "  ", "\t", " - "};
    std::string out;
    const std::size_t n = pick(g, max_words + 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::string w;
        switch (pick(g, 10)) {
            case 0: w = "zorp" + std::to_string(pick(g, 100)); break;
            case 1: w = random_utf8(g, 3); break;
            default: w = surface[pick(g, surface.size())] + suffixes[pick(g, suffixes.size())]; break;
        }
        if (pick(g, 5) == 0) std::transform(w.begin(), w.end(), w.begin(), [](char c) {
            return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
        });
        // Keep the terminator out; callers add it where they want it.
        std::string lower = w;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](char c) {
            return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
        });
        if (lower.find(dict.terminator()) != std::string::npos) w = "chair";
        out += w + separators[pick(g, separators.size())];
    }
    return out;
}

Sketch random_sketch(Gen& g, std::size_t max_strokes) {
    Sketch s;
    const std::size_t n = pick(g, max_strokes + 1);
    for (std::size_t i = 0; i < n; ++i) {
        Stroke st;
        st.color = static_cast<ColorId>(pick(g, kColorCount));
        st.width = uniform(g, 0.005, 0.2);
        const std::size_t points = 2 + pick(g, 6);
        for (std::size_t k = 0; k < points; ++k)
            st.points.push_back({uniform(g, -0.7, 0.7), uniform(g, -0.7, 0.7), uniform(g, -0.7, 0.7)});
        s.strokes.push_back(std::move(st));
    }
    return s;
}

} // namespace testing

namespace testing {

namespace {

struct Snapshot {
    std::size_t log_size;
    ChairId current;
    AttributeVector descriptor;
    SessionState state;
};

Snapshot capture(const Session& s) { return {s.log().size(), s.current(), s.descriptor(), s.state()}; }

} // namespace

FuzzReport fuzz_sessions(const std::shared_ptr<const Engine>& engine, std::uint64_t seed, std::size_t ops) {
    FuzzReport report;
    Gen g(seed);
    const auto& m = engine->manifest();
    const auto& dict = engine->dictionary();
    auto violation = [&](const std::string& what) {
        if (report.violations.size() < 20) report.violations.push_back("op " + std::to_string(report.ops) + ": " + what);
    };

    ManualClock clock;
    std::unique_ptr<Session> session;
    double start = 0;
    auto fresh = [&] {
        start = clock.now();
        SessionConfig cfg;
        cfg.mode = static_cast<Mode>(pick(g, 3));
        cfg.n_gram = 2 + 2 * static_cast<int>(pick(g, 3));
        cfg.budget_seconds = pick(g, 2) ? kSessionBudgetSeconds : uniform(g, 5, 30);
        session = std::make_unique<Session>(engine, "fuzz" + std::to_string(report.sessions++),
                                            m.instances()[pick(g, m.instance_count())].chair_id, cfg, clock);
    };
    fresh();

    while (report.ops < ops) {
        ++report.ops;
        if (session->state() != SessionState::Active && pick(g, 4) == 0) fresh();
        Session& s = *session;
        const auto before = capture(s);
        const bool past_budget = clock.now() - start > s.config().budget_seconds;
        const bool was_closed = before.state != SessionState::Active || past_budget;
        bool threw = false;
        const auto op = pick(g, 12);
        try {
            switch (op) {
                case 0: case 1: case 2: {
                    std::string text = pick(g, 3) ? random_word_stream(g, dict, 8) + " stop" : random_utf8(g, 250);
                    (void)s.submit_voice(text);
                    break;
                }
                case 3: case 4: {
                    auto sk = random_sketch(g, 4);
                    if (pick(g, 10) == 0 && !sk.strokes.empty()) sk.strokes[0].width = -1;  // invalid
                    (void)s.submit_sketch(sk, pick(g, 2) == 0);
                    break;
                }
                case 5: case 6: s.select(pick(g, 7)); break;
                case 7: s.edit_level(static_cast<Concept>(pick(g, kConceptCount)), pick(g, 2) ? 1 : -1); break;
                case 8:
                    s.edit_color(static_cast<PartKind>(pick(g, kPartCount)),
                                 pick(g, 7) ? std::optional<ColorId>(static_cast<ColorId>(pick(g, kColorCount)))
                                            : std::nullopt);
                    break;
                case 9: (void)s.submit_descriptor(); break;
                case 10: clock.advance(uniform(g, 0, 12)); s.poll(); break;
                default:
                    if (pick(g, 8) == 0) s.abandon();
                    else if (pick(g, 2)) s.reset_descriptor();
                    else s.sync_descriptor();
                    break;
            }
        } catch (const Error&) {
            threw = true;
            ++report.rejected_calls;
        } catch (const std::exception& e) {
            violation(std::string("non-domain exception: ") + e.what());
        }

        const auto after = capture(s);
        std::size_t open = 0;
        for (const auto& r : s.log())
            if (!r.terminal()) ++open;
        if (open > 1) violation("two non-terminal records");
        if (was_closed) {
            if (after.log_size != before.log_size || after.current != before.current ||
                !(after.descriptor == before.descriptor))
                violation("session mutated after it closed");
        }
        if (past_budget && s.state() != SessionState::TimedOut && before.state == SessionState::Active)
            violation("session still open past the budget");
        if (!threw && (op <= 4 || op == 9)) {
            ++report.accepted_queries;
            const auto& last = s.log().back();
            if (last.results.size() != kResultCount) violation("accepted query without 5 results");
            if (last.phase != Phase::Selection) violation("accepted query not awaiting selection");
        }
        if (!threw && (op == 5 || op == 6)) {
            if (!(s.descriptor() == engine->semantic(s.current()))) violation("selection did not sync the descriptor");
            if (s.current() == s.target() && s.state() != SessionState::Succeeded) violation("target selected, not succeeded");
        }
        if (s.state() == SessionState::TimedOut && s.elapsed() != s.config().budget_seconds)
            violation("timed-out elapsed differs from the budget");
    }
    return report;
}

} // namespace testing
