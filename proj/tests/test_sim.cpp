#include "support.hpp"

#include "chairsearch/error.hpp"
#include "chairsearch/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace chairsearch;

namespace {

const auto& engine() { return testing::reference_engine(); }
const auto& library() { return testing::reference_library(); }

ExperimentConfig base_config(std::vector<Strategy> strategies, std::size_t trials, std::uint64_t seed = 7) {
    ExperimentConfig c;
    c.strategies = std::move(strategies);
    c.trials = trials;
    c.seed = seed;
    return c;
}

double precision(const ExperimentResult& r, Strategy s, int n) {
    const auto* row = r.table.find(s, n);
    REQUIRE(row != nullptr);
    return row->precision;
}

// A user who ignores the target: empty queries and a uniformly random pick.
double random_selection_precision(std::size_t trials, std::uint64_t seed) {
    testing::Gen g(seed);
    const auto& m = engine()->manifest();
    std::size_t exact = 0;
    const TimeModel time;
    for (std::size_t t = 0; t < trials; ++t) {
        ManualClock clock;
        Session s(engine(), "baseline", m.instances()[testing::pick(g, m.instance_count())].chair_id,
                  SessionConfig{Mode::VoiceOnly, 6, kSessionBudgetSeconds}, clock);
        try {
            while (s.state() == SessionState::Active) {
                clock.advance(time.voice_query);
                (void)s.submit_voice("stop");
                clock.advance(time.processing + time.selection);
                s.select(testing::pick(g, kResultCount));
                if (s.state() == SessionState::Active) {
                    // Random descriptor so that the panel does not stay put.
                    s.edit_level(static_cast<Concept>(testing::pick(g, kConceptCount)), testing::pick(g, 2) ? 1 : -1);
                }
            }
        } catch (const Error&) {
        }
        s.poll();
        if (s.score().exact_success) ++exact;
    }
    return static_cast<double>(exact) / static_cast<double>(trials);
}

} // namespace

TEST_SUITE("sim-harness") {

TEST_CASE("strategy names and modes") {
    for (auto s : {Strategy::VoicePure, Strategy::SketchPure, Strategy::HybridA, Strategy::HybridB, Strategy::HybridC})
        CHECK(strategy_from_string(to_string(s)) == s);
    CHECK_FALSE(strategy_from_string("telepathy").has_value());
    CHECK(session_mode(Strategy::VoicePure) == Mode::VoiceOnly);
    CHECK(session_mode(Strategy::SketchPure) == Mode::SketchOnly);
    CHECK(session_mode(Strategy::HybridB) == Mode::Hybrid);
}

TEST_CASE("config parsing is strict") {
    const auto c = experiment_config_from_json(nlohmann::json::parse(
        R"({"strategies":["voice","hybrid-a"],"n_grams":[2,6],"trials":3,"seed":9,"noise":{"confusion":0.1},"budget_s":60})"));
    CHECK(c.strategies == std::vector<Strategy>{Strategy::VoicePure, Strategy::HybridA});
    CHECK(c.n_grams == std::vector<int>{2, 6});
    CHECK(c.trials == 3);
    CHECK(c.noise.confusion == 0.1);
    CHECK(c.noise.misassociation == NoiseProfile{}.misassociation);
    CHECK(c.budget_seconds == 60);
    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json::parse(R"({"trails":3})")), Error);
    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json::parse(R"({"n_grams":[3]})")), Error);
    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json::parse(R"({"noise":{"confusion":2}})")), Error);
    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json::parse(R"({"strategies":["x"]})")), Error);
}

TEST_CASE("seeds") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    std::set<std::uint64_t> s;
    for (std::uint64_t a = 0; a < 10; ++a)
        for (std::uint64_t b = 0; b < 10; ++b) s.insert(derive_seed(1, a, b));
    CHECK(s.size() == 100);
}

TEST_CASE("silhouette strokes cover every part of every shape") {
    for (const auto& shape : engine()->manifest().shapes()) {
        const auto& strokes = library().strokes(shape.shape_id);
        std::set<PartKind> parts;
        for (const auto& s : strokes) {
            parts.insert(s.part);
            CHECK(s.points.size() >= 2);
            CHECK(s.width > 0);
            Stroke st{s.points, ColorId::Red, s.width};
            CHECK_NOTHROW(st.validate());
        }
        CHECK(parts.size() == shape.present_parts().size());
    }
}

TEST_CASE("oracle strokes put the target shape in the top five") {
    testing::Gen g(71);
    const auto& m = engine()->manifest();
    int hits = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto& inst = m.instances()[testing::pick(g, m.instance_count())];
        const auto sketch = oracle_sketch(library(), inst);
        const auto r = engine()->knn_visual(engine()->sketch_descriptor(sketch, std::nullopt));
        for (const auto& n : r)
            if (engine()->shape_of(n.chair_id).shape_id == inst.shape_id) {
                ++hits;
                break;
            }
    }
    CHECK(hits >= 18);
}

TEST_CASE("noiseless misassociation-free sketches find the target shape") {
    testing::Gen g(73);
    const auto& m = engine()->manifest();
    NoiseProfile clean{0, 0, 0};
    int hits = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const ChairId target = m.instances()[testing::pick(g, m.instance_count())].chair_id;
        ManualClock clock;
        Session s(engine(), "p", target, SessionConfig{Mode::SketchOnly, 6, kSessionBudgetSeconds}, clock);
        SimUser user(Strategy::SketchPure, clean, 5 + trial);
        const auto q = user.sketch_step(s, library());
        CHECK_FALSE(q.include_current_model);
        const auto r = s.submit_sketch(q.sketch, q.include_current_model);
        for (const auto& n : r)
            if (engine()->shape_of(n.chair_id).shape_id == engine()->shape_of(target).shape_id) {
                ++hits;
                break;
            }
    }
    CHECK(hits >= 18);
}

TEST_CASE("once the shape matches the user only names colors") {
    testing::Gen g(79);
    for (int trial = 0; trial < 50; ++trial) {
        const int shape = static_cast<int>(testing::pick(g, 45));
        const ChairId target = shape * kMaxVariations + static_cast<ChairId>(testing::pick(g, 360));
        ChairId other = shape * kMaxVariations + static_cast<ChairId>(testing::pick(g, 360));
        if (other == target) continue;
        ManualClock clock;
        Session s(engine(), "c", target, SessionConfig{Mode::VoiceOnly, 6, kSessionBudgetSeconds}, clock);
        // Make `other` current through the console.
        const auto o = engine()->semantic(other);
        for (PartKind p : kAllParts) s.edit_color(p, o.color(p));
        for (int a = 0; a < kConceptCount; ++a)
            s.edit_level(static_cast<Concept>(a), o.level(static_cast<Concept>(a)) - s.descriptor().level(static_cast<Concept>(a)));
        (void)s.submit_descriptor();
        s.select(0);
        REQUIRE(s.current() == other);
        SimUser user(Strategy::VoicePure, NoiseProfile{0, 0, 0}, 3 + trial);
        const auto text = user.voice_step(s, 6);
        const auto tokens = normalize(text, engine()->dictionary());
        CHECK(tokens.terminated);
        CHECK_FALSE(tokens.tokens.empty());
        for (const auto& t : tokens.tokens) CHECK((t.role == Role::Color || t.role == Role::Part));
    }
}

TEST_CASE("voice steps respect the n-gram budget") {
    testing::Gen g(83);
    for (int trial = 0; trial < 60; ++trial) {
        const ChairId target = engine()->manifest().instances()[testing::pick(g, 16200)].chair_id;
        ManualClock clock;
        Session s(engine(), "n", target, SessionConfig{Mode::VoiceOnly, 2, kSessionBudgetSeconds}, clock);
        SimUser user(Strategy::VoicePure, NoiseProfile{}, 11 + trial);
        for (int n : {2, 4, 6}) {
            const auto tokens = normalize(user.voice_step(s, n), engine()->dictionary());
            CHECK(tokens.tokens.size() <= static_cast<std::size_t>(n));
            CHECK(tokens.terminated);
        }
    }
}

TEST_CASE("zero confusion converges for every sampled target") {
    auto c = base_config({Strategy::VoicePure}, 20, 89);
    c.noise = NoiseProfile{0, 0, 0};
    c.budget_seconds = 1e9;
    c.max_queries = 500;
    for (int n : {2, 6}) {
        c.n_grams = {n};
        const auto r = run_experiment(engine(), library(), c);
        CAPTURE(n);
        CHECK(r.table.rows.at(0).exact == 20);
    }
}

TEST_CASE("full confusion is indistinguishable from random selection") {
    auto c = base_config({Strategy::VoicePure}, 200, 97);
    c.noise.confusion = 1.0;
    const double noisy = precision(run_experiment(engine(), library(), c), Strategy::VoicePure, 6);
    const double baseline = random_selection_precision(200, 101);
    // Two-proportion z bound with a floor for the all-zero case.
    const double pooled = (noisy + baseline) / 2;
    const double se = std::sqrt(std::max(pooled * (1 - pooled), 1e-4) * 2 / 200.0);
    CAPTURE(noisy);
    CAPTURE(baseline);
    CHECK(std::abs(noisy - baseline) <= 3 * se);
    CHECK(noisy < 0.05);
}

TEST_CASE("full misassociation leaves pure sketching without exact hits") {
    auto c = base_config({Strategy::SketchPure}, 100, 103);
    c.noise.misassociation = 1.0;
    const auto r = run_experiment(engine(), library(), c);
    CHECK(r.table.rows.at(0).precision <= 0.02);
    CHECK(r.table.rows.at(0).precision_shape >= 0.8);
}

TEST_CASE("trials = 0 gives an empty table") {
    const auto r = run_experiment(engine(), library(), base_config({Strategy::VoicePure}, 0));
    CHECK(r.table.rows.empty());
    CHECK(r.trials.empty());
}

TEST_CASE("a missing silhouette entry skips the trial") {
    SilhouetteLibrary partial = library();
    partial.set(engine()->shape_of(4 * kMaxVariations).shape_id, {});
    auto c = base_config({Strategy::SketchPure, Strategy::VoicePure}, 2);
    c.targets = {4 * kMaxVariations + 1, 9 * kMaxVariations + 2};
    c.keep_logs = true;
    const auto r = run_experiment(engine(), partial, c);
    const auto* sketch = r.table.find(Strategy::SketchPure, 6);
    REQUIRE(sketch != nullptr);
    CHECK(sketch->skipped == 1);
    CHECK(sketch->trials == 1);  // scored trials; the skipped one is counted apart
    CHECK(r.table.find(Strategy::VoicePure, 6)->skipped == 0);
    bool found = false;
    for (const auto& t : r.trials)
        if (t.skipped) {
            found = true;
            CHECK_FALSE(t.skip_reason.empty());
            CHECK(t.log.size() == 2);  // header and the abandoned state
        }
    CHECK(found);
}

TEST_CASE("experiments are deterministic and rows are consistent") {
    auto c = base_config({Strategy::VoicePure, Strategy::SketchPure, Strategy::HybridA, Strategy::HybridB,
                          Strategy::HybridC},
                         20, 107);
    c.n_grams = {2, 6};
    const auto a = run_experiment(engine(), library(), c);
    const auto b = run_experiment(engine(), library(), c);
    CHECK(a.table == b.table);
    CHECK(a.table.rows.size() == 9);  // sketch appears once
    for (const auto& row : a.table.rows) {
        CHECK(row.precision_shape >= row.precision);
        CHECK(row.avg_time_s <= kSessionBudgetSeconds);
        CHECK(row.trials == 20);
    }
    std::size_t rows = 0, cols = 0;
    const auto m = success_matrix(a, rows, cols);
    CHECK(rows == 20);
    CHECK(cols == 9);
    CHECK(m.size() == 180);
    const auto tsv = a.table.to_tsv();
    CHECK(tsv.rfind("strategy\tn_gram\ttrials\tskipped\texact\tshape\tprecision\tprecision_shape\tavg_time_s\tavg_query_count\n", 0) == 0);
}

TEST_CASE("precision does not increase with confusion") {
    double last = 2;
    for (double pc : {0.0, 0.3, 0.6}) {
        auto c = base_config({Strategy::VoicePure}, 100, 109);
        c.noise.confusion = pc;
        const double p = precision(run_experiment(engine(), library(), c), Strategy::VoicePure, 6);
        CAPTURE(pc);
        CHECK(p <= last);
        last = p;
    }
}

TEST_CASE("precision does not increase with misassociation") {
    for (Strategy s : {Strategy::SketchPure, Strategy::HybridA}) {
        double last = 2;
        for (double pm : {0.0, 0.5, 1.0}) {
            auto c = base_config({s}, 100, 113);
            c.noise.misassociation = pm;
            const double p = precision(run_experiment(engine(), library(), c), s, 6);
            CAPTURE(to_string(s));
            CAPTURE(pm);
            CHECK(p <= last);
            last = p;
        }
    }
}

} // TEST_SUITE
