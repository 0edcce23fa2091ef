#include "chairsearch/sim.hpp"

#include "chairsearch/error.hpp"
#include "chairsearch/session_log.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

namespace chairsearch {

std::string_view to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::VoicePure: return "voice";
        case Strategy::SketchPure: return "sketch";
        case Strategy::HybridA: return "hybrid-a";
        case Strategy::HybridB: return "hybrid-b";
        case Strategy::HybridC: return "hybrid-c";
    }
    return "unknown";
}

std::optional<Strategy> strategy_from_string(std::string_view s) noexcept {
    for (Strategy st : {Strategy::VoicePure, Strategy::SketchPure, Strategy::HybridA, Strategy::HybridB, Strategy::HybridC})
        if (to_string(st) == s) return st;
    return std::nullopt;
}

Mode session_mode(Strategy s) noexcept {
    switch (s) {
        case Strategy::VoicePure: return Mode::VoiceOnly;
        case Strategy::SketchPure: return Mode::SketchOnly;
        default: return Mode::Hybrid;
    }
}

void NoiseProfile::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(confusion) || !prob(misassociation))
        throw Error(ErrorCode::InvalidInput, "noise probabilities must lie in [0, 1]");
    if (!(sketch_jitter >= 0.0 && sketch_jitter <= 0.5))
        throw Error(ErrorCode::InvalidInput, "sketch jitter must lie in [0, 0.5]");
}

namespace {

// Uniform [0, 1) from the top 53 bits; unlike std distributions this is the
// same on every standard library.
double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

std::uint64_t splitmix(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Connected components of a mesh, welding vertices at identical positions.
std::vector<std::vector<Vec3>> components(const PartMesh& mesh) {
    const std::size_t n = mesh.vertices.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };

    std::map<std::array<long long, 3>, std::size_t> welded;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = mesh.vertices[i];
        const std::array<long long, 3> key{std::llround(v.x * 1e6), std::llround(v.y * 1e6), std::llround(v.z * 1e6)};
        auto [it, inserted] = welded.emplace(key, i);
        if (!inserted) unite(i, it->second);
    }
    for (const auto& t : mesh.triangles) {
        unite(t[0], t[1]);
        unite(t[1], t[2]);
    }
    std::map<std::size_t, std::vector<Vec3>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(mesh.vertices[i]);
    std::vector<std::vector<Vec3>> out;
    for (auto& [root, pts] : groups) out.push_back(std::move(pts));
    return out;
}

constexpr int kMaxBands = 2;
constexpr int kBins = 4;
constexpr double kMinWidth = 0.02;
constexpr double kMaxWidth = 0.3;

// Medial strokes of one component: principal axes by PCA, then 1..2 parallel
// bands across the second axis, each a polyline along the first axis that
// follows the component's mean offset along the third.
std::vector<SilhouetteLibrary::PartStroke> tube_strokes(PartKind part, const std::vector<Vec3>& pts) {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : pts) mean += Eigen::Vector3d(p.x, p.y, p.z);
    mean /= static_cast<double>(pts.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : pts) {
        const Eigen::Vector3d d = Eigen::Vector3d(p.x, p.y, p.z) - mean;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    // Eigenvalues ascend; axis 0 is the longest.
    const std::array<Eigen::Vector3d, 3> axis{solver.eigenvectors().col(2), solver.eigenvectors().col(1),
                                              solver.eigenvectors().col(0)};
    std::array<double, 3> lo{}, hi{};
    lo.fill(1e300);
    hi.fill(-1e300);
    std::vector<std::array<double, 3>> local;
    local.reserve(pts.size());
    for (const auto& p : pts) {
        const Eigen::Vector3d d = Eigen::Vector3d(p.x, p.y, p.z) - mean;
        std::array<double, 3> c{d.dot(axis[0]), d.dot(axis[1]), d.dot(axis[2])};
        for (int k = 0; k < 3; ++k) {
            lo[k] = std::min(lo[k], c[k]);
            hi[k] = std::max(hi[k], c[k]);
        }
        local.push_back(c);
    }
    const double e1 = hi[0] - lo[0], e2 = hi[1] - lo[1], e3 = hi[2] - lo[2];
    const double base = std::max({e3, e2 / kMaxBands, kMinWidth});
    const int bands = std::clamp(static_cast<int>(std::ceil(e2 / base - 1e-9)), 1, kMaxBands);
    const double width = std::clamp(bands > 1 ? e2 / bands : std::max(e2, e3), kMinWidth, kMaxWidth);
    const double start = lo[0] + std::min(width / 2, e1 / 2);
    const double stop = hi[0] - std::min(width / 2, e1 / 2);

    std::vector<SilhouetteLibrary::PartStroke> out;
    for (int b = 0; b < bands; ++b) {
        const double b_lo = lo[1] + e2 * b / bands, b_hi = lo[1] + e2 * (b + 1) / bands;
        const double offset = (b_lo + b_hi) / 2;
        double band_sum = 0;
        int band_n = 0;
        std::array<double, kBins> bin_sum{};
        std::array<int, kBins> bin_n{};
        for (const auto& c : local) {
            if (c[1] < b_lo - 1e-9 || c[1] > b_hi + 1e-9) continue;
            const int bin = e1 > 0 ? std::clamp(static_cast<int>((c[0] - lo[0]) / e1 * kBins), 0, kBins - 1) : 0;
            bin_sum[bin] += c[2];
            ++bin_n[bin];
            band_sum += c[2];
            ++band_n;
        }
        const double band_depth = band_n ? band_sum / band_n : 0.0;
        SilhouetteLibrary::PartStroke stroke{part, {}, width};
        for (int k = 0; k <= kBins; ++k) {
            const double s = start + (stop - start) * k / kBins;
            // Depth from the nearest populated bin.
            double depth = band_depth;
            const int bin = std::min(k, kBins - 1);
            const int alt = std::max(k - 1, 0);
            if (bin_n[bin] && bin_n[alt]) depth = (bin_sum[bin] / bin_n[bin] + bin_sum[alt] / bin_n[alt]) / 2;
            else if (bin_n[bin]) depth = bin_sum[bin] / bin_n[bin];
            else if (bin_n[alt]) depth = bin_sum[alt] / bin_n[alt];
            const Eigen::Vector3d p = mean + s * axis[0] + offset * axis[1] + depth * axis[2];
            stroke.points.push_back({p.x(), p.y(), p.z()});
        }
        out.push_back(std::move(stroke));
    }
    return out;
}

} // namespace

std::vector<SilhouetteLibrary::PartStroke> SilhouetteLibrary::trace(const ChairShape& shape) {
    std::vector<PartStroke> out;
    for (PartKind part : shape.present_parts())
        for (const auto& comp : components(shape.parts[code(part)])) {
            auto strokes = tube_strokes(part, comp);
            out.insert(out.end(), std::make_move_iterator(strokes.begin()), std::make_move_iterator(strokes.end()));
        }
    return out;
}

SilhouetteLibrary SilhouetteLibrary::build(const DatasetManifest& manifest) {
    SilhouetteLibrary lib;
    for (const auto& shape : manifest.shapes()) lib.set(shape.shape_id, trace(shape));
    return lib;
}

const std::vector<SilhouetteLibrary::PartStroke>& SilhouetteLibrary::strokes(int shape_id) const {
    auto it = entries_.find(shape_id);
    if (it == entries_.end() || it->second.empty())
        throw Error(ErrorCode::NotFound, "no silhouette strokes for shape " + std::to_string(shape_id));
    return it->second;
}

Sketch oracle_sketch(const SilhouetteLibrary& library, const ChairInstance& chair) {
    Sketch sketch;
    for (const auto& ps : library.strokes(chair.shape_id)) {
        const auto color = chair.assignment[ps.part];
        if (!color) continue;
        sketch.strokes.push_back(Stroke{ps.points, *color, ps.width});
    }
    return sketch;
}

SimUser::SimUser(Strategy strategy, NoiseProfile noise, std::uint64_t seed)
    : strategy_(strategy), noise_(noise), rng_(seed) {
    noise_.validate();
}

std::string SimUser::corrupt(const Token& token, const Dictionary& dictionary) {
    if (noise_.confusion <= 0 || uniform01(rng_) >= noise_.confusion) return token.lemma;
    std::vector<std::string> siblings;
    switch (token.role) {
        case Role::Concept:
            for (const auto& cw : dictionary.concepts()) {
                siblings.push_back(cw.synonyms.front());
                if (!cw.antonyms.empty()) siblings.push_back(cw.antonyms.front());
            }
            break;
        case Role::Color:
            for (const auto& g : dictionary.colors()) siblings.push_back(g.words.front());
            break;
        case Role::Part:
            for (const auto& g : dictionary.parts()) siblings.push_back(g.words.front());
            break;
        default: return token.lemma;
    }
    std::erase(siblings, token.lemma);
    if (siblings.empty()) return token.lemma;
    return siblings[uniform_index(rng_, siblings.size())];
}

std::string SimUser::voice_step(const Session& session, int n) {
    const Engine& engine = session.engine();
    const Dictionary& dict = engine.dictionary();
    const AttributeVector target = engine.semantic(session.target());
    const AttributeVector& cur = session.descriptor();
    const bool shape_matched = engine.shape_of(session.current()).shape_id == engine.shape_of(session.target()).shape_id;

    const auto budget = static_cast<std::size_t>(std::max(n, 0));

    // A user who re-picked the chair they already had knows the last statement
    // got nowhere and moves on to the next part of what is still wrong.
    if (last_current_ && *last_current_ == session.current()) ++stall_;
    else stall_ = 0;
    last_current_ = session.current();

    // Everything still wrong, as statement units in the order the user would
    // say them. While the shape is wrong: one concept lemma per level step,
    // largest remaining gap first, then (color, part) pairs. Once the shape
    // matches only the pairs. Equal gaps and the part order are shuffled.
    std::vector<std::vector<Token>> units;
    if (!shape_matched) {
        std::array<int, kConceptCount> remaining{};
        std::vector<int> order(kConceptCount);
        std::iota(order.begin(), order.end(), 0);
        shuffle(order, rng_);
        for (int c = 0; c < kConceptCount; ++c)
            remaining[static_cast<std::size_t>(c)] =
                target.level(static_cast<Concept>(c)) - cur.level(static_cast<Concept>(c));
        for (;;) {
            std::optional<int> best;
            for (int c : order) {
                const int gap = std::abs(remaining[static_cast<std::size_t>(c)]);
                if (gap != 0 && (!best || gap > std::abs(remaining[static_cast<std::size_t>(*best)]))) best = c;
            }
            if (!best) break;
            auto& r = remaining[static_cast<std::size_t>(*best)];
            const auto attr = static_cast<Concept>(*best);
            const int polarity = r > 0 ? 1 : -1;
            units.push_back({{polarity > 0 ? dict.concept_lemma(attr) : dict.antonym_lemma(attr), Role::Concept,
                              *best, polarity}});
            r -= polarity;
        }
    }
    std::vector<PartKind> wrong;
    for (PartKind p : kAllParts)
        if (target.color(p) && target.color(p) != cur.color(p)) wrong.push_back(p);
    shuffle(wrong, rng_);
    for (PartKind p : wrong) {
        const ColorId c = *target.color(p);
        units.push_back({{dict.color_lemma(c), Role::Color, code(c), 0}, {dict.part_lemma(p), Role::Part, code(p), 0}});
    }

    std::vector<Token> lemmas;
    if (!units.empty()) {
        const std::size_t first = static_cast<std::size_t>(stall_) % units.size();
        for (std::size_t i = 0; i < units.size(); ++i) {
            const auto& u = units[(first + i) % units.size()];
            if (lemmas.size() + u.size() > budget) {
                if (u.size() == 1) break;
                continue;  // a pair that does not fit; a later concept might
            }
            lemmas.insert(lemmas.end(), u.begin(), u.end());
        }
    }

    std::string text = "i want";
    for (const auto& t : lemmas) text += ' ' + corrupt(t, dict);
    text += ' ' + dict.terminator();
    return text;
}

SimUser::SketchQuery SimUser::sketch_step(const Session& session, const SilhouetteLibrary& library) {
    const Engine& engine = session.engine();
    const ChairInstance& target = engine.instance(session.target());
    const auto& strokes = library.strokes(target.shape_id);

    // Which color each part's strokes carry. Misassociated parts trade colors
    // among themselves so that none keeps its own; a lone misassociated part
    // trades with a random other part. The drawn palette stays the target's.
    const auto parts = engine.shape_of(session.target()).present_parts();
    std::array<ColorId, 4> drawn{};
    for (PartKind p : parts) drawn[code(p)] = *target.assignment[p];
    std::vector<PartKind> moved;
    for (PartKind p : parts)
        if (uniform01(rng_) < noise_.misassociation) moved.push_back(p);
    if (parts.size() > 1 && moved.size() == 1) {
        std::vector<PartKind> others;
        for (PartKind o : parts)
            if (o != moved[0]) others.push_back(o);
        moved.push_back(others[uniform_index(rng_, others.size())]);
    }
    if (moved.size() > 1) {
        // Uniform derangement by rejection; at most 4 parts, so this is cheap.
        std::vector<std::size_t> perm(moved.size());
        bool fixed_point = true;
        while (fixed_point) {
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            shuffle(perm, rng_);
            fixed_point = false;
            for (std::size_t i = 0; i < perm.size(); ++i) fixed_point = fixed_point || perm[i] == i;
        }
        for (std::size_t i = 0; i < moved.size(); ++i) drawn[code(moved[i])] = *target.assignment[moved[perm[i]]];
    }

    SketchQuery q;
    for (const auto& ps : strokes) {
        Stroke s{ps.points, drawn[code(ps.part)], ps.width};
        if (noise_.sketch_jitter > 0)
            for (auto& pt : s.points) {
                pt.x += (2 * uniform01(rng_) - 1) * noise_.sketch_jitter;
                pt.y += (2 * uniform01(rng_) - 1) * noise_.sketch_jitter;
                pt.z += (2 * uniform01(rng_) - 1) * noise_.sketch_jitter;
            }
        q.sketch.strokes.push_back(std::move(s));
    }
    const bool shape_matched =
        engine.shape_of(session.current()).shape_id == target.shape_id;
    q.include_current_model = strategy_ == Strategy::HybridC || (strategy_ == Strategy::SketchPure && shape_matched);
    return q;
}

std::size_t SimUser::choose(const Session& session, const ResultSet& results) {
    if (results.empty()) throw Error(ErrorCode::InvalidInput, "nothing to choose from");
    const Engine& engine = session.engine();
    const int target_shape = engine.shape_of(session.target()).shape_id;
    // Holding a chair of the wrong shape rules that shape out for the user.
    if (const int held = engine.shape_of(session.current()).shape_id; held != target_shape) ruled_out_.insert(held);
    // Preference: target shape, then shapes not yet ruled out, then the rest.
    // Within a class the user judges by appearance, the distance between
    // the rendered descriptors.
    auto preference = [&](int shape) { return shape == target_shape ? 0 : ruled_out_.count(shape) ? 2 : 1; };
    const auto& visual = engine.index().visual();
    const auto target_row = visual.row(engine.manifest().position(session.target()));
    std::optional<std::size_t> best;
    int best_pref = 0;
    double best_d = 0;
    for (std::size_t r = 0; r < results.size(); ++r) {
        const ChairId id = results[r].chair_id;
        if (id == session.target()) return r;
        const int pref = preference(engine.shape_of(id).shape_id);
        const double d = squared_distance(visual.row(engine.manifest().position(id)), target_row);
        if (!best || pref < best_pref || (pref == best_pref && d < best_d)) {
            best = r;
            best_pref = pref;
            best_d = d;
        }
    }
    return *best;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known{"strategies", "n_grams", "trials",   "targets",     "seed",
                                             "noise",      "time",    "budget_s", "max_queries", "keep_logs"};
    if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "experiment config must be an object");
    for (const auto& [key, value] : j.items())
        if (!known.contains(key)) throw Error(ErrorCode::InvalidInput, "unknown experiment config key '" + key + "'");
    ExperimentConfig c;
    try {
        if (j.contains("strategies")) {
            c.strategies.clear();
            for (const auto& s : j["strategies"]) {
                auto st = strategy_from_string(s.get<std::string>());
                if (!st) throw Error(ErrorCode::InvalidInput, "unknown strategy " + s.dump());
                c.strategies.push_back(*st);
            }
        }
        if (j.contains("n_grams")) c.n_grams = j["n_grams"].get<std::vector<int>>();
        if (j.contains("trials")) c.trials = j["trials"].get<std::size_t>();
        if (j.contains("targets")) c.targets = j["targets"].get<std::vector<ChairId>>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("noise")) {
            const auto& n = j["noise"];
            c.noise.confusion = n.value("confusion", c.noise.confusion);
            c.noise.misassociation = n.value("misassociation", c.noise.misassociation);
            c.noise.sketch_jitter = n.value("sketch_jitter", c.noise.sketch_jitter);
        }
        if (j.contains("time")) {
            const auto& t = j["time"];
            c.time.voice_query = t.value("voice_query", c.time.voice_query);
            c.time.sketch_base = t.value("sketch_base", c.time.sketch_base);
            c.time.sketch_per_stroke = t.value("sketch_per_stroke", c.time.sketch_per_stroke);
            c.time.selection = t.value("selection", c.time.selection);
            c.time.processing = t.value("processing", c.time.processing);
        }
        if (j.contains("budget_s")) c.budget_seconds = j["budget_s"].get<double>();
        if (j.contains("max_queries")) c.max_queries = j["max_queries"].get<std::size_t>();
        if (j.contains("keep_logs")) c.keep_logs = j["keep_logs"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("experiment config: ") + e.what());
    }
    c.noise.validate();
    for (int n : c.n_grams)
        if (n != 2 && n != 4 && n != 6) throw Error(ErrorCode::InvalidInput, "n-gram sizes must be 2, 4 or 6");
    if (c.n_grams.empty()) throw Error(ErrorCode::InvalidInput, "at least one n-gram size is required");
    if (!(c.budget_seconds > 0)) throw Error(ErrorCode::InvalidInput, "budget must be positive");
    return c;
}

const MetricsRow* MetricsTable::find(Strategy s, int n_gram) const noexcept {
    for (const auto& r : rows)
        if (r.strategy == s && r.n_gram == n_gram) return &r;
    return nullptr;
}

std::string MetricsTable::to_tsv() const {
    std::string out = "strategy\tn_gram\ttrials\tskipped\texact\tshape\tprecision\tprecision_shape\tavg_time_s\tavg_query_count\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s\t%d\t%zu\t%zu\t%zu\t%zu\t%.6f\t%.6f\t%.6f\t%.6f\n",
                      std::string(to_string(r.strategy)).c_str(), r.n_gram, r.trials, r.skipped, r.exact, r.shape,
                      r.precision, r.precision_shape, r.avg_time_s, r.avg_query_count);
        out += buf;
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) noexcept {
    return splitmix(splitmix(base ^ splitmix(a)) ^ b);
}

TrialResult run_trial(const std::shared_ptr<const Engine>& engine, const SilhouetteLibrary& library,
                      Strategy strategy, int n_gram, ChairId target, const ExperimentConfig& config,
                      std::uint64_t seed) {
    TrialResult tr{strategy, n_gram, 0, target, false, {}, {}, {}};
    ManualClock clock(0);
    MemoryLog memory;
    Session session(engine, "trial-" + std::to_string(seed), target,
                    SessionConfig{session_mode(strategy), n_gram, config.budget_seconds}, clock,
                    config.keep_logs ? memory.listener() : Session::Listener{});
    SimUser user(strategy, config.noise, seed);

    if (strategy != Strategy::VoicePure) {
        try {
            (void)library.strokes(engine->shape_of(target).shape_id);
        } catch (const Error& e) {
            tr.skipped = true;
            tr.skip_reason = e.what();
            session.abandon();
            tr.outcome = session.score();
            tr.log = memory.lines();
            return tr;
        }
    }

    std::size_t queries = 0;
    try {
        while (session.state() == SessionState::Active && queries < config.max_queries) {
            const bool shape_matched =
                engine->shape_of(session.current()).shape_id == engine->shape_of(target).shape_id;
            bool sketch = false;
            switch (strategy) {
                case Strategy::VoicePure: sketch = false; break;
                case Strategy::SketchPure: sketch = true; break;
                case Strategy::HybridA: sketch = !shape_matched; break;
                case Strategy::HybridB: sketch = queries == 0; break;
                case Strategy::HybridC: sketch = queries > 0 && !shape_matched; break;
            }
            ResultSet results;
            if (sketch) {
                auto q = user.sketch_step(session, library);
                clock.advance(config.time.sketch_base +
                              config.time.sketch_per_stroke * static_cast<double>(q.sketch.strokes.size()));
                results = session.submit_sketch(q.sketch, q.include_current_model);
            } else {
                const auto text = user.voice_step(session, n_gram);
                clock.advance(config.time.voice_query);
                results = session.submit_voice(text);
            }
            ++queries;
            clock.advance(config.time.processing + config.time.selection);
            session.select(user.choose(session, results));
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::BudgetExceeded) throw;
    }
    session.poll();
    if (session.state() == SessionState::Active) session.abandon();
    tr.outcome = session.score();
    tr.log = memory.lines();
    return tr;
}

ExperimentResult run_experiment(const std::shared_ptr<const Engine>& engine, const ExperimentConfig& config) {
    const bool needs_library = std::any_of(config.strategies.begin(), config.strategies.end(),
                                           [](Strategy s) { return s != Strategy::VoicePure; });
    const SilhouetteLibrary library =
        needs_library && config.trials > 0 ? SilhouetteLibrary::build(engine->manifest()) : SilhouetteLibrary{};
    return run_experiment(engine, library, config);
}

ExperimentResult run_experiment(const std::shared_ptr<const Engine>& engine, const SilhouetteLibrary& library,
                                const ExperimentConfig& config) {
    config.noise.validate();
    for (ChairId t : config.targets)
        if (!engine->manifest().contains(t))
            throw Error(ErrorCode::NotFound, "experiment target " + std::to_string(t) + " is not in the manifest");

    ExperimentResult result;
    if (config.trials == 0) return result;
    if (engine->manifest().instance_count() == 0) throw Error(ErrorCode::EmptyIndex, "manifest has no chairs");

    struct Condition {
        Strategy strategy;
        int n_gram;
    };
    std::vector<Condition> conditions;
    for (Strategy s : config.strategies) {
        if (s == Strategy::SketchPure) conditions.push_back({s, config.n_grams.front()});
        else
            for (int n : config.n_grams) conditions.push_back({s, n});
    }

    // Common targets across conditions.
    std::vector<ChairId> targets(config.trials);
    const auto& instances = engine->manifest().instances();
    for (std::size_t t = 0; t < config.trials; ++t) {
        if (!config.targets.empty()) {
            targets[t] = config.targets[t % config.targets.size()];
        } else {
            Rng rng(derive_seed(config.seed, 0x7a26e7ULL, t));
            targets[t] = instances[uniform_index(rng, instances.size())].chair_id;
        }
    }

    const std::size_t jobs = conditions.size() * config.trials;
    result.trials.resize(jobs);
    std::string error;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t j = 0; j < jobs; ++j) {
        const auto& cond = conditions[j / config.trials];
        const std::size_t t = j % config.trials;
        const std::uint64_t stream = static_cast<std::uint64_t>(cond.strategy) * 16 + static_cast<std::uint64_t>(cond.n_gram);
        try {
            auto tr = run_trial(engine, library, cond.strategy, cond.n_gram, targets[t], config,
                                derive_seed(config.seed, stream, t));
            tr.trial = t;
            result.trials[j] = std::move(tr);
        } catch (const std::exception& e) {
#pragma omp critical(chairsearch_sim_error)
            if (error.empty()) error = e.what();
        }
    }
    if (!error.empty()) throw Error(ErrorCode::InvalidInput, "trial failed: " + error);

    for (std::size_t c = 0; c < conditions.size(); ++c) {
        MetricsRow row{conditions[c].strategy, conditions[c].n_gram};
        double time = 0, queries = 0;
        for (std::size_t t = 0; t < config.trials; ++t) {
            const auto& tr = result.trials[c * config.trials + t];
            if (tr.skipped) {
                ++row.skipped;
                continue;
            }
            ++row.trials;
            row.exact += tr.outcome.exact_success ? 1 : 0;
            row.shape += tr.outcome.shape_success ? 1 : 0;
            time += tr.outcome.elapsed;
            queries += tr.outcome.query_count;
        }
        if (row.trials > 0) {
            const auto n = static_cast<double>(row.trials);
            row.precision = static_cast<double>(row.exact) / n;
            row.precision_shape = static_cast<double>(row.shape) / n;
            row.avg_time_s = time / n;
            row.avg_query_count = queries / n;
        }
        result.table.rows.push_back(row);
    }
    return result;
}

std::vector<double> success_matrix(const ExperimentResult& result, std::size_t& rows, std::size_t& cols) {
    cols = result.table.rows.size();
    rows = cols ? result.trials.size() / cols : 0;
    std::vector<double> m(rows * cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t t = 0; t < rows; ++t)
            m[t * cols + c] = result.trials[c * rows + t].outcome.exact_success ? 1.0 : 0.0;
    return m;
}

} // namespace chairsearch
