#pragma once

#include "chairsearch/session.hpp"
#include "chairsearch/stats.hpp"
#include "chairsearch/text_query.hpp"

#include <json.hpp>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace chairsearch {

enum class Strategy : std::uint8_t {
    VoicePure,
    SketchPure,
    HybridA,  // sketch for the shape, then voice for the colors
    HybridB,  // sketch, select, then voice refinement and colors
    HybridC,  // voice for the shape, sketch details on the selection, voice for the colors
};

std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> strategy_from_string(std::string_view s) noexcept;
Mode session_mode(Strategy s) noexcept;

struct NoiseProfile {
    double confusion = 0.4;         // p_c: a spoken lemma becomes a random sibling
    double misassociation = 0.9;    // p_m: a part is sketched in another part's color
    double sketch_jitter = 0.04;    // max stroke point displacement per axis

    void validate() const;
};

/// Simulated seconds charged per action.
struct TimeModel {
    double voice_query = 10.0;
    double sketch_base = 2.0;
    double sketch_per_stroke = 0.5;
    double selection = 3.0;
    double processing = 1.0;
};

using Rng = std::mt19937_64;

/// Per-shape strokes that trace a chair's parts: one or more medial strokes per
/// connected mesh component, sized to its cross-section, colored per part.
class SilhouetteLibrary {
public:
    struct PartStroke {
        PartKind part;
        std::vector<Vec3> points;
        double width;
    };

    static SilhouetteLibrary build(const DatasetManifest& manifest);
    static std::vector<PartStroke> trace(const ChairShape& shape);

    /// Throws NotFound when the shape has no entry or an empty one.
    [[nodiscard]] const std::vector<PartStroke>& strokes(int shape_id) const;
    void set(int shape_id, std::vector<PartStroke> strokes) { entries_[shape_id] = std::move(strokes); }

private:
    std::map<int, std::vector<PartStroke>> entries_;
};

/// Noise-free sketch of a chair with its own part colors.
Sketch oracle_sketch(const SilhouetteLibrary& library, const ChairInstance& chair);

class SimUser {
public:
    SimUser(Strategy strategy, NoiseProfile noise, std::uint64_t seed);

    /// Up to `n` content lemmas closing the largest current-vs-target differences,
    /// followed by the terminator. After a round that left the current chair
    /// unchanged the user starts further down the list of differences.
    std::string voice_step(const Session& session, int n);

    struct SketchQuery {
        Sketch sketch;
        bool include_current_model = false;
    };
    SketchQuery sketch_step(const Session& session, const SilhouetteLibrary& library);

    /// Rank of the result the user picks: the target, else the closest-looking
    /// chair of the target shape, else the closest-looking chair of a shape the
    /// user has not already held and discarded.
    std::size_t choose(const Session& session, const ResultSet& results);

    [[nodiscard]] Strategy strategy() const noexcept { return strategy_; }
    [[nodiscard]] Rng& rng() noexcept { return rng_; }

private:
    std::string corrupt(const Token& token, const Dictionary& dictionary);

    Strategy strategy_;
    NoiseProfile noise_;
    Rng rng_;
    std::optional<ChairId> last_current_;
    std::set<int> ruled_out_;  // wrong shapes the user has held
    int stall_ = 0;  // consecutive voice steps starting from the same chair
};

struct ExperimentConfig {
    std::vector<Strategy> strategies{Strategy::VoicePure, Strategy::SketchPure, Strategy::HybridA,
                                     Strategy::HybridB, Strategy::HybridC};
    std::vector<int> n_grams{6};
    std::size_t trials = 0;
    std::vector<ChairId> targets;  // empty: sample uniformly from the manifest per trial
    std::uint64_t seed = 1;
    NoiseProfile noise;
    TimeModel time;
    double budget_seconds = kSessionBudgetSeconds;
    std::size_t max_queries = 1000;  // safety stop per trial
    bool keep_logs = false;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct MetricsRow {
    Strategy strategy;
    int n_gram = 6;
    std::size_t trials = 0;
    std::size_t skipped = 0;
    std::size_t exact = 0;
    std::size_t shape = 0;
    double precision = 0;
    double precision_shape = 0;
    double avg_time_s = 0;
    double avg_query_count = 0;
};

struct MetricsTable {
    std::vector<MetricsRow> rows;

    [[nodiscard]] const MetricsRow* find(Strategy s, int n_gram) const noexcept;
    /// Tab-separated with a header line.
    [[nodiscard]] std::string to_tsv() const;
    friend bool operator==(const MetricsTable& a, const MetricsTable& b) { return a.to_tsv() == b.to_tsv(); }
};

struct TrialResult {
    Strategy strategy;
    int n_gram;
    std::size_t trial;
    ChairId target;
    bool skipped = false;
    std::string skip_reason;
    Outcome outcome;
    std::vector<std::string> log;  // when keep_logs
};

struct ExperimentResult {
    MetricsTable table;
    std::vector<TrialResult> trials;  // condition-major, trial-minor
};

/// Runs one trial on a fresh session with a simulated clock.
TrialResult run_trial(const std::shared_ptr<const Engine>& engine, const SilhouetteLibrary& library,
                      Strategy strategy, int n_gram, ChairId target, const ExperimentConfig& config,
                      std::uint64_t seed);

/// Conditions are strategies x n-grams (n-gram only varies voice-bearing strategies).
/// Throws NotFound when a configured target is not in the manifest.
ExperimentResult run_experiment(const std::shared_ptr<const Engine>& engine, const ExperimentConfig& config);
ExperimentResult run_experiment(const std::shared_ptr<const Engine>& engine, const SilhouetteLibrary& library,
                                const ExperimentConfig& config);

/// Trials x conditions success matrix (1 = exact success) for the conditions in table order.
std::vector<double> success_matrix(const ExperimentResult& result, std::size_t& rows, std::size_t& cols);

/// Seed of trial `trial` in condition `condition`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) noexcept;

} // namespace chairsearch
