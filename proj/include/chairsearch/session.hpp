#pragma once

#include "chairsearch/engine.hpp"
#include "chairsearch/error.hpp"
#include "chairsearch/index.hpp"
#include "chairsearch/sketch.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace chairsearch {

/// Seconds on an arbitrary monotonic axis.
class Clock {
public:
    virtual ~Clock() = default;
    [[nodiscard]] virtual double now() const = 0;
};

class ManualClock final : public Clock {
public:
    explicit ManualClock(double start = 0) : t_(start) {}
    [[nodiscard]] double now() const override { return t_; }
    void set(double t) noexcept { t_ = t; }
    void advance(double dt) noexcept { t_ += dt; }

private:
    double t_;
};

class SteadyClock final : public Clock {
public:
    [[nodiscard]] double now() const override {
        return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
    }
};

enum class Mode : std::uint8_t { VoiceOnly, SketchOnly, Hybrid };
enum class Modality : std::uint8_t { Voice, Sketch, SketchPlusModel };
enum class Phase : std::uint8_t { Input, Processing, Selection, Completed, Rejected };
enum class SessionState : std::uint8_t { Active, Succeeded, TimedOut, Abandoned };

std::string_view to_string(Mode m) noexcept;
std::string_view to_string(Modality m) noexcept;
std::string_view to_string(Phase p) noexcept;
std::string_view to_string(SessionState s) noexcept;
std::optional<Mode> mode_from_string(std::string_view s) noexcept;

inline constexpr double kSessionBudgetSeconds = 90.0;

struct QueryRecord {
    int query_id = 0;
    Modality modality = Modality::Voice;
    Phase phase = Phase::Input;
    std::string text;                 // voice payload
    std::optional<Sketch> sketch;     // sketch payload
    std::optional<ChairId> model;     // chair composited under the sketch
    ResultSet results;
    std::optional<ChairId> selection;
    double t_start = 0, t_processed = 0, t_selected = 0;
    std::string rejection;            // error code name when Rejected

    [[nodiscard]] bool terminal() const noexcept { return phase == Phase::Completed || phase == Phase::Rejected; }
};

struct Outcome {
    bool exact_success = false;
    bool shape_success = false;
    double elapsed = 0;
    int query_count = 0;      // accepted queries
    int voice_queries = 0;
    int sketch_queries = 0;
    int rejected_queries = 0;

    friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Observable session events, in order; the session log serializes these.
struct SessionEvent {
    enum class Kind : std::uint8_t { Begin, Submitted, Processed, Selected, Rejected, Edited, StateChanged };
    Kind kind;
    double t = 0;  // seconds since session start
    const QueryRecord* record = nullptr;
    std::string detail;  // edit description / state name / rejection code
};

struct SessionConfig {
    Mode mode = Mode::Hybrid;
    int n_gram = 6;
    double budget_seconds = kSessionBudgetSeconds;
};

/// One retrieval session: a serialized state machine over the engine. A query
/// moves Input -> Processing -> Selection inside submit_* and completes on select;
/// anything arriving out of turn is logged as a Rejected record and throws.
class Session {
public:
    using Listener = std::function<void(const Session&, const SessionEvent&)>;

    /// Throws NotFound for an unknown target and InvalidInput for a bad config.
    Session(std::shared_ptr<const Engine> engine, std::string session_id, ChairId target, SessionConfig config,
            const Clock& clock, Listener listener = {});

    ResultSet submit_voice(std::string_view text);
    ResultSet submit_sketch(const Sketch& sketch, bool include_current_model);
    /// Runs the current descriptor unchanged (experimenter "send").
    ResultSet submit_descriptor();
    void select(std::size_t rank);

    // Experimenter console edits of the running voice descriptor.
    void edit_level(Concept attr, int delta);
    void edit_color(PartKind part, std::optional<ColorId> color);
    void reset_descriptor();
    void sync_descriptor();

    void abandon();
    /// Marks the session TimedOut when the clock is past the budget.
    void poll();

    [[nodiscard]] Outcome score() const;

    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] const SessionConfig& config() const noexcept { return config_; }
    [[nodiscard]] ChairId target() const noexcept { return target_; }
    [[nodiscard]] ChairId current() const noexcept { return current_; }
    [[nodiscard]] const AttributeVector& descriptor() const noexcept { return descriptor_; }
    [[nodiscard]] SessionState state() const noexcept { return state_; }
    [[nodiscard]] const std::vector<QueryRecord>& log() const noexcept { return log_; }
    [[nodiscard]] const QueryRecord* in_flight() const noexcept;
    [[nodiscard]] double elapsed() const;
    [[nodiscard]] double remaining() const;
    [[nodiscard]] const Engine& engine() const noexcept { return *engine_; }

private:
    QueryRecord& open_query(Modality modality);
    void require_mutable(bool voice_path, bool sketch_path, Modality modality, std::string_view text = {});
    ResultSet finish_processing(QueryRecord& record, ResultSet results);
    [[noreturn]] void reject(Modality modality, ErrorCode code, const std::string& message, std::string text = {});
    void emit(SessionEvent::Kind kind, const QueryRecord* record = nullptr, std::string detail = {});
    void set_state(SessionState s);
    [[nodiscard]] bool over_budget() const;
    [[nodiscard]] double t() const;

    std::shared_ptr<const Engine> engine_;
    std::string id_;
    ChairId target_;
    SessionConfig config_;
    const Clock* clock_;
    Listener listener_;
    double start_;
    ChairId current_ = kPlaceholderChairId;
    AttributeVector descriptor_;
    SessionState state_ = SessionState::Active;
    std::vector<QueryRecord> log_;
    int next_query_id_ = 1;
    double end_elapsed_ = -1;  // frozen elapsed once terminal
};

} // namespace chairsearch
