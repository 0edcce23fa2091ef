#include "chairsearch/session.hpp"

#include "chairsearch/error.hpp"
#include "chairsearch/text_query.hpp"

#include <algorithm>

namespace chairsearch {

std::string_view to_string(Mode m) noexcept {
    switch (m) {
        case Mode::VoiceOnly: return "voice";
        case Mode::SketchOnly: return "sketch";
        case Mode::Hybrid: return "hybrid";
    }
    return "unknown";
}

std::optional<Mode> mode_from_string(std::string_view s) noexcept {
    for (Mode m : {Mode::VoiceOnly, Mode::SketchOnly, Mode::Hybrid})
        if (to_string(m) == s) return m;
    return std::nullopt;
}

std::string_view to_string(Modality m) noexcept {
    switch (m) {
        case Modality::Voice: return "voice";
        case Modality::Sketch: return "sketch";
        case Modality::SketchPlusModel: return "sketch+model";
    }
    return "unknown";
}

std::string_view to_string(Phase p) noexcept {
    switch (p) {
        case Phase::Input: return "input";
        case Phase::Processing: return "processing";
        case Phase::Selection: return "selection";
        case Phase::Completed: return "completed";
        case Phase::Rejected: return "rejected";
    }
    return "unknown";
}

std::string_view to_string(SessionState s) noexcept {
    switch (s) {
        case SessionState::Active: return "active";
        case SessionState::Succeeded: return "succeeded";
        case SessionState::TimedOut: return "timed-out";
        case SessionState::Abandoned: return "abandoned";
    }
    return "unknown";
}

Session::Session(std::shared_ptr<const Engine> engine, std::string session_id, ChairId target, SessionConfig config,
                 const Clock& clock, Listener listener)
    : engine_(std::move(engine)),
      id_(std::move(session_id)),
      target_(target),
      config_(config),
      clock_(&clock),
      listener_(std::move(listener)),
      start_(clock.now()) {
    if (!engine_) throw Error(ErrorCode::InvalidInput, "session needs an engine");
    if (!engine_->manifest().contains(target_))
        throw Error(ErrorCode::NotFound, "unknown target chair " + std::to_string(target_));
    if (config_.n_gram != 2 && config_.n_gram != 4 && config_.n_gram != 6)
        throw Error(ErrorCode::InvalidInput, "n-gram size must be 2, 4 or 6");
    if (!(config_.budget_seconds > 0)) throw Error(ErrorCode::InvalidInput, "budget must be positive");
    descriptor_ = engine_->semantic(current_);
    emit(SessionEvent::Kind::Begin);
}

double Session::t() const { return clock_->now() - start_; }

bool Session::over_budget() const { return t() > config_.budget_seconds; }

double Session::elapsed() const {
    if (end_elapsed_ >= 0) return end_elapsed_;
    return std::min(t(), config_.budget_seconds);
}

double Session::remaining() const {
    if (state_ != SessionState::Active) return state_ == SessionState::TimedOut ? 0.0 : config_.budget_seconds - elapsed();
    return std::max(0.0, config_.budget_seconds - t());
}

const QueryRecord* Session::in_flight() const noexcept {
    for (auto it = log_.rbegin(); it != log_.rend(); ++it)
        if (!it->terminal()) return &*it;
    return nullptr;
}

void Session::emit(SessionEvent::Kind kind, const QueryRecord* record, std::string detail) {
    if (!listener_) return;
    listener_(*this, SessionEvent{kind, kind == SessionEvent::Kind::Begin ? 0.0 : t(), record, std::move(detail)});
}

void Session::set_state(SessionState s) {
    state_ = s;
    if (s == SessionState::TimedOut) end_elapsed_ = config_.budget_seconds;
    else if (s != SessionState::Active) end_elapsed_ = std::min(t(), config_.budget_seconds);
    emit(SessionEvent::Kind::StateChanged, nullptr, std::string(to_string(s)));
}

void Session::poll() {
    if (state_ == SessionState::Active && over_budget()) set_state(SessionState::TimedOut);
}

void Session::require_mutable(bool voice_path, bool sketch_path, Modality modality, std::string_view text) {
    poll();
    if (state_ == SessionState::TimedOut) throw Error(ErrorCode::BudgetExceeded, "session budget exhausted");
    if (state_ != SessionState::Active)
        throw Error(ErrorCode::SessionClosed, "session is " + std::string(to_string(state_)));
    const bool allowed = (voice_path && config_.mode != Mode::SketchOnly) || (sketch_path && config_.mode != Mode::VoiceOnly);
    if (!allowed)
        reject(modality, ErrorCode::ModeViolation,
               std::string(to_string(modality)) + " input not allowed in " + std::string(to_string(config_.mode)) + " mode",
               std::string(text));
    if (in_flight()) reject(modality, ErrorCode::QueryInFlight, "a query is awaiting selection", std::string(text));
}

void Session::reject(Modality modality, ErrorCode code, const std::string& message, std::string text) {
    QueryRecord r;
    r.query_id = next_query_id_++;
    r.modality = modality;
    r.phase = Phase::Rejected;
    r.t_start = t();
    r.rejection = std::string(to_string(code));
    r.text = std::move(text);
    log_.push_back(std::move(r));
    emit(SessionEvent::Kind::Rejected, &log_.back(), log_.back().rejection);
    throw Error(code, message);
}

QueryRecord& Session::open_query(Modality modality) {
    QueryRecord r;
    r.query_id = next_query_id_++;
    r.modality = modality;
    r.phase = Phase::Input;
    r.t_start = t();
    log_.push_back(std::move(r));
    return log_.back();
}

ResultSet Session::finish_processing(QueryRecord& record, ResultSet results) {
    record.results = std::move(results);
    record.t_processed = t();
    record.phase = Phase::Selection;
    emit(SessionEvent::Kind::Processed, &record);
    return record.results;
}

ResultSet Session::submit_voice(std::string_view text) {
    require_mutable(true, false, Modality::Voice, text);
    if (code_point_count(text) > kMaxUtteranceChars)
        reject(Modality::Voice, ErrorCode::InvalidInput, "utterance longer than 200 characters", std::string(text));
    QueryRecord& rec = open_query(Modality::Voice);
    rec.text = std::string(text);
    emit(SessionEvent::Kind::Submitted, &rec);
    rec.phase = Phase::Processing;
    descriptor_ = apply_utterance(text, config_.n_gram, descriptor_, engine_->dictionary());
    return finish_processing(rec, engine_->knn_semantic(descriptor_));
}

ResultSet Session::submit_descriptor() {
    require_mutable(true, false, Modality::Voice);
    QueryRecord& rec = open_query(Modality::Voice);
    emit(SessionEvent::Kind::Submitted, &rec, "descriptor");
    rec.phase = Phase::Processing;
    return finish_processing(rec, engine_->knn_semantic(descriptor_));
}

ResultSet Session::submit_sketch(const Sketch& sketch, bool include_current_model) {
    const Modality modality = include_current_model ? Modality::SketchPlusModel : Modality::Sketch;
    require_mutable(false, true, modality);
    try {
        sketch.validate();
    } catch (const Error& e) {
        reject(modality, e.code(), e.what());
    }
    QueryRecord& rec = open_query(modality);
    rec.sketch = sketch;
    if (include_current_model) rec.model = current_;
    emit(SessionEvent::Kind::Submitted, &rec);
    rec.phase = Phase::Processing;
    const auto descriptor = engine_->sketch_descriptor(sketch, rec.model);
    return finish_processing(rec, engine_->knn_visual(descriptor));
}

void Session::select(std::size_t rank) {
    poll();
    if (state_ == SessionState::TimedOut) throw Error(ErrorCode::BudgetExceeded, "session budget exhausted");
    if (state_ != SessionState::Active)
        throw Error(ErrorCode::SessionClosed, "session is " + std::string(to_string(state_)));
    QueryRecord* rec = nullptr;
    for (auto& r : log_)
        if (r.phase == Phase::Selection) rec = &r;
    if (!rec) throw Error(ErrorCode::NoPendingSelection, "no query is awaiting selection");
    if (rank >= rec->results.size())
        throw Error(ErrorCode::OutOfRange, "rank " + std::to_string(rank) + " outside the result panel");
    rec->selection = rec->results[rank].chair_id;
    rec->t_selected = t();
    rec->phase = Phase::Completed;
    current_ = *rec->selection;
    descriptor_ = engine_->semantic(current_);
    emit(SessionEvent::Kind::Selected, rec, std::to_string(rank));
    if (current_ == target_) set_state(SessionState::Succeeded);
}

void Session::edit_level(Concept attr, int delta) {
    require_mutable(true, false, Modality::Voice);
    descriptor_.step(attr, delta);
    emit(SessionEvent::Kind::Edited, nullptr,
         "level " + std::string(concept_id(attr)) + " " + std::to_string(delta));
}

void Session::edit_color(PartKind part, std::optional<ColorId> color) {
    require_mutable(true, false, Modality::Voice);
    descriptor_.set_color(part, color);
    emit(SessionEvent::Kind::Edited, nullptr,
         "color " + std::string(name(part)) + " " + (color ? std::string(name(*color)) : std::string("none")));
}

void Session::reset_descriptor() {
    require_mutable(true, false, Modality::Voice);
    descriptor_ = engine_->semantic(kPlaceholderChairId);
    emit(SessionEvent::Kind::Edited, nullptr, "reset");
}

void Session::sync_descriptor() {
    require_mutable(true, false, Modality::Voice);
    descriptor_ = engine_->semantic(current_);
    emit(SessionEvent::Kind::Edited, nullptr, "sync");
}

void Session::abandon() {
    poll();
    if (state_ == SessionState::Active) set_state(SessionState::Abandoned);
}

Outcome Session::score() const {
    Outcome o;
    o.exact_success = current_ == target_;
    o.shape_success = engine_->shape_of(current_).shape_id == engine_->shape_of(target_).shape_id;
    o.elapsed = elapsed();
    for (const auto& r : log_) {
        if (r.phase == Phase::Rejected) {
            ++o.rejected_queries;
            continue;
        }
        ++o.query_count;
        if (r.modality == Modality::Voice) ++o.voice_queries;
        else ++o.sketch_queries;
    }
    return o;
}

} // namespace chairsearch
