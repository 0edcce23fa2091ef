#include "chairsearch/session_log.hpp"

#include "chairsearch/error.hpp"
#include "chairsearch/hash.hpp"

#include <json.hpp>

#include <sstream>

namespace chairsearch {

namespace {

using nlohmann::ordered_json;

ordered_json outcome_json(const Outcome& o) {
    return ordered_json{{"exact_success", o.exact_success}, {"shape_success", o.shape_success},
                        {"elapsed", o.elapsed},             {"query_count", o.query_count},
                        {"voice_queries", o.voice_queries}, {"sketch_queries", o.sketch_queries},
                        {"rejected_queries", o.rejected_queries}};
}

Outcome outcome_from_json(const nlohmann::json& j) {
    Outcome o;
    o.exact_success = j.at("exact_success").get<bool>();
    o.shape_success = j.at("shape_success").get<bool>();
    o.elapsed = j.at("elapsed").get<double>();
    o.query_count = j.at("query_count").get<int>();
    o.voice_queries = j.at("voice_queries").get<int>();
    o.sketch_queries = j.at("sketch_queries").get<int>();
    o.rejected_queries = j.at("rejected_queries").get<int>();
    return o;
}

ordered_json payload_json(const QueryRecord& r, const std::string& detail) {
    ordered_json p = ordered_json::object();
    if (detail == "descriptor") {
        p["descriptor"] = true;
    } else if (r.modality == Modality::Voice) {
        p["text"] = r.text;
    } else {
        if (r.sketch) p["sketch"] = nlohmann::json(*r.sketch);
        p["model"] = r.model ? ordered_json(*r.model) : ordered_json(nullptr);
    }
    return p;
}

ordered_json results_json(const ResultSet& results) {
    auto arr = ordered_json::array();
    for (const auto& n : results) arr.push_back(ordered_json::array({n.chair_id, n.distance}));
    return arr;
}

std::vector<std::string> split_words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

} // namespace

std::string event_line(const Session& session, const SessionEvent& event) {
    ordered_json j;
    const QueryRecord* r = event.record;
    switch (event.kind) {
        case SessionEvent::Kind::Begin:
            j["event"] = "session";
            j["session_id"] = session.id();
            j["mode"] = to_string(session.config().mode);
            j["target"] = session.target();
            j["n_gram"] = session.config().n_gram;
            j["budget_s"] = session.config().budget_seconds;
            j["dictionary"] = session.engine().dictionary().checksum();
            break;
        case SessionEvent::Kind::Submitted: {
            j["event"] = "submitted";
            j["query_id"] = r->query_id;
            j["modality"] = to_string(r->modality);
            auto payload = payload_json(*r, event.detail);
            j["digest"] = to_hex(fnv1a(payload.dump()));
            j["payload"] = std::move(payload);
            break;
        }
        case SessionEvent::Kind::Processed:
            j["event"] = "processed";
            j["query_id"] = r->query_id;
            j["results"] = results_json(r->results);
            break;
        case SessionEvent::Kind::Selected:
            j["event"] = "selected";
            j["query_id"] = r->query_id;
            j["rank"] = std::stoi(event.detail);
            j["chair_id"] = *r->selection;
            break;
        case SessionEvent::Kind::Rejected:
            j["event"] = "rejected";
            j["query_id"] = r->query_id;
            j["modality"] = to_string(r->modality);
            j["reason"] = r->rejection;
            if (r->modality == Modality::Voice && !r->text.empty()) j["payload"] = ordered_json{{"text", r->text}};
            break;
        case SessionEvent::Kind::Edited: {
            j["event"] = "edited";
            const auto w = split_words(event.detail);
            j["op"] = w.at(0);
            if (w[0] == "level") {
                j["concept"] = w.at(1);
                j["delta"] = std::stoi(w.at(2));
            } else if (w[0] == "color") {
                j["part"] = w.at(1);
                j["color"] = w.at(2);
            }
            break;
        }
        case SessionEvent::Kind::StateChanged:
            j["event"] = "state";
            j["state"] = event.detail;
            j["outcome"] = outcome_json(session.score());
            break;
    }
    j["t"] = event.t;
    return j.dump();
}

std::shared_ptr<SessionLogWriter> SessionLogWriter::open_file(const std::filesystem::path& path) {
    auto out = std::make_unique<std::ofstream>(path, std::ios::out | std::ios::app);
    auto writer = std::make_shared<SessionLogWriter>(std::move(out));
    if (!*writer->out_) writer->degraded_ = true;
    return writer;
}

void SessionLogWriter::write(const Session& session, const SessionEvent& event) {
    std::lock_guard lock(mutex_);
    if (degraded_ || !out_) return;
    *out_ << event_line(session, event) << '\n';
    out_->flush();
    if (!*out_) degraded_ = true;
}

bool SessionLogWriter::degraded() const noexcept {
    std::lock_guard lock(mutex_);
    return degraded_;
}

Session::Listener SessionLogWriter::listener() {
    return [this](const Session& s, const SessionEvent& e) { write(s, e); };
}

Session::Listener MemoryLog::listener() {
    return [this](const Session& s, const SessionEvent& e) { lines_.push_back(event_line(s, e)); };
}

std::string MemoryLog::text() const {
    std::string out;
    for (const auto& l : lines_) out += l + '\n';
    return out;
}

ReplayReport replay_log(std::istream& in, std::shared_ptr<const Engine> engine) {
    ReplayReport report;
    ManualClock clock(0);
    MemoryLog memory;
    std::unique_ptr<Session> session;
    ResultSet last_results;
    std::string line;
    std::size_t line_no = 0;

    auto fail = [&](const std::string& msg) -> Error {
        return Error(ErrorCode::InvalidInput, "log line " + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            const auto event = j.at("event").get<std::string>();
            if (!session) {
                if (event != "session") throw fail("log must start with a session header");
                if (j.at("dictionary").get<std::string>() != engine->dictionary().checksum())
                    throw Error(ErrorCode::ChecksumMismatch, "log was recorded with a different dictionary");
                const auto mode = mode_from_string(j.at("mode").get<std::string>());
                if (!mode) throw fail("unknown mode");
                SessionConfig cfg{*mode, j.at("n_gram").get<int>(), j.at("budget_s").get<double>()};
                session = std::make_unique<Session>(engine, j.at("session_id").get<std::string>(),
                                                    j.at("target").get<ChairId>(), cfg, clock, memory.listener());
                continue;
            }
            if (event == "session") throw fail("duplicate session header");
            clock.set(j.at("t").get<double>());

            if (event == "submitted") {
                ++report.queries;
                const auto& p = j.at("payload");
                const auto modality = j.at("modality").get<std::string>();
                if (p.contains("descriptor")) {
                    last_results = session->submit_descriptor();
                } else if (modality == "voice") {
                    last_results = session->submit_voice(p.at("text").get<std::string>());
                } else {
                    last_results = session->submit_sketch(p.at("sketch").get<Sketch>(), modality == "sketch+model");
                }
            } else if (event == "processed") {
                ResultSet recorded;
                for (const auto& n : j.at("results"))
                    recorded.push_back({n.at(0).get<ChairId>(), n.at(1).get<double>()});
                if (recorded != last_results) ++report.result_mismatches;
            } else if (event == "selected") {
                session->select(j.at("rank").get<std::size_t>());
            } else if (event == "rejected") {
                const auto modality = j.at("modality").get<std::string>();
                std::optional<ErrorCode> code;
                try {
                    if (modality == "voice") {
                        std::string text = j.contains("payload") ? j["payload"].at("text").get<std::string>() : "";
                        session->submit_voice(text);
                    } else {
                        // The payload is not kept; an invalid stroke reproduces an invalid-input rejection
                        // and any earlier check fires first.
                        Sketch bad;
                        bad.strokes.push_back(Stroke{});
                        session->submit_sketch(bad, modality == "sketch+model");
                    }
                } catch (const Error& e) {
                    code = e.code();
                }
                if (!code) throw fail("recorded rejection was accepted on replay");
                if (to_string(*code) != j.at("reason").get<std::string>()) ++report.result_mismatches;
            } else if (event == "edited") {
                const auto op = j.at("op").get<std::string>();
                if (op == "level") {
                    const auto c = concept_from_id(j.at("concept").get<std::string>());
                    if (!c) throw fail("unknown concept");
                    session->edit_level(*c, j.at("delta").get<int>());
                } else if (op == "color") {
                    const auto part = part_from_name(j.at("part").get<std::string>());
                    if (!part) throw fail("unknown part");
                    const auto cname = j.at("color").get<std::string>();
                    std::optional<ColorId> color;
                    if (cname != "none") {
                        color = color_from_name(cname);
                        if (!color) throw fail("unknown color");
                    }
                    session->edit_color(*part, color);
                } else if (op == "reset") {
                    session->reset_descriptor();
                } else if (op == "sync") {
                    session->sync_descriptor();
                } else {
                    throw fail("unknown edit op");
                }
            } else if (event == "state") {
                const auto state = j.at("state").get<std::string>();
                if (state == "timed-out") session->poll();
                else if (state == "abandoned") session->abandon();
                report.recorded = outcome_from_json(j.at("outcome"));
            } else {
                throw fail("unknown event '" + event + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw fail(e.what());
        }
    }
    if (!session) throw Error(ErrorCode::InvalidInput, "log has no session header");
    report.replayed = session->score();
    report.replayed_lines = memory.lines();
    return report;
}

} // namespace chairsearch
