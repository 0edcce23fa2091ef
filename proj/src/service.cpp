#include "chairsearch/service.hpp"

#include "chairsearch/error.hpp"
#include "chairsearch/render.hpp"

#include <httplib.h>
#include <json.hpp>

namespace chairsearch {

using nlohmann::json;

void ServiceConfig::validate() const {
    auto must_exist = [](const std::filesystem::path& p, const char* what) {
        if (!p.empty() && !std::filesystem::exists(p))
            throw Error(ErrorCode::InvalidInput, std::string(what) + " does not exist: " + p.string());
    };
    must_exist(manifest_path, "manifest");
    must_exist(dictionary_path, "dictionary");
    must_exist(log_dir, "log directory");
    must_exist(static_dir, "static directory");
    if (budget_seconds && !(*budget_seconds > 0)) throw Error(ErrorCode::InvalidInput, "budget must be positive");
    if (port < 0 || port > 65535) throw Error(ErrorCode::InvalidInput, "port out of range");
}

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidInput:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::OutOfRange: return 400;
        case ErrorCode::NotFound: return 404;
        case ErrorCode::ModeViolation:
        case ErrorCode::QueryInFlight:
        case ErrorCode::BudgetExceeded:
        case ErrorCode::NoPendingSelection:
        case ErrorCode::SessionClosed: return 409;
        case ErrorCode::EmptyIndex: return 503;
        case ErrorCode::Io:
        case ErrorCode::VersionMismatch:
        case ErrorCode::ChecksumMismatch: return 500;
    }
    return 500;
}

struct Service::Entry {
    std::mutex mutex;
    MemoryLog memory;
    std::shared_ptr<SessionLogWriter> writer;
    std::unique_ptr<Session> session;
};

namespace {

json error_body(std::string_view code, const std::string& message) {
    return json{{"error", {{"code", code}, {"message", message}}}};
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::InvalidInput, "request body is not valid JSON");
    if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "request body must be a JSON object");
    return j;
}

std::string snapshot_url(ChairId id) { return "/api/chairs/" + std::to_string(id) + "/snapshot/0.png"; }

json results_json(const ResultSet& results) {
    auto arr = json::array();
    for (std::size_t r = 0; r < results.size(); ++r)
        arr.push_back({{"rank", r},
                       {"chair_id", results[r].chair_id},
                       {"distance", results[r].distance},
                       {"snapshot_url", snapshot_url(results[r].chair_id)}});
    return arr;
}

json outcome_json(const Outcome& o) {
    return {{"exact_success", o.exact_success}, {"shape_success", o.shape_success},
            {"elapsed_s", o.elapsed},           {"query_count", o.query_count},
            {"voice_queries", o.voice_queries}, {"sketch_queries", o.sketch_queries},
            {"rejected_queries", o.rejected_queries}};
}

json descriptor_json(const AttributeVector& v) {
    json colors = json::object();
    for (PartKind p : kAllParts) {
        const auto c = v.color(p);
        colors[std::string(name(p))] = c ? json(std::string(name(*c))) : json(nullptr);
    }
    json levels = json::object();
    for (int c = 0; c < kConceptCount; ++c)
        levels[std::string(concept_id(static_cast<Concept>(c)))] = v.level(static_cast<Concept>(c));
    return {{"colors", colors}, {"levels", levels}};
}

json state_json(const Session& s, bool degraded) {
    json j{{"session_id", s.id()},
           {"mode", to_string(s.config().mode)},
           {"state", to_string(s.state())},
           {"n_gram", s.config().n_gram},
           {"target", s.target()},
           {"target_url", "/api/sessions/" + s.id() + "/target/0.png"},
           {"current", s.current()},
           {"current_url", snapshot_url(s.current())},
           {"budget_s", s.config().budget_seconds},
           {"elapsed_s", s.elapsed()},
           {"remaining_s", s.remaining()},
           {"descriptor", descriptor_json(s.descriptor())},
           {"outcome", outcome_json(s.score())},
           {"log_degraded", degraded}};
    if (const auto* q = s.in_flight())
        j["in_flight"] = {{"query_id", q->query_id},
                          {"modality", to_string(q->modality)},
                          {"phase", to_string(q->phase)},
                          {"results", results_json(q->results)}};
    else
        j["in_flight"] = nullptr;
    return j;
}

template <class T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorCode::InvalidInput, std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::InvalidInput, std::string("field '") + key + "' has the wrong type");
    }
}

int view_from(const std::string& s) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidInput, "bad view index '" + s + "'");
}

ChairId chair_from(const std::string& s) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidInput, "bad chair id '" + s + "'");
}

} // namespace

Service::Service(std::shared_ptr<const Engine> engine, ServiceConfig config)
    : engine_(std::move(engine)), config_(std::move(config)), target_rng_(config_.seed) {
    if (!engine_) throw Error(ErrorCode::InvalidInput, "service needs an engine");
    config_.validate();
}

Service::~Service() = default;

std::shared_ptr<Service::Entry> Service::find(const std::string& id) const {
    std::lock_guard lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "unknown session '" + id + "'");
    return it->second;
}

std::shared_ptr<Service::Entry> Service::create(const std::string& body) {
    httplib::Request fake;
    fake.body = body;
    const json j = parse_body(fake);

    SessionConfig cfg;
    if (j.contains("mode")) {
        const auto m = mode_from_string(field<std::string>(j, "mode"));
        if (!m) throw Error(ErrorCode::InvalidInput, "mode must be voice, sketch or hybrid");
        cfg.mode = *m;
    }
    if (j.contains("n_gram")) cfg.n_gram = field<int>(j, "n_gram");
    if (config_.budget_seconds) cfg.budget_seconds = *config_.budget_seconds;

    auto entry = std::make_shared<Entry>();
    std::lock_guard lock(registry_mutex_);
    ChairId target;
    if (j.contains("target") && !j["target"].is_null()) {
        target = field<ChairId>(j, "target");
        if (!engine_->manifest().contains(target))
            throw Error(ErrorCode::NotFound, "unknown target chair " + std::to_string(target));
    } else {
        const auto& inst = engine_->manifest().instances();
        if (inst.empty()) throw Error(ErrorCode::EmptyIndex, "manifest has no chairs");
        target = inst[static_cast<std::size_t>(target_rng_() % inst.size())].chair_id;
    }

    std::string id;
    do {
        id = "s" + std::to_string(next_session_++);
    } while (sessions_.contains(id) || (!config_.log_dir.empty() && std::filesystem::exists(config_.log_dir / (id + ".jsonl"))));

    if (!config_.log_dir.empty()) entry->writer = SessionLogWriter::open_file(config_.log_dir / (id + ".jsonl"));
    auto memory = entry->memory.listener();
    auto writer = entry->writer;
    Session::Listener listener = [memory, writer](const Session& s, const SessionEvent& e) {
        memory(s, e);
        if (writer) writer->write(s, e);
    };
    const Clock& clock = config_.clock ? *config_.clock : static_cast<const Clock&>(steady_);
    entry->session = std::make_unique<Session>(engine_, id, target, cfg, clock, std::move(listener));
    sessions_.emplace(id, entry);
    return entry;
}

std::string Service::chair_png(ChairId id, int view) {
    const auto key = std::make_pair(id, view);
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = png_cache_.find(key); it != png_cache_.end()) return it->second;
    }
    std::string png = encode_png(engine_->chair_snapshot(id, view));
    std::lock_guard lock(cache_mutex_);
    return png_cache_.emplace(key, std::move(png)).first->second;
}

std::size_t Service::session_count() const {
    std::lock_guard lock(registry_mutex_);
    return sessions_.size();
}

bool Service::log_degraded(const std::string& session_id) const {
    auto e = find(session_id);
    return e->writer && e->writer->degraded();
}

void Service::mount(httplib::Server& server) {
    // Runs `fn` and maps engine errors onto the JSON error body.
    auto guard = [](auto fn) {
        return [fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const Error& e) {
                send_json(res, http_status(e.code()), error_body(to_string(e.code()), e.what()));
            } catch (const json::exception& e) {
                send_json(res, 400, error_body(to_string(ErrorCode::InvalidInput), e.what()));
            } catch (const std::exception& e) {
                send_json(res, 500, error_body("internal", e.what()));
            }
        };
    };
    // Locks the session named by the first path capture and hands it over.
    auto with_session = [this, guard](auto fn) {
        return guard([this, fn](const httplib::Request& req, httplib::Response& res) {
            auto entry = find(req.matches[1].str());
            std::lock_guard lock(entry->mutex);
            fn(*entry, req, res);
        });
    };
    auto degraded = [](const Entry& e) { return e.writer && e.writer->degraded(); };

    server.Get("/api/health", guard([this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"status", "ok"}, {"chairs", engine_->manifest().instance_count()},
                             {"dictionary", engine_->dictionary().checksum()}});
    }));

    server.Get("/api/dictionary", guard([this](const httplib::Request&, httplib::Response& res) {
        const auto& d = engine_->dictionary();
        json concepts = json::array();
        for (const auto& c : d.concepts())
            concepts.push_back({{"id", concept_id(c.attr)}, {"synonyms", c.synonyms}, {"antonyms", c.antonyms}});
        json parts = json::array(), colors = json::array();
        for (const auto& g : d.parts()) parts.push_back({{"id", name(static_cast<PartKind>(g.id))}, {"words", g.words}});
        for (const auto& g : d.colors()) colors.push_back({{"id", name(static_cast<ColorId>(g.id))}, {"words", g.words}});
        send_json(res, 200, {{"version", d.version()},   {"checksum", d.checksum()},
                             {"terminator", d.terminator()}, {"parts", parts},
                             {"colors", colors},         {"concepts", concepts},
                             {"negations", d.negations()}, {"stop_words", d.stop_words()}});
    }));

    server.Post("/api/sessions", guard([this, degraded](const httplib::Request& req, httplib::Response& res) {
        auto entry = create(req.body);
        std::lock_guard lock(entry->mutex);
        send_json(res, 201, state_json(*entry->session, degraded(*entry)));
    }));

    server.Get(R"(/api/sessions/([^/]+))", with_session([degraded](Entry& e, const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, state_json(*e.session, degraded(e)));
    }));

    server.Get(R"(/api/sessions/([^/]+)/log)", with_session([](Entry& e, const httplib::Request&, httplib::Response& res) {
        res.status = 200;
        res.set_content(e.memory.text(), "application/x-ndjson");
    }));

    auto query_reply = [](const Session& s, const ResultSet& results) {
        return json{{"query_id", s.log().back().query_id}, {"results", results_json(results)}};
    };

    server.Post(R"(/api/sessions/([^/]+)/voice)",
                with_session([query_reply](Entry& e, const httplib::Request& req, httplib::Response& res) {
                    const json j = parse_body(req);
                    const auto text = field<std::string>(j, "text");
                    const auto results = e.session->submit_voice(text);
                    send_json(res, 200, query_reply(*e.session, results));
                }));

    server.Post(R"(/api/sessions/([^/]+)/sketch)",
                with_session([query_reply](Entry& e, const httplib::Request& req, httplib::Response& res) {
                    const json j = parse_body(req);
                    Sketch sketch;
                    try {
                        sketch = j.at("strokes").get<Sketch>();
                    } catch (const json::exception& ex) {
                        throw Error(ErrorCode::InvalidInput, std::string("bad strokes: ") + ex.what());
                    }
                    const bool include = j.contains("include_model") ? field<bool>(j, "include_model") : false;
                    const auto results = e.session->submit_sketch(sketch, include);
                    send_json(res, 200, query_reply(*e.session, results));
                }));

    server.Post(R"(/api/sessions/([^/]+)/select)",
                with_session([degraded](Entry& e, const httplib::Request& req, httplib::Response& res) {
                    const json j = parse_body(req);
                    const auto rank = field<long long>(j, "rank");
                    if (rank < 0) throw Error(ErrorCode::OutOfRange, "rank must be non-negative");
                    e.session->select(static_cast<std::size_t>(rank));
                    send_json(res, 200, state_json(*e.session, degraded(e)));
                }));

    server.Post(R"(/api/sessions/([^/]+)/abandon)",
                with_session([degraded](Entry& e, const httplib::Request&, httplib::Response& res) {
                    e.session->abandon();
                    send_json(res, 200, state_json(*e.session, degraded(e)));
                }));

    server.Post(R"(/api/sessions/([^/]+)/experimenter/level)",
                with_session([degraded](Entry& e, const httplib::Request& req, httplib::Response& res) {
                    const json j = parse_body(req);
                    const auto c = concept_from_id(field<std::string>(j, "concept"));
                    if (!c) throw Error(ErrorCode::InvalidInput, "unknown concept");
                    e.session->edit_level(*c, field<int>(j, "delta"));
                    send_json(res, 200, state_json(*e.session, degraded(e)));
                }));

    server.Post(R"(/api/sessions/([^/]+)/experimenter/color)",
                with_session([degraded](Entry& e, const httplib::Request& req, httplib::Response& res) {
                    const json j = parse_body(req);
                    const auto part = part_from_name(field<std::string>(j, "part"));
                    if (!part) throw Error(ErrorCode::InvalidInput, "unknown part");
                    std::optional<ColorId> color;
                    if (!j.contains("color")) throw Error(ErrorCode::InvalidInput, "missing field 'color'");
                    if (!j["color"].is_null()) {
                        color = color_from_name(field<std::string>(j, "color"));
                        if (!color) throw Error(ErrorCode::InvalidInput, "unknown color");
                    }
                    e.session->edit_color(*part, color);
                    send_json(res, 200, state_json(*e.session, degraded(e)));
                }));

    server.Post(R"(/api/sessions/([^/]+)/experimenter/reset)",
                with_session([degraded](Entry& e, const httplib::Request&, httplib::Response& res) {
                    e.session->reset_descriptor();
                    send_json(res, 200, state_json(*e.session, degraded(e)));
                }));

    server.Post(R"(/api/sessions/([^/]+)/experimenter/sync)",
                with_session([degraded](Entry& e, const httplib::Request&, httplib::Response& res) {
                    e.session->sync_descriptor();
                    send_json(res, 200, state_json(*e.session, degraded(e)));
                }));

    server.Post(R"(/api/sessions/([^/]+)/experimenter/send)",
                with_session([query_reply](Entry& e, const httplib::Request&, httplib::Response& res) {
                    const auto results = e.session->submit_descriptor();
                    send_json(res, 200, query_reply(*e.session, results));
                }));

    server.Get(R"(/api/sessions/([^/]+)/target/(\d+)\.png)",
               guard([this](const httplib::Request& req, httplib::Response& res) {
                   ChairId target;
                   {
                       auto entry = find(req.matches[1].str());
                       std::lock_guard lock(entry->mutex);
                       target = entry->session->target();
                   }
                   const auto png = chair_png(target, view_from(req.matches[2].str()));
                   res.status = 200;
                   res.set_content(png, "image/png");
               }));

    server.Get(R"(/api/chairs/(-?\d+)/snapshot/(\d+)\.png)",
               guard([this](const httplib::Request& req, httplib::Response& res) {
                   const auto png = chair_png(chair_from(req.matches[1].str()), view_from(req.matches[2].str()));
                   res.status = 200;
                   res.set_content(png, "image/png");
               }));

    server.Get(R"(/api/chairs/(-?\d+))", guard([this](const httplib::Request& req, httplib::Response& res) {
        const ChairId id = chair_from(req.matches[1].str());
        const auto& inst = engine_->instance(id);
        json colors = json::object();
        for (PartKind p : kAllParts) {
            const auto c = inst.assignment[p];
            colors[std::string(name(p))] = c ? json(std::string(name(*c))) : json(nullptr);
        }
        send_json(res, 200, {{"chair_id", id}, {"shape_id", inst.shape_id}, {"colors", colors},
                             {"descriptor", descriptor_json(engine_->semantic(id))}});
    }));

    if (!config_.static_dir.empty() && !server.set_mount_point("/", config_.static_dir.string()))
        throw Error(ErrorCode::Io, "cannot serve static directory " + config_.static_dir.string());
}

void Service::listen() {
    server_ = std::make_unique<httplib::Server>();
    mount(*server_);
    if (!server_->listen(config_.host, config_.port))
        throw Error(ErrorCode::Io, "cannot listen on " + config_.host + ":" + std::to_string(config_.port));
}

void Service::stop() {
    if (server_) server_->stop();
}

} // namespace chairsearch
