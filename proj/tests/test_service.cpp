#include "support.hpp"

#include "chairsearch/error.hpp"
#include "chairsearch/service.hpp"

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

using namespace chairsearch;
using nlohmann::json;

namespace {

// In-process server on an ephemeral loopback port.
class Harness {
public:
    explicit Harness(ServiceConfig config = {}) {
        config.clock = &clock;
        service = std::make_unique<Service>(testing::reference_engine(), std::move(config));
        service->mount(server);
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~Harness() {
        server.stop();
        thread.join();
    }

    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(60, 0);
        return c;
    }

    std::pair<int, json> post(const std::string& path, const json& body = json::object()) const {
        auto res = client().Post(path, body.dump(), "application/json");
        REQUIRE(res);
        return {res->status, res->body.empty() ? json() : json::parse(res->body)};
    }
    std::pair<int, json> get(const std::string& path) const {
        auto res = client().Get(path);
        REQUIRE(res);
        return {res->status, json::parse(res->body)};
    }

    ManualClock clock;
    std::unique_ptr<Service> service;
    httplib::Server server;
    int port = 0;
    std::thread thread;
};

const ChairId kTarget = 5 * kMaxVariations + 42;

std::string create(const Harness& h, const std::string& mode = "hybrid", int n = 6) {
    const auto [status, body] = h.post("/api/sessions", {{"mode", mode}, {"n_gram", n}, {"target", kTarget}});
    REQUIRE(status == 201);
    return body["session_id"].get<std::string>();
}

} // namespace

TEST_SUITE("service-api") {

TEST_CASE("status mapping") {
    CHECK(http_status(ErrorCode::InvalidInput) == 400);
    CHECK(http_status(ErrorCode::DimensionMismatch) == 400);
    CHECK(http_status(ErrorCode::OutOfRange) == 400);
    CHECK(http_status(ErrorCode::NotFound) == 404);
    CHECK(http_status(ErrorCode::ModeViolation) == 409);
    CHECK(http_status(ErrorCode::QueryInFlight) == 409);
    CHECK(http_status(ErrorCode::BudgetExceeded) == 409);
    CHECK(http_status(ErrorCode::NoPendingSelection) == 409);
    CHECK(http_status(ErrorCode::SessionClosed) == 409);
    CHECK(http_status(ErrorCode::EmptyIndex) == 503);
    CHECK(http_status(ErrorCode::Io) == 500);
}

TEST_CASE("config validation") {
    ServiceConfig c;
    c.budget_seconds = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c.budget_seconds = 30;
    c.manifest_path = "/nonexistent/manifest.json";
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("health and dictionary") {
    Harness h;
    const auto [s1, health] = h.get("/api/health");
    CHECK(s1 == 200);
    CHECK(health["chairs"] == 16200);
    const auto [s2, dict] = h.get("/api/dictionary");
    CHECK(s2 == 200);
    CHECK(dict["terminator"] == "stop");
    CHECK(dict["concepts"].size() == 20);
    CHECK(dict["checksum"] == Dictionary::builtin().checksum());
}

TEST_CASE("create then get state") {
    Harness h;
    const auto id = create(h);
    const auto [status, state] = h.get("/api/sessions/" + id);
    CHECK(status == 200);
    CHECK(state["state"] == "active");
    CHECK(state["budget_s"] == 90.0);
    CHECK(state["current"] == kPlaceholderChairId);
    CHECK(state["target"] == kTarget);
    CHECK(state["in_flight"].is_null());
    CHECK(state["elapsed_s"] == 0.0);

    CHECK(h.post("/api/sessions", {{"mode", "telepathy"}}).first == 400);
    CHECK(h.post("/api/sessions", {{"target", 123456789}}).first == 404);
    CHECK(h.post("/api/sessions", {{"n_gram", 5}}).first == 400);
    CHECK(h.get("/api/sessions/nope").first == 404);
    const auto [rs, random] = h.post("/api/sessions", json::object());
    CHECK(rs == 201);
    CHECK(random["session_id"] != id);
}

TEST_CASE("voice query, panel and select") {
    Harness h;
    const auto id = create(h);
    const auto [vs, reply] = h.post("/api/sessions/" + id + "/voice", {{"text", "red seat stop"}});
    CHECK(vs == 200);
    CHECK(reply["results"].size() == 5);
    const auto [gs, state] = h.get("/api/sessions/" + id);
    REQUIRE(state["in_flight"].is_object());
    CHECK(state["in_flight"]["phase"] == "selection");
    CHECK(state["in_flight"]["results"].size() == 5);
    for (const auto& r : state["in_flight"]["results"]) {
        CHECK(r.contains("snapshot_url"));
        CHECK(r["distance"].is_number());
    }
    CHECK(state["descriptor"]["colors"]["seat"] == "red");

    // Second query while the first awaits selection.
    const auto [cs, conflict] = h.post("/api/sessions/" + id + "/voice", {{"text", "blue back stop"}});
    CHECK(cs == 409);
    CHECK(conflict["error"]["code"] == "query-in-flight");

    const ChairId third = state["in_flight"]["results"][2]["chair_id"].get<ChairId>();
    const auto [ss, after] = h.post("/api/sessions/" + id + "/select", {{"rank", 2}});
    CHECK(ss == 200);
    CHECK(after["current"] == third);
    CHECK(after["in_flight"].is_null());
}

TEST_CASE("select without a pending query is a conflict") {
    Harness h;
    const auto id = create(h);
    const auto [status, body] = h.post("/api/sessions/" + id + "/select", {{"rank", 0}});
    CHECK(status == 409);
    CHECK(body["error"]["code"] == "no-pending-selection");
    CHECK(h.post("/api/sessions/" + id + "/select", {{"rank", -1}}).first == 400);
}

TEST_CASE("mode violations and malformed bodies") {
    Harness h;
    const auto id = create(h, "voice");
    const json stroke = {{"points", {{0, 0, 0}, {0.1, 0, 0}}}, {"color", 0}, {"width", 0.03}};
    auto [s1, b1] = h.post("/api/sessions/" + id + "/sketch", {{"strokes", {stroke}}});
    CHECK(s1 == 409);
    CHECK(b1["error"]["code"] == "mode-violation");
    auto res = h.client().Post("/api/sessions/" + id + "/voice", "{not json", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(h.post("/api/sessions/" + id + "/voice", {{"txt", "red"}}).first == 400);
    CHECK(h.post("/api/sessions/" + id + "/voice", {{"text", 5}}).first == 400);
}

TEST_CASE("sketch query and stroke round trip") {
    Harness h;
    const auto id = create(h, "sketch");
    Sketch sketch;
    sketch.strokes.push_back({{{-0.2, 0.1, 0.05}, {0.2, 0.1, 0.05}, {0.2, 0.4, -0.1}}, ColorId::Magenta, 0.04});
    sketch.strokes.push_back({{{0, -0.4, 0}, {0, 0, 0}}, ColorId::Cyan, 0.02});
    const json wire = sketch;
    CHECK(wire.get<Sketch>() == sketch);
    const auto [status, reply] = h.post("/api/sessions/" + id + "/sketch", {{"strokes", wire}});
    CHECK(status == 200);
    REQUIRE(reply["results"].size() == 5);
    // The service saw exactly the submitted geometry.
    auto res = h.client().Get("/api/sessions/" + id + "/log");
    REQUIRE(res);
    std::istringstream lines(res->body);
    std::string line;
    bool seen = false;
    while (std::getline(lines, line)) {
        const auto j = json::parse(line);
        if (j["event"] == "submitted") {
            CHECK(j["payload"]["sketch"].get<Sketch>() == sketch);
            seen = true;
        }
    }
    CHECK(seen);
    const auto direct = testing::reference_engine()->knn_visual(testing::reference_engine()->sketch_descriptor(sketch, std::nullopt));
    CHECK(reply["results"][0]["chair_id"] == direct[0].chair_id);

    const json bad = {{"points", {{0, 0, 0}}}, {"color", 0}, {"width", 0.03}};
    CHECK(h.post("/api/sessions/" + id + "/sketch", {{"strokes", {bad}}}).first == 409);  // still in flight
    (void)h.post("/api/sessions/" + id + "/select", {{"rank", 0}});
    const auto [bs, bb] = h.post("/api/sessions/" + id + "/sketch", {{"strokes", {bad}}});
    CHECK(bs == 400);
    CHECK(bb["error"]["code"] == "invalid-input");
}

TEST_CASE("budget is enforced through the injected clock") {
    Harness h;
    const auto id = create(h);
    h.clock.advance(91);
    const auto [status, body] = h.post("/api/sessions/" + id + "/voice", {{"text", "red seat stop"}});
    CHECK(status == 409);
    CHECK(body["error"]["code"] == "budget-exceeded");
    const auto [gs, state] = h.get("/api/sessions/" + id);
    CHECK(state["state"] == "timed-out");
    CHECK(state["remaining_s"] == 0.0);
    CHECK(state["elapsed_s"] == 90.0);
}

TEST_CASE("get-state never mutates") {
    Harness h;
    const auto id = create(h);
    (void)h.post("/api/sessions/" + id + "/voice", {{"text", "tall stop"}});
    const auto first = h.get("/api/sessions/" + id).second;
    for (int i = 0; i < 5; ++i) CHECK(h.get("/api/sessions/" + id).second == first);
    auto log1 = h.client().Get("/api/sessions/" + id + "/log")->body;
    (void)h.get("/api/sessions/" + id);
    CHECK(h.client().Get("/api/sessions/" + id + "/log")->body == log1);
}

TEST_CASE("experimenter console") {
    Harness h;
    const auto id = create(h, "voice");
    auto [s1, st1] = h.post("/api/sessions/" + id + "/experimenter/level", {{"concept", "wide"}, {"delta", 1}});
    CHECK(s1 == 200);
    CHECK(st1["descriptor"]["levels"]["wide"] == 3);
    auto [s2, st2] = h.post("/api/sessions/" + id + "/experimenter/color", {{"part", "legs"}, {"color", "green"}});
    CHECK(s2 == 200);
    CHECK(st2["descriptor"]["colors"]["legs"] == "green");
    auto [s3, st3] = h.post("/api/sessions/" + id + "/experimenter/color", {{"part", "legs"}, {"color", nullptr}});
    CHECK(st3["descriptor"]["colors"]["legs"].is_null());
    CHECK(h.post("/api/sessions/" + id + "/experimenter/color", {{"part", "wings"}, {"color", "red"}}).first == 400);
    CHECK(h.post("/api/sessions/" + id + "/experimenter/level", {{"concept", "shiny"}, {"delta", 1}}).first == 400);
    auto [s4, reply] = h.post("/api/sessions/" + id + "/experimenter/send");
    CHECK(s4 == 200);
    CHECK(reply["results"].size() == 5);
    (void)h.post("/api/sessions/" + id + "/select", {{"rank", 0}});
    CHECK(h.post("/api/sessions/" + id + "/experimenter/reset").first == 200);
    auto [s5, st5] = h.post("/api/sessions/" + id + "/experimenter/sync");
    CHECK(s5 == 200);
    CHECK(st5["descriptor"] == h.get("/api/chairs/" + std::to_string(st5["current"].get<ChairId>())).second["descriptor"]);
}

TEST_CASE("snapshots") {
    Harness h;
    const auto id = create(h);
    auto c = h.client();
    auto a = c.Get("/api/chairs/" + std::to_string(kTarget) + "/snapshot/3.png");
    REQUIRE(a);
    CHECK(a->status == 200);
    CHECK(a->get_header_value("Content-Type") == "image/png");
    CHECK(a->body == encode_png(testing::reference_engine()->chair_snapshot(kTarget, 3)));
    auto b = c.Get("/api/sessions/" + id + "/target/3.png");
    REQUIRE(b);
    CHECK(b->body == a->body);
    CHECK(c.Get("/api/chairs/-1/snapshot/0.png")->status == 200);  // placeholder
    CHECK(c.Get("/api/chairs/" + std::to_string(kTarget) + "/snapshot/12.png")->status == 400);
    CHECK(c.Get("/api/chairs/99999999/snapshot/0.png")->status == 404);
    const auto [cs, chair] = h.get("/api/chairs/" + std::to_string(kTarget));
    CHECK(cs == 200);
    CHECK(chair["shape_id"] == 5);
}

TEST_CASE("concurrent submits to one session: one accepted, one rejected") {
    Harness h;
    for (int round = 0; round < 5; ++round) {
        const auto id = create(h);
        std::atomic<int> ok{0}, conflict{0}, other{0};
        auto submit = [&] {
            const auto status = h.post("/api/sessions/" + id + "/voice", {{"text", "wide red seat stop"}}).first;
            (status == 200 ? ok : status == 409 ? conflict : other)++;
        };
        std::thread a(submit), b(submit);
        a.join();
        b.join();
        CHECK(ok == 1);
        CHECK(conflict == 1);
        CHECK(other == 0);
        const auto state = h.get("/api/sessions/" + id).second;
        CHECK(state["outcome"]["query_count"] == 1);
        CHECK(state["outcome"]["rejected_queries"] == 1);
    }
}

TEST_CASE("log files replay and stay separate") {
    const auto dir = std::filesystem::temp_directory_path() / "chairsearch_service_logs";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    {
        ServiceConfig c;
        c.log_dir = dir;
        Harness h(c);
        std::vector<std::string> ids;
        for (int i = 0; i < 3; ++i) ids.push_back(create(h));
        std::vector<std::thread> threads;
        for (const auto& id : ids)
            threads.emplace_back([&h, id] {
                for (const char* text : {"red seat stop", "wide stop", "not curvy blue back stop"}) {
                    (void)h.post("/api/sessions/" + id + "/voice", {{"text", text}});
                    (void)h.post("/api/sessions/" + id + "/select", {{"rank", 1}});
                }
                (void)h.post("/api/sessions/" + id + "/abandon");
            });
        for (auto& t : threads) t.join();
        for (const auto& id : ids) {
            const auto file = dir / (id + ".jsonl");
            REQUIRE(std::filesystem::exists(file));
            std::ifstream in(file);
            std::stringstream ss;
            ss << in.rdbuf();
            CHECK(ss.str() == h.client().Get("/api/sessions/" + id + "/log")->body);
            std::istringstream replay(ss.str());
            const auto report = replay_log(replay, testing::reference_engine());
            CHECK(report.consistent());
            CHECK(report.queries == 3);
        }
        // A new service over the same directory does not reuse the ids.
        Harness h2(c);
        CHECK(std::find(ids.begin(), ids.end(), create(h2)) == ids.end());
    }
    std::filesystem::remove_all(dir);
}

} // TEST_SUITE
