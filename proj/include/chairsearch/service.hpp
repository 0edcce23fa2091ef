#pragma once

#include "chairsearch/engine.hpp"
#include "chairsearch/session.hpp"
#include "chairsearch/session_log.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>

namespace httplib {
class Server;
}

namespace chairsearch {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path manifest_path;      // empty: generate the reference set
    std::filesystem::path dictionary_path;    // empty: builtin
    std::optional<double> budget_seconds;
    std::filesystem::path log_dir;            // empty: no log files
    std::filesystem::path static_dir;         // empty: no UI assets
    std::uint64_t seed = 1;                   // random targets
    const Clock* clock = nullptr;             // null: steady clock

    /// Throws InvalidInput for missing paths or a non-positive budget.
    void validate() const;
};

/// HTTP status for an engine error code.
int http_status(ErrorCode code) noexcept;

/// JSON session registry and request handlers. Requests on one session are
/// serialized by that session's mutex; distinct sessions run in parallel.
class Service {
public:
    Service(std::shared_ptr<const Engine> engine, ServiceConfig config);
    ~Service();

    void mount(httplib::Server& server);
    /// Blocks until `stop()`.
    void listen();
    void stop();

    /// Snapshot PNGs are cached per (chair, view).
    std::string chair_png(ChairId id, int view);

    [[nodiscard]] std::size_t session_count() const;
    [[nodiscard]] bool log_degraded(const std::string& session_id) const;

private:
    struct Entry;
    std::shared_ptr<Entry> find(const std::string& id) const;
    std::shared_ptr<Entry> create(const std::string& body);

    std::shared_ptr<const Engine> engine_;
    ServiceConfig config_;
    SteadyClock steady_;
    mutable std::mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::uint64_t next_session_ = 1;
    std::mt19937_64 target_rng_;
    std::mutex cache_mutex_;
    std::map<std::pair<ChairId, int>, std::string> png_cache_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace chairsearch
