#pragma once

#include "chairsearch/session.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace chairsearch {

/// One JSON object per line. A session starts with a "session" header line;
/// every later line is an event (submitted / processed / selected / rejected /
/// edited / state), and each state change carries the session's outcome.
std::string event_line(const Session& session, const SessionEvent& event);

/// Writes event lines to a stream. Lines are flushed one at a time; after
/// the first failed write the writer stops writing and reports itself degraded.
class SessionLogWriter {
public:
    explicit SessionLogWriter(std::unique_ptr<std::ostream> out) : out_(std::move(out)) {}
    static std::shared_ptr<SessionLogWriter> open_file(const std::filesystem::path& path);

    void write(const Session& session, const SessionEvent& event);
    [[nodiscard]] bool degraded() const noexcept;

    /// Adapter for `Session::Listener`.
    [[nodiscard]] Session::Listener listener();

private:
    std::unique_ptr<std::ostream> out_;
    mutable std::mutex mutex_;
    bool degraded_ = false;
};

/// Collects lines in memory.
class MemoryLog {
public:
    [[nodiscard]] Session::Listener listener();
    [[nodiscard]] const std::vector<std::string>& lines() const noexcept { return lines_; }
    [[nodiscard]] std::string text() const;

private:
    std::vector<std::string> lines_;
};

struct ReplayReport {
    std::size_t queries = 0;
    std::size_t result_mismatches = 0;
    std::optional<Outcome> recorded;  // from the last state line, if the session ended
    Outcome replayed;
    std::vector<std::string> replayed_lines;

    [[nodiscard]] bool consistent() const noexcept {
        return result_mismatches == 0 && (!recorded || *recorded == replayed);
    }
};

/// Re-executes a logged session against the engine with a clock pinned to the
/// logged timestamps and compares every result set and the final outcome.
/// Throws InvalidInput on a malformed log.
ReplayReport replay_log(std::istream& in, std::shared_ptr<const Engine> engine);

} // namespace chairsearch
