#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace hifo {

// One structured record in the run's append-only log. The timestamp is a
// logical sequence number, not wall time: logs must replay byte-identically
// for a fixed seed and script, and wall time lives in the report instead.
struct RunEvent {
    long timestamp = 0;
    std::string kind;
    nlohmann::json payload;

    nlohmann::json to_json() const {
        return {{"timestamp", timestamp}, {"kind", kind}, {"payload", payload}};
    }
};

// Appends newline-delimited JSON records, optionally mirrored to a file.
class EventLog {
public:
    EventLog() = default;

    void open(const std::filesystem::path& path);

    const RunEvent& emit(const std::string& kind, nlohmann::json payload);

    const std::vector<RunEvent>& events() const { return events_; }
    long count(const std::string& kind) const;

private:
    std::vector<RunEvent> events_;
    std::ofstream file_;
    long next_ = 0;
};

struct LogReadError {
    long line_number = 0;  // 1-based line of the first bad record
    std::string detail;
};

// Parses an event log file; stops at the first malformed record.
std::variant<std::vector<RunEvent>, LogReadError> read_event_log(
    const std::filesystem::path& path);

}  // namespace hifo
