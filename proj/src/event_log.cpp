#include "hifo/event_log.hpp"

#include <stdexcept>

namespace hifo {

void EventLog::open(const std::filesystem::path& path) {
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw std::runtime_error("cannot open event log: " + path.string());
}

const RunEvent& EventLog::emit(const std::string& kind, nlohmann::json payload) {
    RunEvent ev;
    ev.timestamp = next_++;
    ev.kind = kind;
    ev.payload = std::move(payload);
    events_.push_back(std::move(ev));
    if (file_.is_open()) {
        file_ << events_.back().to_json().dump() << "\n";
        file_.flush();
    }
    return events_.back();
}

long EventLog::count(const std::string& kind) const {
    long n = 0;
    for (const RunEvent& ev : events_)
        if (ev.kind == kind) ++n;
    return n;
}

std::variant<std::vector<RunEvent>, LogReadError> read_event_log(
    const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return LogReadError{0, "cannot open " + path.string()};

    std::vector<RunEvent> events;
    std::string line;
    long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("kind") ||
            !doc.contains("timestamp") || !doc.contains("payload"))
            return LogReadError{line_number, "malformed record"};
        RunEvent ev;
        ev.timestamp = doc["timestamp"].get<long>();
        ev.kind = doc["kind"].get<std::string>();
        ev.payload = doc["payload"];
        events.push_back(std::move(ev));
    }
    return events;
}

}  // namespace hifo
