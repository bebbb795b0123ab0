#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hifo {

struct SandboxPolicy {
    std::chrono::milliseconds time_limit{5000};        // per call
    std::chrono::milliseconds grace{1000};             // extra wait before SIGKILL
    std::size_t memory_limit = 512ull * 1024 * 1024;   // address-space cap
    std::chrono::milliseconds total_budget{60000};     // per heuristic evaluation
    std::string interpreter = "python3";
    std::vector<std::string> allowed_imports = {
        "math", "numpy", "random", "itertools", "functools", "heapq",
        "bisect", "collections", "operator", "statistics",
    };
};

enum class ExecErrorKind { None, Syntax, Runtime, Timeout, Protocol, BadShape };

constexpr const char* to_string(ExecErrorKind k) {
    switch (k) {
        case ExecErrorKind::None: return "none";
        case ExecErrorKind::Syntax: return "syntax";
        case ExecErrorKind::Runtime: return "runtime";
        case ExecErrorKind::Timeout: return "timeout";
        case ExecErrorKind::Protocol: return "protocol";
        case ExecErrorKind::BadShape: return "bad_shape";
    }
    return "?";
}

struct ExecResult {
    bool ok = false;
    nlohmann::json result;
    ExecErrorKind error_kind = ExecErrorKind::None;
    std::string detail;
    std::chrono::milliseconds wall_time{0};
};

struct ExecRequest {
    std::string function_name;
    nlohmann::json args = nlohmann::json::array();
    int call_id = 0;
    // When set, a list result of any other length is a shape error.
    std::optional<std::size_t> expected_length;
};

// Returns the offending token when `code` references a capability the
// sandbox forbids (filesystem, network, process control, dynamic exec).
std::optional<std::string> scan_denied_capability(const std::string& code);

// One interpreter subprocess holding one loaded candidate program.
// Communication is newline-delimited JSON over the child's stdin/stdout; the
// child runs the code under an import allowlist with file and process
// builtins removed, and the parent enforces wall-clock limits by SIGKILL.
class ExecSession {
public:
    explicit ExecSession(SandboxPolicy policy = {});
    ~ExecSession();
    ExecSession(const ExecSession&) = delete;
    ExecSession& operator=(const ExecSession&) = delete;
    ExecSession(ExecSession&& other) noexcept;
    ExecSession& operator=(ExecSession&& other) noexcept;

    // Spawns the interpreter, installs `code`, and checks that a callable
    // named `function_name` with a compatible arity exists. `arity` < 0
    // skips the arity check.
    ExecResult load(const std::string& code, const std::string& function_name, int arity = -1);

    ExecResult invoke(const ExecRequest& req);

    bool alive() const { return pid_ > 0; }
    std::chrono::milliseconds elapsed_total() const { return elapsed_; }
    bool budget_exhausted() const { return elapsed_ >= policy_.total_budget; }
    const SandboxPolicy& policy() const { return policy_; }

    void terminate();

private:
    bool spawn();
    bool write_line(const std::string& line);
    std::optional<std::string> read_line(std::chrono::milliseconds limit);

    SandboxPolicy policy_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    std::string function_name_;
    std::chrono::milliseconds elapsed_{0};
};

}  // namespace hifo
