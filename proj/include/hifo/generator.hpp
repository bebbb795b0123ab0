#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hifo {

struct GeneratorConfig {
    enum class Backend { Live, Mock };
    Backend backend = Backend::Mock;
    std::string endpoint_url;  // base URL, e.g. https://host/v1
    std::string model_name;
    double temperature = 1.0;
    int max_retries = 3;
    std::chrono::milliseconds timeout{60000};
    std::string api_key_env = "HIFO_API_KEY";
    std::string mock_script;  // script file for the mock backend
    // Initial backoff delay; doubles per retry with uniform jitter. Small
    // values keep the retry tests fast.
    std::chrono::milliseconds backoff_base{1000};
};

struct GenerationRecord {
    std::string prompt;
    std::string response;  // empty unless the attempt succeeded
    std::chrono::milliseconds latency{0};
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
    int attempt = 0;  // 0-based attempt index within one generate() call
    bool ok = false;
    std::string error;
};

enum class GeneratorErrorKind { Transport, Empty, ScriptExhausted, ScriptMismatch };

class GeneratorError : public std::runtime_error {
public:
    GeneratorError(GeneratorErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    GeneratorErrorKind kind() const { return kind_; }

private:
    GeneratorErrorKind kind_;
};

// Text-generation backend. generate() returns the completion text or throws
// GeneratorError; every attempt (including retries) is recorded and counted.
class Generator {
public:
    virtual ~Generator() = default;
    virtual std::string generate(const std::string& prompt) = 0;

    long request_count() const;
    std::vector<GenerationRecord> records() const;

protected:
    void record_attempt(GenerationRecord rec);

private:
    mutable std::mutex mu_;
    long attempts_ = 0;
    std::vector<GenerationRecord> records_;
};

// Chat-completion client: POST {endpoint}/chat/completions with the prompt
// as a single user message. Transport failures, 5xx and 429 are retried with
// exponential backoff; the API key travels only in the Authorization header.
class LiveGenerator : public Generator {
public:
    explicit LiveGenerator(GeneratorConfig cfg);
    std::string generate(const std::string& prompt) override;

private:
    GeneratorConfig cfg_;
    std::string api_key_;
};

// Deterministic scripted backend. The script is an ordered list of entries;
// entries tagged with an operator name serve prompts whose header comment
// names that operator, untagged entries serve anything else, in script
// order. An exhausted queue or a failed match check throws.
struct MockScriptEntry {
    std::string op;       // optional operator tag ("i1", "e1", ..., "extract")
    std::string match;    // optional substring the prompt must contain
    std::string response;
};

class MockGenerator : public Generator {
public:
    explicit MockGenerator(std::vector<MockScriptEntry> script);
    static std::vector<MockScriptEntry> load_script(const std::filesystem::path& path);
    static std::vector<MockScriptEntry> parse_script(const std::string& json_text);

    std::string generate(const std::string& prompt) override;

    // The operator tag named by a prompt's leading header comment, if any.
    static std::string extract_tag(const std::string& prompt);

private:
    std::map<std::string, std::deque<MockScriptEntry>> queues_;
    std::mutex mu_;
};

}  // namespace hifo
