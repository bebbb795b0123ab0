#include "hifo/generator.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace hifo {

using nlohmann::json;

long Generator::request_count() const {
    std::lock_guard lock(mu_);
    return attempts_;
}

std::vector<GenerationRecord> Generator::records() const {
    std::lock_guard lock(mu_);
    return records_;
}

void Generator::record_attempt(GenerationRecord rec) {
    std::lock_guard lock(mu_);
    attempts_ += 1;
    records_.push_back(std::move(rec));
}

namespace {

// Splits a base URL into the client origin (scheme://host[:port]) and a
// path prefix, so "https://api.host.com/v1" posts to "/v1/chat/completions".
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
    const std::size_t scheme_end = url.find("://");
    std::size_t path_start = std::string::npos;
    if (scheme_end != std::string::npos)
        path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

}  // namespace

LiveGenerator::LiveGenerator(GeneratorConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.endpoint_url.empty() || cfg_.model_name.empty())
        throw std::invalid_argument("LiveGenerator: endpoint_url and model_name are required");
    if (const char* key = std::getenv(cfg_.api_key_env.c_str())) api_key_ = key;
}

std::string LiveGenerator::generate(const std::string& prompt) {
    const auto [origin, prefix] = split_endpoint(cfg_.endpoint_url);
    const std::string path = prefix + "/chat/completions";

    json payload = {
        {"model", cfg_.model_name},
        {"temperature", cfg_.temperature},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
    };
    const std::string body = payload.dump();

    static thread_local std::mt19937_64 jitter_rng{std::random_device{}()};
    std::string last_error = "no attempt made";

    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0) {
            const auto base = cfg_.backoff_base.count();
            const long long delay =
                (base << (attempt - 1)) +
                static_cast<long long>(jitter_rng() % static_cast<std::uint64_t>(base + 1));
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }

        httplib::Client client(origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
        client.set_connection_timeout(secs.count(), 0);
        client.set_read_timeout(secs.count(), 0);
        client.set_write_timeout(secs.count(), 0);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        GenerationRecord rec;
        rec.prompt = prompt;
        rec.attempt = attempt;
        const auto t0 = std::chrono::steady_clock::now();
        httplib::Result res = client.Post(path, headers, body, "application/json");
        rec.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0);

        bool retryable = false;
        if (!res) {
            last_error = "transport: " + httplib::to_string(res.error());
            retryable = true;
        } else if (res->status == 429 || res->status >= 500) {
            last_error = "http status " + std::to_string(res->status);
            retryable = true;
        } else if (res->status != 200) {
            last_error = "http status " + std::to_string(res->status);
        } else {
            json reply = json::parse(res->body, nullptr, false);
            std::string content;
            if (!reply.is_discarded() && reply.contains("choices") &&
                reply["choices"].is_array() && !reply["choices"].empty()) {
                content = reply["choices"][0].value(
                    "message", json::object()).value("content", "");
                if (reply.contains("usage")) {
                    const json& u = reply["usage"];
                    if (u.contains("prompt_tokens")) rec.prompt_tokens = u["prompt_tokens"].get<int>();
                    if (u.contains("completion_tokens"))
                        rec.completion_tokens = u["completion_tokens"].get<int>();
                }
            } else {
                last_error = "malformed completion payload";
                rec.error = last_error;
                record_attempt(std::move(rec));
                throw GeneratorError(GeneratorErrorKind::Transport, last_error);
            }
            if (content.empty()) {
                last_error = "empty completion";
                rec.error = last_error;
                record_attempt(std::move(rec));
                throw GeneratorError(GeneratorErrorKind::Empty, last_error);
            }
            rec.ok = true;
            rec.response = content;
            record_attempt(rec);
            return content;
        }

        rec.error = last_error;
        record_attempt(std::move(rec));
        if (!retryable) throw GeneratorError(GeneratorErrorKind::Transport, last_error);
    }
    throw GeneratorError(GeneratorErrorKind::Transport,
                         "retries exhausted: " + last_error);
}

MockGenerator::MockGenerator(std::vector<MockScriptEntry> script) {
    for (MockScriptEntry& e : script) queues_[e.op].push_back(std::move(e));
}

std::vector<MockScriptEntry> MockGenerator::parse_script(const std::string& json_text) {
    json doc = json::parse(json_text);
    if (!doc.is_array()) throw std::runtime_error("mock script: top-level JSON array expected");
    std::vector<MockScriptEntry> script;
    script.reserve(doc.size());
    for (const json& item : doc) {
        MockScriptEntry e;
        e.op = item.value("op", "");
        e.match = item.value("match", "");
        e.response = item.value("response", "");
        script.push_back(std::move(e));
    }
    return script;
}

std::vector<MockScriptEntry> MockGenerator::load_script(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("mock script not readable: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_script(ss.str());
}

std::string MockGenerator::extract_tag(const std::string& prompt) {
    static const std::string kHeader = "# operator: ";
    if (prompt.rfind(kHeader, 0) != 0) return "";
    const std::size_t eol = prompt.find('\n', kHeader.size());
    const std::size_t end = eol == std::string::npos ? prompt.size() : eol;
    std::string tag = prompt.substr(kHeader.size(), end - kHeader.size());
    while (!tag.empty() && std::isspace(static_cast<unsigned char>(tag.back()))) tag.pop_back();
    return tag;
}

std::string MockGenerator::generate(const std::string& prompt) {
    std::lock_guard lock(mu_);
    const std::string tag = extract_tag(prompt);

    std::deque<MockScriptEntry>* queue = nullptr;
    if (auto it = queues_.find(tag); it != queues_.end() && !it->second.empty())
        queue = &it->second;
    if (!queue)
        if (auto it = queues_.find(""); it != queues_.end() && !it->second.empty())
            queue = &it->second;

    GenerationRecord rec;
    rec.prompt = prompt;

    if (!queue) {
        rec.error = "script exhausted";
        record_attempt(std::move(rec));
        throw GeneratorError(GeneratorErrorKind::ScriptExhausted,
                             "mock script exhausted for operator '" + tag + "'");
    }
    MockScriptEntry entry = std::move(queue->front());
    queue->pop_front();

    if (!entry.match.empty() && prompt.find(entry.match) == std::string::npos) {
        rec.error = "match failed: " + entry.match;
        record_attempt(std::move(rec));
        throw GeneratorError(GeneratorErrorKind::ScriptMismatch,
                             "mock entry expected substring not found: " + entry.match);
    }
    if (entry.response.empty()) {
        rec.error = "empty completion";
        record_attempt(std::move(rec));
        throw GeneratorError(GeneratorErrorKind::Empty, "empty completion");
    }
    rec.ok = true;
    rec.response = entry.response;
    record_attempt(std::move(rec));
    return entry.response;
}

}  // namespace hifo
