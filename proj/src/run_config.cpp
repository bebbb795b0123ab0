#include "hifo/run_config.hpp"

#include <fstream>
#include <stdexcept>

namespace hifo {

using nlohmann::json;

double operator_weight(const RunConfig& cfg, const std::string& tag) {
    auto it = cfg.operator_weights.find(tag);
    return it == cfg.operator_weights.end() ? 1.0 : it->second;
}

std::vector<InstanceSetSpec> parse_manifest(const json& doc) {
    std::vector<InstanceSetSpec> out;
    auto parse_one = [](const json& item) {
        InstanceSetSpec s;
        s.task = item.value("task", "");
        s.size = item.value("size", 0);
        s.count = item.value("count", 1);
        s.seed = item.value("seed", std::uint64_t{0});
        s.capacity = item.value("capacity", 100);
        s.machines = item.value("machines", 5);
        if (s.task.empty()) throw std::runtime_error("manifest entry missing task");
        if (s.size < 1 || s.count < 1)
            throw std::runtime_error("manifest entry needs positive size and count");
        return s;
    };
    if (doc.is_array())
        for (const json& item : doc) out.push_back(parse_one(item));
    else
        out.push_back(parse_one(doc));
    return out;
}

std::vector<InstanceSetSpec> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
    json doc;
    in >> doc;
    return parse_manifest(doc);
}

RunConfig parse_run_config(const json& doc) {
    RunConfig cfg;
    cfg.task_id = doc.value("task", cfg.task_id);
    cfg.pop_size = doc.value("pop_size", cfg.pop_size);
    cfg.generations = doc.value("generations", cfg.generations);
    cfg.crossover_parents = doc.value("crossover_parents", cfg.crossover_parents);
    cfg.extraction_enabled = doc.value("extraction", cfg.extraction_enabled);
    cfg.init_attempt_factor = doc.value("init_attempt_factor", cfg.init_attempt_factor);
    cfg.master_seed = doc.value("seed", cfg.master_seed);
    cfg.out_dir = doc.value("out_dir", cfg.out_dir);
    cfg.prompt_dir = doc.value("prompt_dir", cfg.prompt_dir);

    if (cfg.pop_size < 1) throw std::runtime_error("pop_size must be >= 1");
    if (cfg.generations < 1) throw std::runtime_error("generations must be >= 1");

    if (doc.contains("operator_weights"))
        for (const auto& [key, value] : doc["operator_weights"].items())
            cfg.operator_weights[key] = value.get<double>();

    if (doc.contains("pool")) {
        const json& p = doc["pool"];
        cfg.pool.capacity = p.value("capacity", cfg.pool.capacity);
        cfg.pool.jaccard_threshold = p.value("jaccard_threshold", cfg.pool.jaccard_threshold);
        cfg.pool.select_count = p.value("select_count", cfg.pool.select_count);
        cfg.pool.usage_penalty = p.value("usage_penalty", cfg.pool.usage_penalty);
        cfg.pool.recency_bonus = p.value("recency_bonus", cfg.pool.recency_bonus);
        cfg.pool.recency_window = p.value("recency_window", cfg.pool.recency_window);
        cfg.pool.ema_rate = p.value("ema_rate", cfg.pool.ema_rate);
        cfg.pool.decay_rate = p.value("decay_rate", cfg.pool.decay_rate);
        cfg.pool.grace_usage = p.value("grace_usage", cfg.pool.grace_usage);
    }
    if (doc.contains("navigator")) {
        const json& n = doc["navigator"];
        cfg.navigator.stagnation_threshold =
            n.value("stagnation_threshold", cfg.navigator.stagnation_threshold);
        cfg.navigator.progress_threshold =
            n.value("progress_threshold", cfg.navigator.progress_threshold);
        cfg.navigator.diversity_floor = n.value("diversity_floor", cfg.navigator.diversity_floor);
        cfg.navigator.progress_epsilon =
            n.value("progress_epsilon", cfg.navigator.progress_epsilon);
    }
    if (doc.contains("sandbox")) {
        const json& s = doc["sandbox"];
        cfg.sandbox.time_limit = std::chrono::milliseconds(
            s.value("time_limit_ms", cfg.sandbox.time_limit.count()));
        cfg.sandbox.grace = std::chrono::milliseconds(s.value("grace_ms", cfg.sandbox.grace.count()));
        cfg.sandbox.memory_limit =
            s.value("memory_limit_mb", cfg.sandbox.memory_limit / (1024 * 1024)) * 1024ull * 1024ull;
        cfg.sandbox.total_budget = std::chrono::milliseconds(
            s.value("total_budget_ms", cfg.sandbox.total_budget.count()));
        cfg.sandbox.interpreter = s.value("interpreter", cfg.sandbox.interpreter);
        if (s.contains("allowed_imports"))
            cfg.sandbox.allowed_imports = s["allowed_imports"].get<std::vector<std::string>>();
    }
    if (doc.contains("generator")) {
        const json& g = doc["generator"];
        const std::string backend = g.value("backend", "mock");
        cfg.generator.backend = backend == "live" ? GeneratorConfig::Backend::Live
                                                  : GeneratorConfig::Backend::Mock;
        cfg.generator.endpoint_url = g.value("endpoint_url", cfg.generator.endpoint_url);
        cfg.generator.model_name = g.value("model_name", cfg.generator.model_name);
        cfg.generator.temperature = g.value("temperature", cfg.generator.temperature);
        cfg.generator.max_retries = g.value("max_retries", cfg.generator.max_retries);
        cfg.generator.timeout =
            std::chrono::milliseconds(g.value("timeout_ms", cfg.generator.timeout.count()));
        cfg.generator.api_key_env = g.value("api_key_env", cfg.generator.api_key_env);
        cfg.generator.mock_script = g.value("mock_script", cfg.generator.mock_script);
        cfg.generator.backoff_base = std::chrono::milliseconds(
            g.value("backoff_base_ms", cfg.generator.backoff_base.count()));
    }
    if (doc.contains("instances")) {
        cfg.manifest = parse_manifest(doc["instances"]);
    } else if (doc.contains("manifest")) {
        cfg.manifest = load_manifest(doc["manifest"].get<std::string>());
    }
    if (doc.contains("seeds"))
        for (const json& s : doc["seeds"])
            cfg.seeds.push_back({s.value("thought", ""), s.at("code").get<std::string>()});
    if (doc.contains("gls")) {
        cfg.gls_lambda_factor = doc["gls"].value("lambda_factor", cfg.gls_lambda_factor);
        cfg.gls_budget = doc["gls"].value("budget", cfg.gls_budget);
    }
    if (doc.contains("fssp")) cfg.fssp_budget = doc["fssp"].value("budget", cfg.fssp_budget);
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("config parse error in " + path.string() + ": " + e.what());
    }
    return parse_run_config(doc);
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
    json weights = json::object();
    for (const char* tag : {"i1", "e1", "e2", "m1", "m2", "m3"})
        weights[tag] = operator_weight(cfg, tag);

    json instances = json::array();
    for (const InstanceSetSpec& s : cfg.manifest)
        instances.push_back({{"task", s.task},
                             {"size", s.size},
                             {"count", s.count},
                             {"seed", s.seed},
                             {"capacity", s.capacity},
                             {"machines", s.machines}});

    json seeds = json::array();
    for (const SeedHeuristic& s : cfg.seeds)
        seeds.push_back({{"thought", s.thought}, {"code", s.code}});

    return {
        {"task", cfg.task_id},
        {"pop_size", cfg.pop_size},
        {"generations", cfg.generations},
        {"operator_weights", weights},
        {"crossover_parents", cfg.crossover_parents},
        {"extraction", cfg.extraction_enabled},
        {"init_attempt_factor", cfg.init_attempt_factor},
        {"seed", cfg.master_seed},
        {"out_dir", cfg.out_dir},
        {"prompt_dir", cfg.prompt_dir},
        {"pool",
         {{"capacity", cfg.pool.capacity},
          {"jaccard_threshold", cfg.pool.jaccard_threshold},
          {"select_count", cfg.pool.select_count},
          {"usage_penalty", cfg.pool.usage_penalty},
          {"recency_bonus", cfg.pool.recency_bonus},
          {"recency_window", cfg.pool.recency_window},
          {"ema_rate", cfg.pool.ema_rate},
          {"decay_rate", cfg.pool.decay_rate},
          {"grace_usage", cfg.pool.grace_usage}}},
        {"navigator",
         {{"stagnation_threshold", cfg.navigator.stagnation_threshold},
          {"progress_threshold", cfg.navigator.progress_threshold},
          {"diversity_floor", cfg.navigator.diversity_floor},
          {"progress_epsilon", cfg.navigator.progress_epsilon}}},
        {"sandbox",
         {{"time_limit_ms", cfg.sandbox.time_limit.count()},
          {"grace_ms", cfg.sandbox.grace.count()},
          {"memory_limit_mb", cfg.sandbox.memory_limit / (1024 * 1024)},
          {"total_budget_ms", cfg.sandbox.total_budget.count()},
          {"interpreter", cfg.sandbox.interpreter},
          {"allowed_imports", cfg.sandbox.allowed_imports}}},
        {"generator",
         {{"backend", cfg.generator.backend == GeneratorConfig::Backend::Live ? "live" : "mock"},
          {"endpoint_url", cfg.generator.endpoint_url},
          {"model_name", cfg.generator.model_name},
          {"temperature", cfg.generator.temperature},
          {"max_retries", cfg.generator.max_retries},
          {"timeout_ms", cfg.generator.timeout.count()},
          {"api_key_env", cfg.generator.api_key_env},
          {"mock_script", cfg.generator.mock_script},
          {"backoff_base_ms", cfg.generator.backoff_base.count()}}},
        {"instances", instances},
        {"seeds", seeds},
        {"gls", {{"lambda_factor", cfg.gls_lambda_factor}, {"budget", cfg.gls_budget}}},
        {"fssp", {{"budget", cfg.fssp_budget}}},
    };
}

}  // namespace hifo
