#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hifo/executor.hpp"
#include "hifo/generator.hpp"
#include "hifo/insight_pool.hpp"
#include "hifo/navigator.hpp"

namespace hifo {

struct SeedHeuristic {
    std::string thought;
    std::string code;
};

// One entry of an instance manifest: which task, how many instances of what
// size, and the generation seed. capacity applies to bin packing, machines
// to flow shop.
struct InstanceSetSpec {
    std::string task;
    int size = 0;
    int count = 1;
    std::uint64_t seed = 0;
    int capacity = 100;
    int machines = 5;
};

struct RunConfig {
    std::string task_id = "bpp_online";
    int pop_size = 4;
    int generations = 8;
    std::map<std::string, double> operator_weights;  // absent key means 1.0
    int crossover_parents = 2;
    bool extraction_enabled = true;
    int init_attempt_factor = 3;  // init budget = factor * pop_size
    std::uint64_t master_seed = 0;
    std::string out_dir = "runs/latest";
    std::string prompt_dir;  // optional template overrides

    InsightPoolConfig pool;
    NavigatorConfig navigator;
    SandboxPolicy sandbox;
    GeneratorConfig generator;

    std::vector<InstanceSetSpec> manifest;
    std::vector<SeedHeuristic> seeds;

    double gls_lambda_factor = 0.1;
    int gls_budget = 50;
    int fssp_budget = 20;
};

double operator_weight(const RunConfig& cfg, const std::string& tag);

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json run_config_to_json(const RunConfig& cfg);

std::vector<InstanceSetSpec> parse_manifest(const nlohmann::json& doc);
std::vector<InstanceSetSpec> load_manifest(const std::filesystem::path& path);

}  // namespace hifo
