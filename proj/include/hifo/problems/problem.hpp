#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hifo/executor.hpp"
#include "hifo/problems/bpp.hpp"
#include "hifo/problems/fssp.hpp"
#include "hifo/problems/tsp.hpp"
#include "hifo/run_config.hpp"
#include "hifo/task_spec.hpp"

namespace hifo {

// A benchmark task bound to a fixed instance set: owns the prompt-facing
// TaskSpec, evaluates candidate code to a mean objective (lower is better),
// and knows its handcrafted reference baseline.
class Problem {
public:
    virtual ~Problem() = default;

    const TaskSpec& task() const { return task_; }
    virtual std::size_t instance_count() const = 0;

    // Loads `code` into a fresh sandbox session and averages the
    // per-instance objective. Any instance failure or an exhausted time
    // budget invalidates the candidate (nullopt), with the reason in *error.
    std::optional<double> evaluate_code(const std::string& code, const SandboxPolicy& policy,
                                        std::string* error = nullptr) const;

    virtual double baseline_objective() const = 0;
    virtual std::string baseline_name() const = 0;

protected:
    virtual std::optional<double> evaluate_instance(ExecSession& session, std::size_t idx,
                                                    std::string* error) const = 0;
    TaskSpec task_;
};

// Builds the problem named by task_id ("tsp_construct", "tsp_gls",
// "bpp_online", "fssp") over the manifest entries matching that task.
// Throws on an unknown task or an empty instance set.
std::unique_ptr<Problem> make_problem(const RunConfig& cfg);
std::unique_ptr<Problem> make_problem(const std::string& task_id,
                                      const std::vector<InstanceSetSpec>& manifest,
                                      const RunConfig& cfg);

const std::vector<std::string>& known_tasks();

// Small built-in instance set for a task, used when no manifest is given.
std::vector<InstanceSetSpec> default_manifest(const std::string& task_id);

}  // namespace hifo
