#include "hifo/problems/problem.hpp"

#include <stdexcept>

namespace hifo {

namespace {

TaskSpec tsp_construct_task() {
    TaskSpec t;
    t.task_id = "tsp_construct";
    t.description =
        "Given a set of nodes with their coordinates, you need to find the shortest "
        "route that visits each node once and returns to the starting node. The task "
        "can be solved step-by-step by starting from the current node and choosing "
        "the next node to visit from the unvisited nodes.";
    t.function_name = "select_next_node";
    t.input_names = {"current_node", "origin_node", "unvisited_nodes", "distance_matrix"};
    t.output_names = {"next_node"};
    t.extra_constraints =
        "'current_node' and 'origin_node' are node indices, 'unvisited_nodes' is a "
        "list of node indices that can still be visited, and 'distance_matrix' is the "
        "full symmetric matrix of pairwise distances. The returned 'next_node' must "
        "be one of 'unvisited_nodes'.";
    return t;
}

TaskSpec tsp_gls_task() {
    TaskSpec t;
    t.task_id = "tsp_gls";
    t.description =
        "Given a set of nodes and the matrix of pairwise distances, you need to find "
        "the shortest route that visits each node once and returns to the starting "
        "node. A local search repeatedly improves the route under a penalized "
        "distance matrix, and your task is to update the edge penalties that steer "
        "the search out of local optima.";
    t.function_name = "update_penalty";
    t.input_names = {"penalty_matrix", "current_tour", "distance_matrix", "edge_usage"};
    t.output_names = {"updated_penalty_matrix"};
    t.extra_constraints =
        "'penalty_matrix' is the current matrix of non-negative integer edge "
        "penalties, 'current_tour' is the locally optimal tour as a list of node "
        "indices, 'distance_matrix' holds the true distances, and 'edge_usage' counts "
        "how often each edge appeared in local optima. Return a matrix of "
        "non-negative integers with the same shape as 'penalty_matrix'.";
    return t;
}

TaskSpec bpp_online_task() {
    TaskSpec t;
    t.task_id = "bpp_online";
    t.description =
        "Given a sequence of items and a set of identical bins with a fixed "
        "capacity, you need to assign each item to a bin to minimize the total "
        "number of bins used. The task can be solved step-by-step by taking the next "
        "item and deciding which bin to place it in based on a score.";
    t.function_name = "score";
    t.input_names = {"item", "bins"};
    t.output_names = {"scores"};
    t.extra_constraints =
        "The score function is designed to evaluate the placement options for a "
        "given item. It takes the item to be placed and the current list of bins as "
        "input, where 'bins' holds the remaining capacity of each open bin. It "
        "returns a list of numerical scores, with each score corresponding to a bin "
        "in the input list. This list of scores guides the heuristic in selecting "
        "the most suitable bin for the item according to the generated logic.";
    return t;
}

TaskSpec fssp_task() {
    TaskSpec t;
    t.task_id = "fssp";
    t.description =
        "Given the processing time of each job on each machine, you need to schedule "
        "all jobs in the same order on every machine to minimize the completion time "
        "of the last job. A local search repeatedly improves the schedule, and your "
        "task is to guide it by perturbing the processing times and selecting which "
        "jobs the search may move.";
    t.function_name = "guide";
    t.input_names = {"current_sequence", "time_matrix", "n_jobs", "n_machines"};
    t.output_names = {"perturbed_matrix", "perturb_jobs"};
    t.extra_constraints =
        "'current_sequence' is the locally optimal job order (0-based job indices), "
        "'time_matrix' is the original n_jobs x n_machines matrix of processing "
        "times. Return two outputs: 'perturbed_matrix', a positive matrix of the "
        "same shape used by the next search round, and 'perturb_jobs', a non-empty "
        "list of job indices whose positions may be changed.";
    return t;
}

class TspConstructProblem : public Problem {
public:
    explicit TspConstructProblem(std::vector<TspInstance> instances)
        : instances_(std::move(instances)) {
        task_ = tsp_construct_task();
    }
    std::size_t instance_count() const override { return instances_.size(); }
    double baseline_objective() const override {
        double sum = 0.0;
        for (const TspInstance& inst : instances_) {
            const std::vector<int> tour = nearest_neighbor_tour(inst);
            sum += tour_length(inst, tour);
        }
        return sum / static_cast<double>(instances_.size());
    }
    std::string baseline_name() const override { return "nearest_neighbor"; }

protected:
    std::optional<double> evaluate_instance(ExecSession& session, std::size_t idx,
                                            std::string* error) const override {
        return eval_tsp_construct(session, instances_[idx], error);
    }

private:
    std::vector<TspInstance> instances_;
};

class TspGlsProblem : public Problem {
public:
    TspGlsProblem(std::vector<TspInstance> instances, GlsParams params)
        : instances_(std::move(instances)), params_(params) {
        task_ = tsp_gls_task();
    }
    std::size_t instance_count() const override { return instances_.size(); }
    double baseline_objective() const override {
        double sum = 0.0;
        for (const TspInstance& inst : instances_) {
            const std::vector<int> tour = nearest_neighbor_tour(inst);
            sum += tour_length(inst, tour);
        }
        return sum / static_cast<double>(instances_.size());
    }
    std::string baseline_name() const override { return "nearest_neighbor"; }

protected:
    std::optional<double> evaluate_instance(ExecSession& session, std::size_t idx,
                                            std::string* error) const override {
        return eval_tsp_gls(session, instances_[idx], params_, error);
    }

private:
    std::vector<TspInstance> instances_;
    GlsParams params_;
};

class BppOnlineProblem : public Problem {
public:
    explicit BppOnlineProblem(std::vector<BppInstance> instances)
        : instances_(std::move(instances)) {
        task_ = bpp_online_task();
    }
    std::size_t instance_count() const override { return instances_.size(); }
    double baseline_objective() const override {
        double sum = 0.0;
        for (const BppInstance& inst : instances_)
            sum += excess_ratio(inst, best_fit_bins(inst));
        return sum / static_cast<double>(instances_.size());
    }
    std::string baseline_name() const override { return "best_fit"; }

protected:
    std::optional<double> evaluate_instance(ExecSession& session, std::size_t idx,
                                            std::string* error) const override {
        return eval_bpp_online(session, instances_[idx], error);
    }

private:
    std::vector<BppInstance> instances_;
};

class FsspProblem : public Problem {
public:
    FsspProblem(std::vector<FsspInstance> instances, FsspParams params)
        : instances_(std::move(instances)), params_(params) {
        task_ = fssp_task();
    }
    std::size_t instance_count() const override { return instances_.size(); }
    double baseline_objective() const override {
        double sum = 0.0;
        for (const FsspInstance& inst : instances_) {
            const std::vector<int> order = ascending_total_time_order(inst);
            sum += makespan(inst, order);
        }
        return sum / static_cast<double>(instances_.size());
    }
    std::string baseline_name() const override { return "ascending_total_time"; }

protected:
    std::optional<double> evaluate_instance(ExecSession& session, std::size_t idx,
                                            std::string* error) const override {
        return eval_fssp(session, instances_[idx], params_, error);
    }

private:
    std::vector<FsspInstance> instances_;
    FsspParams params_;
};

}  // namespace

std::optional<double> Problem::evaluate_code(const std::string& code,
                                             const SandboxPolicy& policy,
                                             std::string* error) const {
    ExecSession session(policy);
    const ExecResult loaded =
        session.load(code, task_.function_name, static_cast<int>(task_.input_names.size()));
    if (!loaded.ok) {
        if (error) *error = std::string(to_string(loaded.error_kind)) + ": " + loaded.detail;
        return std::nullopt;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < instance_count(); ++i) {
        if (session.budget_exhausted()) {
            if (error) *error = "evaluation budget exhausted";
            return std::nullopt;
        }
        const std::optional<double> value = evaluate_instance(session, i, error);
        if (!value) return std::nullopt;
        sum += *value;
    }
    return sum / static_cast<double>(instance_count());
}

const std::vector<std::string>& known_tasks() {
    static const std::vector<std::string> tasks = {"tsp_construct", "tsp_gls", "bpp_online",
                                                   "fssp"};
    return tasks;
}

std::vector<InstanceSetSpec> default_manifest(const std::string& task_id) {
    InstanceSetSpec s;
    s.task = task_id;
    s.seed = 1;
    if (task_id == "tsp_construct") {
        s.size = 20;
        s.count = 4;
    } else if (task_id == "tsp_gls") {
        s.size = 20;
        s.count = 2;
    } else if (task_id == "bpp_online") {
        s.size = 500;
        s.count = 2;
        s.capacity = 100;
    } else if (task_id == "fssp") {
        s.size = 12;
        s.count = 2;
        s.machines = 5;
    } else {
        throw std::invalid_argument("unknown task: " + task_id);
    }
    return {s};
}

std::unique_ptr<Problem> make_problem(const std::string& task_id,
                                      const std::vector<InstanceSetSpec>& manifest,
                                      const RunConfig& cfg) {
    auto entries_for = [&](const std::string& task) {
        std::vector<InstanceSetSpec> out;
        for (const InstanceSetSpec& s : manifest)
            if (s.task == task) out.push_back(s);
        if (out.empty())
            throw std::runtime_error("manifest has no instance sets for task " + task);
        return out;
    };

    if (task_id == "tsp_construct" || task_id == "tsp_gls") {
        std::vector<TspInstance> instances;
        for (const InstanceSetSpec& s : entries_for(task_id))
            for (int i = 0; i < s.count; ++i)
                instances.push_back(gen_tsp(s.size, s.seed + static_cast<std::uint64_t>(i)));
        if (task_id == "tsp_construct")
            return std::make_unique<TspConstructProblem>(std::move(instances));
        return std::make_unique<TspGlsProblem>(std::move(instances),
                                               GlsParams{cfg.gls_lambda_factor, cfg.gls_budget});
    }
    if (task_id == "bpp_online") {
        std::vector<BppInstance> instances;
        for (const InstanceSetSpec& s : entries_for(task_id))
            for (int i = 0; i < s.count; ++i)
                instances.push_back(
                    gen_bpp_weibull(s.size, s.capacity, s.seed + static_cast<std::uint64_t>(i)));
        return std::make_unique<BppOnlineProblem>(std::move(instances));
    }
    if (task_id == "fssp") {
        std::vector<FsspInstance> instances;
        for (const InstanceSetSpec& s : entries_for(task_id))
            for (int i = 0; i < s.count; ++i)
                instances.push_back(
                    gen_fssp(s.size, s.machines, s.seed + static_cast<std::uint64_t>(i)));
        return std::make_unique<FsspProblem>(std::move(instances),
                                             FsspParams{cfg.fssp_budget});
    }
    throw std::invalid_argument("unknown task: " + task_id);
}

std::unique_ptr<Problem> make_problem(const RunConfig& cfg) {
    return make_problem(cfg.task_id, cfg.manifest, cfg);
}

}  // namespace hifo
