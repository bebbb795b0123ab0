#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hifo/executor.hpp"

namespace hifo {

struct FsspInstance {
    int jobs = 0;
    int machines = 0;
    std::vector<std::vector<double>> time;  // jobs x machines, positive

    bool valid_shape() const;
};

// Processing times drawn uniformly from {1, ..., 99}.
FsspInstance gen_fssp(int jobs, int machines, std::uint64_t seed);

// Plain text: "jobs machines" header line, then one row of machine times
// per job.
FsspInstance load_fssp(const std::filesystem::path& path);
void write_fssp(const FsspInstance& inst, const std::filesystem::path& path);

// Completion time of the last job on the last machine for a permutation of
// 0-based job ids. Throws on a non-permutation.
double makespan(const FsspInstance& inst, std::span<const int> pi);

std::vector<int> ascending_total_time_order(const FsspInstance& inst);

// Exhaustive optimum, jobs <= 6.
double brute_force_fssp(const FsspInstance& inst);

struct FsspParams {
    int budget = 20;  // guide calls
};

// Iterated local search steered by guide(pi_star, T, n, m) -> (T', J).
// Local search uses job insertion and adjacent swaps, restricted to jobs in
// J once the first guide call has answered; schedules are always scored
// against the original matrix for reporting. Returns the best true
// makespan, or nullopt on heuristic failure.
std::optional<double> eval_fssp(ExecSession& session, const FsspInstance& inst,
                                const FsspParams& params, std::string* error = nullptr);

// Exposed for tests.
std::vector<int> fssp_local_search(const FsspInstance& inst,
                                   const std::vector<std::vector<double>>& cost,
                                   std::vector<int> pi, std::span<const int> movable);

}  // namespace hifo
