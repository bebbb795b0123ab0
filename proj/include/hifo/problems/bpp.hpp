#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hifo/executor.hpp"

namespace hifo {

struct BppInstance {
    int capacity = 100;
    std::vector<int> items;  // sizes in (0, capacity]
};

// Item sizes ~ Weibull(shape 3, scale 45), rounded up and clipped to
// [1, capacity].
BppInstance gen_bpp_weibull(int count, int capacity, std::uint64_t seed);

int bpp_lower_bound(const BppInstance& inst);
double excess_ratio(const BppInstance& inst, int bins_used);

// Direct baselines over residual capacities.
int best_fit_bins(const BppInstance& inst);
int first_fit_bins(const BppInstance& inst);

// Online placement driven by score(item, bins): one score per open bin,
// item goes to the valid (residual >= item) bin with the highest score,
// ties to the lowest index, new bin when no valid bin exists. Returns the
// excess ratio over the lower bound, or nullopt on heuristic failure.
std::optional<double> eval_bpp_online(ExecSession& session, const BppInstance& inst,
                                      std::string* error = nullptr);

}  // namespace hifo
