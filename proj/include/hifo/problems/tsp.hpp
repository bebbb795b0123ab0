#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hifo/executor.hpp"

namespace hifo {

struct TspInstance {
    std::vector<std::array<double, 2>> coords;
    std::vector<std::vector<double>> dist;  // symmetric, zero diagonal
    bool rounded = false;                   // nearest-integer convention (benchmark files)

    std::size_t size() const { return coords.size(); }
};

// n uniform points in the unit square; distance matrix is exact Euclidean.
TspInstance gen_tsp(int n, std::uint64_t seed);

// TSPLIB95 file with EUC_2D edge weights; distances use the library's
// nearest-integer rounding. Other edge weight types are rejected by name.
TspInstance load_tsplib(const std::filesystem::path& path);
void write_tsplib(const TspInstance& inst, const std::filesystem::path& path,
                  const std::string& name);

double tour_length(const TspInstance& inst, std::span<const int> tour);

std::vector<int> nearest_neighbor_tour(const TspInstance& inst, int start = 0);

// Exhaustive optimum, n <= 9.
double brute_force_tsp(const TspInstance& inst);

// Step-by-step construction driven by select_next_node(current, origin,
// unvisited, D). Returns the closed tour length, or nullopt when the
// heuristic misbehaves (invalid node, exec failure, budget exhausted).
std::optional<double> eval_tsp_construct(ExecSession& session, const TspInstance& inst,
                                         std::string* error = nullptr);

struct GlsParams {
    double lambda_factor = 0.1;  // lambda = factor * mean nonzero distance
    int budget = 50;             // outer penalty iterations
};

// Guided local search in which update_penalty(P_old, s_star, D, N_freq)
// reshapes the penalty matrix between local-search rounds. Returns the best
// tour length measured under the true distances.
std::optional<double> eval_tsp_gls(ExecSession& session, const TspInstance& inst,
                                   const GlsParams& params, std::string* error = nullptr);

// Local search under a given cost matrix (2-opt + relocate, first
// improvement); exposed for tests.
std::vector<int> tsp_local_search(const std::vector<std::vector<double>>& cost,
                                  std::vector<int> tour);

}  // namespace hifo
