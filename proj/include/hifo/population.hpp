#pragma once

#include <random>
#include <span>
#include <vector>

#include "hifo/heuristic.hpp"

namespace hifo {

// Two candidates count as the same individual when their objectives agree
// within this tolerance (or their code is identical modulo whitespace).
inline constexpr double kObjectiveTolerance = 1e-12;

struct PopulationStats {
    double best = 0.0;
    double worst = 0.0;
    double avg = 0.0;
    double stddev = 0.0;
    double diversity = 0.0;  // stddev / max(|avg|, 1e-9)
};

struct Population {
    std::vector<Heuristic> members;
    int capacity = 0;

    bool empty() const { return members.empty(); }
    std::size_t size() const { return members.size(); }
};

// Collapses runs of whitespace to single spaces and trims the ends, so
// formatting-only differences do not make two programs look distinct.
std::string normalize_code(std::string_view code);

bool is_duplicate(const Heuristic& a, const Heuristic& b);

// True if `candidate` duplicates any member of `existing`.
bool is_duplicate(const Heuristic& candidate, std::span<const Heuristic> existing);

// Merge-then-truncate survival: drop members without an objective, dedupe by
// objective equality keeping the first occurrence, sort ascending, keep the
// best n_target. Returns fewer than n_target when not enough distinct
// candidates exist.
Population survival_select(std::span<const Heuristic> pool, int n_target);

// Normalized rank-selection weights for a population of size n: the k-th
// best (k = 0-based) gets weight proportional to 1 / (k + 1 + n).
std::vector<double> rank_weights(std::size_t n);

// Samples m parents (independently, with replacement) from a population
// sorted ascending by objective. Throws if the population is empty.
std::vector<Heuristic> rank_select_parents(const Population& pop, int m, std::mt19937_64& rng);

// Objective statistics over members that hold an objective. Throws if no
// member does. best/worst are exact member values, not recomputed.
PopulationStats population_stats(std::span<const Heuristic> members);

inline PopulationStats population_stats(const Population& pop) {
    return population_stats(std::span<const Heuristic>(pop.members));
}

}  // namespace hifo
