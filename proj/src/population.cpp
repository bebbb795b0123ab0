#include "hifo/population.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "hifo/rng.hpp"

namespace hifo {

std::string normalize_code(std::string_view code) {
    std::string out;
    out.reserve(code.size());
    bool pending_space = false;
    for (unsigned char c : code) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

bool is_duplicate(const Heuristic& a, const Heuristic& b) {
    if (a.objective && b.objective &&
        std::abs(*a.objective - *b.objective) <= kObjectiveTolerance)
        return true;
    return normalize_code(a.code) == normalize_code(b.code);
}

bool is_duplicate(const Heuristic& candidate, std::span<const Heuristic> existing) {
    return std::any_of(existing.begin(), existing.end(),
                       [&](const Heuristic& h) { return is_duplicate(candidate, h); });
}

Population survival_select(std::span<const Heuristic> pool, int n_target) {
    if (n_target < 1) throw std::invalid_argument("survival_select: n_target must be >= 1");

    std::vector<Heuristic> unique;
    unique.reserve(pool.size());
    for (const Heuristic& h : pool) {
        if (!h.objective || !std::isfinite(*h.objective)) continue;
        bool dup = std::any_of(unique.begin(), unique.end(), [&](const Heuristic& u) {
            return std::abs(*u.objective - *h.objective) <= kObjectiveTolerance;
        });
        if (!dup) unique.push_back(h);
    }
    std::stable_sort(unique.begin(), unique.end(),
                     [](const Heuristic& a, const Heuristic& b) {
                         return *a.objective < *b.objective;
                     });
    if (unique.size() > static_cast<std::size_t>(n_target))
        unique.resize(static_cast<std::size_t>(n_target));
    return Population{std::move(unique), n_target};
}

std::vector<double> rank_weights(std::size_t n) {
    if (n == 0) throw std::invalid_argument("rank_weights: empty population");
    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        w[k] = 1.0 / static_cast<double>(k + 1 + n);
        total += w[k];
    }
    for (double& x : w) x /= total;
    return w;
}

std::vector<Heuristic> rank_select_parents(const Population& pop, int m, std::mt19937_64& rng) {
    if (pop.members.empty()) throw std::invalid_argument("rank_select_parents: empty population");
    if (m < 1) throw std::invalid_argument("rank_select_parents: m must be >= 1");
    const std::vector<double> w = rank_weights(pop.members.size());
    std::vector<Heuristic> parents;
    parents.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        parents.push_back(pop.members[weighted_index(rng, w)]);
    return parents;
}

PopulationStats population_stats(std::span<const Heuristic> members) {
    std::vector<double> vals;
    vals.reserve(members.size());
    for (const Heuristic& h : members)
        if (h.objective) vals.push_back(*h.objective);
    if (vals.empty())
        throw std::invalid_argument("population_stats: no member has an objective");

    PopulationStats s;
    s.best = vals[0];
    s.worst = vals[0];
    double sum = 0.0;
    for (double v : vals) {
        s.best = std::min(s.best, v);
        s.worst = std::max(s.worst, v);
        sum += v;
    }
    s.avg = sum / static_cast<double>(vals.size());
    double sq = 0.0;
    for (double v : vals) sq += (v - s.avg) * (v - s.avg);
    s.stddev = std::sqrt(sq / static_cast<double>(vals.size()));
    s.diversity = s.stddev / std::max(std::abs(s.avg), 1e-9);
    return s;
}

}  // namespace hifo
