#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hifo/population.hpp"

namespace hifo {

enum class Regime { Explore, Exploit, Balance };

constexpr const char* to_string(Regime r) {
    switch (r) {
        case Regime::Explore: return "explore";
        case Regime::Exploit: return "exploit";
        case Regime::Balance: return "balance";
    }
    return "?";
}

struct NavigatorConfig {
    int stagnation_threshold = 3;
    int progress_threshold = 2;
    double diversity_floor = 0.3;      // below this the search is considered converged
    double progress_epsilon = 1e-3;    // relative improvement needed to count as progress
};

// Tracks search momentum across generations and turns it into a regime
// (explore / exploit / balance) plus a sampled design directive for prompts.
class Navigator {
public:
    explicit Navigator(NavigatorConfig cfg = {});

    // Feed end-of-generation population statistics. An observation counts as
    // progress when the best objective improved on the best seen so far by
    // more than a relative epsilon; otherwise it counts as stagnation.
    // Exactly one of the two counters is reset to zero each time.
    void observe(const PopulationStats& stats);

    // Regime from the current counters; explore wins over exploit when both
    // triggers fire. Before any observation this is balance.
    Regime decide_regime() const;

    static Regime decide_regime(int stagnation, int progress, double diversity,
                                const NavigatorConfig& cfg);

    // One directive drawn uniformly from the regime's pool.
    std::string sample_directive(Regime regime, std::mt19937_64& rng) const;

    static const std::vector<std::string>& directive_pool(Regime regime);

    int stagnation_count() const { return stagnation_; }
    int progress_count() const { return progress_; }
    double diversity() const { return diversity_; }
    std::optional<double> best_so_far() const { return best_so_far_; }
    bool observed() const { return observed_; }
    const NavigatorConfig& config() const { return cfg_; }

    // Restores a snapshot (used by replay and tests).
    void restore(int stagnation, int progress, double diversity,
                 std::optional<double> best_so_far);

private:
    NavigatorConfig cfg_;
    int stagnation_ = 0;
    int progress_ = 0;
    double diversity_ = 0.0;
    std::optional<double> best_so_far_;
    bool observed_ = false;
};

}  // namespace hifo
