#include "hifo/navigator.hpp"

#include <cmath>

#include "hifo/rng.hpp"

namespace hifo {

Navigator::Navigator(NavigatorConfig cfg) : cfg_(cfg) {}

void Navigator::observe(const PopulationStats& stats) {
    bool progressed;
    if (!best_so_far_) {
        progressed = true;
    } else {
        const double margin = cfg_.progress_epsilon * std::max(std::abs(*best_so_far_), 1.0);
        progressed = (*best_so_far_ - stats.best) > margin;
    }
    if (progressed) {
        progress_ += 1;
        stagnation_ = 0;
        best_so_far_ = stats.best;
    } else {
        stagnation_ += 1;
        progress_ = 0;
    }
    diversity_ = stats.diversity;
    observed_ = true;
}

Regime Navigator::decide_regime(int stagnation, int progress, double diversity,
                                const NavigatorConfig& cfg) {
    if (stagnation >= cfg.stagnation_threshold || diversity < cfg.diversity_floor)
        return Regime::Explore;
    if (progress >= cfg.progress_threshold) return Regime::Exploit;
    return Regime::Balance;
}

Regime Navigator::decide_regime() const {
    if (!observed_) return Regime::Balance;
    return decide_regime(stagnation_, progress_, diversity_, cfg_);
}

const std::vector<std::string>& Navigator::directive_pool(Regime regime) {
    static const std::vector<std::string> balance = {
        "Optimizing objective function evaluation criteria.",
        "Considering the long-term impact of current decisions.",
        "Balancing local optimality with global search strategies.",
        "Improving algorithm robustness across different problem instances.",
        "Managing computational complexity and time efficiency.",
    };
    static const std::vector<std::string> exploit_pool = {
        "Refining core evaluation and scoring functions.",
        "Fine-tuning critical algorithm parameters and thresholds.",
        "Improving the precision of existing heuristics and rules.",
        "Reducing unnecessary computational overhead.",
    };
    static const std::vector<std::string> explore_pool = {
        "Exploring novel solution construction methodologies.",
        "Investigating alternative problem decomposition approaches.",
        "Introducing new randomization or adaptive mechanisms.",
        "Experimenting with hybrid strategy combinations.",
    };
    switch (regime) {
        case Regime::Exploit: return exploit_pool;
        case Regime::Explore: return explore_pool;
        case Regime::Balance: break;
    }
    return balance;
}

std::string Navigator::sample_directive(Regime regime, std::mt19937_64& rng) const {
    const std::vector<std::string>& pool = directive_pool(regime);
    return pool[uniform_index(rng, pool.size())];
}

void Navigator::restore(int stagnation, int progress, double diversity,
                        std::optional<double> best_so_far) {
    stagnation_ = stagnation;
    progress_ = progress;
    diversity_ = diversity;
    best_so_far_ = best_so_far;
    observed_ = best_so_far.has_value();
}

}  // namespace hifo
