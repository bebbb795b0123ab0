#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hifo/event_log.hpp"
#include "hifo/generator.hpp"
#include "hifo/insight_pool.hpp"
#include "hifo/navigator.hpp"
#include "hifo/population.hpp"
#include "hifo/problems/problem.hpp"
#include "hifo/prompt_engine.hpp"
#include "hifo/rng.hpp"
#include "hifo/run_config.hpp"

namespace hifo {

struct GenerationCurvePoint {
    int generation = 0;
    double best = 0.0;
    double avg = 0.0;
};

struct RunReport {
    std::string task_id;
    Heuristic best;
    std::vector<GenerationCurvePoint> curve;  // init row plus one per generation
    long total_requests = 0;
    std::vector<std::string> regime_history;
    std::vector<Insight> final_pool;
    std::string baseline_name;
    double baseline_objective = 0.0;
    double wall_time_seconds = 0.0;  // excluded from the event log

    nlohmann::json to_json() const;
};

class FatalInitError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The evolutionary control loop. Each run: build an initial population
// (seeds or repeated i1 generation), then per generation observe the
// navigator, extract insights from the elites, fire the five evolution
// strategies, credit contributing insights against pre-generation stats, and
// truncate survivors. Every step is logged; with a scripted generator the
// whole run replays byte-identically for a fixed seed.
class Orchestrator {
public:
    Orchestrator(const RunConfig& cfg, const Problem& problem, Generator& generator,
                 EventLog& log);

    RunReport run();

    const Population& population() const { return population_; }
    const InsightPool& pool() const { return pool_; }
    const Navigator& navigator() const { return navigator_; }

private:
    void initialize();
    void run_generation(int t);
    void do_extraction(int t);
    void run_slot(Strategy strategy, int t, const Population& snapshot,
                  const PopulationStats& pre_stats, const std::string& directive,
                  Regime regime);
    bool adopt_candidate(Heuristic candidate, const PopulationStats* pre_stats, int t);
    std::string fresh_heuristic_id();
    void record_survival(int t);

    const RunConfig& cfg_;
    const Problem& problem_;
    Generator& generator_;
    EventLog& log_;

    PromptEngine engine_;
    InsightPool pool_;
    Navigator navigator_;
    std::mt19937_64 rng_;
    Population population_;
    std::vector<GenerationCurvePoint> curve_;
    std::vector<std::string> regime_history_;
    int next_heuristic_ = 1;
};

}  // namespace hifo
