#include "hifo/orchestrator.hpp"

#include <chrono>
#include <fstream>

namespace hifo {

using nlohmann::json;

namespace {

json heuristic_json(const Heuristic& h) {
    json j = {{"id", h.id},
              {"origin", to_string(h.origin)},
              {"generation", h.generation_created},
              {"insights", h.contributing_insights}};
    if (h.objective)
        j["objective"] = *h.objective;
    else
        j["objective"] = nullptr;
    return j;
}

json pool_snapshot(const InsightPool& pool) {
    json out = json::array();
    for (const Insight& k : pool.members()) {
        json j = {{"id", k.id},
                  {"effectiveness", k.effectiveness},
                  {"usage_count", k.usage_count},
                  {"created_gen", k.created_gen},
                  {"seed", k.is_seed}};
        j["last_used_gen"] = k.last_used_gen ? json(*k.last_used_gen) : json(nullptr);
        j["last_success_gen"] = k.last_success_gen ? json(*k.last_success_gen) : json(nullptr);
        out.push_back(std::move(j));
    }
    return out;
}

constexpr Strategy kSlotOrder[] = {Strategy::E1, Strategy::E2, Strategy::M1, Strategy::M2,
                                   Strategy::M3};

}  // namespace

json RunReport::to_json() const {
    json curve_json = json::array();
    for (const GenerationCurvePoint& p : curve)
        curve_json.push_back({{"generation", p.generation}, {"best", p.best}, {"avg", p.avg}});

    json pool_json = json::array();
    for (const Insight& k : final_pool) {
        json j = {{"id", k.id},
                  {"text", k.text},
                  {"effectiveness", k.effectiveness},
                  {"usage_count", k.usage_count},
                  {"created_gen", k.created_gen},
                  {"seed", k.is_seed}};
        j["last_used_gen"] = k.last_used_gen ? json(*k.last_used_gen) : json(nullptr);
        j["last_success_gen"] = k.last_success_gen ? json(*k.last_success_gen) : json(nullptr);
        pool_json.push_back(std::move(j));
    }

    const double gap = baseline_objective != 0.0
                           ? (best.objective.value_or(0.0) - baseline_objective) /
                                 std::abs(baseline_objective)
                           : 0.0;
    return {
        {"task", task_id},
        {"best",
         {{"id", best.id},
          {"thought", best.thought},
          {"code", best.code},
          {"objective", best.objective.value_or(0.0)},
          {"origin", to_string(best.origin)},
          {"generation", best.generation_created}}},
        {"curve", curve_json},
        {"total_requests", total_requests},
        {"regimes", regime_history},
        {"pool", pool_json},
        {"baseline", {{"name", baseline_name}, {"objective", baseline_objective}}},
        {"gap_vs_baseline", gap},
        {"wall_time_seconds", wall_time_seconds},
    };
}

Orchestrator::Orchestrator(const RunConfig& cfg, const Problem& problem, Generator& generator,
                           EventLog& log)
    : cfg_(cfg),
      problem_(problem),
      generator_(generator),
      log_(log),
      pool_(cfg.pool),
      navigator_(cfg.navigator),
      rng_(seeded_rng(cfg.master_seed)) {
    if (!cfg.prompt_dir.empty()) engine_.load_overrides(cfg.prompt_dir);
    population_.capacity = cfg.pop_size;
}

std::string Orchestrator::fresh_heuristic_id() {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "h%04d", next_heuristic_++);
    return buf;
}

// Evaluates, applies the duplicate gate, credits insights (when pre-stats
// exist) and appends to the population. Returns true when adopted.
bool Orchestrator::adopt_candidate(Heuristic candidate, const PopulationStats* pre_stats,
                                   int t) {
    std::string error;
    const std::optional<double> objective =
        problem_.evaluate_code(candidate.code, cfg_.sandbox, &error);
    candidate.objective = objective;

    json eval_payload = {{"id", candidate.id},
                         {"generation", t},
                         {"strategy", to_string(candidate.origin)}};
    if (objective) {
        eval_payload["objective"] = *objective;
    } else {
        eval_payload["objective"] = nullptr;
        eval_payload["error"] = error;
    }

    if (!objective) {
        eval_payload["accepted"] = false;
        eval_payload["reject_reason"] = "invalid";
        log_.emit("evaluation", std::move(eval_payload));
        return false;
    }
    if (is_duplicate(candidate, std::span<const Heuristic>(population_.members))) {
        eval_payload["accepted"] = false;
        eval_payload["reject_reason"] = "duplicate";
        log_.emit("evaluation", std::move(eval_payload));
        return false;
    }
    eval_payload["accepted"] = true;
    log_.emit("evaluation", std::move(eval_payload));

    if (pre_stats && !candidate.contributing_insights.empty()) {
        const double rho =
            InsightPool::normalized_score(*objective, pre_stats->best, pre_stats->worst);
        const double g_eff = InsightPool::credit_signal(*objective, pre_stats->best,
                                                        pre_stats->avg, pre_stats->worst);
        const CreditResult credited =
            pool_.apply_credit(candidate.contributing_insights, g_eff, t);
        log_.emit("credit", {{"generation", t},
                             {"heuristic", candidate.id},
                             {"g_new", *objective},
                             {"rho", rho},
                             {"g_eff", g_eff},
                             {"insights", candidate.contributing_insights},
                             {"updated", credited.updated},
                             {"unknown", credited.unknown}});
    }
    population_.members.push_back(std::move(candidate));
    return true;
}

void Orchestrator::initialize() {
    log_.emit("init", {{"phase", "pool_seed"}, {"pool", pool_snapshot(pool_)}});

    if (!cfg_.seeds.empty()) {
        for (const SeedHeuristic& seed : cfg_.seeds) {
            Heuristic h;
            h.id = fresh_heuristic_id();
            h.thought = seed.thought;
            h.code = seed.code;
            h.origin = Origin::Seed;
            h.generation_created = 0;
            if (adopt_candidate(std::move(h), nullptr, 0))
                log_.emit("init", {{"phase", "seed_adopted"},
                                   {"id", population_.members.back().id},
                                   {"objective", *population_.members.back().objective}});
        }
        if (population_.empty())
            throw FatalInitError("no seed heuristic evaluated successfully");
    } else {
        const int budget = cfg_.init_attempt_factor * cfg_.pop_size;
        int attempts = 0;
        while (static_cast<int>(population_.size()) < cfg_.pop_size && attempts < budget) {
            ++attempts;
            const std::vector<Insight> insights = pool_.retrieve(0);
            const std::string directive = navigator_.sample_directive(Regime::Balance, rng_);
            const ComposedPrompt prompt =
                engine_.compose(Strategy::I1, problem_.task(), {}, insights, directive,
                                Regime::Balance, cfg_.crossover_parents);
            log_.emit("prompt", {{"generation", 0},
                                 {"strategy", "i1"},
                                 {"attempt", attempts},
                                 {"insights", prompt.insight_ids},
                                 {"directive", directive},
                                 {"regime", "balance"},
                                 {"body", prompt.body}});
            std::string response;
            try {
                response = generator_.generate(prompt.body);
            } catch (const GeneratorError& e) {
                log_.emit("error",
                          {{"generation", 0}, {"where", "init_generate"}, {"detail", e.what()}});
                continue;
            }
            const HeuristicParse parsed = PromptEngine::parse_heuristic_response(response, true);
            log_.emit("generation_result",
                      {{"generation", 0},
                       {"strategy", "i1"},
                       {"attempt", attempts},
                       {"ok", true},
                       {"response", response},
                       {"parse_ok", parsed.ok},
                       {"parse_error",
                        parsed.ok ? json(nullptr)
                                  : json(parsed.error == ParseErrorKind::NoThought ? "no_thought"
                                                                                   : "no_code")}});
            if (!parsed.ok) continue;

            Heuristic h;
            h.id = fresh_heuristic_id();
            h.thought = parsed.thought;
            h.code = parsed.code;
            h.origin = Origin::I1;
            h.generation_created = 0;
            for (const std::string& id : prompt.insight_ids)
                h.contributing_insights.push_back(id);
            if (adopt_candidate(std::move(h), nullptr, 0))
                log_.emit("init", {{"phase", "member_adopted"},
                                   {"id", population_.members.back().id},
                                   {"objective", *population_.members.back().objective},
                                   {"attempt", attempts}});
        }
        if (static_cast<int>(population_.size()) < cfg_.pop_size)
            throw FatalInitError("initialization budget exhausted: " +
                                 std::to_string(population_.size()) + "/" +
                                 std::to_string(cfg_.pop_size) + " members after " +
                                 std::to_string(attempts) + " attempts");
    }

    population_ = survival_select(population_.members, cfg_.pop_size);
    record_survival(0);
}

void Orchestrator::do_extraction(int t) {
    const std::size_t n_elite = PromptEngine::elite_count(population_.size());
    const std::vector<Heuristic> elites(population_.members.begin(),
                                        population_.members.begin() +
                                            static_cast<std::ptrdiff_t>(n_elite));
    const std::string prompt = PromptEngine::compose_insight_extraction(elites);
    json elite_ids = json::array();
    for (const Heuristic& h : elites) elite_ids.push_back(h.id);
    log_.emit("prompt", {{"generation", t},
                         {"strategy", "extract"},
                         {"elites", elite_ids},
                         {"body", prompt}});

    std::string response;
    try {
        response = generator_.generate(prompt);
    } catch (const GeneratorError& e) {
        log_.emit("error", {{"generation", t}, {"where", "extraction"}, {"detail", e.what()}});
        return;
    }
    const std::vector<std::string> principles = PromptEngine::parse_insight_list(response);
    log_.emit("extraction", {{"generation", t},
                             {"elites", elite_ids},
                             {"response", response},
                             {"parsed", principles}});

    for (const std::string& text : principles) {
        const AdmissionResult admitted = pool_.admit(text, t);
        log_.emit("admission",
                  {{"generation", t},
                   {"text", text},
                   {"admitted", admitted.admitted},
                   {"id", admitted.admitted ? json(admitted.id) : json(nullptr)},
                   {"max_similarity", admitted.max_similarity},
                   {"nearest", admitted.nearest_id.empty() ? json(nullptr)
                                                           : json(admitted.nearest_id)}});
    }
    for (const EvictionRecord& ev : pool_.prune(t))
        log_.emit("eviction", {{"generation", t},
                               {"id", ev.id},
                               {"text", ev.text},
                               {"score", ev.score},
                               {"grace_override", ev.grace_override}});
}

void Orchestrator::run_slot(Strategy strategy, int t, const Population& snapshot,
                            const PopulationStats& pre_stats, const std::string& directive,
                            Regime regime) {
    const double weight = operator_weight(cfg_, to_string(strategy));
    if (weight <= 0.0) return;
    if (weight < 1.0 && uniform01(rng_) >= weight) return;

    const std::vector<Insight> insights = pool_.retrieve(t);
    const int arity = PromptEngine::parent_arity(strategy, cfg_.crossover_parents);
    const std::vector<Heuristic> parents = rank_select_parents(snapshot, arity, rng_);

    const ComposedPrompt prompt = engine_.compose(strategy, problem_.task(), parents, insights,
                                                  directive, regime, cfg_.crossover_parents);
    json parent_ids = json::array();
    for (const Heuristic& p : parents) parent_ids.push_back(p.id);

    // One initial attempt plus up to two re-generations on parse failure.
    for (int attempt = 0; attempt < 3; ++attempt) {
        log_.emit("prompt", {{"generation", t},
                             {"strategy", to_string(strategy)},
                             {"attempt", attempt},
                             {"parents", parent_ids},
                             {"insights", prompt.insight_ids},
                             {"directive", directive},
                             {"regime", to_string(regime)},
                             {"body", prompt.body}});
        std::string response;
        try {
            response = generator_.generate(prompt.body);
        } catch (const GeneratorError& e) {
            log_.emit("error", {{"generation", t},
                                {"where", std::string("slot_") + to_string(strategy)},
                                {"detail", e.what()}});
            return;
        }
        const bool thought_required = strategy != Strategy::M3;
        const HeuristicParse parsed =
            PromptEngine::parse_heuristic_response(response, thought_required);
        log_.emit("generation_result",
                  {{"generation", t},
                   {"strategy", to_string(strategy)},
                   {"attempt", attempt},
                   {"ok", true},
                   {"response", response},
                   {"parse_ok", parsed.ok},
                   {"parse_error",
                    parsed.ok ? json(nullptr)
                              : json(parsed.error == ParseErrorKind::NoThought ? "no_thought"
                                                                               : "no_code")}});
        if (!parsed.ok) continue;

        Heuristic h;
        h.id = fresh_heuristic_id();
        h.thought = parsed.thought.empty() ? parents[0].thought : parsed.thought;
        h.code = parsed.code;
        h.origin = to_origin(strategy);
        h.generation_created = t;
        for (const std::string& id : prompt.insight_ids) h.contributing_insights.push_back(id);
        adopt_candidate(std::move(h), &pre_stats, t);
        return;
    }
}

void Orchestrator::run_generation(int t) {
    const PopulationStats pre_stats = population_stats(population_);
    navigator_.observe(pre_stats);
    const Regime regime = navigator_.decide_regime();
    const std::string directive = navigator_.sample_directive(regime, rng_);
    regime_history_.push_back(to_string(regime));
    log_.emit("regime", {{"generation", t},
                         {"stagnation", navigator_.stagnation_count()},
                         {"progress", navigator_.progress_count()},
                         {"diversity", navigator_.diversity()},
                         {"best_so_far", navigator_.best_so_far().value_or(pre_stats.best)},
                         {"regime", to_string(regime)},
                         {"directive", directive}});

    if (cfg_.extraction_enabled) do_extraction(t);

    const Population snapshot = population_;
    for (Strategy strategy : kSlotOrder)
        run_slot(strategy, t, snapshot, pre_stats, directive, regime);

    population_ = survival_select(population_.members, cfg_.pop_size);
    record_survival(t);
}

void Orchestrator::record_survival(int t) {
    const PopulationStats stats = population_stats(population_);
    curve_.push_back({t, stats.best, stats.avg});
    json members = json::array();
    for (const Heuristic& h : population_.members) members.push_back(heuristic_json(h));
    log_.emit("survival", {{"generation", t},
                           {"population", members},
                           {"best", stats.best},
                           {"avg", stats.avg},
                           {"pool", pool_snapshot(pool_)}});
}

RunReport Orchestrator::run() {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();

    if (!cfg_.out_dir.empty()) {
        fs::create_directories(cfg_.out_dir);
        log_.open(fs::path(cfg_.out_dir) / "events.jsonl");
        std::ofstream cfg_out(fs::path(cfg_.out_dir) / "config.json");
        cfg_out << run_config_to_json(cfg_).dump(2) << "\n";
    }

    pool_.seed(0);
    initialize();
    for (int t = 1; t <= cfg_.generations; ++t) run_generation(t);

    RunReport report;
    report.task_id = cfg_.task_id;
    report.best = population_.members.front();
    report.curve = curve_;
    report.total_requests = generator_.request_count();
    report.regime_history = regime_history_;
    report.final_pool = pool_.members();
    report.baseline_name = problem_.baseline_name();
    report.baseline_objective = problem_.baseline_objective();
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!cfg_.out_dir.empty()) {
        std::ofstream report_out(fs::path(cfg_.out_dir) / "report.json");
        report_out << report.to_json().dump(2) << "\n";
        std::ofstream best_out(fs::path(cfg_.out_dir) / "best.py");
        best_out << "# " << report.best.thought << "\n" << report.best.code << "\n";
    }
    return report;
}

}  // namespace hifo
