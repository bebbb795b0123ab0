// Acceptance gate: one self-contained check per release criterion, each
// printed as a single [PASS]/[FAIL] line. Exits nonzero if any check fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hifo/event_log.hpp"
#include "hifo/generator.hpp"
#include "hifo/insight_pool.hpp"
#include "hifo/navigator.hpp"
#include "hifo/orchestrator.hpp"
#include "hifo/population.hpp"
#include "hifo/problems/bpp.hpp"
#include "hifo/problems/fssp.hpp"
#include "hifo/problems/problem.hpp"
#include "hifo/problems/tsp.hpp"
#include "hifo/rng.hpp"
#include "hifo/run_config.hpp"

using namespace hifo;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

const std::string kNearest =
    "def select_next_node(current_node, origin_node, unvisited_nodes, distance_matrix):\n"
    "    return min(unvisited_nodes, key=lambda j: distance_matrix[current_node][j])\n";

const std::string kFarthest =
    "def select_next_node(current_node, origin_node, unvisited_nodes, distance_matrix):\n"
    "    return max(unvisited_nodes, key=lambda j: distance_matrix[current_node][j])\n";

const std::string kLowestIndex =
    "def select_next_node(current_node, origin_node, unvisited_nodes, distance_matrix):\n"
    "    return sorted(unvisited_nodes)[0]\n";

const std::string kLookahead =
    "def select_next_node(current_node, origin_node, unvisited_nodes, distance_matrix):\n"
    "    if len(unvisited_nodes) == 1:\n"
    "        return unvisited_nodes[0]\n"
    "    def key(j):\n"
    "        rest = [distance_matrix[j][k] for k in unvisited_nodes if k != j]\n"
    "        return distance_matrix[current_node][j] + 0.3 * min(rest)\n"
    "    return min(unvisited_nodes, key=key)\n";

const std::string kOriginDiscount =
    "def select_next_node(current_node, origin_node, unvisited_nodes, distance_matrix):\n"
    "    return min(unvisited_nodes, key=lambda j: distance_matrix[current_node][j] - 0.4 * "
    "distance_matrix[j][origin_node])\n";

const std::string kFarthestPull =
    "def select_next_node(current_node, origin_node, unvisited_nodes, distance_matrix):\n"
    "    return max(unvisited_nodes, key=lambda j: distance_matrix[current_node][j] + 0.5 * "
    "distance_matrix[j][origin_node])\n";

std::string wrap(const std::string& thought, const std::string& code) {
    return "{" + thought + "}\n```python\n" + code + "```\n";
}

// ---------------------------------------------------------------------------
// 1. Tiered credit signal against an independent transcription of the
//    piecewise formula, over a 1000-tuple grid plus the tier boundaries.

double credit_oracle(double g_new, double g_best, double g_avg, double g_worst) {
    double rho;
    if (g_worst == g_best)
        rho = g_new <= g_best ? 1.0 : 0.0;
    else
        rho = (g_worst - g_new) / (g_worst - g_best);
    rho = std::clamp(rho, -1.0, 2.0);
    if (g_new <= g_best) return 0.8 + 0.2 * rho;
    if (g_new <= g_avg) return 0.2 + 0.6 * rho;
    return -0.3 + 0.5 * rho;
}

bool check_credit_formula(std::string& why) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng = seeded_rng(2024);

    for (int i = 0; i < 1000; ++i) {
        double a = uniform01(rng) * 20.0 - 10.0;
        double b = uniform01(rng) * 20.0 - 10.0;
        double c = uniform01(rng) * 20.0 - 10.0;
        double best = std::min({a, b, c});
        double worst = std::max({a, b, c});
        double avg = (a + b + c) / 3.0;
        if (i % 7 == 0) best = avg = worst = a;  // degenerate spread

        const double span = worst - best;
        double g_new = best - span + uniform01(rng) * 3.0 * std::max(span, 1.0);
        if (i % 5 == 0) g_new = best;
        if (i % 5 == 1) g_new = avg;

        const double got = InsightPool::credit_signal(g_new, best, avg, worst);
        const double want = credit_oracle(g_new, best, avg, worst);
        if (std::abs(got - want) > 1e-12) {
            why = fmt("tuple %d: got %.17g, oracle %.17g", i, got, want);
            return false;
        }
    }

    // Boundary conventions: equality with the best lands in the top tier,
    // equality with the average in the middle tier, anything above falls out.
    if (InsightPool::credit_signal(2.0, 2.0, 3.0, 4.0) != 1.0) {
        why = "g_new == best must use the top tier (expected 1.0)";
        return false;
    }
    if (InsightPool::credit_signal(3.0, 2.0, 3.0, 4.0) != 0.2 + 0.6 * 0.5) {
        why = "g_new == avg must use the middle tier";
        return false;
    }
    const double above = InsightPool::credit_signal(std::nextafter(3.0, 4.0), 2.0, 3.0, 4.0);
    if (above >= 0.0) {
        why = fmt("g_new just above avg must drop to the bottom tier, got %.17g", above);
        return false;
    }

    const double elapsed = seconds_since(t0);
    if (elapsed >= 1.0) {
        why = fmt("took %.2fs, limit 1s", elapsed);
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 2. EMA effectiveness approaches a constant signal monotonically.

bool check_ema_convergence(std::string& why) {
    InsightPool pool;
    const AdmissionResult adm = pool.admit("track the running spread of bin residuals", 0);
    if (!adm.admitted) {
        why = "seed insight not admitted";
        return false;
    }
    const std::vector<std::string> ids = {adm.id};

    double prev_gap = std::abs(pool.find(adm.id)->effectiveness - 1.0);
    for (int k = 1; k <= 50; ++k) {
        pool.apply_credit(ids, 1.0, k);
        const double gap = std::abs(pool.find(adm.id)->effectiveness - 1.0);
        if (!(gap < prev_gap)) {
            why = fmt("gap stopped shrinking at step %d (%.3g -> %.3g)", k, prev_gap, gap);
            return false;
        }
        prev_gap = gap;
    }
    const double bound = std::pow(0.7, 50);
    if (!(prev_gap < bound)) {
        why = fmt("final gap %.3g, bound %.3g", prev_gap, bound);
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 3. Pool lifecycle: 40 admissions against capacity 30, with usage and
//    credit churn. Every eviction is replayed against a shadow copy to
//    confirm it removed a minimum-score member under the grace rule.

bool check_pool_lifecycle(std::string& why) {
    InsightPoolConfig cfg;  // capacity 30, novelty 0.7, grace usage 3
    InsightPool pool(cfg);

    std::vector<std::string> fresh;
    for (int i = 0; i < 40; ++i)
        fresh.push_back("idea " + std::to_string(i) + " couples trait" + std::to_string(i) +
                        "a with trait" + std::to_string(i) + "b under load");

    int admitted = 0;
    int rejected = 0;
    int next_text = 0;
    for (int gen = 1; admitted < 40; ++gen) {
        for (int j = 0; j < 3 && admitted < 40; ++j) {
            const AdmissionResult r = pool.admit(fresh[static_cast<std::size_t>(next_text++)], gen);
            if (!r.admitted) {
                why = "novel text rejected: " + fresh[static_cast<std::size_t>(next_text - 1)];
                return false;
            }
            ++admitted;
        }

        // A reworded member (same token set) must bounce off the novelty gate.
        if (!pool.empty()) {
            const std::string& text =
                pool.members()[static_cast<std::size_t>(gen) % pool.size()].text;
            std::istringstream in(text);
            std::vector<std::string> words{std::istream_iterator<std::string>(in), {}};
            std::reverse(words.begin(), words.end());
            std::string reworded;
            for (const std::string& w : words) reworded += w + " ";
            if (pool.admit(reworded, gen).admitted) {
                why = "reworded duplicate admitted: " + reworded;
                return false;
            }
            ++rejected;
        }

        // Usage and credit churn so grace and effectiveness vary.
        std::vector<std::string> used;
        for (const Insight& k : pool.retrieve(gen)) used.push_back(k.id);
        pool.apply_credit(used, gen % 2 == 0 ? 1.0 : -0.6, gen);

        const std::vector<Insight> before = pool.members();
        const std::vector<EvictionRecord> evictions = pool.prune(gen);

        std::vector<Insight> shadow = before;
        for (const EvictionRecord& ev : evictions) {
            std::vector<std::size_t> eligible;
            for (std::size_t i = 0; i < shadow.size(); ++i)
                if (shadow[i].usage_count >= cfg.grace_usage) eligible.push_back(i);
            const bool override_expected = eligible.empty();
            if (override_expected)
                for (std::size_t i = 0; i < shadow.size(); ++i) eligible.push_back(i);
            if (ev.grace_override != override_expected) {
                why = "grace_override flag disagrees with the shadow replay for " + ev.id;
                return false;
            }

            double min_score = std::numeric_limits<double>::infinity();
            for (std::size_t i : eligible)
                min_score = std::min(min_score, pool.eviction_score(shadow[i], gen));

            const auto it = std::find_if(shadow.begin(), shadow.end(),
                                         [&](const Insight& k) { return k.id == ev.id; });
            if (it == shadow.end()) {
                why = "evicted id " + ev.id + " missing from the shadow pool";
                return false;
            }
            const double score = pool.eviction_score(*it, gen);
            if (it->usage_count < cfg.grace_usage && !override_expected) {
                why = "evicted " + ev.id + " while still under grace protection";
                return false;
            }
            if (std::abs(score - min_score) > 1e-12 || std::abs(ev.score - score) > 1e-12) {
                why = fmt("evicted score %.17g, minimum eligible %.17g", score, min_score);
                return false;
            }
            shadow.erase(it);
        }
        if (shadow.size() != pool.size()) {
            why = "shadow replay and pool diverged after prune";
            return false;
        }
    }

    if (pool.size() != 30) {
        why = fmt("final pool size %.0f, expected 30", double(pool.size()));
        return false;
    }
    if (rejected == 0) {
        why = "no reworded duplicate was ever tested";
        return false;
    }
    for (std::size_t i = 0; i < pool.size(); ++i)
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
            const double sim = InsightPool::jaccard_similarity(pool.members()[i].text,
                                                               pool.members()[j].text);
            if (sim >= cfg.jaccard_threshold) {
                why = fmt("surviving pair with similarity %.3f", sim);
                return false;
            }
        }
    return true;
}

// ---------------------------------------------------------------------------
// 4. Navigator regime truth table, exhaustive over the three triggers.

bool check_navigator_table(std::string& why) {
    const NavigatorConfig cfg;
    for (int mask = 0; mask < 8; ++mask) {
        const bool stag_fire = mask & 1;
        const bool low_div = mask & 2;
        const bool prog_fire = mask & 4;
        const int stag = stag_fire ? cfg.stagnation_threshold : cfg.stagnation_threshold - 1;
        const double div = low_div ? cfg.diversity_floor - 0.01 : cfg.diversity_floor + 0.01;
        const int prog = prog_fire ? cfg.progress_threshold : cfg.progress_threshold - 1;

        const Regime expected = (stag_fire || low_div) ? Regime::Explore
                                : prog_fire            ? Regime::Exploit
                                                       : Regime::Balance;
        const Regime got = Navigator::decide_regime(stag, prog, div, cfg);
        if (got != expected) {
            why = fmt("combination %d (stag=%d, prog=%d): wrong regime", mask, stag, prog);
            return false;
        }
    }

    // Threshold conventions: counters fire at the threshold, the diversity
    // floor is strict.
    if (Navigator::decide_regime(3, 0, 0.5, cfg) != Regime::Explore ||
        Navigator::decide_regime(0, 2, 0.3, cfg) != Regime::Exploit ||
        Navigator::decide_regime(0, 1, 0.3, cfg) != Regime::Balance) {
        why = "boundary conventions violated (stag >= 3, prog >= 2, diversity < 0.3)";
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 5. Rank-selection frequencies against the 1/(k+1+N) law, chi-square.

bool check_rank_selection(std::string& why) {
    Population pop;
    for (int i = 0; i < 4; ++i) {
        Heuristic h;
        h.id = "h" + std::to_string(i);
        h.objective = double(i);
        pop.members.push_back(h);
    }

    std::mt19937_64 rng = seeded_rng(31);
    const int draws = 100000;
    std::vector<long> counts(4, 0);
    for (int i = 0; i < draws; ++i) {
        const std::vector<Heuristic> p = rank_select_parents(pop, 1, rng);
        counts[static_cast<std::size_t>(*p[0].objective)] += 1;
    }

    const std::vector<double> w = rank_weights(4);
    double chi2 = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double expected = w[k] * draws;
        const double diff = counts[k] - expected;
        chi2 += diff * diff / expected;
    }
    if (chi2 >= 11.345) {  // df = 3, p = 0.01
        why = fmt("chi-square %.3f exceeds 11.345", chi2);
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 6. Sandboxed evaluators against native oracles.

double naive_completion(const FsspInstance& inst, const std::vector<int>& order, int i, int j) {
    if (i < 0 || j < 0) return 0.0;
    return std::max(naive_completion(inst, order, i - 1, j),
                    naive_completion(inst, order, i, j - 1)) +
           inst.time[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]
                    [static_cast<std::size_t>(j)];
}

bool check_oracle_equivalence(std::string& why) {
    // Online packing with score = -(residual - item) must equal best fit.
    {
        SandboxPolicy policy;
        policy.total_budget = std::chrono::milliseconds(600000);
        ExecSession session(policy);
        const ExecResult loaded = session.load(
            "def score(item, bins):\n"
            "    return [-(b - item) for b in bins]\n",
            "score", 2);
        if (!loaded.ok) {
            why = "best-fit scorer failed to load: " + loaded.detail;
            return false;
        }
        for (int i = 0; i < 100; ++i) {
            const BppInstance inst = gen_bpp_weibull(100, 100, 1000 + i);
            std::string error;
            const std::optional<double> got = eval_bpp_online(session, inst, &error);
            if (!got) {
                why = fmt("packing instance %d failed: ", i) + error;
                return false;
            }
            const double want = excess_ratio(inst, best_fit_bins(inst));
            if (*got != want) {
                why = fmt("packing instance %d: sandbox %.17g, native %.17g", i, *got, want);
                return false;
            }
        }
    }

    // Makespan recursion against a plain recursive recomputation.
    {
        std::mt19937_64 rng = seeded_rng(404);
        for (int i = 0; i < 200; ++i) {
            const int jobs = 2 + int(uniform_index(rng, 9));      // 2..10
            const int machines = 1 + int(uniform_index(rng, 10)); // 1..10
            const FsspInstance inst = gen_fssp(jobs, machines, 5000 + i);
            std::vector<int> order(static_cast<std::size_t>(jobs));
            for (int j = 0; j < jobs; ++j) order[static_cast<std::size_t>(j)] = j;
            std::shuffle(order.begin(), order.end(), rng);

            const double dp = makespan(inst, order);
            const double naive = naive_completion(inst, order, jobs - 1, machines - 1);
            if (dp != naive) {
                why = fmt("makespan instance %d: dp %.17g, naive %.17g", i, dp, naive);
                return false;
            }
        }
    }

    // Constructed tours can never beat the exhaustive optimum.
    {
        ExecSession session{SandboxPolicy{}};
        const ExecResult loaded = session.load(kNearest, "select_next_node", 4);
        if (!loaded.ok) {
            why = "tour builder failed to load: " + loaded.detail;
            return false;
        }
        for (int i = 0; i < 50; ++i) {
            const int n = 5 + i % 5;  // 5..9
            const TspInstance inst = gen_tsp(n, 9000 + i);
            std::string error;
            const std::optional<double> tour = eval_tsp_construct(session, inst, &error);
            if (!tour) {
                why = fmt("tour instance %d failed: ", i) + error;
                return false;
            }
            const double opt = brute_force_tsp(inst);
            if (*tour < opt - 1e-9) {
                why = fmt("tour instance %d: constructed %.17g below optimum %.17g", i, *tour,
                          opt);
                return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// 7. Packing baselines at the reference scale.

bool check_packing_baselines(std::string& why) {
    const auto t0 = Clock::now();
    double best_fit_sum = 0.0;
    double first_fit_sum = 0.0;
    for (int seed = 1; seed <= 5; ++seed) {
        const BppInstance inst = gen_bpp_weibull(5000, 100, static_cast<std::uint64_t>(seed));
        best_fit_sum += excess_ratio(inst, best_fit_bins(inst));
        first_fit_sum += excess_ratio(inst, first_fit_bins(inst));
    }
    const double best_fit = best_fit_sum / 5.0;
    const double first_fit = first_fit_sum / 5.0;

    if (std::abs(best_fit - 0.0408) > 0.015) {
        why = fmt("best-fit excess %.4f outside 0.0408 +/- 0.015", best_fit);
        return false;
    }
    if (std::abs(first_fit - 0.0440) > 0.015) {
        why = fmt("first-fit excess %.4f outside 0.0440 +/- 0.015", first_fit);
        return false;
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 30.0) {
        why = fmt("took %.1fs, limit 30s", elapsed);
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 8. End-to-end determinism and event coverage on a scripted run.

RunConfig choreography_config(const fs::path& out_dir) {
    RunConfig cfg;
    cfg.task_id = "tsp_construct";
    cfg.pop_size = 4;
    cfg.generations = 8;
    cfg.master_seed = 11;
    cfg.out_dir = out_dir.string();
    InstanceSetSpec s;
    s.task = "tsp_construct";
    s.size = 16;
    s.count = 1;
    s.seed = 3;
    cfg.manifest = {s};
    cfg.pool.capacity = 6;
    return cfg;
}

std::vector<MockScriptEntry> choreography_script() {
    const std::string bullets =
        "- Favor short edges when extending the tour\n"
        "- Account for the eventual return to the starting node";
    std::vector<MockScriptEntry> script = {
        {"i1", "", wrap("step to the closest unvisited node", kNearest)},
        {"i1", "", wrap("look one step ahead before committing", kLookahead)},
        {"i1", "", wrap("always take the lowest index", kLowestIndex)},
        {"i1", "", wrap("head for the farthest node", kFarthest)},
    };
    for (int gen = 1; gen <= 8; ++gen) script.push_back({"extract", "", bullets});
    script.push_back({"e1", "", wrap("discount nodes far from the origin", kOriginDiscount)});
    for (int gen = 2; gen <= 8; ++gen)
        script.push_back({"e1", "", wrap("closest node", kNearest)});
    for (int gen = 1; gen <= 8; ++gen)
        script.push_back({"e2", "", wrap("closest node", kNearest)});
    script.push_back({"m1", "", wrap("closest node", kNearest)});
    script.push_back({"m1", "", wrap("stretch toward far-from-origin nodes", kFarthestPull)});
    for (int gen = 3; gen <= 8; ++gen)
        script.push_back({"m1", "", wrap("closest node", kNearest)});
    for (int gen = 1; gen <= 8; ++gen)
        script.push_back({"m2", "", wrap("closest node", kNearest)});
    for (int gen = 1; gen <= 8; ++gen)
        script.push_back({"m3", "", wrap("closest node", kNearest)});
    return script;
}

bool check_end_to_end(std::string& why) {
    const auto t0 = Clock::now();
    const fs::path dir_a = fs::temp_directory_path() / "hifo_acceptance_run_a";
    const fs::path dir_b = fs::temp_directory_path() / "hifo_acceptance_run_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    const RunConfig cfg = choreography_config(dir_a);
    const auto problem = make_problem(cfg);

    // The choreography relies on measured objectives: the discount variant
    // must lead, the pull variant must trail, and the opening population
    // must start diverse enough to avoid an immediate explore regime.
    const std::vector<std::string> codes = {kNearest,       kLookahead,     kLowestIndex,
                                            kFarthest,      kOriginDiscount, kFarthestPull};
    std::vector<double> obj;
    for (const std::string& code : codes) {
        std::string error;
        const std::optional<double> v = problem->evaluate_code(code, cfg.sandbox, &error);
        if (!v) {
            why = "choreography variant failed to evaluate: " + error;
            return false;
        }
        obj.push_back(*v);
    }
    for (std::size_t i = 0; i < obj.size(); ++i)
        for (std::size_t j = i + 1; j < obj.size(); ++j)
            if (obj[i] == obj[j]) {
                why = fmt("variants %d and %d collide at %.17g", double(i), double(j), obj[i]);
                return false;
            }
    const double discount = obj[4];
    const double init_best = *std::min_element(obj.begin(), obj.begin() + 4);
    if (!(discount < init_best * 0.99)) {
        why = "discount variant does not improve on the opening population";
        return false;
    }

    auto run_once = [&](const fs::path& dir) {
        RunConfig local = cfg;
        local.out_dir = dir.string();
        MockGenerator gen(choreography_script());
        EventLog log;
        Orchestrator orc(local, *problem, gen, log);
        return orc.run();
    };
    const RunReport report_a = run_once(dir_a);
    const RunReport report_b = run_once(dir_b);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string log_a = slurp(dir_a / "events.jsonl");
    const std::string log_b = slurp(dir_b / "events.jsonl");
    if (log_a.empty() || log_a != log_b) {
        why = "event logs differ between identically configured runs";
        return false;
    }
    if (report_a.total_requests != report_b.total_requests ||
        report_a.best.objective != report_b.best.objective) {
        why = "reports differ between identically configured runs";
        return false;
    }

    const auto parsed = read_event_log(dir_a / "events.jsonl");
    if (!std::holds_alternative<std::vector<RunEvent>>(parsed)) {
        why = "event log failed to parse back";
        return false;
    }
    const std::vector<RunEvent>& events = std::get<std::vector<RunEvent>>(parsed);

    double prev_best = std::numeric_limits<double>::infinity();
    int survivals = 0;
    long prompts = 0;
    int admissions = 0;
    int evictions = 0;
    bool top_tier_credit = false;
    bool negative_credit = false;
    std::set<std::string> regimes;
    for (const RunEvent& ev : events) {
        if (ev.kind == "survival") {
            const double best = ev.payload.at("best").get<double>();
            if (best > prev_best + 1e-15) {
                why = fmt("best objective regressed to %.17g", best);
                return false;
            }
            prev_best = best;
            ++survivals;
        } else if (ev.kind == "prompt") {
            ++prompts;
        } else if (ev.kind == "admission") {
            if (ev.payload.at("admitted").get<bool>()) ++admissions;
        } else if (ev.kind == "eviction") {
            ++evictions;
        } else if (ev.kind == "credit") {
            const double g_eff = ev.payload.at("g_eff").get<double>();
            top_tier_credit |= g_eff >= 0.8;
            negative_credit |= g_eff < 0.0;
        } else if (ev.kind == "regime") {
            regimes.insert(ev.payload.at("regime").get<std::string>());
        }
    }

    if (survivals != 9) {
        why = fmt("expected 9 survival records, saw %.0f", double(survivals));
        return false;
    }
    if (prompts != report_a.total_requests) {
        why = fmt("prompt events %.0f != recorded requests %.0f", double(prompts),
                  double(report_a.total_requests));
        return false;
    }
    if (admissions < 1 || evictions < 1 || !top_tier_credit || !negative_credit) {
        why = fmt("coverage gaps: admissions %.0f, evictions %.0f", double(admissions),
                  double(evictions));
        if (!top_tier_credit) why += ", no top-tier credit";
        if (!negative_credit) why += ", no negative credit";
        return false;
    }
    if (regimes != std::set<std::string>{"balance", "exploit", "explore"}) {
        why = "regimes seen:";
        for (const std::string& r : regimes) why += " " + r;
        return false;
    }
    if (report_a.best.objective != discount) {
        why = "best heuristic is not the measured front-runner";
        return false;
    }

    const double elapsed = seconds_since(t0);
    if (elapsed >= 120.0) {
        why = fmt("took %.1fs, limit 120s", elapsed);
        return false;
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    return true;
}

// ---------------------------------------------------------------------------
// 9. Hostile candidates are rejected while the run finishes.

bool check_sandbox_safety(std::string& why) {
    const fs::path sentinel = fs::temp_directory_path() / "hifo_acceptance_sentinel.txt";
    fs::remove(sentinel);

    RunConfig cfg;
    cfg.task_id = "tsp_construct";
    cfg.pop_size = 2;
    cfg.generations = 1;
    cfg.master_seed = 5;
    cfg.out_dir = "";
    InstanceSetSpec s;
    s.task = "tsp_construct";
    s.size = 8;
    s.count = 1;
    s.seed = 5;
    cfg.manifest = {s};
    cfg.sandbox.time_limit = std::chrono::milliseconds(400);
    cfg.sandbox.grace = std::chrono::milliseconds(200);

    const std::string file_writer =
        "def select_next_node(current_node, origin_node, unvisited_nodes, distance_matrix):\n"
        "    with open('" +
        sentinel.string() +
        "', 'w') as f:\n"
        "        f.write('breach')\n"
        "    return unvisited_nodes[0]\n";
    const std::string network_caller =
        "def select_next_node(current_node, origin_node, unvisited_nodes, distance_matrix):\n"
        "    import socket\n"
        "    s = socket.socket()\n"
        "    s.connect(('127.0.0.1', 9))\n"
        "    return unvisited_nodes[0]\n";
    const std::string spinner =
        "def select_next_node(current_node, origin_node, unvisited_nodes, distance_matrix):\n"
        "    while True:\n"
        "        pass\n";

    const std::vector<MockScriptEntry> script = {
        {"i1", "", wrap("closest node", kNearest)},
        {"i1", "", wrap("farthest node", kFarthest)},
        {"extract", "", "- Favor short edges when extending the tour"},
        {"e1", "", wrap("stash progress on disk", file_writer)},
        {"e2", "", wrap("phone home first", network_caller)},
        {"m1", "", wrap("think very hard", spinner)},
        {"m2", "", wrap("closest node", kNearest)},
        {"m3", "", wrap("closest node", kNearest)},
    };

    const auto problem = make_problem(cfg);
    MockGenerator gen(script);
    EventLog log;
    Orchestrator orc(cfg, *problem, gen, log);
    const RunReport report = orc.run();

    int invalid = 0;
    bool timeout_seen = false;
    bool denial_seen = false;
    for (const RunEvent& ev : log.events()) {
        if (ev.kind != "evaluation") continue;
        if (ev.payload.at("accepted").get<bool>()) continue;
        if (ev.payload.at("reject_reason") != "invalid") continue;
        ++invalid;
        const std::string error = ev.payload.at("error").get<std::string>();
        timeout_seen |= error.find("timeout") != std::string::npos;
        denial_seen |= error.find("denied capability") != std::string::npos;
    }

    if (invalid != 3) {
        why = fmt("expected 3 invalid candidates, saw %.0f", double(invalid));
        return false;
    }
    if (!timeout_seen || !denial_seen) {
        why = "missing a timeout or capability-denial rejection";
        return false;
    }
    if (log.count("survival") != 2 || !report.best.objective) {
        why = "run did not finish cleanly after the hostile candidates";
        return false;
    }
    if (fs::exists(sentinel)) {
        why = "sandboxed code reached the filesystem";
        fs::remove(sentinel);
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 10. The live-backend pipeline against an in-process chat-completion
//     endpoint. Model-quality comparisons need a real LLM and are out of
//     scope here; this verifies the wire path and the reported metrics.

bool check_live_pipeline(std::string& why) {
    setenv("HIFO_ACCEPT_KEY", "sk-acceptance", 1);

    std::atomic<int> i1_served{0};
    httplib::Server server;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        std::string content;
        try {
            content = json::parse(req.body).at("messages").at(0).at("content");
        } catch (...) {
        }
        std::string op;
        if (content.rfind("# operator: ", 0) == 0)
            op = content.substr(12, content.find('\n') - 12);

        std::string reply;
        if (op == "i1")
            reply = ++i1_served == 1 ? wrap("closest node", kNearest)
                                     : wrap("farthest node", kFarthest);
        else if (op == "extract")
            reply = "- Favor short edges when extending the tour";
        else
            reply = wrap("closest node", kNearest);
        res.set_content(json{{"choices", json::array({json{{"message", json{{"content",
                                                                             reply}}}}})},
                             {"usage", {{"prompt_tokens", 1}, {"completion_tokens", 1}}}}
                            .dump(),
                        "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    if (port <= 0) {
        why = "could not bind the stub endpoint";
        return false;
    }
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    bool ok = false;
    try {
        RunConfig cfg;
        cfg.task_id = "tsp_construct";
        cfg.pop_size = 2;
        cfg.generations = 1;
        cfg.master_seed = 5;
        cfg.out_dir = "";
        InstanceSetSpec s;
        s.task = "tsp_construct";
        s.size = 8;
        s.count = 1;
        s.seed = 5;
        cfg.manifest = {s};
        cfg.generator.backend = GeneratorConfig::Backend::Live;
        cfg.generator.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
        cfg.generator.model_name = "stub-model";
        cfg.generator.api_key_env = "HIFO_ACCEPT_KEY";
        cfg.generator.max_retries = 1;
        cfg.generator.backoff_base = std::chrono::milliseconds(5);

        const auto problem = make_problem(cfg);
        LiveGenerator gen(cfg.generator);
        EventLog log;
        Orchestrator orc(cfg, *problem, gen, log);
        const RunReport report = orc.run();

        const json summary = report.to_json();
        if (report.total_requests != 8) {
            why = fmt("expected 8 requests through the endpoint, saw %.0f",
                      double(report.total_requests));
        } else if (!summary.contains("gap_vs_baseline") || !summary.contains("wall_time_seconds") ||
                   summary.at("wall_time_seconds").get<double>() <= 0.0) {
            why = "report is missing gap or wall-time metrics";
        } else if (report.best.objective != report.baseline_objective) {
            why = "stubbed run should land exactly on the baseline heuristic";
        } else {
            ok = true;
        }
    } catch (const std::exception& e) {
        why = e.what();
    }

    server.stop();
    listener.join();
    return ok;
}

}  // namespace

int main() {
    struct Criterion {
        const char* label;
        std::function<bool(std::string&)> fn;
    };
    const std::vector<Criterion> criteria = {
        {"1. tiered credit signal matches an independent transcription (1000 tuples, 1e-12, <1s)",
         check_credit_formula},
        {"2. EMA effectiveness converges monotonically, |E-1| < 0.7^50 after 50 unit signals",
         check_ema_convergence},
        {"3. insight pool lifecycle: 40 admissions at capacity 30 evict only minimum-score members",
         check_pool_lifecycle},
        {"4. navigator regime truth table, 8 combinations with explore priority",
         check_navigator_table},
        {"5. rank selection matches 1/(k+1+N) weights over 1e5 draws (chi-square, p > 0.01)",
         check_rank_selection},
        {"6. sandboxed evaluators equal native oracles (best fit, makespan, brute-force bound)",
         check_oracle_equivalence},
        {"7. packing baselines: best fit ~4.08%, first fit ~4.40% (+/- 1.5 points, <30s)",
         check_packing_baselines},
        {"8. scripted end-to-end run replays byte-identically and covers credits, eviction, all "
         "regimes (<2min)",
         check_end_to_end},
        {"9. hostile candidates (file write, network, infinite loop) are rejected; the run "
         "completes",
         check_sandbox_safety},
        {"10. pipeline runs against an OpenAI-compatible endpoint and reports gap, requests, "
         "wall time (live model quality is out of scope)",
         check_live_pipeline},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string why;
        bool ok = false;
        try {
            ok = c.fn(why);
        } catch (const std::exception& e) {
            why = e.what();
        }
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", c.label);
        if (!ok) {
            std::printf("       %s\n", why.empty() ? "(no detail)" : why.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    std::printf(failures == 0 ? "all criteria passed\n" : "%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
