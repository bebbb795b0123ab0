#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hifo/heuristic.hpp"
#include "hifo/insight_pool.hpp"
#include "hifo/navigator.hpp"
#include "hifo/task_spec.hpp"

namespace hifo {

struct ComposedPrompt {
    Strategy strategy = Strategy::I1;
    std::string body;
    std::vector<std::string> insight_ids;
    std::string directive;
    Regime regime = Regime::Balance;
    std::string task_id;
};

enum class ParseErrorKind { NoThought, NoCode };

struct HeuristicParse {
    bool ok = false;
    std::string thought;
    std::string code;
    ParseErrorKind error = ParseErrorKind::NoThought;
};

// Renders operator prompts from templates and parses generator replies.
//
// Templates are plain text with placeholders {{task_description}},
// {{function_name}}, {{parents}}, {{insights}}, {{directive}},
// {{regime_hint}} and {{io_spec}}. Built-in defaults cover every strategy;
// load_overrides can replace them per strategy or per (task, strategy)
// without code changes.
class PromptEngine {
public:
    PromptEngine() = default;

    // Reads <tag>.txt (generic) and <task_id>/<tag>.txt (task-specific)
    // override files from `dir`.
    void load_overrides(const std::filesystem::path& dir);

    static const std::string& builtin_template(Strategy s);
    const std::string& template_text(Strategy s, const std::string& task_id) const;

    // The number of parents a strategy consumes; crossover strategies take
    // `crossover_parents` (at least 2), mutations one, i1 none.
    static int parent_arity(Strategy s, int crossover_parents);

    // Fills the strategy's template. Throws std::invalid_argument on a
    // parent arity mismatch. The first line of the body is a header comment
    // naming the operator, which the scripted generator keys on.
    ComposedPrompt compose(Strategy s, const TaskSpec& task,
                           std::span<const Heuristic> parents,
                           std::span<const Insight> insights,
                           const std::string& directive, Regime regime,
                           int crossover_parents = 2) const;

    // Prompt asking the generator to distill 1-2 design principles from the
    // elite heuristics. Throws on an empty elite list.
    static std::string compose_insight_extraction(std::span<const Heuristic> elites);

    // Number of elites fed to extraction: top 30% of n, rounded up, min 1.
    static std::size_t elite_count(std::size_t population_size);

    // thought = interior of the first balanced {...} span; code = interior
    // of the first fenced block, else the tail starting at the first
    // def/import/from line. When thought_required is false a missing brace
    // span is tolerated (the simplification operator asks for code only).
    static HeuristicParse parse_heuristic_response(const std::string& raw,
                                                   bool thought_required = true);

    // Bullet list of principle sentences: markers stripped, short fragments
    // (< 4 word tokens) dropped, capped at 2 entries.
    static std::vector<std::string> parse_insight_list(const std::string& raw);

private:
    std::map<std::string, std::string> overrides_;  // key: "task/tag" or "tag"
};

}  // namespace hifo
