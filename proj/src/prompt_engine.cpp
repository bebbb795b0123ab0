#include "hifo/prompt_engine.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hifo {

namespace {

const std::string kTemplateI1 = R"({{task_description}}

First, describe your new algorithm and main steps in one sentence. The description must be inside a brace. Next, implement it in Python as a function named {{function_name}}.

{{io_spec}}

{{insights}}

For the evolutionary regime, please pay special attention to:
{{directive}}

{{regime_hint}}

Do not give additional explanations.)";

const std::string kTemplateE1 = R"({{task_description}}

{{parents}}

Please help me create a new algorithm that has a totally different form from the given ones.

First, describe your new algorithm and main steps in one sentence, enclosed in braces {}. Next, implement it in Python as a function named {{function_name}}.

{{io_spec}}

{{insights}}

For the evolutionary regime, please pay special attention to:
{{directive}}

{{regime_hint}}

Do not give additional explanations.)";

const std::string kTemplateE2 = R"({{task_description}}

{{parents}}

Please help me create a new algorithm that has a totally different form from the given ones but can be motivated from them.

Firstly, identify the common backbone idea in the provided algorithms.
Secondly, based on the backbone idea, describe your new algorithm and main steps in one sentence, enclosed in braces {}.
Thirdly, implement it in Python as a function named {{function_name}}.

{{io_spec}}

{{insights}}

For this recombination, please pay special attention to:
{{directive}}

{{regime_hint}}

Do not give additional explanations.)";

const std::string kTemplateM1 = R"({{task_description}}

{{parents}}

Please assist me in creating a new algorithm that has a different form but can be a modified version of the algorithm provided.

First, describe your new algorithm and main steps in one sentence, enclosed in braces {}.
Next, implement it in Python as a function named {{function_name}}.

{{io_spec}}

{{insights}}

For this mutation, please pay special attention to:
{{directive}}

{{regime_hint}}

Do not give additional explanations.)";

const std::string kTemplateM2 = R"({{task_description}}

{{parents}}

Please identify the main algorithm parameters and assist me in creating a new algorithm that has different parameter settings of the {{function_name}} function provided.

First, describe your new algorithm and main steps in one sentence, enclosed in braces {}.
Next, implement it in Python as a function named {{function_name}}.

{{io_spec}}

{{insights}}

When adjusting parameters, please pay special attention to:
{{directive}}

{{regime_hint}}

Do not give additional explanations.)";

const std::string kTemplateM3 = R"({{task_description}}

{{parents}}

First, identify the main components in the function above. Next, analyze which of these components may be overfitting to the in-distribution instances. Then, simplify those components to enhance generalization to out-of-distribution cases. Finally, provide the revised code, keeping the function name, inputs, and outputs unchanged.

Provide the complete revised function implementation, preserving its original signature.

{{io_spec}}

{{insights}}

When simplifying, please pay special attention to:
{{directive}}

{{regime_hint}}

Do not give additional explanations.)";

const std::string kRegimeHint =
    "Depending on the regime, try significantly different parameter values "
    "(focus_exploration), or fine-tune existing ones (focus_exploitation), or "
    "combine both strategies (balanced_search).";

void replace_all(std::string& text, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        text.replace(pos, key.size(), value);
        pos += value.size();
    }
}

// Placeholder lines that expanded to nothing leave blank-line runs behind.
std::string tidy(std::string text) {
    std::string out;
    out.reserve(text.size());
    int newlines = 0;
    for (char c : text) {
        if (c == '\n') {
            if (++newlines <= 2) out.push_back(c);
        } else {
            newlines = 0;
            out.push_back(c);
        }
    }
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back())))
        out.pop_back();
    return out;
}

std::string quoted_list(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += "'" + names[i] + "'";
    }
    return out;
}

std::string render_io_spec(const TaskSpec& task) {
    std::ostringstream os;
    os << "This function should accept " << task.input_names.size()
       << " input(s): " << quoted_list(task.input_names) << ".\n";
    os << "The function should return " << task.output_names.size()
       << " output(s): " << quoted_list(task.output_names) << ".";
    if (!task.extra_constraints.empty()) os << "\n" << task.extra_constraints;
    return os.str();
}

std::string render_insights(std::span<const Insight> insights) {
    if (insights.empty()) return "";
    std::string out = "Consider these successful design principles I've observed recently:";
    for (const Insight& k : insights) out += "\n- " + k.text;
    return out;
}

std::string render_parents(Strategy s, std::span<const Heuristic> parents) {
    std::ostringstream os;
    switch (s) {
        case Strategy::I1:
            return "";
        case Strategy::E1:
        case Strategy::E2:
            os << "I have " << parents.size()
               << " existing algorithms with their codes as follows:";
            for (std::size_t i = 0; i < parents.size(); ++i) {
                os << "\nNo." << (i + 1) << " algorithm and the corresponding code are:\n"
                   << parents[i].thought << "\n" << parents[i].code;
                if (i + 1 < parents.size()) os << "\n";
            }
            return os.str();
        case Strategy::M1:
        case Strategy::M2:
            os << "I have one algorithm with its code as follows:\n"
               << "Algorithm description: " << parents[0].thought << "\n"
               << "Code:\n" << parents[0].code;
            return os.str();
        case Strategy::M3:
            os << "I have one algorithm with its code as follows:\n"
               << "Code:\n" << parents[0].code;
            return os.str();
    }
    return "";
}

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

std::size_t count_word_tokens(const std::string& text) {
    std::size_t n = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        if (is_word_char(c)) {
            if (!in_word) ++n;
            in_word = true;
        } else {
            in_word = false;
        }
    }
    return n;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

const std::string& PromptEngine::builtin_template(Strategy s) {
    switch (s) {
        case Strategy::I1: return kTemplateI1;
        case Strategy::E1: return kTemplateE1;
        case Strategy::E2: return kTemplateE2;
        case Strategy::M1: return kTemplateM1;
        case Strategy::M2: return kTemplateM2;
        case Strategy::M3: return kTemplateM3;
    }
    return kTemplateI1;
}

void PromptEngine::load_overrides(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw std::runtime_error("prompt override dir not found: " + dir.string());
    auto read_file = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            overrides_[entry.path().stem().string()] = read_file(entry.path());
        } else if (entry.is_directory()) {
            for (const auto& sub : fs::directory_iterator(entry.path()))
                if (sub.is_regular_file() && sub.path().extension() == ".txt")
                    overrides_[entry.path().filename().string() + "/" +
                               sub.path().stem().string()] = read_file(sub.path());
        }
    }
}

const std::string& PromptEngine::template_text(Strategy s, const std::string& task_id) const {
    const std::string tag = to_string(s);
    if (auto it = overrides_.find(task_id + "/" + tag); it != overrides_.end()) return it->second;
    if (auto it = overrides_.find(tag); it != overrides_.end()) return it->second;
    return builtin_template(s);
}

int PromptEngine::parent_arity(Strategy s, int crossover_parents) {
    switch (s) {
        case Strategy::I1: return 0;
        case Strategy::E1:
        case Strategy::E2: return crossover_parents;
        case Strategy::M1:
        case Strategy::M2:
        case Strategy::M3: return 1;
    }
    return 0;
}

ComposedPrompt PromptEngine::compose(Strategy s, const TaskSpec& task,
                                     std::span<const Heuristic> parents,
                                     std::span<const Insight> insights,
                                     const std::string& directive, Regime regime,
                                     int crossover_parents) const {
    const int arity = parent_arity(s, crossover_parents);
    if (static_cast<int>(parents.size()) != arity)
        throw std::invalid_argument(std::string("compose: strategy ") + to_string(s) +
                                    " expects " + std::to_string(arity) + " parent(s), got " +
                                    std::to_string(parents.size()));

    std::string body = template_text(s, task.task_id);
    replace_all(body, "{{task_description}}", task.description);
    replace_all(body, "{{function_name}}", task.function_name);
    replace_all(body, "{{io_spec}}", render_io_spec(task));
    replace_all(body, "{{parents}}", render_parents(s, parents));
    replace_all(body, "{{insights}}", render_insights(insights));
    replace_all(body, "{{directive}}", directive);
    replace_all(body, "{{regime_hint}}", kRegimeHint);

    ComposedPrompt p;
    p.strategy = s;
    p.body = std::string("# operator: ") + to_string(s) + "\n" + tidy(std::move(body));
    for (const Insight& k : insights) p.insight_ids.push_back(k.id);
    p.directive = directive;
    p.regime = regime;
    p.task_id = task.task_id;
    return p;
}

std::size_t PromptEngine::elite_count(std::size_t population_size) {
    if (population_size == 0) return 0;
    const auto k = static_cast<std::size_t>(
        std::ceil(0.3 * static_cast<double>(population_size)));
    return std::max<std::size_t>(1, k);
}

std::string PromptEngine::compose_insight_extraction(std::span<const Heuristic> elites) {
    if (elites.empty())
        throw std::invalid_argument("compose_insight_extraction: empty elite list");
    std::ostringstream os;
    os << "# operator: extract\n";
    os << "The following are core descriptions and/or code of high-performance "
          "optimization algorithms evolved recently:\n";
    for (std::size_t i = 0; i < elites.size(); ++i) {
        os << "\nAlgorithm " << (i + 1) << ": " << elites[i].thought << "\n"
           << elites[i].code << "\n";
    }
    os << "\nPlease extract 1-2 concise, generic, and performance-positive [design "
          "principles] or [effective patterns] from the above algorithms. These "
          "principles should be applicable to various combinatorial optimization "
          "problems, not just the specific problem domain. When formulating these "
          "principles, it is essential to draw insights from both the conceptual "
          "natural language descriptions and their corresponding code "
          "implementations. Focus on identifying the underlying strategic design "
          "choices and algorithmic methodologies rather than superficial "
          "characteristics or specific implementation minutiae.\n";
    os << "\nEach principle/pattern must be expressed as an independent sentence in "
          "the following format:\n";
    os << "- Balance local optimization with global solution structure when making "
          "decisions.\n";
    os << "- Prioritize choices that maintain flexibility for future decision-making "
          "steps.\n";
    os << "- Implement adaptive mechanisms that respond to problem instance "
          "characteristics.\n";
    os << "\nProvide only the list of principles, without any preamble or other "
          "explanatory text.";
    return os.str();
}

HeuristicParse PromptEngine::parse_heuristic_response(const std::string& raw,
                                                      bool thought_required) {
    HeuristicParse out;

    std::optional<std::string> thought;
    const std::size_t open = raw.find('{');
    if (open != std::string::npos) {
        int depth = 0;
        for (std::size_t i = open; i < raw.size(); ++i) {
            if (raw[i] == '{') ++depth;
            else if (raw[i] == '}' && --depth == 0) {
                thought = trim(raw.substr(open + 1, i - open - 1));
                break;
            }
        }
    }
    if ((!thought || thought->empty()) && thought_required) {
        out.error = ParseErrorKind::NoThought;
        return out;
    }

    std::string code;
    const std::size_t fence = raw.find("```");
    if (fence != std::string::npos) {
        std::size_t start = fence + 3;
        const std::size_t eol = raw.find('\n', start);
        if (eol != std::string::npos) {
            // A language tag may sit on the fence line.
            const std::string tag = trim(raw.substr(start, eol - start));
            bool tag_like = !tag.empty() && tag.size() <= 12;
            for (unsigned char c : tag)
                if (!std::isalnum(c)) tag_like = false;
            if (tag.empty() || tag_like) start = eol + 1;
        }
        const std::size_t end = raw.find("```", start);
        if (end != std::string::npos) code = trim(raw.substr(start, end - start));
    }
    if (code.empty()) {
        std::istringstream is(raw);
        std::string line;
        std::size_t offset = 0;
        std::optional<std::size_t> code_start;
        while (std::getline(is, line)) {
            const std::string t = trim(line);
            if (t.rfind("def ", 0) == 0 || t.rfind("import ", 0) == 0 ||
                t.rfind("from ", 0) == 0) {
                code_start = offset;
                break;
            }
            offset += line.size() + 1;
        }
        if (code_start) code = trim(raw.substr(*code_start));
    }
    if (code.empty()) {
        out.error = ParseErrorKind::NoCode;
        return out;
    }

    out.ok = true;
    out.thought = thought.value_or("");
    out.code = std::move(code);
    return out;
}

std::vector<std::string> PromptEngine::parse_insight_list(const std::string& raw) {
    std::vector<std::string> items;
    std::istringstream is(raw);
    std::string line;
    while (std::getline(is, line) && items.size() < 2) {
        std::string t = trim(line);
        bool stripped = true;
        while (stripped && !t.empty()) {
            stripped = false;
            if (t[0] == '-' || t[0] == '*') {
                t = trim(t.substr(1));
                stripped = true;
            } else if (t.rfind("\xe2\x80\xa2", 0) == 0) {
                t = trim(t.substr(3));
                stripped = true;
            } else {
                std::size_t i = 0;
                while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
                if (i > 0 && i < t.size() && (t[i] == '.' || t[i] == ')')) {
                    t = trim(t.substr(i + 1));
                    stripped = true;
                }
            }
        }
        if (count_word_tokens(t) >= 4) items.push_back(t);
    }
    return items;
}

}  // namespace hifo
