#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <variant>

#include <CLI11.hpp>

#include "hifo/event_log.hpp"
#include "hifo/orchestrator.hpp"
#include "hifo/problems/problem.hpp"
#include "hifo/run_config.hpp"

namespace {

using namespace hifo;

struct CommonFlags {
    std::string config_path;
    std::string task;
    std::string backend;
    std::string script;
    std::string manifest_path;
    std::string out_dir;
    int pop = -1;
    int gens = -1;
    long long seed = -1;
};

// Config file first, then flag overrides.
RunConfig effective_config(const CommonFlags& f) {
    RunConfig cfg;
    if (!f.config_path.empty()) cfg = load_run_config(f.config_path);
    if (!f.task.empty()) cfg.task_id = f.task;
    if (!f.backend.empty())
        cfg.generator.backend = f.backend == "live" ? GeneratorConfig::Backend::Live
                                                    : GeneratorConfig::Backend::Mock;
    if (!f.script.empty()) cfg.generator.mock_script = f.script;
    if (!f.manifest_path.empty()) cfg.manifest = load_manifest(f.manifest_path);
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.pop > 0) cfg.pop_size = f.pop;
    if (f.gens > 0) cfg.generations = f.gens;
    if (f.seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(f.seed);
    if (cfg.manifest.empty()) cfg.manifest = default_manifest(cfg.task_id);
    return cfg;
}

std::unique_ptr<Generator> make_generator(const RunConfig& cfg) {
    if (cfg.generator.backend == GeneratorConfig::Backend::Live)
        return std::make_unique<LiveGenerator>(cfg.generator);
    if (cfg.generator.mock_script.empty())
        throw std::runtime_error("mock backend needs a script (--script or generator.mock_script)");
    return std::make_unique<MockGenerator>(MockGenerator::load_script(cfg.generator.mock_script));
}

int cmd_run(const CommonFlags& flags) {
    RunConfig cfg;
    try {
        cfg = effective_config(flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (cfg.generator.backend == GeneratorConfig::Backend::Live &&
        std::getenv(cfg.generator.api_key_env.c_str()) == nullptr) {
        std::cerr << "error: live backend requires the " << cfg.generator.api_key_env
                  << " environment variable\n";
        return 2;
    }

    try {
        const std::unique_ptr<Problem> problem = make_problem(cfg);
        const std::unique_ptr<Generator> generator = make_generator(cfg);
        EventLog log;
        Orchestrator orchestrator(cfg, *problem, *generator, log);
        const RunReport report = orchestrator.run();

        const double best = report.best.objective.value_or(0.0);
        std::cout << "task\t" << report.task_id << "\n";
        std::cout << "best_objective\t" << best << "\n";
        std::cout << "baseline\t" << report.baseline_name << "\t" << report.baseline_objective
                  << "\n";
        if (report.baseline_objective != 0.0)
            std::cout << "gap_vs_baseline\t"
                      << (best - report.baseline_objective) / std::abs(report.baseline_objective)
                      << "\n";
        std::cout << "requests\t" << report.total_requests << "\n";
        std::cout << "out_dir\t" << cfg.out_dir << "\n";
        return 0;
    } catch (const FatalInitError& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_baseline(const CommonFlags& flags) {
    try {
        RunConfig cfg = effective_config(flags);
        std::cout << "task\tsize\tcount\tbaseline\tobjective\n";
        for (const InstanceSetSpec& spec : cfg.manifest) {
            RunConfig one = cfg;
            one.task_id = spec.task;
            one.manifest = {spec};
            const std::unique_ptr<Problem> problem = make_problem(one);
            std::cout << spec.task << "\t" << spec.size << "\t" << spec.count << "\t"
                      << problem->baseline_name() << "\t" << problem->baseline_objective()
                      << "\n";
            if (spec.task == "bpp_online") {
                double first_fit_sum = 0.0;
                for (int i = 0; i < spec.count; ++i) {
                    const BppInstance inst = gen_bpp_weibull(
                        spec.size, spec.capacity, spec.seed + static_cast<std::uint64_t>(i));
                    first_fit_sum += excess_ratio(inst, first_fit_bins(inst));
                }
                std::cout << spec.task << "\t" << spec.size << "\t" << spec.count
                          << "\tfirst_fit\t" << first_fit_sum / spec.count << "\n";
            }
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_evaluate(const CommonFlags& flags, const std::string& code_path) {
    try {
        RunConfig cfg = effective_config(flags);
        std::ifstream in(code_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open code file: " + code_path);
        std::string code((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());

        const std::unique_ptr<Problem> problem = make_problem(cfg);
        std::string error;
        const std::optional<double> objective =
            problem->evaluate_code(code, cfg.sandbox, &error);
        if (!objective) {
            std::cout << "invalid\t" << error << "\n";
            return 1;
        }
        std::cout << "objective\t" << *objective << "\n";
        std::cout << "baseline\t" << problem->baseline_name() << "\t"
                  << problem->baseline_objective() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_report(const std::string& run_dir) {
    namespace fs = std::filesystem;
    const fs::path log_path = fs::path(run_dir) / "events.jsonl";
    const auto parsed = read_event_log(log_path);
    if (std::holds_alternative<LogReadError>(parsed)) {
        const LogReadError& err = std::get<LogReadError>(parsed);
        std::cerr << "error: corrupt event log, first bad record at line " << err.line_number
                  << ": " << err.detail << "\n";
        return 3;
    }
    const std::vector<RunEvent>& events = std::get<std::vector<RunEvent>>(parsed);

    std::ofstream curve(fs::path(run_dir) / "convergence.tsv");
    curve << "generation\tbest\tavg\n";
    long prompts = 0;
    std::ofstream regimes(fs::path(run_dir) / "regimes.tsv");
    regimes << "generation\tregime\tstagnation\tprogress\tdiversity\tdirective\n";
    const RunEvent* last_survival = nullptr;
    for (const RunEvent& ev : events) {
        if (ev.kind == "survival") {
            curve << ev.payload["generation"].get<int>() << "\t"
                  << ev.payload["best"].get<double>() << "\t"
                  << ev.payload["avg"].get<double>() << "\n";
            last_survival = &ev;
        } else if (ev.kind == "prompt") {
            ++prompts;
        } else if (ev.kind == "regime") {
            regimes << ev.payload["generation"].get<int>() << "\t"
                    << ev.payload["regime"].get<std::string>() << "\t"
                    << ev.payload["stagnation"].get<int>() << "\t"
                    << ev.payload["progress"].get<int>() << "\t"
                    << ev.payload["diversity"].get<double>() << "\t"
                    << ev.payload["directive"].get<std::string>() << "\n";
        }
    }

    std::ofstream pool(fs::path(run_dir) / "pool.tsv");
    pool << "id\teffectiveness\tusage_count\tcreated_gen\tseed\n";
    if (last_survival != nullptr)
        for (const auto& k : last_survival->payload["pool"])
            pool << k["id"].get<std::string>() << "\t" << k["effectiveness"].get<double>()
                 << "\t" << k["usage_count"].get<int>() << "\t" << k["created_gen"].get<int>()
                 << "\t" << (k["seed"].get<bool>() ? 1 : 0) << "\n";

    std::ofstream requests(fs::path(run_dir) / "requests.tsv");
    requests << "prompt_events\n" << prompts << "\n";

    std::cout << "events\t" << events.size() << "\n";
    std::cout << "prompt_events\t" << prompts << "\n";
    std::cout << "wrote\tconvergence.tsv regimes.tsv pool.tsv requests.tsv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LLM-driven heuristic evolution"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string code_path;
    std::string run_dir;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", flags.config_path, "config file (JSON)");
        cmd->add_option("--task", flags.task, "task id");
        cmd->add_option("--manifest", flags.manifest_path, "instance manifest file");
        cmd->add_option("--seed", flags.seed, "master seed");
    };

    CLI::App* run = app.add_subcommand("run", "run the evolutionary loop");
    add_common(run);
    run->add_option("--backend", flags.backend, "generator backend (live|mock)")
        ->check(CLI::IsMember({"live", "mock"}));
    run->add_option("--script", flags.script, "mock generator script");
    run->add_option("--pop", flags.pop, "population size");
    run->add_option("--gens", flags.gens, "number of generations");
    run->add_option("--out", flags.out_dir, "output directory");

    CLI::App* baseline = app.add_subcommand("baseline", "print baseline objectives");
    add_common(baseline);

    CLI::App* evaluate = app.add_subcommand("evaluate", "score a heuristic code file");
    add_common(evaluate);
    evaluate->add_option("--code", code_path, "heuristic source file")->required();

    CLI::App* report = app.add_subcommand("report", "emit plot data from a run directory");
    report->add_option("--run", run_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(flags);
    if (baseline->parsed()) return cmd_baseline(flags);
    if (evaluate->parsed()) return cmd_evaluate(flags, code_path);
    if (report->parsed()) return cmd_report(run_dir);
    return 2;
}
