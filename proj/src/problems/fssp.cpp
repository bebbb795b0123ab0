#include "hifo/problems/fssp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hifo/rng.hpp"

namespace hifo {

bool FsspInstance::valid_shape() const {
    if (jobs < 1 || machines < 1) return false;
    if (static_cast<int>(time.size()) != jobs) return false;
    for (const auto& row : time) {
        if (static_cast<int>(row.size()) != machines) return false;
        for (double t : row)
            if (!(t > 0.0) || !std::isfinite(t)) return false;
    }
    return true;
}

FsspInstance gen_fssp(int jobs, int machines, std::uint64_t seed) {
    if (jobs < 1 || machines < 1)
        throw std::invalid_argument("gen_fssp: jobs and machines must be >= 1");
    std::mt19937_64 rng = seeded_rng(seed, 0xf55b);
    FsspInstance inst;
    inst.jobs = jobs;
    inst.machines = machines;
    inst.time.assign(static_cast<std::size_t>(jobs),
                     std::vector<double>(static_cast<std::size_t>(machines), 0.0));
    for (auto& row : inst.time)
        for (double& t : row) t = static_cast<double>(1 + uniform_index(rng, 99));
    return inst;
}

FsspInstance load_fssp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open FSSP file: " + path.string());
    FsspInstance inst;
    if (!(in >> inst.jobs >> inst.machines))
        throw std::runtime_error("FSSP file missing jobs/machines header");
    inst.time.assign(static_cast<std::size_t>(inst.jobs),
                     std::vector<double>(static_cast<std::size_t>(inst.machines), 0.0));
    for (auto& row : inst.time)
        for (double& t : row)
            if (!(in >> t)) throw std::runtime_error("FSSP file truncated");
    if (!inst.valid_shape()) throw std::runtime_error("FSSP file has invalid times");
    return inst;
}

void write_fssp(const FsspInstance& inst, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write FSSP file: " + path.string());
    out << inst.jobs << " " << inst.machines << "\n";
    for (const auto& row : inst.time) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
        out << "\n";
    }
}

namespace {

double makespan_under(const std::vector<std::vector<double>>& time, std::span<const int> pi,
                      int machines) {
    std::vector<double> completion(static_cast<std::size_t>(machines), 0.0);
    for (int job : pi) {
        const auto& row = time[static_cast<std::size_t>(job)];
        completion[0] += row[0];
        for (int j = 1; j < machines; ++j)
            completion[static_cast<std::size_t>(j)] =
                std::max(completion[static_cast<std::size_t>(j)],
                         completion[static_cast<std::size_t>(j - 1)]) +
                row[static_cast<std::size_t>(j)];
    }
    return completion[static_cast<std::size_t>(machines - 1)];
}

}  // namespace

double makespan(const FsspInstance& inst, std::span<const int> pi) {
    if (static_cast<int>(pi.size()) != inst.jobs)
        throw std::invalid_argument("makespan: permutation size mismatch");
    std::vector<bool> seen(static_cast<std::size_t>(inst.jobs), false);
    for (int job : pi) {
        if (job < 0 || job >= inst.jobs || seen[static_cast<std::size_t>(job)])
            throw std::invalid_argument("makespan: not a permutation of job ids");
        seen[static_cast<std::size_t>(job)] = true;
    }
    return makespan_under(inst.time, pi, inst.machines);
}

std::vector<int> ascending_total_time_order(const FsspInstance& inst) {
    std::vector<int> order(static_cast<std::size_t>(inst.jobs));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> totals(static_cast<std::size_t>(inst.jobs), 0.0);
    for (int i = 0; i < inst.jobs; ++i)
        totals[static_cast<std::size_t>(i)] =
            std::accumulate(inst.time[static_cast<std::size_t>(i)].begin(),
                            inst.time[static_cast<std::size_t>(i)].end(), 0.0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return totals[static_cast<std::size_t>(a)] < totals[static_cast<std::size_t>(b)];
    });
    return order;
}

double brute_force_fssp(const FsspInstance& inst) {
    if (inst.jobs > 6) throw std::invalid_argument("brute_force_fssp: jobs must be <= 6");
    std::vector<int> perm(static_cast<std::size_t>(inst.jobs));
    std::iota(perm.begin(), perm.end(), 0);
    double best = makespan(inst, perm);
    while (std::next_permutation(perm.begin(), perm.end()))
        best = std::min(best, makespan(inst, perm));
    return best;
}

std::vector<int> fssp_local_search(const FsspInstance& inst,
                                   const std::vector<std::vector<double>>& cost,
                                   std::vector<int> pi, std::span<const int> movable) {
    const int n = inst.jobs;
    std::vector<bool> can_move(static_cast<std::size_t>(n), movable.empty());
    for (int job : movable)
        if (job >= 0 && job < n) can_move[static_cast<std::size_t>(job)] = true;

    double current = makespan_under(cost, pi, inst.machines);
    bool improved = true;
    while (improved) {
        improved = false;
        // Insertion: move a job to a different position.
        for (int i = 0; i < n && !improved; ++i) {
            const int job = pi[static_cast<std::size_t>(i)];
            if (!can_move[static_cast<std::size_t>(job)]) continue;
            std::vector<int> rest;
            rest.reserve(static_cast<std::size_t>(n - 1));
            for (int k = 0; k < n; ++k)
                if (k != i) rest.push_back(pi[static_cast<std::size_t>(k)]);
            for (int j = 0; j <= n - 1; ++j) {
                if (j == i) continue;
                std::vector<int> candidate = rest;
                candidate.insert(candidate.begin() + j, job);
                const double value = makespan_under(cost, candidate, inst.machines);
                if (value < current - 1e-12) {
                    pi = std::move(candidate);
                    current = value;
                    improved = true;
                    break;
                }
            }
        }
        if (improved) continue;
        // Adjacent swap.
        for (int i = 0; i + 1 < n; ++i) {
            const int a = pi[static_cast<std::size_t>(i)];
            const int b = pi[static_cast<std::size_t>(i + 1)];
            if (!can_move[static_cast<std::size_t>(a)] && !can_move[static_cast<std::size_t>(b)])
                continue;
            std::swap(pi[static_cast<std::size_t>(i)], pi[static_cast<std::size_t>(i + 1)]);
            const double value = makespan_under(cost, pi, inst.machines);
            if (value < current - 1e-12) {
                current = value;
                improved = true;
                break;
            }
            std::swap(pi[static_cast<std::size_t>(i)], pi[static_cast<std::size_t>(i + 1)]);
        }
    }
    return pi;
}

std::optional<double> eval_fssp(ExecSession& session, const FsspInstance& inst,
                                const FsspParams& params, std::string* error) {
    auto fail = [&](const std::string& why) -> std::optional<double> {
        if (error) *error = why;
        return std::nullopt;
    };

    std::vector<int> pi = ascending_total_time_order(inst);
    std::vector<std::vector<double>> guidance = inst.time;
    std::vector<int> movable;  // empty means every job may move
    double best = makespan(inst, pi);
    nlohmann::json time_json = inst.time;

    for (int it = 0; it < params.budget; ++it) {
        if (session.budget_exhausted()) return fail("evaluation budget exhausted");

        pi = fssp_local_search(inst, guidance, std::move(pi), movable);
        best = std::min(best, makespan(inst, pi));

        ExecRequest req;
        req.call_id = it;
        req.args = nlohmann::json::array({pi, time_json, inst.jobs, inst.machines});
        const ExecResult res = session.invoke(req);
        if (!res.ok) return fail(std::string(to_string(res.error_kind)) + ": " + res.detail);

        const nlohmann::json& out = res.result;
        if (!out.is_array() || out.size() != 2)
            return fail("guide must return the matrix and the perturb job list");
        const nlohmann::json& matrix = out[0];
        const nlohmann::json& jobs = out[1];

        if (!matrix.is_array() || static_cast<int>(matrix.size()) != inst.jobs)
            return fail("guide matrix has wrong shape");
        std::vector<std::vector<double>> next(static_cast<std::size_t>(inst.jobs));
        for (int i = 0; i < inst.jobs; ++i) {
            const nlohmann::json& row = matrix[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<int>(row.size()) != inst.machines)
                return fail("guide matrix has wrong shape");
            next[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(inst.machines));
            for (int j = 0; j < inst.machines; ++j) {
                if (!row[static_cast<std::size_t>(j)].is_number())
                    return fail("guide matrix entry is not a number");
                const double v = row[static_cast<std::size_t>(j)].get<double>();
                if (!(v > 0.0)) return fail("guide matrix entries must be positive");
                next[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            }
        }
        if (!jobs.is_array() || jobs.empty()) return fail("perturb job list must be non-empty");
        std::vector<int> next_movable;
        for (const nlohmann::json& v : jobs) {
            if (!v.is_number()) return fail("perturb job id is not a number");
            const double raw = v.get<double>();
            const int job = static_cast<int>(std::llround(raw));
            if (std::abs(raw - job) > 1e-9 || job < 0 || job >= inst.jobs)
                return fail("perturb job id out of range");
            next_movable.push_back(job);
        }
        guidance = std::move(next);
        movable = std::move(next_movable);
    }
    return best;
}

}  // namespace hifo
