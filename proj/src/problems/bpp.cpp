#include "hifo/problems/bpp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hifo/rng.hpp"

namespace hifo {

BppInstance gen_bpp_weibull(int count, int capacity, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("gen_bpp_weibull: count must be >= 1");
    if (capacity < 1) throw std::invalid_argument("gen_bpp_weibull: capacity must be >= 1");
    constexpr double kShape = 3.0;
    constexpr double kScale = 45.0;
    std::mt19937_64 rng = seeded_rng(seed, 0xb1b5);
    BppInstance inst;
    inst.capacity = capacity;
    inst.items.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        // Inverse-CDF sample; guard the log away from u = 0.
        double u = uniform01(rng);
        if (u <= 0.0) u = 1e-300;
        const double x = kScale * std::pow(-std::log(1.0 - u), 1.0 / kShape);
        const int size = std::clamp(static_cast<int>(std::ceil(x)), 1, capacity);
        inst.items.push_back(size);
    }
    return inst;
}

int bpp_lower_bound(const BppInstance& inst) {
    long long total = 0;
    for (int s : inst.items) total += s;
    return static_cast<int>((total + inst.capacity - 1) / inst.capacity);
}

double excess_ratio(const BppInstance& inst, int bins_used) {
    const int lb = bpp_lower_bound(inst);
    return static_cast<double>(bins_used - lb) / static_cast<double>(lb);
}

int best_fit_bins(const BppInstance& inst) {
    std::vector<int> residual;
    for (int item : inst.items) {
        int pick = -1;
        for (std::size_t j = 0; j < residual.size(); ++j) {
            if (residual[j] < item) continue;
            if (pick < 0 || residual[j] < residual[static_cast<std::size_t>(pick)])
                pick = static_cast<int>(j);
        }
        if (pick < 0) {
            residual.push_back(inst.capacity - item);
        } else {
            residual[static_cast<std::size_t>(pick)] -= item;
        }
    }
    return static_cast<int>(residual.size());
}

int first_fit_bins(const BppInstance& inst) {
    std::vector<int> residual;
    for (int item : inst.items) {
        bool placed = false;
        for (std::size_t j = 0; j < residual.size(); ++j) {
            if (residual[j] >= item) {
                residual[j] -= item;
                placed = true;
                break;
            }
        }
        if (!placed) residual.push_back(inst.capacity - item);
    }
    return static_cast<int>(residual.size());
}

std::optional<double> eval_bpp_online(ExecSession& session, const BppInstance& inst,
                                      std::string* error) {
    auto fail = [&](const std::string& why) -> std::optional<double> {
        if (error) *error = why;
        return std::nullopt;
    };

    std::vector<int> residual;
    int call_id = 0;
    for (int item : inst.items) {
        if (session.budget_exhausted()) return fail("evaluation budget exhausted");
        if (residual.empty()) {
            residual.push_back(inst.capacity - item);
            continue;
        }
        ExecRequest req;
        req.call_id = call_id++;
        req.args = nlohmann::json::array({item, residual});
        req.expected_length = residual.size();
        const ExecResult res = session.invoke(req);
        if (!res.ok) return fail(std::string(to_string(res.error_kind)) + ": " + res.detail);

        int pick = -1;
        double pick_score = 0.0;
        for (std::size_t j = 0; j < residual.size(); ++j) {
            if (!res.result[j].is_number()) return fail("score is not a number");
            const double s = res.result[j].get<double>();
            if (residual[j] < item) continue;
            if (pick < 0 || s > pick_score) {
                pick = static_cast<int>(j);
                pick_score = s;
            }
        }
        if (pick < 0) {
            residual.push_back(inst.capacity - item);
        } else {
            residual[static_cast<std::size_t>(pick)] -= item;
        }
    }
    return excess_ratio(inst, static_cast<int>(residual.size()));
}

}  // namespace hifo
