#include "hifo/problems/tsp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hifo/rng.hpp"

namespace hifo {

namespace {

double euclid(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

void fill_distances(TspInstance& inst) {
    const std::size_t n = inst.coords.size();
    inst.dist.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = euclid(inst.coords[i], inst.coords[j]);
            if (inst.rounded) d = std::floor(d + 0.5);
            inst.dist[i][j] = d;
            inst.dist[j][i] = d;
        }
}

}  // namespace

TspInstance gen_tsp(int n, std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("gen_tsp: n must be >= 3");
    std::mt19937_64 rng = seeded_rng(seed, 0x7350);
    TspInstance inst;
    inst.coords.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = uniform01(rng);
        const double y = uniform01(rng);
        inst.coords.push_back({x, y});
    }
    fill_distances(inst);
    return inst;
}

TspInstance load_tsplib(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open TSPLIB file: " + path.string());

    int dimension = -1;
    std::string edge_type = "EUC_2D";
    std::string line;
    bool in_coords = false;
    TspInstance inst;
    inst.rounded = true;

    auto header_value = [](const std::string& s) {
        const std::size_t colon = s.find(':');
        std::string v = colon == std::string::npos ? "" : s.substr(colon + 1);
        std::size_t b = v.find_first_not_of(" \t\r");
        std::size_t e = v.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };

    while (std::getline(in, line)) {
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
        if (trimmed.empty()) continue;
        if (trimmed.rfind("EOF", 0) == 0) break;
        if (in_coords) {
            std::istringstream row(trimmed);
            int idx;
            double x, y;
            if (row >> idx >> x >> y) inst.coords.push_back({x, y});
            continue;
        }
        if (trimmed.rfind("DIMENSION", 0) == 0) {
            dimension = std::stoi(header_value(trimmed));
        } else if (trimmed.rfind("EDGE_WEIGHT_TYPE", 0) == 0) {
            edge_type = header_value(trimmed);
        } else if (trimmed.rfind("NODE_COORD_SECTION", 0) == 0) {
            if (edge_type != "EUC_2D")
                throw std::runtime_error("unsupported edge weight type: " + edge_type);
            in_coords = true;
        }
    }
    if (edge_type != "EUC_2D")
        throw std::runtime_error("unsupported edge weight type: " + edge_type);
    if (dimension > 0 && static_cast<int>(inst.coords.size()) != dimension)
        throw std::runtime_error("TSPLIB file declares DIMENSION " + std::to_string(dimension) +
                                 " but has " + std::to_string(inst.coords.size()) + " coords");
    if (inst.coords.size() < 3) throw std::runtime_error("TSPLIB file has fewer than 3 nodes");
    fill_distances(inst);
    return inst;
}

void write_tsplib(const TspInstance& inst, const std::filesystem::path& path,
                  const std::string& name) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write TSPLIB file: " + path.string());
    out << "NAME : " << name << "\n";
    out << "TYPE : TSP\n";
    out << "DIMENSION : " << inst.coords.size() << "\n";
    out << "EDGE_WEIGHT_TYPE : EUC_2D\n";
    out << "NODE_COORD_SECTION\n";
    out.precision(17);
    for (std::size_t i = 0; i < inst.coords.size(); ++i)
        out << (i + 1) << " " << inst.coords[i][0] << " " << inst.coords[i][1] << "\n";
    out << "EOF\n";
}

double tour_length(const TspInstance& inst, std::span<const int> tour) {
    const std::size_t n = inst.size();
    if (tour.size() != n) throw std::invalid_argument("tour_length: tour size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        total += inst.dist[static_cast<std::size_t>(tour[i])]
                          [static_cast<std::size_t>(tour[(i + 1) % n])];
    return total;
}

std::vector<int> nearest_neighbor_tour(const TspInstance& inst, int start) {
    const int n = static_cast<int>(inst.size());
    std::vector<bool> visited(static_cast<std::size_t>(n), false);
    std::vector<int> tour;
    tour.reserve(static_cast<std::size_t>(n));
    int current = start;
    visited[static_cast<std::size_t>(current)] = true;
    tour.push_back(current);
    for (int step = 1; step < n; ++step) {
        int best = -1;
        double best_d = 0.0;
        for (int j = 0; j < n; ++j) {
            if (visited[static_cast<std::size_t>(j)]) continue;
            const double d = inst.dist[static_cast<std::size_t>(current)][static_cast<std::size_t>(j)];
            if (best < 0 || d < best_d) {
                best = j;
                best_d = d;
            }
        }
        visited[static_cast<std::size_t>(best)] = true;
        tour.push_back(best);
        current = best;
    }
    return tour;
}

double brute_force_tsp(const TspInstance& inst) {
    const int n = static_cast<int>(inst.size());
    if (n > 9) throw std::invalid_argument("brute_force_tsp: n must be <= 9");
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = tour_length(inst, perm);
    // Node 0 stays fixed; rotations of a cycle have equal length.
    while (std::next_permutation(perm.begin() + 1, perm.end()))
        best = std::min(best, tour_length(inst, perm));
    return best;
}

std::optional<double> eval_tsp_construct(ExecSession& session, const TspInstance& inst,
                                         std::string* error) {
    const int n = static_cast<int>(inst.size());
    auto fail = [&](const std::string& why) -> std::optional<double> {
        if (error) *error = why;
        return std::nullopt;
    };

    nlohmann::json dist_json = inst.dist;
    std::vector<bool> visited(static_cast<std::size_t>(n), false);
    const int origin = 0;
    int current = origin;
    visited[0] = true;
    double total = 0.0;
    int call_id = 0;

    for (int step = 1; step < n; ++step) {
        if (session.budget_exhausted()) return fail("evaluation budget exhausted");
        std::vector<int> unvisited;
        for (int j = 0; j < n; ++j)
            if (!visited[static_cast<std::size_t>(j)]) unvisited.push_back(j);

        ExecRequest req;
        req.call_id = call_id++;
        req.args = nlohmann::json::array({current, origin, unvisited, dist_json});
        const ExecResult res = session.invoke(req);
        if (!res.ok) return fail(std::string(to_string(res.error_kind)) + ": " + res.detail);

        if (!res.result.is_number()) return fail("next node is not a number");
        const double raw = res.result.get<double>();
        const int next = static_cast<int>(std::llround(raw));
        if (std::abs(raw - next) > 1e-9) return fail("next node is not integral");
        if (next < 0 || next >= n || visited[static_cast<std::size_t>(next)])
            return fail("next node " + std::to_string(next) + " is not in the unvisited set");

        total += inst.dist[static_cast<std::size_t>(current)][static_cast<std::size_t>(next)];
        visited[static_cast<std::size_t>(next)] = true;
        current = next;
    }
    total += inst.dist[static_cast<std::size_t>(current)][static_cast<std::size_t>(origin)];
    return total;
}

std::vector<int> tsp_local_search(const std::vector<std::vector<double>>& cost,
                                  std::vector<int> tour) {
    const int n = static_cast<int>(tour.size());
    if (n < 4) return tour;
    auto d = [&](int a, int b) {
        return cost[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    };
    bool improved = true;
    while (improved) {
        improved = false;
        // 2-opt: reverse tour[i+1..j].
        for (int i = 0; i < n - 1 && !improved; ++i) {
            for (int j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;
                const int a = tour[static_cast<std::size_t>(i)];
                const int b = tour[static_cast<std::size_t>(i + 1)];
                const int c = tour[static_cast<std::size_t>(j)];
                const int e = tour[static_cast<std::size_t>((j + 1) % n)];
                const double delta = d(a, c) + d(b, e) - d(a, b) - d(c, e);
                if (delta < -1e-12) {
                    std::reverse(tour.begin() + i + 1, tour.begin() + j + 1);
                    improved = true;
                    break;
                }
            }
        }
        if (improved) continue;
        // Relocate: move one city to another position.
        for (int i = 0; i < n && !improved; ++i) {
            const int prev = tour[static_cast<std::size_t>((i + n - 1) % n)];
            const int city = tour[static_cast<std::size_t>(i)];
            const int next = tour[static_cast<std::size_t>((i + 1) % n)];
            const double removal = d(prev, next) - d(prev, city) - d(city, next);
            for (int j = 0; j < n; ++j) {
                if (j == i || (j + 1) % n == i) continue;
                const int a = tour[static_cast<std::size_t>(j)];
                const int b = tour[static_cast<std::size_t>((j + 1) % n)];
                const double insertion = d(a, city) + d(city, b) - d(a, b);
                if (removal + insertion < -1e-12) {
                    std::vector<int> next_tour;
                    next_tour.reserve(static_cast<std::size_t>(n));
                    for (int k = 0; k < n; ++k)
                        if (k != i) next_tour.push_back(tour[static_cast<std::size_t>(k)]);
                    auto pos = std::find(next_tour.begin(), next_tour.end(), a);
                    next_tour.insert(pos + 1, city);
                    tour = std::move(next_tour);
                    improved = true;
                    break;
                }
            }
        }
    }
    return tour;
}

std::optional<double> eval_tsp_gls(ExecSession& session, const TspInstance& inst,
                                   const GlsParams& params, std::string* error) {
    const std::size_t n = inst.size();
    auto fail = [&](const std::string& why) -> std::optional<double> {
        if (error) *error = why;
        return std::nullopt;
    };

    double nonzero_sum = 0.0;
    std::size_t nonzero_count = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (inst.dist[i][j] > 0.0) {
                nonzero_sum += inst.dist[i][j];
                ++nonzero_count;
            }
    const double lambda =
        params.lambda_factor * (nonzero_count ? nonzero_sum / static_cast<double>(nonzero_count) : 1.0);

    std::vector<std::vector<long long>> penalties(n, std::vector<long long>(n, 0));
    std::vector<std::vector<long long>> frequency(n, std::vector<long long>(n, 0));
    std::vector<int> tour = nearest_neighbor_tour(inst);
    double best = tour_length(inst, tour);
    nlohmann::json dist_json = inst.dist;

    for (int it = 0; it < params.budget; ++it) {
        if (session.budget_exhausted()) return fail("evaluation budget exhausted");

        std::vector<std::vector<double>> augmented(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                augmented[i][j] = inst.dist[i][j] + lambda * static_cast<double>(penalties[i][j]);

        tour = tsp_local_search(augmented, std::move(tour));
        best = std::min(best, tour_length(inst, tour));

        for (std::size_t i = 0; i < n; ++i) {
            const auto u = static_cast<std::size_t>(tour[i]);
            const auto v = static_cast<std::size_t>(tour[(i + 1) % n]);
            frequency[u][v] += 1;
            frequency[v][u] += 1;
        }

        ExecRequest req;
        req.call_id = it;
        req.args = nlohmann::json::array({penalties, tour, dist_json, frequency});
        const ExecResult res = session.invoke(req);
        if (!res.ok) return fail(std::string(to_string(res.error_kind)) + ": " + res.detail);

        const nlohmann::json& p_new = res.result;
        if (!p_new.is_array() || p_new.size() != n)
            return fail("penalty matrix has wrong shape");
        std::vector<std::vector<long long>> next(n, std::vector<long long>(n, 0));
        for (std::size_t i = 0; i < n; ++i) {
            if (!p_new[i].is_array() || p_new[i].size() != n)
                return fail("penalty matrix has wrong shape");
            for (std::size_t j = 0; j < n; ++j) {
                if (!p_new[i][j].is_number()) return fail("penalty entry is not a number");
                const double v = p_new[i][j].get<double>();
                const long long r = std::llround(v);
                if (v < 0.0 || std::abs(v - static_cast<double>(r)) > 1e-9)
                    return fail("penalty entries must be non-negative integers");
                next[i][j] = r;
            }
        }
        // Returned penalties may be asymmetric; edges are undirected.
        for (std::size_t i = 0; i < n; ++i) {
            next[i][i] = 0;
            for (std::size_t j = i + 1; j < n; ++j) {
                const long long v = std::max(next[i][j], next[j][i]);
                next[i][j] = v;
                next[j][i] = v;
            }
        }
        penalties = std::move(next);
    }
    return best;
}

}  // namespace hifo
