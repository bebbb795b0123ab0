#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hifo {

// Generation strategies: i1 seeds from scratch, e1/e2 recombine parents,
// m1/m2/m3 mutate a single parent.
enum class Strategy { I1, E1, E2, M1, M2, M3 };

enum class Origin { Seed, I1, E1, E2, M1, M2, M3 };

constexpr const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::I1: return "i1";
        case Strategy::E1: return "e1";
        case Strategy::E2: return "e2";
        case Strategy::M1: return "m1";
        case Strategy::M2: return "m2";
        case Strategy::M3: return "m3";
    }
    return "?";
}

constexpr const char* to_string(Origin o) {
    switch (o) {
        case Origin::Seed: return "seed";
        case Origin::I1: return "i1";
        case Origin::E1: return "e1";
        case Origin::E2: return "e2";
        case Origin::M1: return "m1";
        case Origin::M2: return "m2";
        case Origin::M3: return "m3";
    }
    return "?";
}

constexpr Origin to_origin(Strategy s) {
    switch (s) {
        case Strategy::I1: return Origin::I1;
        case Strategy::E1: return Origin::E1;
        case Strategy::E2: return Origin::E2;
        case Strategy::M1: return Origin::M1;
        case Strategy::M2: return Origin::M2;
        case Strategy::M3: return Origin::M3;
    }
    return Origin::Seed;
}

// One candidate heuristic: a natural-language design idea plus the Python
// function implementing it. The objective is the mean score over the
// evaluation instance set (lower is better); absent means the candidate
// failed evaluation and never receives a rank.
struct Heuristic {
    std::string id;
    std::string thought;
    std::string code;
    std::optional<double> objective;
    Origin origin = Origin::Seed;
    int generation_created = 0;
    std::vector<std::string> contributing_insights;
};

}  // namespace hifo
