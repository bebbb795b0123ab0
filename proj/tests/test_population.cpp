#include <doctest.h>

#include <cmath>

#include "hifo/population.hpp"
#include "hifo/rng.hpp"

using namespace hifo;

namespace {

Heuristic heur(const std::string& id, std::optional<double> objective,
               const std::string& code = "") {
    Heuristic h;
    h.id = id;
    h.objective = objective;
    h.code = code.empty() ? "def f():\n    return " + id : code;
    return h;
}

}  // namespace

TEST_CASE("normalize_code collapses whitespace only") {
    CHECK(normalize_code("def f():\n    return 1\n") == "def f(): return 1");
    CHECK(normalize_code("  def  f():\treturn 1  ") == "def f(): return 1");
    CHECK(normalize_code("") == "");
    CHECK(normalize_code("a") != normalize_code("b"));
}

TEST_CASE("is_duplicate matches on objective or normalized code") {
    Heuristic a = heur("a", 1.0, "def f():\n    return 1");
    Heuristic b = heur("b", 2.0, "def  f():  return 1");
    Heuristic c = heur("c", 1.0 + 1e-13, "def g(): return 2");
    Heuristic d = heur("d", 3.0, "def h(): return 3");
    CHECK(is_duplicate(a, b));       // same code modulo whitespace
    CHECK(is_duplicate(a, c));       // objectives within tolerance
    CHECK_FALSE(is_duplicate(a, d));

    SUBCASE("missing objectives fall back to code comparison") {
        Heuristic e = heur("e", std::nullopt, "def f(): return 1");
        CHECK(is_duplicate(a, e));
        Heuristic f = heur("f", std::nullopt, "def q(): return 9");
        CHECK_FALSE(is_duplicate(a, f));
    }

    SUBCASE("span overload scans all members") {
        std::vector<Heuristic> pop{a, d};
        CHECK(is_duplicate(c, pop));
        CHECK_FALSE(is_duplicate(heur("x", 9.0, "def x(): return 0"), pop));
    }
}

TEST_CASE("survival_select drops invalid, dedupes, sorts, truncates") {
    std::vector<Heuristic> pool{
        heur("a", 3.0), heur("b", 2.0), heur("c", 2.0), heur("d", 5.0),
        heur("e", std::nullopt),
    };
    Population out = survival_select(pool, 3);
    REQUIRE(out.size() == 3);
    CHECK(out.members[0].objective == 2.0);
    CHECK(out.members[0].id == "b");  // first occurrence wins the dedupe
    CHECK(out.members[1].objective == 3.0);
    CHECK(out.members[2].objective == 5.0);

    SUBCASE("returns fewer members when candidates run out") {
        std::vector<Heuristic> triple{heur("a", 7.0), heur("b", 7.0), heur("c", 7.0)};
        Population small = survival_select(triple, 2);
        REQUIRE(small.size() == 1);
        CHECK(small.members[0].id == "a");
    }

    SUBCASE("non-finite objectives are filtered like missing ones") {
        std::vector<Heuristic> bad{heur("a", 1.0),
                                   heur("b", std::numeric_limits<double>::infinity()),
                                   heur("c", std::nan(""))};
        Population out2 = survival_select(bad, 3);
        REQUIRE(out2.size() == 1);
        CHECK(out2.members[0].id == "a");
    }

    SUBCASE("stable under equal objectives across tolerance boundary") {
        std::vector<Heuristic> close{heur("a", 1.0), heur("b", 1.0 + 1e-9)};
        Population out3 = survival_select(close, 2);
        CHECK(out3.size() == 2);  // 1e-9 apart: distinct individuals
    }

    CHECK_THROWS_AS(survival_select(pool, 0), std::invalid_argument);
}

TEST_CASE("rank_weights matches the 1/(k+1+n) law") {
    const std::vector<double> w = rank_weights(4);
    REQUIRE(w.size() == 4);
    CHECK(w[0] == doctest::Approx(0.3151969981238274).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(0.2626641651031895).epsilon(1e-12));
    CHECK(w[2] == doctest::Approx(0.225140712945591).epsilon(1e-12));
    CHECK(w[3] == doctest::Approx(0.19699812382739212).epsilon(1e-12));
    double sum = 0.0;
    for (double x : w) sum += x;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(rank_weights(0), std::invalid_argument);
    CHECK(rank_weights(1) == std::vector<double>{1.0});
}

TEST_CASE("rank_select_parents prefers better ranks and is deterministic") {
    Population pop;
    for (int i = 0; i < 4; ++i)
        pop.members.push_back(heur("h" + std::to_string(i), double(i)));

    std::mt19937_64 rng = seeded_rng(42);
    std::vector<int> counts(4, 0);
    for (int i = 0; i < 20000; ++i) {
        const auto parents = rank_select_parents(pop, 1, rng);
        REQUIRE(parents.size() == 1);
        counts[int(*parents[0].objective)] += 1;
    }
    CHECK(counts[0] > counts[1]);
    CHECK(counts[1] > counts[2]);
    CHECK(counts[2] > counts[3]);

    std::mt19937_64 a = seeded_rng(7), b = seeded_rng(7);
    const auto pa = rank_select_parents(pop, 3, a);
    const auto pb = rank_select_parents(pop, 3, b);
    REQUIRE(pa.size() == 3);
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i].id == pb[i].id);

    Population empty;
    std::mt19937_64 rng2 = seeded_rng(1);
    CHECK_THROWS_AS(rank_select_parents(empty, 1, rng2), std::invalid_argument);
    CHECK_THROWS_AS(rank_select_parents(pop, 0, rng2), std::invalid_argument);
}

TEST_CASE("population_stats basics") {
    std::vector<Heuristic> two{heur("a", 10.0), heur("b", 20.0)};
    const PopulationStats s = population_stats(two);
    CHECK(s.best == 10.0);
    CHECK(s.worst == 20.0);
    CHECK(s.avg == 15.0);
    CHECK(s.stddev == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(s.diversity == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    SUBCASE("members without objectives are ignored") {
        two.push_back(heur("c", std::nullopt));
        const PopulationStats s2 = population_stats(two);
        CHECK(s2.avg == 15.0);
    }

    SUBCASE("single member has zero spread") {
        std::vector<Heuristic> one{heur("a", 4.0)};
        const PopulationStats s1 = population_stats(one);
        CHECK(s1.best == 4.0);
        CHECK(s1.worst == 4.0);
        CHECK(s1.stddev == 0.0);
        CHECK(s1.diversity == 0.0);
    }

    SUBCASE("zero average uses the epsilon guard") {
        std::vector<Heuristic> sym{heur("a", -1.0), heur("b", 1.0)};
        const PopulationStats s3 = population_stats(sym);
        CHECK(s3.avg == 0.0);
        CHECK(s3.diversity == doctest::Approx(1.0 / 1e-9));
    }

    std::vector<Heuristic> none{heur("a", std::nullopt)};
    CHECK_THROWS_AS(population_stats(none), std::invalid_argument);
}

TEST_CASE("rng helpers") {
    std::mt19937_64 rng = seeded_rng(123);
    for (int i = 0; i < 1000; ++i) {
        const double u = uniform01(rng);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 1000; ++i) CHECK(uniform_index(rng, 7) < 7);
    CHECK_THROWS_AS(uniform_index(rng, 0), std::invalid_argument);

    SUBCASE("weighted_index honors zero weights and validates input") {
        const std::vector<double> w{0.0, 1.0, 0.0};
        for (int i = 0; i < 100; ++i) CHECK(weighted_index(rng, w) == 1);
        const std::vector<double> neg{0.5, -0.1};
        CHECK_THROWS_AS(weighted_index(rng, neg), std::invalid_argument);
        const std::vector<double> zero{0.0, 0.0};
        CHECK_THROWS_AS(weighted_index(rng, zero), std::invalid_argument);
        CHECK_THROWS_AS(weighted_index(rng, std::vector<double>{}), std::invalid_argument);
    }

    SUBCASE("seeded streams are independent and reproducible") {
        std::mt19937_64 a = seeded_rng(1, 5), b = seeded_rng(1, 5), c = seeded_rng(1, 6);
        CHECK(a() == b());
        CHECK(a() != c());
    }
}
