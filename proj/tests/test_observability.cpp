#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>

#include "pmu/error.hpp"
#include "pmu/observability.hpp"
#include "pmu/power_flow.hpp"
#include "pmu/resistance_distance.hpp"
#include "test_support.hpp"

using namespace pmu;

namespace {

BinaryAdjacency path_graph(int n) {
    BinaryAdjacency a(n, AdjacencyKind::Topological);
    for (int i = 0; i + 1 < n; ++i) a.connect(i, i + 1);
    return a;
}

std::vector<int> external(const PowerCase& pc, const std::vector<int>& nodes) {
    std::vector<int> out;
    for (int v : nodes) out.push_back(pc.buses[v].external_id);
    return out;
}

BinaryAdjacency electrical(const PowerCase& pc, bool solved) {
    auto g = p_theta_jacobian(pc, solved ? solve_power_flow(pc) : flat_operating_point(pc));
    return electrical_adjacency(resistance_matrix(g, pc.slack_index()), static_cast<int>(pc.branch_count())).adjacency;
}

// Every optimal cover by exhaustive subset scan, in lexicographic order.
std::vector<std::vector<int>> all_covers_of_size(const BinaryAdjacency& adj, int k) {
    const int n = adj.size();
    std::vector<std::vector<int>> out;
    std::vector<int> pick(static_cast<std::size_t>(k));
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            if (is_feasible(CoverInstance{adj}, pick)) out.push_back(pick);
            return;
        }
        for (int v = start; v < n; ++v) {
            pick[depth] = v;
            rec(v + 1, depth + 1);
        }
    };
    rec(0, 0);
    return out;
}

}  // namespace

TEST_CASE("trivial instances") {
    auto id = solve_cover({BinaryAdjacency::identity(5)});
    CHECK(id.count == 5);
    CHECK(id.nodes == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(id.optimal);

    auto ones = solve_cover({BinaryAdjacency::all_ones(6)});
    CHECK(ones.count == 1);
    CHECK(ones.nodes == std::vector<int>{0});

    auto path = solve_cover({path_graph(5)});
    CHECK(path.count == 2);
    CHECK(path.nodes == std::vector<int>{0, 3});
    CHECK(path.x == std::vector<std::uint8_t>{1, 0, 0, 1, 0});

    BinaryAdjacency star(7, AdjacencyKind::Topological);
    for (int leaf = 0; leaf < 6; ++leaf) star.connect(6, leaf);
    CHECK(solve_cover({star}).nodes == std::vector<int>{6});
}

TEST_CASE("invalid instances are rejected") {
    BinaryAdjacency a(3, AdjacencyKind::Topological);
    a.set(0, 1, true);
    CHECK_THROWS_AS(solve_cover({a}), PmuError);
    BinaryAdjacency no_diag = BinaryAdjacency::identity(3);
    no_diag.set(1, 1, false);
    CHECK_THROWS_AS(solve_cover({no_diag}), PmuError);
}

TEST_CASE("IEEE cases: topological counts and lexicographic optima") {
    const std::pair<const char*, int> counts[] = {{"ieee9cdf", 3},   {"ieee14cdf", 4},  {"ieee30cdf", 10},
                                                  {"ieee39cdf", 13}, {"ieee57cdf", 17}, {"ieee118cdf", 32}};
    for (const auto& [stem, count] : counts) {
        auto pc = load_case(testing::case_file(stem));
        CoverInstance inst{topological_adjacency(pc)};
        auto start = std::chrono::steady_clock::now();
        auto sol = solve_cover(inst);
        auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        CAPTURE(stem);
        CHECK(sol.count == count);
        CHECK(is_feasible(inst, sol.nodes));
        CHECK(seconds < 10.0);
    }
    auto pc9 = load_case(testing::case_file("ieee9cdf"));
    auto pc14 = load_case(testing::case_file("ieee14cdf"));
    CHECK(external(pc9, solve_cover({topological_adjacency(pc9)}).nodes) == std::vector<int>{1, 6, 8});
    CHECK(external(pc14, solve_cover({topological_adjacency(pc14)}).nodes) == std::vector<int>{2, 6, 7, 9});
}

TEST_CASE("IEEE cases: electrical counts match the MILP reference") {
    // (solved, flat) from scipy MILP on the numpy distance pipeline
    const std::tuple<const char*, int, int> counts[] = {{"ieee9cdf", 3, 3},    {"ieee14cdf", 6, 6},
                                                        {"ieee30cdf", 14, 14}, {"ieee39cdf", 20, 21},
                                                        {"ieee57cdf", 31, 30}, {"ieee118cdf", 57, 56}};
    for (const auto& [stem, solved, flat] : counts) {
        CAPTURE(stem);
        auto pc = load_case(testing::case_file(stem));
        CHECK(solve_cover({electrical(pc, true)}).count == solved);
        CHECK(solve_cover({electrical(pc, false)}).count == flat);
    }
    auto pc9 = load_case(testing::case_file("ieee9cdf"));
    auto pc14 = load_case(testing::case_file("ieee14cdf"));
    CHECK(external(pc9, solve_cover({electrical(pc9, true)}).nodes) == std::vector<int>{2, 3, 4});
    CHECK(external(pc14, solve_cover({electrical(pc14, true)}).nodes) == std::vector<int>{1, 6, 7, 10, 12, 14});
    CHECK(external(pc14, solve_cover({electrical(pc14, false)}).nodes) == std::vector<int>{1, 6, 8, 10, 12, 14});
}

TEST_CASE("branch and bound agrees with brute force on random graphs") {
    std::mt19937_64 rng(2024);
    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> size(2, 12);
        std::uniform_real_distribution<double> density(0.0, 0.4);
        int n = size(rng);
        CoverInstance inst{testing::random_connected_graph(rng, n, density(rng))};
        auto bb = solve_cover(inst);
        auto bf = brute_force_cover(inst, n);
        if (bb.count != bf.count || bb.nodes != bf.nodes) ++mismatches;
        CHECK(is_feasible(inst, bb.nodes));
    }
    CHECK(mismatches == 0);
}

TEST_CASE("enumeration lists every optimum in order") {
    auto path4 = enumerate_optima({path_graph(4)}, 2, 10);
    REQUIRE(path4.optima.size() == 4);
    CHECK(path4.optima[0].nodes == std::vector<int>{0, 2});
    CHECK(path4.optima[1].nodes == std::vector<int>{0, 3});
    CHECK(path4.optima[2].nodes == std::vector<int>{1, 2});
    CHECK(path4.optima[3].nodes == std::vector<int>{1, 3});
    CHECK_FALSE(path4.cap_exceeded);

    auto capped = enumerate_optima({path_graph(4)}, 2, 2);
    CHECK(capped.optima.size() == 2);
    CHECK(capped.cap_exceeded);

    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<int> size(2, 10);
        int n = size(rng);
        CoverInstance inst{testing::random_connected_graph(rng, n, 0.2)};
        int k = solve_cover(inst).count;
        auto expected = all_covers_of_size(inst.adjacency, k);
        auto got = enumerate_optima(inst, k, 1000);
        REQUIRE(got.optima.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) CHECK(got.optima[i].nodes == expected[i]);
    }
}

TEST_CASE("brute force gives up past its limit") {
    try {
        brute_force_cover({BinaryAdjacency::identity(4)}, 3);
        FAIL("expected NoSolutionWithinK");
    } catch (const PmuError& e) {
        CHECK(e.kind() == ErrorKind::NoSolutionWithinK);
    }
    CHECK(brute_force_cover({BinaryAdjacency::identity(4)}, 4, kernels::Execution::Serial).count == 4);
}

TEST_CASE("BusSet") {
    BusSet s(70);
    s.set(0);
    s.set(69);
    CHECK(s.count() == 2);
    CHECK(s.test(69));
    auto inv = ~s;
    CHECK(inv.count() == 68);
    CHECK_FALSE(inv.intersects(s));
    s.reset(0);
    CHECK(s.count_and_not(BusSet(70)) == 1);
    CHECK(BusSet(5).none());
}
