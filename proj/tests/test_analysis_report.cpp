#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "pmu/analysis_report.hpp"
#include "pmu/error.hpp"
#include "pmu/pipeline.hpp"
#include "test_support.hpp"

using namespace pmu;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int line_count(const std::string& text) { return static_cast<int>(std::count(text.begin(), text.end(), '\n')); }

RunResult run_case(const char* stem, StructureChoice structure, int budget = 0) {
    RunConfig config;
    config.case_path = testing::case_file(stem);
    config.structure = structure;
    config.enumerate_cap = 3;
    if (budget > 0) config.budget = budget;
    return run(config);
}

}  // namespace

TEST_CASE("average profile of trivial adjacencies") {
    auto ones = average_profile(BinaryAdjacency::all_ones(3));
    CHECK(ones.lambda == std::vector<double>{1.5, 1.5, 1.5});
    CHECK(ones.argmins == std::vector<int>{0, 1, 2});
    CHECK(ones.lambda_min == 1.5);

    auto id = average_profile(BinaryAdjacency::identity(4));
    for (double l : id.lambda) CHECK(l == 1.0 / 3.0);
    CHECK(id.argmins.size() == 4);
    CHECK(id.denominator == 3);
}

TEST_CASE("lambda is the exact row sum ratio and stays in range") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> size(2, 30);
        int n = size(rng);
        auto adj = testing::random_connected_graph(rng, n, 0.1);
        auto p = average_profile(adj);
        for (int i = 0; i < n; ++i) {
            CHECK(p.row_sums[i] == adj.row_sum(i));
            CHECK(std::abs(p.lambda[i] - static_cast<double>(adj.row_sum(i)) / (n - 1)) <= 1e-12);
            CHECK(p.lambda[i] >= 1.0 / (n - 1));
            CHECK(p.lambda[i] <= static_cast<double>(n) / (n - 1));
            CHECK(p.lambda[i] >= p.lambda_min);
        }
    }
}

TEST_CASE("pattern check") {
    auto id = BinaryAdjacency::identity(5);
    auto r = pattern_check(average_profile(id), solve_cover({id}));
    CHECK(r.holds);
    CHECK(r.pmu_at_min.size() == 5);
    CHECK(r.pmu_above_min.empty());

    auto pc14 = load_case(testing::case_file("ieee14cdf"));
    auto topo = topological_adjacency(pc14);
    auto profile = average_profile(topo);
    CHECK(profile.argmins == std::vector<int>{7});  // bus 8, the only degree-one bus
    auto r14 = pattern_check(profile, solve_cover({topo}));
    CHECK_FALSE(r14.holds);
    CHECK(r14.min_without_pmu == std::vector<int>{7});
}

TEST_CASE("SHA-256 and number formatting") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.25) == "0.25");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("report.json round-trips and matches the solver outputs") {
    auto result = run_case("ieee14cdf", StructureChoice::Both, 7);
    REQUIRE(result.results.size() == 2);
    for (const auto& s : result.results) {
        auto dir = testing::scratch_dir(std::string("report_") + std::string(structure_name(s.structure)));
        emit_report(result.info, s, dir.string());
        auto record = parse_report(slurp(dir / "report.json"));
        CHECK(record.case_name == "ieee14cdf");
        CHECK(record.n == 14);
        CHECK(record.m == 20);
        CHECK(record.structure == structure_name(s.structure));
        CHECK(record.pmu_count == s.ilp.count);
        CHECK(static_cast<int>(record.ilp_buses.size()) == s.ilp.count);
        CHECK(record.svd_buses.size() == 7);
        CHECK(record.lambda == s.profile.lambda);
        CHECK(record.lambda_min == s.profile.lambda_min);
        CHECK(record.sigma.size() == 14);
        CHECK(record.source_checksum == case_checksum(testing::case_file("ieee14cdf")));
        CHECK(record.source_checksum.size() == 64);

        int deflected = 0;
        for (const auto& a : s.ranking->selected) deflected += a.deflected();
        CHECK(static_cast<int>(record.conflicts.size()) == deflected);

        auto lambda = slurp(dir / "fig_lambda.csv");
        CHECK(lambda.rfind("bus,row_sum,lambda,at_lambda_min,x\n", 0) == 0);
        CHECK(line_count(lambda) == 15);
        auto sigma = slurp(dir / "fig_sigma.csv");
        CHECK(line_count(sigma) == 15);
        auto assignment = slurp(dir / "fig_assignment.csv");
        CHECK(line_count(assignment) == 1 + 7 * 14);
    }
    const auto& electrical = result.results[1];
    CHECK(electrical.jacobian_mode == "solved");
    std::vector<int> svd_buses;
    for (int b : electrical.ranking->buses()) svd_buses.push_back(result.info.external_ids[b]);
    CHECK(svd_buses == std::vector<int>{3, 8, 10, 11, 12, 13, 14});
}

TEST_CASE("conflicts carry external bus ids") {
    auto result = run_case("ieee14cdf", StructureChoice::Electrical, 7);
    auto record = parse_report(report_json(result.info, result.results[0]));
    // vector 2 wants bus 12, which vector 1 already holds
    REQUIRE(!record.conflicts.empty());
    CHECK(record.conflicts[0] == ConflictRecord{2, 12, 3, 2});
    CHECK(record.jacobian_mode == "solved");
}

TEST_CASE("topological report has a null Jacobian mode") {
    auto result = run_case("ieee9cdf", StructureChoice::Topological);
    auto text = report_json(result.info, result.results[0]);
    CHECK(text.find("\"jacobian_mode\": null") != std::string::npos);
    CHECK(parse_report(text).jacobian_mode.empty());
}

TEST_CASE("precreated empty directory is fine; a file in the way is an IO error") {
    auto result = run_case("ieee9cdf", StructureChoice::Topological);
    auto dir = testing::scratch_dir("precreated");
    emit_report(result.info, result.results[0], dir.string());
    CHECK(std::filesystem::exists(dir / "report.json"));

    auto blocker = dir / "blocker";
    std::ofstream(blocker) << "x";
    try {
        emit_report(result.info, result.results[0], blocker.string());
        FAIL("expected Io");
    } catch (const PmuError& e) {
        CHECK(e.kind() == ErrorKind::Io);
    }
}

TEST_CASE("malformed report text") {
    CHECK_THROWS_AS(parse_report("{"), PmuError);
    CHECK_THROWS_AS(parse_report("{\"case\": 3}"), PmuError);
}
