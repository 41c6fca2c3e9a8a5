#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "pmu/error.hpp"
#include "pmu/pipeline.hpp"
#include "test_support.hpp"

using namespace pmu;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> traced_stages(RunConfig config) {
    std::vector<std::string> stages;
    config.trace = [&](std::string_view s) { stages.emplace_back(s); };
    run(config);
    return stages;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

ErrorKind run_error(const RunConfig& config) {
    try {
        run(config);
    } catch (const PmuError& e) {
        return e.kind();
    }
    FAIL("expected PmuError");
    return ErrorKind::Internal;
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        files[fs::relative(entry.path(), root).string()] = ss.str();
    }
    return files;
}

RunConfig config_for(const char* stem) {
    RunConfig c;
    c.case_path = testing::case_file(stem);
    return c;
}

}  // namespace

TEST_CASE("count mode never reaches the SVD stage") {
    auto config = config_for("ieee14cdf");
    config.mode = RunMode::Count;
    auto stages = traced_stages(config);
    CHECK(contains(stages, "cover"));
    CHECK(contains(stages, "power_flow"));
    CHECK_FALSE(contains(stages, "svd"));
    CHECK_FALSE(contains(stages, "assign"));

    config.mode = RunMode::Place;
    stages = traced_stages(config);
    CHECK(contains(stages, "svd"));
    CHECK(contains(stages, "assign"));
    CHECK_FALSE(contains(stages, "metric_audit"));

    config.mode = RunMode::Full;
    config.jacobian = JacobianMode::Flat;
    stages = traced_stages(config);
    CHECK(contains(stages, "metric_audit"));
    CHECK_FALSE(contains(stages, "power_flow"));
}

TEST_CASE("stage order follows the structure choice") {
    auto config = config_for("ieee9cdf");
    config.structure = StructureChoice::Topological;
    auto stages = traced_stages(config);
    CHECK(stages.front() == "parse");
    CHECK(stages.back() == "report");
    CHECK_FALSE(contains(stages, "distance"));

    config.structure = StructureChoice::Electrical;
    stages = traced_stages(config);
    CHECK_FALSE(contains(stages, "topological_adjacency"));
    auto pos = [&](const char* s) { return std::find(stages.begin(), stages.end(), s) - stages.begin(); };
    CHECK(pos("power_flow") < pos("jacobian"));
    CHECK(pos("jacobian") < pos("distance"));
    CHECK(pos("distance") < pos("electrical_adjacency"));
    CHECK(pos("electrical_adjacency") < pos("cover"));
    CHECK(pos("cover") < pos("svd"));
}

TEST_CASE("single runs report the expected counts") {
    auto config = config_for("ieee14cdf");
    config.structure = StructureChoice::Topological;
    config.mode = RunMode::Count;
    auto r = run(config);
    REQUIRE(r.results.size() == 1);
    CHECK(r.results[0].ilp.count == 4);
    CHECK_FALSE(r.results[0].decomposition);
    CHECK(format_run(r, RunMode::Count).find("pmu_count  4") != std::string::npos);
}

TEST_CASE("errors leave no files behind") {
    auto out = testing::scratch_dir("no_partial") / "out";

    RunConfig missing;
    missing.case_path = "/nonexistent/ieee9cdf.txt";
    missing.output_dir = out.string();
    CHECK(run_error(missing) == ErrorKind::Io);
    CHECK_FALSE(fs::exists(out));

    auto diverging = config_for("ieee14cdf");
    diverging.output_dir = out.string();
    diverging.power_flow.max_iterations = 1;
    CHECK(run_error(diverging) == ErrorKind::NonConvergence);
    CHECK_FALSE(fs::exists(out));

    auto budget = config_for("ieee9cdf");
    budget.output_dir = out.string();
    budget.budget = 10;
    CHECK(run_error(budget) == ErrorKind::InvalidArgument);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("argument validation") {
    auto config = config_for("ieee9cdf");
    config.enumerate_cap = -1;
    CHECK(run_error(config) == ErrorKind::InvalidArgument);
    config.enumerate_cap = 0;
    config.structure = StructureChoice::Topological;
    config.dump_distance = (testing::scratch_dir("dump") / "e.csv").string();
    CHECK(run_error(config) == ErrorKind::InvalidArgument);
}

TEST_CASE("output layout") {
    auto out = testing::scratch_dir("layout");
    auto config = config_for("ieee9cdf");
    config.output_dir = out.string();
    config.dump_distance = (out / "distance.csv").string();
    config.dump_matrices = (out / "matrices").string();
    run(config);
    CHECK(fs::exists(out / "topological" / "report.json"));
    CHECK(fs::exists(out / "electrical" / "fig_assignment.csv"));
    CHECK(fs::exists(out / "summary.csv"));
    CHECK(fs::exists(out / "matrices" / "dp_dtheta.csv"));
    auto files = tree(out);
    CHECK(files["summary.csv"] ==
          "case,n,topological_count,electrical_count(solved),electrical_count(flat),status\nieee9cdf,9,3,3,,ok\n");
    CHECK(files["distance.csv"].rfind("bus,1,2,3,4,5,6,7,8,9\n1,0,", 0) == 0);

    auto single = testing::scratch_dir("layout_single");
    config = config_for("ieee9cdf");
    config.structure = StructureChoice::Topological;
    config.output_dir = single.string();
    run(config);
    CHECK(fs::exists(single / "report.json"));
}

TEST_CASE("batch over an empty directory writes only the header") {
    auto in = testing::scratch_dir("batch_empty_in");
    auto out = testing::scratch_dir("batch_empty_out");
    RunConfig config;
    config.output_dir = out.string();
    auto batch = run_batch(in.string(), config);
    CHECK(batch.rows.empty());
    CHECK(tree(out)["summary.csv"] ==
          "case,n,topological_count,electrical_count(solved),electrical_count(flat),status\n");
}

TEST_CASE("batch records a corrupt case and carries on") {
    auto in = testing::scratch_dir("batch_corrupt_in");
    fs::copy_file(testing::case_file("ieee14cdf"), in / "ieee14cdf.txt");
    fs::copy_file(testing::case_file("ieee9cdf"), in / "ieee9cdf.txt");
    std::ofstream(in / "broken.txt") << "not a case file\n";
    std::ofstream(in / "notes.md") << "ignored\n";
    RunConfig config;
    config.mode = RunMode::Count;
    auto batch = run_batch(in.string(), config);
    REQUIRE(batch.rows.size() == 3);
    CHECK(batch.rows[0].case_name == "ieee9cdf");
    CHECK(batch.rows[1].case_name == "ieee14cdf");
    CHECK(batch.rows[2].case_name == "broken");
    CHECK(batch.rows[2].status.rfind("failed:case=", 0) == 0);
    CHECK_FALSE(batch.rows[2].n);
    auto lines = batch.summary;
    CHECK(lines.find("ieee9cdf,9,3,3,3,ok\n") != std::string::npos);
    CHECK(lines.find("ieee14cdf,14,4,6,6,ok\n") != std::string::npos);
}

TEST_CASE("batch records a per-structure failure") {
    auto in = testing::scratch_dir("batch_partial_in");
    fs::copy_file(testing::case_file("ieee9cdf"), in / "ieee9cdf.txt");
    RunConfig config;
    config.mode = RunMode::Count;
    config.power_flow.max_iterations = 1;
    auto batch = run_batch(in.string(), config);
    REQUIRE(batch.rows.size() == 1);
    CHECK(batch.rows[0].topological == 3);
    CHECK_FALSE(batch.rows[0].electrical_solved);
    CHECK(batch.rows[0].electrical_flat == 3);
    CHECK(batch.rows[0].status == "failed:solved=NonConvergence");
}

TEST_CASE("repeated batch runs are byte-identical") {
    auto a = testing::scratch_dir("batch_a");
    auto b = testing::scratch_dir("batch_b");
    RunConfig config;
    config.enumerate_cap = 2;
    config.output_dir = a.string();
    run_batch(PMU_DATA_DIR, config);
    config.output_dir = b.string();
    run_batch(PMU_DATA_DIR, config);
    auto ta = tree(a);
    auto tb = tree(b);
    CHECK(ta.size() == 1 + 6 * 3 * 4);
    CHECK(ta == tb);
}
