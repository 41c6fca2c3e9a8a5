#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmu/analysis_report.hpp"
#include "pmu/case_model.hpp"
#include "pmu/power_flow.hpp"
#include "pmu/resistance_distance.hpp"

namespace pmu {

enum class StructureChoice { Topological, Electrical, Both };
enum class JacobianMode { Solved, Flat };
enum class RunMode { Count, Place, Full };

std::string_view to_string(JacobianMode mode);
std::string_view to_string(RunMode mode);
std::string_view to_string(StructureChoice choice);

struct RunConfig {
    std::string case_path;
    StructureChoice structure = StructureChoice::Both;
    JacobianMode jacobian = JacobianMode::Solved;
    RunMode mode = RunMode::Full;
    std::string output_dir;  // empty: nothing written
    PowerFlowOptions power_flow;
    int enumerate_cap = 0;
    std::optional<int> budget;  // PMUs to place; default is the optimal count
    std::string dump_distance;  // CSV path for E
    std::string dump_matrices;  // directory for Y and dP/dtheta
    /// Called with the name of each stage as it starts.
    std::function<void(std::string_view)> trace;
};

struct RunResult {
    CaseInfo info;
    std::vector<StructureResult> results;  // topological first
    std::vector<std::string> warnings;
};

/// Parse, build, solve and place for one case. Writes files only after every
/// stage succeeded. Throws PmuError.
RunResult run(const RunConfig& config);

/// Human-readable stdout rendering of a run.
std::string format_run(const RunResult& result, RunMode mode);

/// `case,n,topological_count,electrical_count(solved),electrical_count(flat),status`
struct SummaryRow {
    std::string case_name;
    std::optional<int> n;
    std::optional<int> topological;
    std::optional<int> electrical_solved;
    std::optional<int> electrical_flat;
    std::string status = "ok";
};

std::string summary_csv(const std::vector<SummaryRow>& rows);

struct BatchResult {
    std::vector<SummaryRow> rows;  // sorted by (n, case)
    std::string summary;
};

/// Every case in `dir` under topological and both electrical modes. Per-case
/// reports go to <output_dir>/<case>/...; summary.csv to <output_dir>.
/// Failures are recorded per row.
BatchResult run_batch(const std::string& dir, const RunConfig& config_template);

/// Case inputs found in `dir`: CDF files and CSV case directories, by name.
std::vector<std::string> list_cases(const std::string& dir);

}  // namespace pmu
