#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmu/network_matrices.hpp"
#include "pmu/observability.hpp"
#include "pmu/spectral_placement.hpp"

namespace pmu {

/// lambda_i = row_sum_i / (N - 1), diagonal included. Row sums are kept as
/// integers so minimum ties are exact.
struct AverageDistanceProfile {
    std::vector<int> row_sums;
    int denominator = 1;
    std::vector<double> lambda;
    int min_row_sum = 0;
    double lambda_min = 0.0;
    std::vector<int> argmins;  // bus positions at lambda_min
    AdjacencyKind kind = AdjacencyKind::Topological;

    bool at_min(int bus) const { return row_sums[bus] == min_row_sum; }
};

AverageDistanceProfile average_profile(const BinaryAdjacency& adj);

struct PatternReport {
    std::vector<int> pmu_at_min;
    std::vector<int> pmu_above_min;
    std::vector<int> min_without_pmu;
    /// Every lambda_min bus hosts a PMU and at most one PMU sits above it.
    bool holds = false;
};

PatternReport pattern_check(const AverageDistanceProfile& profile, const PlacementSolution& sol);

struct CaseInfo {
    std::string name;
    int n = 0;
    int m = 0;
    std::vector<int> external_ids;
    std::string source_checksum;  // hex SHA-256 of the case file bytes
};

/// Everything one structure (topological, or electrical at one Jacobian
/// mode) produced for a case.
struct StructureResult {
    AdjacencyKind structure = AdjacencyKind::Topological;
    std::string jacobian_mode;  // "solved" / "flat"; empty for topological
    PlacementSolution ilp;
    AverageDistanceProfile profile;
    PatternReport pattern;
    std::optional<SingularDecomposition> decomposition;
    std::optional<CouplingRanking> ranking;
    std::optional<EnumerationResult> enumeration;
    std::vector<std::string> warnings;
};

std::string_view structure_name(AdjacencyKind kind);

std::string sha256_hex(std::string_view bytes);
/// SHA-256 over the concatenated bytes of every file the case loader reads.
std::string case_checksum(const std::string& case_path);

/// Shortest round-trip decimal form.
std::string format_number(double value);

std::string report_json(const CaseInfo& info, const StructureResult& result);
std::string lambda_csv(const CaseInfo& info, const StructureResult& result);
std::string sigma_csv(const StructureResult& result);
std::string assignment_csv(const CaseInfo& info, const StructureResult& result);

/// Writes report.json and the fig_*.csv files into `dir`, creating it.
void emit_report(const CaseInfo& info, const StructureResult& result, const std::string& dir);

struct ConflictRecord {
    int vector = 0;
    int intended_bus = 0;
    int assigned_bus = 0;
    int rank = 0;

    bool operator==(const ConflictRecord&) const = default;
};

/// The report.json fields, external ids throughout.
struct ReportRecord {
    std::string case_name;
    int n = 0;
    int m = 0;
    std::string structure;
    std::string jacobian_mode;
    int pmu_count = 0;
    std::vector<int> ilp_buses;
    std::vector<int> svd_buses;
    std::vector<double> lambda;
    double lambda_min = 0.0;
    std::vector<double> sigma;
    std::vector<ConflictRecord> conflicts;
    std::string source_checksum;

    bool operator==(const ReportRecord&) const = default;
};

ReportRecord parse_report(std::string_view json_text);

void write_text_file(const std::string& path, std::string_view text);

}  // namespace pmu
