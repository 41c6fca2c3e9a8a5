#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pmu {

enum class BusType { PQ, PV, Slack };

std::string_view to_string(BusType type);

// Quantities are per-unit on the case MVA base; angles in radians.
struct Bus {
    int external_id = 0;
    BusType type = BusType::PQ;
    double v_mag = 1.0;
    double v_ang = 0.0;
    double p_load = 0.0;
    double q_load = 0.0;
    double p_gen = 0.0;
    double q_gen = 0.0;
    double shunt_g = 0.0;
    double shunt_b = 0.0;

    bool operator==(const Bus&) const = default;
};

// from_bus/to_bus are 0-based positions into PowerCase::buses. The off-nominal
// tap sits on the from side.
struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double r = 0.0;
    double x = 0.0;
    double b_charging = 0.0;
    double tap_ratio = 1.0;
    double phase_shift = 0.0;

    bool operator==(const Branch&) const = default;
};

struct PowerCase {
    std::string name;
    double mva_base = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;

    std::size_t bus_count() const { return buses.size(); }
    std::size_t branch_count() const { return branches.size(); }

    int slack_index() const;
    /// Position of the bus with the given external id, or -1.
    int index_of(int external_id) const;

    bool operator==(const PowerCase&) const = default;
};

/// Parse IEEE Common Data Format text. Throws PmuError on malformed input or
/// when the resulting network violates the model invariants.
PowerCase parse_cdf(std::string_view text);

struct CsvCaseText {
    std::string metadata;  // `name = "..."` and `mva_base = ...` lines
    std::string buses;
    std::string branches;
};

/// Two-table CSV format (buses.csv, branches.csv) plus a metadata file.
PowerCase parse_csv_fallback(const CsvCaseText& text);
CsvCaseText write_csv_fallback(const PowerCase& pc);

/// Reads a case from disk: a directory (or any of its files) holding
/// case.toml/buses.csv/branches.csv, or an IEEE CDF text file.
PowerCase load_case(const std::string& path);

/// Files load_case reads for `path`, in read order.
std::vector<std::string> case_source_files(const std::string& path);

/// Applies every model invariant; throws PmuError naming the first violation.
void validate(const PowerCase& pc);

/// Breadth-first connectivity over the branch list.
bool is_connected(std::size_t bus_count, const std::vector<Branch>& branches);

}  // namespace pmu
