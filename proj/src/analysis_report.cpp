#include "pmu/analysis_report.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "pmu/error.hpp"

namespace pmu {

using nlohmann::json;

AverageDistanceProfile average_profile(const BinaryAdjacency& adj) {
    const int n = adj.size();
    if (n < 2) throw PmuError(ErrorKind::InvalidArgument, "average distance needs at least two buses");
    AverageDistanceProfile p;
    p.kind = adj.kind();
    p.denominator = n - 1;
    p.row_sums.resize(static_cast<std::size_t>(n));
    p.lambda.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        p.row_sums[i] = adj.row_sum(i);
        p.lambda[i] = static_cast<double>(p.row_sums[i]) / p.denominator;
    }
    p.min_row_sum = *std::min_element(p.row_sums.begin(), p.row_sums.end());
    p.lambda_min = static_cast<double>(p.min_row_sum) / p.denominator;
    for (int i = 0; i < n; ++i)
        if (p.row_sums[i] == p.min_row_sum) p.argmins.push_back(i);
    return p;
}

PatternReport pattern_check(const AverageDistanceProfile& profile, const PlacementSolution& sol) {
    if (sol.x.size() != profile.row_sums.size()) {
        throw PmuError(ErrorKind::InvalidArgument, "profile and placement describe different cases");
    }
    PatternReport r;
    for (int bus : sol.nodes) (profile.at_min(bus) ? r.pmu_at_min : r.pmu_above_min).push_back(bus);
    for (int bus : profile.argmins)
        if (!sol.x[bus]) r.min_without_pmu.push_back(bus);
    r.holds = r.min_without_pmu.empty() && r.pmu_above_min.size() <= 1;
    return r;
}

std::string_view structure_name(AdjacencyKind kind) {
    return kind == AdjacencyKind::Topological ? "topological" : "electrical";
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw PmuError(ErrorKind::Internal, "SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string case_checksum(const std::string& case_path) {
    std::string bytes;
    for (const auto& file : case_source_files(case_path)) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw PmuError(ErrorKind::Io, "cannot read " + file);
        bytes.append(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return sha256_hex(bytes);
}

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

namespace {

std::vector<int> external(const CaseInfo& info, const std::vector<int>& positions) {
    std::vector<int> out;
    for (int p : positions) out.push_back(info.external_ids[p]);
    return out;
}

}  // namespace

std::string report_json(const CaseInfo& info, const StructureResult& result) {
    json j;
    j["case"] = info.name;
    j["n"] = info.n;
    j["m"] = info.m;
    j["structure"] = structure_name(result.structure);
    j["jacobian_mode"] = result.jacobian_mode.empty() ? json(nullptr) : json(result.jacobian_mode);
    j["pmu_count"] = result.ilp.count;
    j["ilp_buses"] = external(info, result.ilp.nodes);
    j["svd_buses"] = result.ranking ? external(info, result.ranking->buses()) : std::vector<int>{};
    j["lambda"] = result.profile.lambda;
    j["lambda_min"] = result.profile.lambda_min;
    j["lambda_argmin_buses"] = external(info, result.profile.argmins);

    std::vector<double> sigma;
    if (result.decomposition) sigma.assign(result.decomposition->sigma.begin(), result.decomposition->sigma.end());
    j["sigma"] = sigma;

    json conflicts = json::array();
    json assignments = json::array();
    if (result.ranking) {
        for (const auto& a : result.ranking->selected) {
            json entry = {{"vector", a.vector + 1},
                          {"intended_bus", info.external_ids[a.intended_bus]},
                          {"assigned_bus", info.external_ids[a.assigned_bus]},
                          {"rank", a.assignment_rank}};
            if (a.deflected()) conflicts.push_back(entry);
            entry["magnitude"] = a.magnitude;
            assignments.push_back(entry);
        }
    }
    j["conflicts"] = conflicts;
    j["assignments"] = assignments;

    j["pattern"] = {{"holds", result.pattern.holds},
                    {"pmu_at_lambda_min", external(info, result.pattern.pmu_at_min)},
                    {"pmu_above_lambda_min", external(info, result.pattern.pmu_above_min)},
                    {"lambda_min_without_pmu", external(info, result.pattern.min_without_pmu)}};
    if (result.enumeration) {
        json optima = json::array();
        for (const auto& s : result.enumeration->optima) optima.push_back(external(info, s.nodes));
        j["enumerated_optima"] = {{"sets", optima}, {"cap_exceeded", result.enumeration->cap_exceeded}};
    }
    j["warnings"] = result.warnings;
    j["source_checksum"] = info.source_checksum;
    return j.dump(2) + "\n";
}

std::string lambda_csv(const CaseInfo& info, const StructureResult& result) {
    std::ostringstream out;
    out << "bus,row_sum,lambda,at_lambda_min,x\n";
    const auto& p = result.profile;
    for (std::size_t i = 0; i < p.lambda.size(); ++i) {
        out << info.external_ids[i] << ',' << p.row_sums[i] << ',' << format_number(p.lambda[i]) << ','
            << (p.at_min(static_cast<int>(i)) ? 1 : 0) << ',' << int{result.ilp.x[i]} << '\n';
    }
    return out.str();
}

std::string sigma_csv(const StructureResult& result) {
    std::ostringstream out;
    out << "vector,sigma,magnitude,selected\n";
    if (!result.decomposition) return out.str();
    const auto& d = *result.decomposition;
    std::vector<bool> selected(static_cast<std::size_t>(d.size()), false);
    if (result.ranking)
        for (const auto& a : result.ranking->selected) selected[a.vector] = true;
    for (int k = 0; k < d.size(); ++k) {
        out << k + 1 << ',' << format_number(d.sigma[k]) << ',' << format_number((d.sigma[k] * d.u.col(k)).norm())
            << ',' << (selected[k] ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string assignment_csv(const CaseInfo& info, const StructureResult& result) {
    std::ostringstream out;
    out << "vector,bus,abs_entry,entry_rank,assigned\n";
    if (!result.decomposition || !result.ranking) return out.str();
    const auto& d = *result.decomposition;
    for (const auto& a : result.ranking->selected) {
        auto order = entries_by_magnitude(d, a.vector);
        std::vector<int> rank_of(order.size());
        for (std::size_t r = 0; r < order.size(); ++r) rank_of[order[r]] = static_cast<int>(r) + 1;
        for (int bus = 0; bus < d.size(); ++bus) {
            out << a.vector + 1 << ',' << info.external_ids[bus] << ',' << format_number(std::abs(d.u(bus, a.vector)))
                << ',' << rank_of[bus] << ',' << (bus == a.assigned_bus ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PmuError(ErrorKind::Io, "cannot write " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw PmuError(ErrorKind::Io, "write failed for " + path);
}

void emit_report(const CaseInfo& info, const StructureResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    // render everything before touching the filesystem
    const std::string report = report_json(info, result);
    const std::string lambda = lambda_csv(info, result);
    const std::string sigma = sigma_csv(result);
    const std::string assignment = assignment_csv(info, result);

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw PmuError(ErrorKind::Io, "cannot create " + dir + ": " + ec.message());
    const fs::path base(dir);
    write_text_file((base / "report.json").string(), report);
    write_text_file((base / "fig_lambda.csv").string(), lambda);
    write_text_file((base / "fig_sigma.csv").string(), sigma);
    write_text_file((base / "fig_assignment.csv").string(), assignment);
}

ReportRecord parse_report(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
        ReportRecord r;
        r.case_name = j.at("case").get<std::string>();
        r.n = j.at("n").get<int>();
        r.m = j.at("m").get<int>();
        r.structure = j.at("structure").get<std::string>();
        if (!j.at("jacobian_mode").is_null()) r.jacobian_mode = j.at("jacobian_mode").get<std::string>();
        r.pmu_count = j.at("pmu_count").get<int>();
        r.ilp_buses = j.at("ilp_buses").get<std::vector<int>>();
        r.svd_buses = j.at("svd_buses").get<std::vector<int>>();
        r.lambda = j.at("lambda").get<std::vector<double>>();
        r.lambda_min = j.at("lambda_min").get<double>();
        r.sigma = j.at("sigma").get<std::vector<double>>();
        for (const auto& c : j.at("conflicts")) {
            r.conflicts.push_back({c.at("vector").get<int>(), c.at("intended_bus").get<int>(),
                                   c.at("assigned_bus").get<int>(), c.at("rank").get<int>()});
        }
        r.source_checksum = j.at("source_checksum").get<std::string>();
        return r;
    } catch (const json::exception& e) {
        throw PmuError(ErrorKind::MalformedRecord, std::string("report.json: ") + e.what());
    }
}

}  // namespace pmu
