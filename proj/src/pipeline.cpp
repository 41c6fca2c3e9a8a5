#include "pmu/pipeline.hpp"

#include <algorithm>
#include <climits>
#include <filesystem>
#include <sstream>

#include "pmu/error.hpp"
#include "pmu/network_matrices.hpp"
#include "pmu/observability.hpp"
#include "pmu/spectral_placement.hpp"

namespace pmu {

namespace fs = std::filesystem;

std::string_view to_string(JacobianMode mode) { return mode == JacobianMode::Solved ? "solved" : "flat"; }

std::string_view to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Count: return "count";
        case RunMode::Place: return "place";
        case RunMode::Full: return "full";
    }
    return "full";
}

std::string_view to_string(StructureChoice choice) {
    switch (choice) {
        case StructureChoice::Topological: return "topological";
        case StructureChoice::Electrical: return "electrical";
        case StructureChoice::Both: return "both";
    }
    return "both";
}

namespace {

std::string case_stem(const std::string& path) {
    fs::path p(path);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
        auto name = p.filename().string();
        return name.empty() ? p.parent_path().filename().string() : name;
    }
    auto file = p.filename().string();
    if (file == "case.toml" || file == "buses.csv" || file == "branches.csv") {
        return p.parent_path().filename().string();
    }
    return p.stem().string();
}

std::string matrix_csv(const RealMatrix& m, const std::vector<int>& ids) {
    std::ostringstream out;
    out << "bus";
    for (int id : ids) out << ',' << id;
    out << '\n';
    for (int i = 0; i < m.rows(); ++i) {
        out << ids[i];
        for (int j = 0; j < m.cols(); ++j) out << ',' << format_number(m(i, j));
        out << '\n';
    }
    return out.str();
}

// Stages for one loaded case; each structure is computed independently.
class CaseRunner {
  public:
    CaseRunner(const PowerCase& pc, const RunConfig& config) : pc_(pc), config_(config) {}

    StructureResult topological() {
        stage("admittance");
        const ComplexMatrix& y = ybus();
        stage("topological_adjacency");
        auto adj = topological_adjacency(pc_);
        StructureResult r = cover_stages(adj, AdjacencyKind::Topological);
        if (config_.mode != RunMode::Count) {
            stage("svd");
            place(r, svd(y, MatrixSource::Admittance));
        }
        return r;
    }

    StructureResult electrical(JacobianMode mode) {
        stage("admittance");
        ybus();
        OperatingPoint op;
        if (mode == JacobianMode::Solved) {
            stage("power_flow");
            op = solve_power_flow(pc_, config_.power_flow);
        } else {
            op = flat_operating_point(pc_);
        }
        stage("jacobian");
        jacobian_ = p_theta_jacobian(pc_, op);
        stage("distance");
        distance_ = resistance_matrix(jacobian_, pc_.slack_index());
        std::vector<std::string> warnings = distance_->warnings;
        if (config_.mode == RunMode::Full) {
            stage("metric_audit");
            auto audit = verify_metric(distance_->e);
            if (!audit.ok()) warnings.push_back("resistance distance fails the metric audit");
        }
        stage("electrical_adjacency");
        auto ea = electrical_adjacency(*distance_, static_cast<int>(pc_.branch_count()));
        warnings.insert(warnings.end(), ea.warnings.begin(), ea.warnings.end());

        StructureResult r = cover_stages(ea.adjacency, AdjacencyKind::Electrical);
        r.jacobian_mode = std::string(to_string(mode));
        r.warnings = std::move(warnings);
        if (config_.mode != RunMode::Count) {
            stage("svd");
            place(r, svd(distance_->e, MatrixSource::Distance));
        }
        return r;
    }

    const ComplexMatrix& ybus() {
        if (!ybus_) ybus_ = build_ybus(pc_);
        return *ybus_;
    }
    const std::optional<ResistanceDistance>& distance() const { return distance_; }
    const RealMatrix& jacobian() const { return jacobian_; }

  private:
    void stage(std::string_view name) const {
        if (config_.trace) config_.trace(name);
    }

    StructureResult cover_stages(const BinaryAdjacency& adj, AdjacencyKind kind) {
        StructureResult r;
        r.structure = kind;
        stage("cover");
        CoverInstance inst{adj};
        r.ilp = solve_cover(inst);
        r.profile = average_profile(adj);
        r.pattern = pattern_check(r.profile, r.ilp);
        if (config_.enumerate_cap > 0) {
            stage("enumerate");
            r.enumeration = enumerate_optima(inst, r.ilp.count, config_.enumerate_cap);
        }
        return r;
    }

    void place(StructureResult& r, SingularDecomposition d) {
        int p = config_.budget.value_or(r.ilp.count);
        if (p < 1 || p > d.size()) {
            throw PmuError(ErrorKind::InvalidArgument,
                           "PMU budget " + std::to_string(p) + " outside 1.." + std::to_string(d.size()));
        }
        stage("assign");
        auto ranked = rank_vectors(d, p);
        r.ranking = assign_buses(d, ranked, p);
        r.decomposition = std::move(d);
    }

    const PowerCase& pc_;
    const RunConfig& config_;
    std::optional<ComplexMatrix> ybus_;
    RealMatrix jacobian_;
    std::optional<ResistanceDistance> distance_;
};

CaseInfo describe(const PowerCase& pc, const std::string& path) {
    CaseInfo info;
    info.name = case_stem(path);
    info.n = static_cast<int>(pc.bus_count());
    info.m = static_cast<int>(pc.branch_count());
    for (const auto& b : pc.buses) info.external_ids.push_back(b.external_id);
    info.source_checksum = case_checksum(path);
    return info;
}

std::string optional_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

SummaryRow summary_row(const RunResult& r) {
    SummaryRow row;
    row.case_name = r.info.name;
    row.n = r.info.n;
    for (const auto& s : r.results) {
        if (s.structure == AdjacencyKind::Topological) {
            row.topological = s.ilp.count;
        } else if (s.jacobian_mode == "solved") {
            row.electrical_solved = s.ilp.count;
        } else {
            row.electrical_flat = s.ilp.count;
        }
    }
    return row;
}

std::string result_dir_name(const StructureResult& s) {
    if (s.structure == AdjacencyKind::Topological) return "topological";
    return "electrical_" + s.jacobian_mode;
}

}  // namespace

RunResult run(const RunConfig& config) {
    if (config.enumerate_cap < 0) throw PmuError(ErrorKind::InvalidArgument, "--enumerate must be >= 0");
    if (!config.dump_distance.empty() && config.structure == StructureChoice::Topological) {
        throw PmuError(ErrorKind::InvalidArgument, "--dump-distance needs the electrical structure");
    }
    if (config.trace) config.trace("parse");
    PowerCase pc = load_case(config.case_path);

    RunResult result;
    result.info = describe(pc, config.case_path);
    CaseRunner runner(pc, config);
    if (config.structure != StructureChoice::Electrical) result.results.push_back(runner.topological());
    if (config.structure != StructureChoice::Topological) {
        result.results.push_back(runner.electrical(config.jacobian));
    }
    for (const auto& s : result.results) result.warnings.insert(result.warnings.end(), s.warnings.begin(), s.warnings.end());

    if (config.trace) config.trace("report");
    if (!config.dump_distance.empty()) {
        write_text_file(config.dump_distance, matrix_csv(runner.distance()->e, result.info.external_ids));
    }
    if (!config.dump_matrices.empty()) {
        std::error_code ec;
        fs::create_directories(config.dump_matrices, ec);
        if (ec) throw PmuError(ErrorKind::Io, "cannot create " + config.dump_matrices);
        const auto& y = runner.ybus();
        fs::path base(config.dump_matrices);
        write_text_file((base / "ybus_real.csv").string(), matrix_csv(y.real(), result.info.external_ids));
        write_text_file((base / "ybus_imag.csv").string(), matrix_csv(y.imag(), result.info.external_ids));
        if (runner.distance()) {
            write_text_file((base / "dp_dtheta.csv").string(), matrix_csv(runner.jacobian(), result.info.external_ids));
            write_text_file((base / "distance.csv").string(), matrix_csv(runner.distance()->e, result.info.external_ids));
        }
    }
    if (!config.output_dir.empty()) {
        fs::path out(config.output_dir);
        for (const auto& s : result.results) {
            auto dir = result.results.size() == 1 ? out : out / std::string(structure_name(s.structure));
            emit_report(result.info, s, dir.string());
        }
        write_text_file((out / "summary.csv").string(), summary_csv({summary_row(result)}));
    }
    return result;
}

std::string format_run(const RunResult& result, RunMode mode) {
    const auto& info = result.info;
    std::ostringstream out;
    out << "case " << info.name << "  n=" << info.n << " m=" << info.m << "  sha256=" << info.source_checksum << '\n';
    auto ids = [&](const std::vector<int>& positions) {
        std::string s;
        for (std::size_t k = 0; k < positions.size(); ++k) {
            if (k) s += ',';
            s += std::to_string(info.external_ids[positions[k]]);
        }
        return "{" + s + "}";
    };
    for (const auto& s : result.results) {
        out << '\n' << structure_name(s.structure);
        if (!s.jacobian_mode.empty()) out << " (jacobian " << s.jacobian_mode << ")";
        out << "\n  pmu_count  " << s.ilp.count << '\n';
        if (mode == RunMode::Count) continue;
        out << "  ilp_buses  " << ids(s.ilp.nodes) << '\n';
        out << "  lambda_min " << format_number(s.profile.lambda_min) << " at " << ids(s.profile.argmins) << '\n';
        out << "  pattern    " << (s.pattern.holds ? "holds" : "does not hold") << '\n';
        if (s.enumeration) {
            out << "  optima     " << s.enumeration->optima.size() << (s.enumeration->cap_exceeded ? "+" : "") << '\n';
            for (const auto& o : s.enumeration->optima) out << "    " << ids(o.nodes) << '\n';
        }
        if (s.ranking) {
            out << "  svd_buses  " << ids(s.ranking->buses()) << '\n';
            out << "  vector  magnitude               intended  assigned  rank\n";
            for (const auto& a : s.ranking->selected) {
                std::string mag = format_number(a.magnitude);
                mag.resize(std::max<std::size_t>(mag.size(), 22), ' ');
                std::string vec = std::to_string(a.vector + 1);
                vec.resize(std::max<std::size_t>(vec.size(), 6), ' ');
                std::string intended = std::to_string(info.external_ids[a.intended_bus]);
                intended.resize(std::max<std::size_t>(intended.size(), 8), ' ');
                std::string assigned = std::to_string(info.external_ids[a.assigned_bus]);
                assigned.resize(std::max<std::size_t>(assigned.size(), 8), ' ');
                out << "  " << vec << "  " << mag << "  " << intended << "  " << assigned << "  " << a.assignment_rank
                    << '\n';
            }
        }
    }
    return out.str();
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "case,n,topological_count,electrical_count(solved),electrical_count(flat),status\n";
    for (const auto& r : rows) {
        out << r.case_name << ',' << optional_int(r.n) << ',' << optional_int(r.topological) << ','
            << optional_int(r.electrical_solved) << ',' << optional_int(r.electrical_flat) << ',' << r.status << '\n';
    }
    return out.str();
}

std::vector<std::string> list_cases(const std::string& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw PmuError(ErrorKind::Io, "not a directory: " + dir);
    std::vector<std::string> cases;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        auto name = entry.path().filename().string();
        if (name.empty() || name.front() == '.') continue;
        if (entry.is_directory()) {
            if (fs::exists(entry.path() / "buses.csv")) cases.push_back(entry.path().string());
            continue;
        }
        auto ext = entry.path().extension().string();
        if (entry.is_regular_file() && (ext == ".txt" || ext == ".cdf")) cases.push_back(entry.path().string());
    }
    if (ec) throw PmuError(ErrorKind::Io, "cannot list " + dir + ": " + ec.message());
    std::sort(cases.begin(), cases.end());
    return cases;
}

BatchResult run_batch(const std::string& dir, const RunConfig& config_template) {
    const auto cases = list_cases(dir);
    const int count = static_cast<int>(cases.size());
    std::vector<SummaryRow> rows(cases.size());
    std::vector<std::optional<RunResult>> results(cases.size());

#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < count; ++i) {
        SummaryRow& row = rows[i];
        row.case_name = case_stem(cases[i]);
        std::vector<std::string> failures;
        try {
            RunConfig config = config_template;
            config.case_path = cases[i];
            PowerCase pc = load_case(cases[i]);
            RunResult r;
            r.info = describe(pc, cases[i]);
            row.n = r.info.n;
            CaseRunner runner(pc, config);
            auto attempt = [&](const char* label, auto&& compute) {
                try {
                    r.results.push_back(compute());
                } catch (const PmuError& e) {
                    failures.push_back(std::string(label) + "=" + std::string(to_string(e.kind())));
                }
            };
            attempt("topological", [&] { return runner.topological(); });
            attempt("solved", [&] { return runner.electrical(JacobianMode::Solved); });
            attempt("flat", [&] { return runner.electrical(JacobianMode::Flat); });
            SummaryRow counts = summary_row(r);
            row.topological = counts.topological;
            row.electrical_solved = counts.electrical_solved;
            row.electrical_flat = counts.electrical_flat;
            results[i] = std::move(r);
        } catch (const PmuError& e) {
            failures.push_back("case=" + std::string(to_string(e.kind())));
        } catch (const std::exception& e) {
            failures.push_back("case=Internal");
        }
        if (!failures.empty()) {
            row.status = "failed:";
            for (std::size_t k = 0; k < failures.size(); ++k) row.status += (k ? ";" : "") + failures[k];
        }
    }

    std::vector<int> order(cases.size());
    for (int i = 0; i < count; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        int na = rows[a].n.value_or(INT_MAX);
        int nb = rows[b].n.value_or(INT_MAX);
        return na != nb ? na < nb : rows[a].case_name < rows[b].case_name;
    });
    BatchResult batch;
    for (int i : order) batch.rows.push_back(rows[i]);
    batch.summary = summary_csv(batch.rows);

    if (!config_template.output_dir.empty()) {
        fs::path out(config_template.output_dir);
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw PmuError(ErrorKind::Io, "cannot create " + out.string());
        for (int i : order) {
            if (!results[i]) continue;
            for (const auto& s : results[i]->results) {
                emit_report(results[i]->info, s, (out / results[i]->info.name / result_dir_name(s)).string());
            }
        }
        write_text_file((out / "summary.csv").string(), batch.summary);
    }
    return batch;
}

}  // namespace pmu
