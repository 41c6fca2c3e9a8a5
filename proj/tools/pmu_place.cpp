#include <cctype>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "pmu/error.hpp"
#include "pmu/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Minimum PMU placement for full observability, with SVD-based bus assignment"};

    pmu::RunConfig config;
    std::string cases_dir;
    int budget = 0;
    std::string structure = "both";
    std::string jacobian = "solved";
    std::string mode = "full";

    auto* case_opt = app.add_option("--case", config.case_path, "IEEE CDF file or CSV case directory");
    auto* dir_opt = app.add_option("--cases-dir", cases_dir, "Run every case in a directory and write summary.csv");
    case_opt->excludes(dir_opt);

    const std::map<std::string, pmu::StructureChoice> structures{{"topological", pmu::StructureChoice::Topological},
                                                                 {"electrical", pmu::StructureChoice::Electrical},
                                                                 {"both", pmu::StructureChoice::Both}};
    const std::map<std::string, pmu::JacobianMode> jacobians{{"solved", pmu::JacobianMode::Solved},
                                                             {"flat", pmu::JacobianMode::Flat}};
    const std::map<std::string, pmu::RunMode> modes{
        {"count", pmu::RunMode::Count}, {"place", pmu::RunMode::Place}, {"full", pmu::RunMode::Full}};
    app.add_option("--structure", structure, "topological, electrical or both")
        ->check(CLI::IsMember(structures, CLI::ignore_case))
        ->capture_default_str();
    app.add_option("--jacobian", jacobian, "Operating point for dP/dtheta: solved or flat")
        ->check(CLI::IsMember(jacobians, CLI::ignore_case))
        ->capture_default_str();
    app.add_flag_callback("--flat-start", [&] { jacobian = "flat"; }, "Same as --jacobian flat");
    app.add_option("--mode", mode, "count, place or full")
        ->check(CLI::IsMember(modes, CLI::ignore_case))
        ->capture_default_str();
    app.add_option("--out", config.output_dir, "Directory for report.json, fig_*.csv and summary.csv");
    app.add_option("--enumerate", config.enumerate_cap, "List up to N optimal PMU sets")->check(CLI::NonNegativeNumber);
    app.add_option("--budget", budget, "PMUs to place by SVD (default: the optimal count)")
        ->check(CLI::PositiveNumber);
    app.add_option("--dump-distance", config.dump_distance, "Write the resistance distance matrix as CSV");
    app.add_option("--dump-matrices", config.dump_matrices, "Write Y, dP/dtheta and distance matrices as CSV");
    app.add_option("--pf-tol", config.power_flow.tolerance, "Power flow mismatch tolerance (p.u.)")
        ->check(CLI::PositiveNumber);
    app.add_option("--pf-max-iter", config.power_flow.max_iterations, "Power flow iteration limit")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : pmu::exit_code(pmu::ErrorKind::InvalidArgument);
    }
    if (config.case_path.empty() && cases_dir.empty()) {
        std::cerr << "error: one of --case or --cases-dir is required\n";
        return pmu::exit_code(pmu::ErrorKind::InvalidArgument);
    }
    if (budget > 0) config.budget = budget;
    auto lower = [](std::string s) {
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    };
    config.structure = structures.at(lower(structure));
    config.jacobian = jacobians.at(lower(jacobian));
    config.mode = modes.at(lower(mode));

    try {
        if (!cases_dir.empty()) {
            auto batch = pmu::run_batch(cases_dir, config);
            std::cout << batch.summary;
            return 0;
        }
        auto result = pmu::run(config);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
        std::cout << pmu::format_run(result, config.mode);
        return 0;
    } catch (const pmu::PmuError& e) {
        std::cerr << "error [" << pmu::to_string(e.kind()) << "]: " << e.what() << '\n';
        return pmu::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error [Internal]: " << e.what() << '\n';
        return pmu::exit_code(pmu::ErrorKind::Internal);
    }
}
