// Electrical cover number under perturbations of the Jacobian operating point:
// uniform load/generation scaling for the solved point, and grounding the
// unsymmetrized dP/dtheta at every reference bus.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pmu/error.hpp"
#include "pmu/observability.hpp"
#include "pmu/pipeline.hpp"
#include "pmu/power_flow.hpp"
#include "pmu/resistance_distance.hpp"

namespace {

int cover_number(const pmu::PowerCase& pc, const pmu::RealMatrix& g, int reference, pmu::AsymmetryHandling handling) {
    auto dist = pmu::resistance_matrix(g, reference, handling);
    auto adj = pmu::electrical_adjacency(dist, static_cast<int>(pc.branch_count())).adjacency;
    return pmu::solve_cover({adj}).count;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Electrical PMU count sensitivity to the Jacobian operating point"};
    std::string dir;
    std::vector<double> scales{0.5, 0.75, 1.0, 1.25, 1.5};
    app.add_option("--cases-dir", dir, "Directory of case files")->required();
    app.add_option("--load-scale", scales, "Load and generation multipliers for the solved point");
    CLI11_PARSE(app, argc, argv);

    try {
        std::printf("case,n,flat");
        for (double s : scales) std::printf(",solved_x%g", s);
        std::printf(",as_is_min,as_is_max\n");
        for (const auto& path : pmu::list_cases(dir)) {
            auto pc = pmu::load_case(path);
            const int slack = pc.slack_index();
            std::string name = std::filesystem::path(path).stem().string();
            std::printf("%s,%zu,%d", name.c_str(), pc.bus_count(),
                        cover_number(pc, pmu::p_theta_jacobian(pc, pmu::flat_operating_point(pc)), slack,
                                     pmu::AsymmetryHandling::Symmetrize));
            for (double s : scales) {
                auto scaled = pc;
                for (auto& b : scaled.buses) {
                    b.p_load *= s;
                    b.q_load *= s;
                    b.p_gen *= s;
                }
                try {
                    auto op = pmu::solve_power_flow(scaled);
                    std::printf(",%d", cover_number(pc, pmu::p_theta_jacobian(scaled, op), slack,
                                                    pmu::AsymmetryHandling::Symmetrize));
                } catch (const pmu::PmuError& e) {
                    std::printf(",%s", std::string(pmu::to_string(e.kind())).c_str());
                }
            }
            auto g = pmu::p_theta_jacobian(pc, pmu::solve_power_flow(pc));
            int lo = 1 << 30;
            int hi = 0;
            for (int r = 0; r < static_cast<int>(pc.bus_count()); ++r) {
                int c = cover_number(pc, g, r, pmu::AsymmetryHandling::AsIs);
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
            std::printf(",%d,%d\n", lo, hi);
        }
    } catch (const pmu::PmuError& e) {
        std::fprintf(stderr, "error [%s]: %s\n", std::string(pmu::to_string(e.kind())).c_str(), e.what());
        return pmu::exit_code(e.kind());
    }
    return 0;
}
