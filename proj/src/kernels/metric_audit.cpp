#include "pmu/kernels.hpp"

namespace pmu::kernels {

namespace {

void scan_row(const RealMatrix& e, int i, double slack, std::vector<TriangleViolation>& out) {
    const int n = static_cast<int>(e.rows());
    for (int j = i + 1; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (k == i || k == j) continue;
            const double excess = e(i, j) - e(i, k) - e(k, j);
            if (excess > slack) out.push_back({i, j, k, excess});
        }
    }
}

}  // namespace

std::vector<TriangleViolation> triangle_violations(const RealMatrix& e, double slack, std::size_t cap,
                                                   Execution exec) {
    const int n = static_cast<int>(e.rows());
    std::vector<std::vector<TriangleViolation>> per_row(static_cast<std::size_t>(n));
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) scan_row(e, i, slack, per_row[i]);
    } else {
        for (int i = 0; i < n; ++i) scan_row(e, i, slack, per_row[i]);
    }
    std::vector<TriangleViolation> all;
    for (auto& row : per_row) {
        for (auto& v : row) {
            if (all.size() == cap) return all;
            all.push_back(v);
        }
    }
    return all;
}

}  // namespace pmu::kernels
