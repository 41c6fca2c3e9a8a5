#include "pmu/kernels.hpp"

namespace pmu::kernels {

namespace {

void assemble_row(const ComplexMatrix& y, const ComplexVector& v, int i, RealMatrix& out) {
    const int n = static_cast<int>(y.rows());
    const std::complex<double> j(0.0, 1.0);
    double row_sum = 0.0;
    for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        // dP_i/dtheta_k = Re(-j V_i conj(Y_ik V_k))
        const double d = std::real(-j * v(i) * std::conj(y(i, k) * v(k)));
        out(i, k) = d;
        row_sum += d;
    }
    out(i, i) = -row_sum;
}

}  // namespace

RealMatrix p_theta_jacobian(const ComplexMatrix& y, const ComplexVector& v, Execution exec) {
    const int n = static_cast<int>(y.rows());
    RealMatrix out = RealMatrix::Zero(n, n);
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) assemble_row(y, v, i, out);
    } else {
        for (int i = 0; i < n; ++i) assemble_row(y, v, i, out);
    }
    return out;
}

}  // namespace pmu::kernels
