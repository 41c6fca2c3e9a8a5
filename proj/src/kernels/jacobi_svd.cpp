#include <cmath>

#include "pmu/kernels.hpp"

namespace pmu::kernels {

namespace {

template <class Matrix>
bool rotate_pair(Matrix& a, Matrix& v, int p, int q, double tolerance) {
    using Scalar = typename Matrix::Scalar;
    const double alpha = a.col(p).squaredNorm();
    const double beta = a.col(q).squaredNorm();
    const Scalar gamma = a.col(p).dot(a.col(q));  // conjugates the first argument
    const double g = std::abs(gamma);
    if (g == 0.0 || g <= tolerance * std::sqrt(alpha * beta)) return false;

    // Rotate a_p against conj(phase) * a_q, whose inner product with a_p is real.
    const Scalar phase_conj = Eigen::numext::conj(Scalar(gamma / g));
    const double zeta = (beta - alpha) / (2.0 * g);
    const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = c * t;

    auto apply = [&](Matrix& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            const Scalar xp = m(r, p);
            const Scalar xq = phase_conj * m(r, q);
            m(r, p) = c * xp - s * xq;
            m(r, q) = s * xp + c * xq;
        }
    };
    apply(a);
    apply(v);
    return true;
}

template <class Matrix>
JacobiOutput<typename Matrix::Scalar> orthogonalize(Matrix a, const JacobiSettings& settings, Execution exec) {
    const int n = static_cast<int>(a.cols());
    JacobiOutput<typename Matrix::Scalar> out;
    out.v = Matrix::Identity(n, n);
    const auto schedule = round_robin_schedule(n);

    for (int sweep = 1; sweep <= settings.max_sweeps; ++sweep) {
        bool rotated = false;
        for (const auto& round : schedule) {
            const int pairs = static_cast<int>(round.size());
            if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static) reduction(|| : rotated)
                for (int idx = 0; idx < pairs; ++idx) {
                    if (rotate_pair(a, out.v, round[idx].first, round[idx].second, settings.tolerance)) rotated = true;
                }
            } else {
                for (int idx = 0; idx < pairs; ++idx) {
                    if (rotate_pair(a, out.v, round[idx].first, round[idx].second, settings.tolerance)) rotated = true;
                }
            }
        }
        out.sweeps = sweep;
        if (!rotated) {
            out.converged = true;
            break;
        }
    }
    out.columns = std::move(a);
    return out;
}

}  // namespace

std::vector<std::vector<std::pair<int, int>>> round_robin_schedule(int n) {
    std::vector<std::vector<std::pair<int, int>>> rounds;
    if (n < 2) return rounds;
    const int m = n % 2 == 0 ? n : n + 1;  // index n is a bye when n is odd
    std::vector<int> seat(m);
    for (int i = 0; i < m; ++i) seat[i] = i;
    for (int r = 0; r < m - 1; ++r) {
        std::vector<std::pair<int, int>> round;
        for (int i = 0; i < m / 2; ++i) {
            int p = seat[i];
            int q = seat[m - 1 - i];
            if (p >= n || q >= n) continue;
            if (p > q) std::swap(p, q);
            round.emplace_back(p, q);
        }
        rounds.push_back(std::move(round));
        // keep seat 0 fixed, rotate the rest one place clockwise
        int last = seat[m - 1];
        for (int i = m - 1; i > 1; --i) seat[i] = seat[i - 1];
        seat[1] = last;
    }
    return rounds;
}

JacobiOutput<double> jacobi_orthogonalize(RealMatrix a, const JacobiSettings& settings, Execution exec) {
    return orthogonalize(std::move(a), settings, exec);
}

JacobiOutput<std::complex<double>> jacobi_orthogonalize(ComplexMatrix a, const JacobiSettings& settings,
                                                        Execution exec) {
    return orthogonalize(std::move(a), settings, exec);
}

}  // namespace pmu::kernels
