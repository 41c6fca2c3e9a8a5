#include "pmu/resistance_distance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "pmu/error.hpp"

namespace pmu {

GroundedInverse grounded_inverse(const RealMatrix& g, int reference) {
    const int n = static_cast<int>(g.rows());
    if (g.cols() != n || n < 2) throw PmuError(ErrorKind::InvalidArgument, "conductance matrix must be square, N >= 2");
    if (reference < 0 || reference >= n) {
        throw PmuError(ErrorKind::InvalidArgument, "reference bus " + std::to_string(reference) + " out of range");
    }
    GroundedInverse out;
    out.reference = reference;
    for (int i = 0; i < n; ++i)
        if (i != reference) out.kept.push_back(i);

    RealMatrix reduced(n - 1, n - 1);
    for (int a = 0; a < n - 1; ++a)
        for (int b = 0; b < n - 1; ++b) reduced(a, b) = g(out.kept[a], out.kept[b]);

    Eigen::FullPivLU<RealMatrix> lu(reduced);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        throw PmuError(ErrorKind::SingularSubmatrix,
                       "grounded conductance matrix is singular (rank " + std::to_string(lu.rank()) + " of " +
                           std::to_string(n - 1) + "); the network is disconnected or degenerate");
    }
    out.inverse = lu.inverse();
    return out;
}

double relative_asymmetry(const RealMatrix& g) {
    const double scale = g.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (g - g.transpose()).cwiseAbs().maxCoeff() / scale;
}

RealMatrix symmetric_laplacian(const RealMatrix& g) {
    const auto n = g.rows();
    RealMatrix l = RealMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            l(i, j) = 0.5 * (g(i, j) + g(j, i));
            l(i, i) -= l(i, j);
        }
    }
    return l;
}

ResistanceDistance resistance_matrix(const RealMatrix& g, int reference, AsymmetryHandling handling) {
    ResistanceDistance out;
    out.reference = reference;
    out.input_asymmetry = relative_asymmetry(g);

    RealMatrix conductance = g;
    if (out.input_asymmetry > kAsymmetryTolerance) {
        std::ostringstream msg;
        msg << "conductance matrix asymmetry " << out.input_asymmetry << " exceeds " << kAsymmetryTolerance;
        if (handling == AsymmetryHandling::Symmetrize) {
            conductance = symmetric_laplacian(g);
            out.symmetrized_input = true;
            msg << "; grounding the symmetrized Laplacian";
        } else {
            msg << "; grounding as given, the distance depends on the reference bus";
        }
        out.warnings.push_back(msg.str());
    }

    const auto grounded = grounded_inverse(conductance, reference);
    const int n = static_cast<int>(g.rows());
    const RealMatrix& inv = grounded.inverse;
    const RealVector diag = inv.diagonal();
    const auto k = static_cast<Eigen::Index>(n - 1);
    const RealVector ones = RealVector::Ones(k);
    const RealMatrix e_kk = ones * diag.transpose() + diag * ones.transpose() - inv - inv.transpose();

    RealMatrix e = RealMatrix::Zero(n, n);
    for (Eigen::Index a = 0; a < k; ++a) {
        const int ia = grounded.kept[a];
        e(reference, ia) = diag(a);
        e(ia, reference) = diag(a);
        for (Eigen::Index b = 0; b < k; ++b) e(ia, grounded.kept[b]) = e_kk(a, b);
    }
    e = 0.5 * (e + e.transpose());
    e.diagonal().setZero();
    out.e = std::move(e);
    return out;
}

ElectricalAdjacency electrical_adjacency(const ResistanceDistance& dist, int m) {
    const int n = dist.size();
    const long pairs = static_cast<long>(n) * (n - 1) / 2;
    if (m < 0 || m > pairs) {
        throw PmuError(ErrorKind::InvalidArgument, "cannot select " + std::to_string(m) + " of " +
                                                       std::to_string(pairs) + " bus pairs");
    }
    std::vector<std::tuple<double, int, int>> candidates;
    candidates.reserve(static_cast<std::size_t>(pairs));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) candidates.emplace_back(dist.e(i, j), i, j);
    std::sort(candidates.begin(), candidates.end());

    ElectricalAdjacency out{BinaryAdjacency(n, AdjacencyKind::Electrical), 0.0, false, {}};
    for (int t = 0; t < m; ++t) {
        const auto& [value, i, j] = candidates[t];
        out.adjacency.connect(i, j);
        out.threshold = value;
    }
    if (m > 0 && m < pairs && std::get<0>(candidates[m - 1]) == std::get<0>(candidates[m])) {
        out.tie_at_threshold = true;
        const auto& [value, i, j] = candidates[m];
        std::ostringstream msg;
        msg << "TieAtThreshold: selected pair " << m << " and the next candidate (bus positions " << i + 1 << ","
            << j + 1 << ") share distance " << value << "; kept the lexicographically smaller pairs";
        out.warnings.push_back(msg.str());
    }
    return out;
}

MetricReport verify_metric(const RealMatrix& e, double tolerance, std::size_t triangle_cap, kernels::Execution exec) {
    MetricReport report;
    const int n = static_cast<int>(e.rows());
    for (int i = 0; i < n; ++i) {
        if (std::abs(e(i, i)) > tolerance) report.nonzero_diagonal.push_back(i);
        for (int j = 0; j < n; ++j) {
            if (i < j && std::abs(e(i, j) - e(j, i)) > tolerance) report.asymmetric.emplace_back(i, j);
            if (i != j && e(i, j) < -tolerance) report.negative.emplace_back(i, j);
        }
    }
    report.triangle = kernels::triangle_violations(e, tolerance, triangle_cap, exec);
    return report;
}

}  // namespace pmu
