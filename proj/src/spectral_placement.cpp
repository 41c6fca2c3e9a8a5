#include "pmu/spectral_placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pmu/error.hpp"

namespace pmu {

namespace {

// Replaces the columns flagged in `fill` with unit vectors orthogonal to every
// other column, drawn from the standard basis in index order.
void complete_basis(ComplexMatrix& q, const std::vector<bool>& fill) {
    const int n = static_cast<int>(q.rows());
    int candidate = 0;
    for (int k = 0; k < q.cols(); ++k) {
        if (!fill[k]) continue;
        bool placed = false;
        for (; candidate < n && !placed; ++candidate) {
            ComplexVector w = ComplexVector::Unit(n, candidate);
            for (int pass = 0; pass < 2; ++pass) {
                for (int j = 0; j < q.cols(); ++j)
                    if (j != k) w -= q.col(j) * q.col(j).dot(w);
            }
            double norm = w.norm();
            if (norm > 1e-3) {
                q.col(k) = w / norm;
                placed = true;
            }
        }
        if (!placed) throw PmuError(ErrorKind::Internal, "basis completion ran out of candidates");
    }
}

template <class Matrix>
SingularDecomposition decompose(const Matrix& s, MatrixSource source, kernels::Execution exec) {
    if (s.rows() != s.cols() || s.rows() == 0) {
        throw PmuError(ErrorKind::InvalidArgument, "svd expects a non-empty square matrix");
    }
    const int n = static_cast<int>(s.rows());
    auto out = kernels::jacobi_orthogonalize(s, kernels::JacobiSettings{}, exec);
    if (!out.converged) {
        throw PmuError(ErrorKind::SvdConvergenceFailure,
                       "Jacobi SVD did not converge after " + std::to_string(out.sweeps) + " sweeps");
    }

    RealVector norms(n);
    for (int k = 0; k < n; ++k) norms[k] = out.columns.col(k).norm();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return norms[a] > norms[b]; });

    SingularDecomposition d;
    d.source = source;
    d.sweeps = out.sweeps;
    d.sigma.resize(n);
    d.u.resize(n, n);
    d.v.resize(n, n);
    const double floor = std::numeric_limits<double>::epsilon() * n * norms[order[0]];
    std::vector<bool> fill(static_cast<std::size_t>(n), false);
    for (int k = 0; k < n; ++k) {
        int src = order[k];
        d.sigma[k] = norms[src];
        d.v.col(k) = out.v.col(src).template cast<std::complex<double>>();
        if (norms[src] > floor && norms[src] > 0.0) {
            d.u.col(k) = out.columns.col(src).template cast<std::complex<double>>() / norms[src];
        } else {
            d.u.col(k).setZero();
            fill[k] = true;
        }
    }
    if (std::find(fill.begin(), fill.end(), true) != fill.end()) complete_basis(d.u, fill);
    return d;
}

}  // namespace

SingularDecomposition svd(const RealMatrix& s, MatrixSource source, kernels::Execution exec) {
    return decompose(s, source, exec);
}

SingularDecomposition svd(const ComplexMatrix& s, MatrixSource source, kernels::Execution exec) {
    return decompose(s, source, exec);
}

std::vector<RankedVector> rank_vectors(const SingularDecomposition& d, int p) {
    const int n = d.size();
    if (p < 1 || p > n) {
        throw PmuError(ErrorKind::InvalidArgument,
                       "placement budget " + std::to_string(p) + " outside 1.." + std::to_string(n));
    }
    std::vector<RankedVector> all;
    all.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        double magnitude = (d.sigma[k] * d.u.col(k)).norm();
        if (std::abs(magnitude - d.sigma[k]) > 1e-10 * std::max(1.0, d.sigma[0])) {
            throw PmuError(ErrorKind::Internal, "|sigma u| differs from sigma for vector " + std::to_string(k + 1));
        }
        all.push_back({k, magnitude});
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const RankedVector& a, const RankedVector& b) { return a.magnitude > b.magnitude; });
    all.resize(static_cast<std::size_t>(p));
    return all;
}

std::vector<int> entries_by_magnitude(const SingularDecomposition& d, int vector) {
    const int n = static_cast<int>(d.u.rows());
    std::vector<int> buses(static_cast<std::size_t>(n));
    std::iota(buses.begin(), buses.end(), 0);
    std::stable_sort(buses.begin(), buses.end(), [&](int a, int b) {
        return std::abs(d.u(a, vector)) > std::abs(d.u(b, vector));
    });
    return buses;
}

std::vector<int> CouplingRanking::buses() const {
    std::vector<int> out;
    for (const auto& s : selected) out.push_back(s.assigned_bus);
    std::sort(out.begin(), out.end());
    return out;
}

CouplingRanking assign_buses(const SingularDecomposition& d, const std::vector<RankedVector>& ranked, int p) {
    const int n = d.size();
    if (p < 0 || p > n || p > static_cast<int>(ranked.size())) {
        throw PmuError(ErrorKind::InvalidArgument, "placement budget exceeds the ranked vectors");
    }
    CouplingRanking out;
    out.p = p;
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (int k = 0; k < p; ++k) {
        auto order = entries_by_magnitude(d, ranked[k].vector);
        VectorAssignment a;
        a.vector = ranked[k].vector;
        a.magnitude = ranked[k].magnitude;
        a.intended_bus = order.front();
        for (int r = 0; r < n; ++r) {
            if (!taken[order[r]]) {
                a.assigned_bus = order[r];
                a.assignment_rank = r + 1;
                break;
            }
        }
        taken[a.assigned_bus] = true;
        out.selected.push_back(a);
    }
    return out;
}

}  // namespace pmu
