#pragma once

// Data-parallel kernels. Every kernel has a serial reference implementation
// and an OpenMP implementation; the pair produce bit-identical results (work
// is split into independent units whose results are combined in a fixed
// order), which the kernel tests check directly.

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "pmu/network_matrices.hpp"

namespace pmu::kernels {

enum class Execution { Serial, Parallel };

// ---- one-sided Jacobi orthogonalisation -------------------------------

struct JacobiSettings {
    int max_sweeps = 80;
    /// Rotate a column pair while |a_p^* a_q| > tolerance * |a_p| |a_q|.
    double tolerance = 1e-14;
};

/// Right-multiplies `columns` by the accumulated unitary `v` until its
/// columns are mutually orthogonal: columns_in * v == columns_out.
template <class Scalar>
struct JacobiOutput {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> columns;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> v;
    int sweeps = 0;
    bool converged = false;
};

/// Circle-method tournament: n-1 rounds (n rounded up to even) of disjoint
/// index pairs covering every pair exactly once.
std::vector<std::vector<std::pair<int, int>>> round_robin_schedule(int n);

JacobiOutput<double> jacobi_orthogonalize(RealMatrix a, const JacobiSettings& settings, Execution exec);
JacobiOutput<std::complex<double>> jacobi_orthogonalize(ComplexMatrix a, const JacobiSettings& settings,
                                                        Execution exec);

// ---- metric audit ------------------------------------------------------

struct TriangleViolation {
    int i = 0;
    int j = 0;
    int k = 0;
    double excess = 0.0;  // e(i,j) - e(i,k) - e(k,j)

    bool operator==(const TriangleViolation&) const = default;
};

/// All (i<j, k) with e(i,j) > e(i,k) + e(k,j) + slack, ordered by (i, j, k),
/// truncated to `cap`.
std::vector<TriangleViolation> triangle_violations(const RealMatrix& e, double slack, std::size_t cap,
                                                   Execution exec);

// ---- exhaustive cover enumeration --------------------------------------

/// Lexicographically first k-subset (sorted 0-based indices) whose closed
/// neighbourhoods cover every bus. Requires n <= 64.
std::optional<std::vector<int>> first_cover_of_size(const BinaryAdjacency& adj, int k, Execution exec);

// ---- dP/dtheta assembly ------------------------------------------------

/// Full N x N matrix of dP_i/dtheta_j at complex bus voltages `v`. The
/// diagonal is the negated off-diagonal row sum, which is exact because
/// injections depend only on angle differences.
RealMatrix p_theta_jacobian(const ComplexMatrix& y, const ComplexVector& v, Execution exec);

}  // namespace pmu::kernels
