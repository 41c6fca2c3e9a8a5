#pragma once

#include <string>
#include <vector>

#include "pmu/kernels.hpp"
#include "pmu/network_matrices.hpp"

namespace pmu {

/// Inverse of a conductance matrix with the reference row/column removed.
struct GroundedInverse {
    RealMatrix inverse;      // (N-1) x (N-1)
    int reference = 0;       // removed bus position
    std::vector<int> kept;   // kept[k] = full bus position of reduced index k
};

/// Throws SingularSubmatrix when the grounded matrix is not invertible
/// (disconnected network or rank deficiency beyond one).
GroundedInverse grounded_inverse(const RealMatrix& g, int reference);

/// How an asymmetric conductance matrix (dP/dtheta away from flat start) is
/// handed to the grounding step.
enum class AsymmetryHandling {
    /// Rebuild a symmetric Laplacian from the averaged off-diagonal couplings
    /// when the relative asymmetry exceeds kAsymmetryTolerance.
    Symmetrize,
    /// Ground the matrix exactly as given.
    AsIs,
};

inline constexpr double kAsymmetryTolerance = 1e-6;

/// max |g_ij - g_ji| / max |g_ij|
double relative_asymmetry(const RealMatrix& g);

/// w_ij = -(g_ij + g_ji)/2 off the diagonal, diagonal = sum of the row weights.
RealMatrix symmetric_laplacian(const RealMatrix& g);

struct ResistanceDistance {
    RealMatrix e;
    int reference = 0;
    double input_asymmetry = 0.0;
    bool symmetrized_input = false;
    std::vector<std::string> warnings;

    int size() const { return static_cast<int>(e.rows()); }
};

/// Full N x N effective-resistance matrix from the grounded inverse:
///   E_kk = 1 diag^T + diag 1^T - Ginv - Ginv^T,  E_rk = diag^T,  E_kr = diag
/// finished with (E + E^T)/2 and a zero diagonal.
ResistanceDistance resistance_matrix(const RealMatrix& g, int reference,
                                     AsymmetryHandling handling = AsymmetryHandling::Symmetrize);

struct ElectricalAdjacency {
    BinaryAdjacency adjacency;
    double threshold = 0.0;  // value of the m-th smallest selected entry
    bool tie_at_threshold = false;
    std::vector<std::string> warnings;
};

/// Keeps the m smallest strictly upper-triangular entries of E as edges
/// (ties broken by (i, j)), mirrors them, and sets a unit diagonal.
ElectricalAdjacency electrical_adjacency(const ResistanceDistance& e, int m);

struct MetricReport {
    std::vector<std::pair<int, int>> asymmetric;      // i < j with |e_ij - e_ji| > tol
    std::vector<std::pair<int, int>> negative;        // e_ij < -tol
    std::vector<int> nonzero_diagonal;                // |e_ii| > tol
    std::vector<kernels::TriangleViolation> triangle;  // capped

    bool ok() const { return asymmetric.empty() && negative.empty() && nonzero_diagonal.empty() && triangle.empty(); }
};

MetricReport verify_metric(const RealMatrix& e, double tolerance = 1e-9, std::size_t triangle_cap = 100,
                           kernels::Execution exec = kernels::Execution::Parallel);

}  // namespace pmu
