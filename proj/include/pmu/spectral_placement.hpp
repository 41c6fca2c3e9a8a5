#pragma once

#include <vector>

#include "pmu/kernels.hpp"
#include "pmu/network_matrices.hpp"

namespace pmu {

enum class MatrixSource { Admittance, Distance };

/// S = U diag(sigma) V^*, sigma nonincreasing. Real input is stored complex.
struct SingularDecomposition {
    ComplexMatrix u;
    RealVector sigma;
    ComplexMatrix v;
    MatrixSource source = MatrixSource::Distance;
    int sweeps = 0;

    int size() const { return static_cast<int>(sigma.size()); }
};

SingularDecomposition svd(const RealMatrix& s, MatrixSource source = MatrixSource::Distance,
                          kernels::Execution exec = kernels::Execution::Parallel);
SingularDecomposition svd(const ComplexMatrix& s, MatrixSource source = MatrixSource::Admittance,
                          kernels::Execution exec = kernels::Execution::Parallel);

struct RankedVector {
    int vector = 0;          // 0-based column of U
    double magnitude = 0.0;  // |sigma_n u_n|
};

/// Top-p columns by |sigma_n u_n|, ties to the smaller index. Throws
/// Internal if a magnitude drifts from sigma_n.
std::vector<RankedVector> rank_vectors(const SingularDecomposition& d, int p);

struct VectorAssignment {
    int vector = 0;
    double magnitude = 0.0;
    int intended_bus = 0;     // largest-|entry| bus of the vector
    int assigned_bus = 0;
    int assignment_rank = 1;  // 1 = largest entry, 2 = second largest, ...

    bool deflected() const { return assignment_rank > 1; }
};

struct CouplingRanking {
    std::vector<VectorAssignment> selected;  // magnitude descending
    int p = 0;

    std::vector<int> buses() const;  // sorted
};

/// Each ranked vector takes its largest-|entry| bus not already taken.
CouplingRanking assign_buses(const SingularDecomposition& d, const std::vector<RankedVector>& ranked, int p);

/// Bus positions of column `vector` ordered by |entry| descending, then index.
std::vector<int> entries_by_magnitude(const SingularDecomposition& d, int vector);

}  // namespace pmu
