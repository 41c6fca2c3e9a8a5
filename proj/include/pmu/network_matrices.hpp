#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pmu/case_model.hpp"

namespace pmu {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

enum class AdjacencyKind { Topological, Electrical };

/// Symmetric 0/1 connectivity with unit diagonal. Row i is the closed
/// neighbourhood of bus i, i.e. the buses a PMU at i observes.
class BinaryAdjacency {
  public:
    BinaryAdjacency() = default;
    BinaryAdjacency(int n, AdjacencyKind kind);

    static BinaryAdjacency identity(int n, AdjacencyKind kind = AdjacencyKind::Topological);
    static BinaryAdjacency all_ones(int n, AdjacencyKind kind = AdjacencyKind::Topological);

    int size() const { return n_; }
    AdjacencyKind kind() const { return kind_; }

    bool at(int i, int j) const { return bits_[index(i, j)] != 0; }
    /// Sets (i,j) and (j,i).
    void connect(int i, int j);
    void set(int i, int j, bool value) { bits_[index(i, j)] = value ? 1 : 0; }

    int row_sum(int i) const;
    /// Number of ones strictly above the diagonal.
    int upper_off_diagonal_count() const;
    bool is_symmetric() const;
    bool has_unit_diagonal() const;

    bool operator==(const BinaryAdjacency&) const = default;

  private:
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

    int n_ = 0;
    AdjacencyKind kind_ = AdjacencyKind::Topological;
    std::vector<std::uint8_t> bits_;
};

/// Standard pi-model nodal admittance matrix; parallel branches are summed.
ComplexMatrix build_ybus(const PowerCase& pc);

/// Physical connectivity: a_ii = 1 and a_ij = 1 iff a branch joins i and j.
BinaryAdjacency topological_adjacency(const PowerCase& pc);

}  // namespace pmu
