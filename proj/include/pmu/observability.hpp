#pragma once

#include <cstdint>
#include <vector>

#include "pmu/kernels.hpp"
#include "pmu/network_matrices.hpp"

namespace pmu {

/// Fixed-capacity bus bitset sized at construction.
class BusSet {
  public:
    BusSet() = default;
    explicit BusSet(int n) : n_(n), words_((n + 63) / 64, 0) {}

    int capacity() const { return n_; }
    bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
    void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(int i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    int count() const;
    bool none() const;
    bool intersects(const BusSet& other) const;
    int count_and_not(const BusSet& covered) const;  // |this \ covered|

    BusSet& operator|=(const BusSet& other);
    BusSet& operator&=(const BusSet& other);
    BusSet operator~() const;
    bool operator==(const BusSet&) const = default;

  private:
    int n_ = 0;
    std::vector<std::uint64_t> words_;
};

struct CoverInstance {
    BinaryAdjacency adjacency;

    int size() const { return adjacency.size(); }
};

struct PlacementSolution {
    std::vector<std::uint8_t> x;  // per-bus decision
    int count = 0;
    bool optimal = false;
    std::vector<int> nodes;       // sorted 0-based bus positions with x_i = 1
    long long search_nodes = 0;   // branch-and-bound nodes visited
    int lower_bound = 0;          // root bound

    static PlacementSolution from_nodes(int n, std::vector<int> nodes);
};

/// A x >= 1 checked directly against the adjacency.
bool is_feasible(const CoverInstance& inst, const std::vector<int>& nodes);

/// Exact minimum cover. Returns the lexicographically smallest optimal node
/// set with optimal = true.
PlacementSolution solve_cover(const CoverInstance& inst);

struct EnumerationResult {
    std::vector<PlacementSolution> optima;  // lexicographic order
    bool cap_exceeded = false;
};

/// All optimal covers of size `optimal_count`, up to `cap`.
EnumerationResult enumerate_optima(const CoverInstance& inst, int optimal_count, int cap);

/// Test oracle: subsets of size 1..k_max in lexicographic order, first
/// feasible wins. Throws NoSolutionWithinK. n <= 64.
PlacementSolution brute_force_cover(const CoverInstance& inst, int k_max,
                                    kernels::Execution exec = kernels::Execution::Parallel);

}  // namespace pmu
