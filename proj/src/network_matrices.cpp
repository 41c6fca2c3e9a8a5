#include "pmu/network_matrices.hpp"

namespace pmu {

BinaryAdjacency::BinaryAdjacency(int n, AdjacencyKind kind)
    : n_(n), kind_(kind), bits_(static_cast<std::size_t>(n) * n, 0) {
    for (int i = 0; i < n; ++i) set(i, i, true);
}

BinaryAdjacency BinaryAdjacency::identity(int n, AdjacencyKind kind) { return BinaryAdjacency(n, kind); }

BinaryAdjacency BinaryAdjacency::all_ones(int n, AdjacencyKind kind) {
    BinaryAdjacency a(n, kind);
    std::fill(a.bits_.begin(), a.bits_.end(), 1);
    return a;
}

void BinaryAdjacency::connect(int i, int j) {
    set(i, j, true);
    set(j, i, true);
}

int BinaryAdjacency::row_sum(int i) const {
    int sum = 0;
    for (int j = 0; j < n_; ++j) sum += bits_[index(i, j)];
    return sum;
}

int BinaryAdjacency::upper_off_diagonal_count() const {
    int count = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) count += bits_[index(i, j)];
    return count;
}

bool BinaryAdjacency::is_symmetric() const {
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (bits_[index(i, j)] != bits_[index(j, i)]) return false;
    return true;
}

bool BinaryAdjacency::has_unit_diagonal() const {
    for (int i = 0; i < n_; ++i)
        if (!at(i, i)) return false;
    return true;
}

ComplexMatrix build_ybus(const PowerCase& pc) {
    const auto n = static_cast<Eigen::Index>(pc.bus_count());
    ComplexMatrix y = ComplexMatrix::Zero(n, n);
    const std::complex<double> j(0.0, 1.0);
    for (const auto& br : pc.branches) {
        const std::complex<double> ys = 1.0 / std::complex<double>(br.r, br.x);
        const std::complex<double> charging = j * (br.b_charging / 2.0);
        const std::complex<double> tap = std::polar(br.tap_ratio, br.phase_shift);
        const int f = br.from_bus;
        const int t = br.to_bus;
        y(f, f) += (ys + charging) / (br.tap_ratio * br.tap_ratio);
        y(t, t) += ys + charging;
        y(f, t) += -ys / std::conj(tap);
        y(t, f) += -ys / tap;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& bus = pc.buses[static_cast<std::size_t>(i)];
        y(i, i) += std::complex<double>(bus.shunt_g, bus.shunt_b);
    }
    return y;
}

BinaryAdjacency topological_adjacency(const PowerCase& pc) {
    BinaryAdjacency a(static_cast<int>(pc.bus_count()), AdjacencyKind::Topological);
    for (const auto& br : pc.branches) a.connect(br.from_bus, br.to_bus);
    return a;
}

}  // namespace pmu
