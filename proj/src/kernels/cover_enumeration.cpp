#include <atomic>
#include <cstdint>

#include "pmu/error.hpp"
#include "pmu/kernels.hpp"

namespace pmu::kernels {

namespace {

// Lexicographically first (k-1)-subset of {first+1..n-1} which, together with
// `first`, covers every bus.
std::optional<std::vector<int>> first_with_leader(const std::vector<std::uint64_t>& masks, std::uint64_t full, int n,
                                                  int k, int first) {
    const int rest = k - 1;
    const int lo = first + 1;
    if (n - lo < rest) return std::nullopt;
    std::vector<int> pick(static_cast<std::size_t>(rest));
    for (int i = 0; i < rest; ++i) pick[i] = lo + i;
    while (true) {
        std::uint64_t covered = masks[first];
        for (int c : pick) covered |= masks[c];
        if (covered == full) {
            std::vector<int> out{first};
            out.insert(out.end(), pick.begin(), pick.end());
            return out;
        }
        // advance to the next combination in lexicographic order
        int i = rest - 1;
        while (i >= 0 && pick[i] == n - rest + i) --i;
        if (i < 0) return std::nullopt;
        ++pick[i];
        for (int t = i + 1; t < rest; ++t) pick[t] = pick[t - 1] + 1;
    }
}

}  // namespace

std::optional<std::vector<int>> first_cover_of_size(const BinaryAdjacency& adj, int k, Execution exec) {
    const int n = adj.size();
    if (n > 64) {
        throw PmuError(ErrorKind::InvalidArgument, "exhaustive cover search supports at most 64 buses");
    }
    if (k <= 0 || k > n) return std::nullopt;
    std::vector<std::uint64_t> masks(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (adj.at(i, j)) masks[i] |= std::uint64_t{1} << j;
    const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;

    const int leaders = n - k + 1;
    std::vector<std::optional<std::vector<int>>> found(static_cast<std::size_t>(leaders));
    if (exec == Execution::Parallel) {
        std::atomic<int> best{leaders};
#pragma omp parallel for schedule(dynamic)
        for (int first = 0; first < leaders; ++first) {
            if (first > best.load(std::memory_order_relaxed)) continue;  // a smaller leader already succeeded
            found[first] = first_with_leader(masks, full, n, k, first);
            if (found[first]) {
                int current = best.load();
                while (first < current && !best.compare_exchange_weak(current, first)) {
                }
            }
        }
    } else {
        for (int first = 0; first < leaders; ++first) {
            found[first] = first_with_leader(masks, full, n, k, first);
            if (found[first]) break;
        }
    }
    for (auto& f : found)
        if (f) return f;
    return std::nullopt;
}

}  // namespace pmu::kernels
