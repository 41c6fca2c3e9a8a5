#include "pmu/observability.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "pmu/error.hpp"

namespace pmu {

int BusSet::count() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
}

bool BusSet::none() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

bool BusSet::intersects(const BusSet& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
        if (words_[i] & other.words_[i]) return true;
    return false;
}

int BusSet::count_and_not(const BusSet& covered) const {
    int c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += std::popcount(words_[i] & ~covered.words_[i]);
    return c;
}

BusSet& BusSet::operator|=(const BusSet& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
}

BusSet& BusSet::operator&=(const BusSet& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
}

BusSet BusSet::operator~() const {
    BusSet out = *this;
    for (auto& w : out.words_) w = ~w;
    if (n_ % 64 != 0 && !out.words_.empty()) out.words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
    return out;
}

PlacementSolution PlacementSolution::from_nodes(int n, std::vector<int> nodes) {
    std::sort(nodes.begin(), nodes.end());
    PlacementSolution s;
    s.x.assign(static_cast<std::size_t>(n), 0);
    for (int v : nodes) s.x[v] = 1;
    s.count = static_cast<int>(nodes.size());
    s.nodes = std::move(nodes);
    return s;
}

bool is_feasible(const CoverInstance& inst, const std::vector<int>& nodes) {
    const int n = inst.size();
    for (int i = 0; i < n; ++i) {
        bool covered = std::any_of(nodes.begin(), nodes.end(), [&](int c) { return inst.adjacency.at(i, c); });
        if (!covered) return false;
    }
    return true;
}

namespace {

class CoverSearch {
  public:
    explicit CoverSearch(const CoverInstance& inst) : n_(inst.size()) {
        reach_.assign(static_cast<std::size_t>(n_), BusSet(n_));
        coverers_.assign(static_cast<std::size_t>(n_), {});
        for (int c = 0; c < n_; ++c) {
            for (int u = 0; u < n_; ++u) {
                // a PMU at c observes u when a_uc = 1
                if (inst.adjacency.at(u, c)) {
                    reach_[c].set(u);
                    coverers_[u].push_back(c);
                }
            }
        }
        last_coverer_.resize(static_cast<std::size_t>(n_), -1);
        for (int u = 0; u < n_; ++u)
            if (!coverers_[u].empty()) last_coverer_[u] = coverers_[u].back();
    }

    int size() const { return n_; }
    long long nodes_visited() const { return nodes_; }

    void check_coverable() const {
        for (int u = 0; u < n_; ++u) {
            if (coverers_[u].empty()) {
                throw PmuError(ErrorKind::Infeasible, "bus position " + std::to_string(u) + " cannot be observed");
            }
        }
    }

    /// Buses that no set of at most `budget` further PMUs (drawn from
    /// `allowed`) can finish covering give a lower bound above budget.
    int lower_bound(const BusSet& covered, const BusSet& allowed) const {
        // disjoint packing: uncovered buses whose candidate sets are pairwise
        // disjoint each need their own PMU
        order_.clear();
        for (int u = 0; u < n_; ++u) {
            if (covered.test(u)) continue;
            int options = 0;
            for (int c : coverers_[u]) options += allowed.test(c);
            order_.emplace_back(options, u);
        }
        if (order_.empty()) return 0;
        std::sort(order_.begin(), order_.end());
        if (order_.front().first == 0) return n_ + 1;

        BusSet blocked(n_);
        int packing = 0;
        for (const auto& [options, u] : order_) {
            bool disjoint = true;
            for (int c : coverers_[u]) {
                if (allowed.test(c) && blocked.test(c)) {
                    disjoint = false;
                    break;
                }
            }
            if (!disjoint) continue;
            ++packing;
            for (int c : coverers_[u])
                if (allowed.test(c)) blocked.set(c);
        }

        // counting: no PMU covers more than the best remaining gain
        int best_gain = 0;
        for (int c = 0; c < n_; ++c)
            if (allowed.test(c)) best_gain = std::max(best_gain, reach_[c].count_and_not(covered));
        const int uncovered = static_cast<int>(order_.size());
        const int counting = (uncovered + best_gain - 1) / best_gain;
        return std::max(packing, counting);
    }

    std::vector<int> greedy() const {
        BusSet covered(n_);
        std::vector<int> chosen;
        while (covered.count() < n_) {
            int best = -1;
            int gain = 0;
            for (int c = 0; c < n_; ++c) {
                int g = reach_[c].count_and_not(covered);
                if (g > gain) {
                    gain = g;
                    best = c;
                }
            }
            chosen.push_back(best);
            covered |= reach_[best];
        }
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

    /// Minimum count by branching on the uncovered bus with the fewest
    /// available candidates.
    int minimum(std::vector<int>& best_nodes) {
        best_nodes = greedy();
        best_ = static_cast<int>(best_nodes.size());
        best_nodes_ = best_nodes;
        BusSet covered(n_);
        BusSet allowed = ~BusSet(n_);
        std::vector<int> chosen;
        branch_min(covered, allowed, chosen);
        best_nodes = best_nodes_;
        return best_;
    }

    /// Depth-first include/exclude over bus positions in increasing order;
    /// reports size-`target` covers in lexicographic order until `visit`
    /// returns false.
    template <class Visit>
    bool lexicographic(int target, Visit&& visit) {
        BusSet covered(n_);
        std::vector<int> chosen;
        return branch_lex(0, covered, chosen, target, visit);
    }

  private:
    void branch_min(const BusSet& covered, BusSet allowed, std::vector<int>& chosen) {
        ++nodes_;
        const int depth = static_cast<int>(chosen.size());
        if (covered.count() == n_) {
            if (depth < best_) {
                best_ = depth;
                best_nodes_ = chosen;
            }
            return;
        }
        if (depth + lower_bound(covered, allowed) >= best_) return;

        int pivot = -1;
        int fewest = n_ + 1;
        for (int u = 0; u < n_; ++u) {
            if (covered.test(u)) continue;
            int options = 0;
            for (int c : coverers_[u]) options += allowed.test(c);
            if (options < fewest) {
                fewest = options;
                pivot = u;
            }
        }
        if (fewest == 0) return;
        for (int c : coverers_[pivot]) {
            if (!allowed.test(c)) continue;
            BusSet next = covered;
            next |= reach_[c];
            allowed.reset(c);
            chosen.push_back(c);
            branch_min(next, allowed, chosen);
            chosen.pop_back();
            if (depth + 1 >= best_) return;
        }
    }

    template <class Visit>
    bool branch_lex(int pos, const BusSet& covered, std::vector<int>& chosen, int target, Visit& visit) {
        ++nodes_;
        const int depth = static_cast<int>(chosen.size());
        if (covered.count() == n_) {
            if (depth == target) return visit(chosen);
            return true;
        }
        if (depth == target || pos >= n_) return true;
        // some uncovered bus has no candidate left at or after pos
        for (int u = 0; u < n_; ++u)
            if (!covered.test(u) && last_coverer_[u] < pos) return true;

        BusSet allowed(n_);
        for (int c = pos; c < n_; ++c) allowed.set(c);
        if (depth + lower_bound(covered, allowed) > target) return true;

        // a PMU adding nothing new never belongs to a minimum cover
        if (reach_[pos].count_and_not(covered) > 0) {
            BusSet next = covered;
            next |= reach_[pos];
            chosen.push_back(pos);
            bool keep_going = branch_lex(pos + 1, next, chosen, target, visit);
            chosen.pop_back();
            if (!keep_going) return false;
        }
        return branch_lex(pos + 1, covered, chosen, target, visit);
    }

    int n_;
    std::vector<BusSet> reach_;
    std::vector<std::vector<int>> coverers_;
    std::vector<int> last_coverer_;
    int best_ = 0;
    std::vector<int> best_nodes_;
    long long nodes_ = 0;
    mutable std::vector<std::pair<int, int>> order_;
};

void check_instance(const CoverInstance& inst) {
    if (inst.size() < 1) throw PmuError(ErrorKind::InvalidArgument, "empty cover instance");
    if (!inst.adjacency.is_symmetric()) throw PmuError(ErrorKind::InvalidArgument, "adjacency is not symmetric");
    if (!inst.adjacency.has_unit_diagonal()) {
        throw PmuError(ErrorKind::InvalidArgument, "adjacency must have a unit diagonal");
    }
}

}  // namespace

PlacementSolution solve_cover(const CoverInstance& inst) {
    check_instance(inst);
    CoverSearch search(inst);
    search.check_coverable();
    const int n = inst.size();

    std::vector<int> witness;
    const int optimum = search.minimum(witness);

    std::vector<int> lex_first;
    search.lexicographic(optimum, [&](const std::vector<int>& nodes) {
        lex_first = nodes;
        return false;
    });
    if (lex_first.empty()) {
        throw PmuError(ErrorKind::Internal, "lexicographic search missed the optimum of size " + std::to_string(optimum));
    }
    auto solution = PlacementSolution::from_nodes(n, lex_first);
    solution.optimal = true;
    solution.search_nodes = search.nodes_visited();
    solution.lower_bound = search.lower_bound(BusSet(n), ~BusSet(n));
    return solution;
}

EnumerationResult enumerate_optima(const CoverInstance& inst, int optimal_count, int cap) {
    check_instance(inst);
    if (cap < 0) throw PmuError(ErrorKind::InvalidArgument, "enumeration cap must be non-negative");
    CoverSearch search(inst);
    search.check_coverable();
    EnumerationResult result;
    search.lexicographic(optimal_count, [&](const std::vector<int>& nodes) {
        if (static_cast<int>(result.optima.size()) == cap) {
            result.cap_exceeded = true;
            return false;
        }
        auto s = PlacementSolution::from_nodes(inst.size(), nodes);
        s.optimal = true;
        result.optima.push_back(std::move(s));
        return true;
    });
    return result;
}

PlacementSolution brute_force_cover(const CoverInstance& inst, int k_max, kernels::Execution exec) {
    check_instance(inst);
    for (int k = 1; k <= std::min(k_max, inst.size()); ++k) {
        if (auto nodes = kernels::first_cover_of_size(inst.adjacency, k, exec)) {
            auto s = PlacementSolution::from_nodes(inst.size(), *nodes);
            s.optimal = true;
            return s;
        }
    }
    throw PmuError(ErrorKind::NoSolutionWithinK, "no cover with at most " + std::to_string(k_max) + " PMUs");
}

}  // namespace pmu
