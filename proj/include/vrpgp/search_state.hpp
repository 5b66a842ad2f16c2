#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vrpgp/cvrp.hpp"

namespace vrpgp::gls {

// Dense cache of augmented edge weights w(i,j) = d(i,j) + lambda * p(i,j) * d(i,j).
// Summed over a solution's edges this equals augmented_cost. The referenced
// matrix and penalty map must outlive the cache; call refresh() after every
// penalty increment.
class AugmentedWeights {
public:
    AugmentedWeights(const DistanceMatrix &d, const PenaltyMap &pen, double lambda);

    double operator()(int i, int j) const noexcept { return w_[static_cast<std::size_t>(i) * n_ + j]; }
    double lambda() const noexcept { return lambda_; }
    const DistanceMatrix &distances() const noexcept { return *d_; }
    const PenaltyMap &penalties() const noexcept { return *pen_; }

    void refresh(int i, int j);

private:
    double weight(int i, int j) const;

    const DistanceMatrix *d_;
    const PenaltyMap *pen_;
    double lambda_;
    int n_;
    std::vector<double> w_;
};

// Where a relocated customer ends up: index `position` of route `route` after
// the customer has been removed from its current route. route == route_count()
// opens a new route.
struct InsertPosition {
    int route = 0;
    int position = 0;
};

// A Solution plus the indices needed for O(1) move evaluation (route and
// position of each customer, route loads, prefix loads).
class SearchState {
public:
    SearchState(const Instance &inst, const DistanceMatrix &d, Solution sol);

    const Solution &solution() const noexcept { return sol_; }
    const Instance &instance() const noexcept { return *inst_; }
    const DistanceMatrix &distances() const noexcept { return *d_; }

    int route_count() const noexcept { return static_cast<int>(sol_.routes.size()); }
    const Route &route(int r) const { return sol_.routes[static_cast<std::size_t>(r)]; }
    int route_of(int c) const { return route_of_[static_cast<std::size_t>(c)]; }
    int position_of(int c) const { return pos_of_[static_cast<std::size_t>(c)]; }
    int load(int r) const { return prefix_[static_cast<std::size_t>(r)].back(); }
    // Demand of route(r)[0 .. k).
    int prefix_load(int r, int k) const { return prefix_[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)]; }
    int capacity() const noexcept { return inst_->capacity; }
    int demand(int c) const { return inst_->demands[static_cast<std::size_t>(c)]; }

    // Node before/after position k of route r, depot at the ends.
    int node_before(int r, int k) const { return k > 0 ? route(r)[static_cast<std::size_t>(k) - 1] : kDepot; }
    int node_at(int r, int k) const {
        return k < static_cast<int>(route(r).size()) ? route(r)[static_cast<std::size_t>(k)] : kDepot;
    }

    // Moves. Each keeps the cached true cost exact; routes left empty are dropped
    // (later route indices shift down by one).
    void relocate(int customer, InsertPosition target);
    void swap(int a, int b);
    void two_opt(int r, int i, int j);
    void two_opt_star(int route_a, int cut_a, int route_b, int cut_b);

private:
    void reindex(int r);
    void drop_empty_routes();

    const Instance *inst_;
    const DistanceMatrix *d_;
    Solution sol_;
    std::vector<int> route_of_;
    std::vector<int> pos_of_;
    std::vector<std::vector<int>> prefix_;
};

// Augmented-cost deltas g(after) - g(before). std::nullopt is the feasibility
// sentinel: the move would break capacity (or is structurally impossible) and
// must be skipped.
std::optional<double> delta_relocate(const SearchState &s, const AugmentedWeights &w, int customer, InsertPosition target);
std::optional<double> delta_swap(const SearchState &s, const AugmentedWeights &w, int a, int b);
// Reverses route[i..j], i <= j.
std::optional<double> delta_two_opt(const SearchState &s, const AugmentedWeights &w, int r, int i, int j);
// New routes: A[0, cut_a) + B[cut_b, end) and B[0, cut_b) + A[cut_a, end).
std::optional<double> delta_two_opt_star(const SearchState &s, const AugmentedWeights &w, int route_a, int cut_a,
                                         int route_b, int cut_b);

}  // namespace vrpgp::gls
