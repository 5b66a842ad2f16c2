#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace vrpgp {

inline constexpr int kDepot = 0;
inline constexpr double kGridMax = 1000.0;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point &, const Point &) = default;
};

// A CVRP instance. Node 0 is the depot; customers are 1..n.
struct Instance {
    std::string id;
    std::vector<Point> points;
    std::vector<int> demands;
    int capacity = 0;

    int customer_count() const noexcept { return static_cast<int>(points.size()) - 1; }
    int node_count() const noexcept { return static_cast<int>(points.size()); }

    friend bool operator==(const Instance &, const Instance &) = default;
};

// Throws ContractError naming the first broken invariant.
void check_instance(const Instance &inst);

// TSPLIB EUC_2D: Euclidean length rounded half-up to an integer.
int euclidean_distance(Point a, Point b) noexcept;

class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(const Instance &inst);

    int size() const noexcept { return size_; }
    int operator()(int i, int j) const noexcept { return d_[static_cast<std::size_t>(i) * size_ + j]; }

    friend bool operator==(const DistanceMatrix &, const DistanceMatrix &) = default;

private:
    int size_ = 0;
    std::vector<int> d_;
};

DistanceMatrix build_distance_matrix(const Instance &inst);

// Ordered customer sequence; the depot is implicit at both ends.
using Route = std::vector<int>;

struct Solution {
    std::vector<Route> routes;
    std::int64_t cost = 0;

    friend bool operator==(const Solution &, const Solution &) = default;
};

// Calls fn(i, j) for every traversed edge, depot edges included, in route order.
template <typename Fn>
void for_each_edge(const Solution &sol, Fn &&fn) {
    for (const auto &route : sol.routes) {
        if (route.empty()) {
            continue;
        }
        int prev = kDepot;
        for (const int c : route) {
            fn(prev, c);
            prev = c;
        }
        fn(prev, kDepot);
    }
}

std::size_t edge_count(const Solution &sol) noexcept;

// Throws MalformedSolution when a route references a node outside the matrix.
std::int64_t solution_cost(const Solution &sol, const DistanceMatrix &d);

struct Violation {
    enum class Kind { invalid_index, empty_route, missing_customer, duplicate_customer, capacity_excess, cost_mismatch };

    Kind kind;
    int route = -1;
    int customer = -1;
    // capacity_excess: load - Q; cost_mismatch: cached - recomputed; duplicate: occurrences.
    std::int64_t amount = 0;

    std::string describe() const;

    friend bool operator==(const Violation &, const Violation &) = default;
};

std::vector<Violation> validate_solution(const Solution &sol, const Instance &inst);

// Sparse symmetric edge -> penalty count map.
class PenaltyMap {
public:
    int count(int i, int j) const;
    int operator()(int i, int j) const { return count(i, j); }

    // Returns the new count. Throws ContractError for i == j or negative indices.
    int increment(int i, int j);

    bool empty() const noexcept { return counts_.empty(); }
    std::size_t size() const noexcept { return counts_.size(); }
    std::int64_t total() const noexcept { return total_; }

    // (min, max) pairs with their counts, sorted by pair.
    std::vector<std::pair<std::pair<int, int>, int>> entries() const;

private:
    static std::uint64_t key(int i, int j) noexcept;

    std::unordered_map<std::uint64_t, int> counts_;
    std::int64_t total_ = 0;
};

// f(sol) + lambda * sum over traversed edges of p(e) * d(e). Throws ParameterError for lambda < 0.
double augmented_cost(const Solution &sol, const DistanceMatrix &d, const PenaltyMap &pen, double lambda);

}  // namespace vrpgp
