#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vrpgp/cvrp.hpp"
#include "vrpgp/features.hpp"
#include "vrpgp/search_state.hpp"

namespace vrpgp::gls {

inline constexpr int kDefaultNeighbors = 30;
inline constexpr double kDefaultLambdaAlpha = 0.1;
inline constexpr double kImprovementEpsilon = 1e-9;
inline constexpr int kClockCheckInterval = 64;

// k nearest other nodes per node (depot included as a candidate), ascending by
// distance, ties by index.
class NeighborLists {
public:
    NeighborLists() = default;
    explicit NeighborLists(std::vector<std::vector<int>> lists) : lists_(std::move(lists)) { }

    const std::vector<int> &operator[](int node) const { return lists_[static_cast<std::size_t>(node)]; }
    int size() const noexcept { return static_cast<int>(lists_.size()); }

private:
    std::vector<std::vector<int>> lists_;
};

NeighborLists build_neighbor_lists(const DistanceMatrix &d, int k);

// Budget for the penalization phase of guided_local_search.
//   wall_clock: seconds since the solver started.
//   move_count: number of penalization rounds (one penalty plus the scoped
//               re-optimization it triggers).
// A zero limit runs no penalization round at all.
struct Budget {
    enum class Mode { wall_clock, move_count };

    Mode mode = Mode::move_count;
    double limit = 0;

    static Budget seconds(double s) { return {Mode::wall_clock, s}; }
    static Budget moves(std::int64_t m) { return {Mode::move_count, static_cast<double>(m)}; }

    // "time:<seconds>" or "moves:<count>". Throws ParameterError.
    static Budget parse(const std::string &text);
    std::string to_string() const;

    void check() const;  // throws ParameterError for negative / non-finite limits
};

using UtilityFn = std::function<double(const EdgeFeatures &)>;

// u(e) = d(e) / (1 + p(e)).
UtilityFn kgls_baseline_utility();

// Clarke-Wright parallel savings. Throws InfeasibleInstance if a demand exceeds Q.
Solution construct_initial(const Instance &inst, const DistanceMatrix &d);

struct LocalSearchOptions {
    // Nodes a move must touch; empty means unrestricted.
    std::span<const int> scope;
    // Polled every kClockCheckInterval accepted moves; returning true stops the search.
    std::function<bool()> should_stop;
};

struct LocalSearchStats {
    std::int64_t accepted = 0;
    bool stopped = false;
};

// Best-improvement descent over relocate, swap, 2-opt and 2-opt*, restricted to
// moves between neighbor-list-adjacent nodes. Mutates `state` in place.
LocalSearchStats local_search(SearchState &state, const AugmentedWeights &w, const NeighborLists &nbr,
                              const LocalSearchOptions &opts = {});

// Convenience form on plain values.
Solution local_search(const Instance &inst, const DistanceMatrix &d, Solution sol, const PenaltyMap &pen, double lambda,
                      const NeighborLists &nbr, std::span<const int> scope = {});

// argmax of util over rows; NaN/inf map to -inf; ties -> lexicographically smallest edge.
Edge select_penalty_edge(std::span<const EdgeFeatureRow> rows, const UtilityFn &util);

struct GlsParams {
    double lambda_alpha = kDefaultLambdaAlpha;  // used directly as lambda in d(e) * (1 + lambda * p(e))
    int neighbors = kDefaultNeighbors;
    Budget budget = Budget::moves(1000);
    std::uint64_t seed = 0;
};

struct TracePoint {
    std::int64_t step = 0;           // penalization round at which the best improved
    double elapsed_or_moves = 0;     // seconds (wall_clock) or accepted local-search moves (move_count)
    std::int64_t best_cost = 0;

    friend bool operator==(const TracePoint &, const TracePoint &) = default;
};

struct GlsResult {
    Solution best;
    std::int64_t init_cost = 0;      // constructed solution, before any local search
    std::int64_t post_ls_cost = 0;   // after the first full local search
    std::int64_t final_cost = 0;     // best true cost found
    double lambda = 0;
    std::int64_t rounds = 0;
    std::int64_t accepted_moves = 0;
    std::vector<TracePoint> trace;
};

// Instance data shared read-only between solver runs.
struct PreparedInstance {
    Instance instance;
    DistanceMatrix distances;
    NeighborLists neighbors;

    static PreparedInstance make(Instance inst, int k = kDefaultNeighbors);
};

GlsResult guided_local_search(const PreparedInstance &prepared, const UtilityFn &util, const GlsParams &params);
GlsResult guided_local_search(const Instance &inst, const DistanceMatrix &d, const UtilityFn &util, const GlsParams &params);

void write_trace_csv(std::ostream &out, std::span<const TracePoint> trace);

}  // namespace vrpgp::gls
