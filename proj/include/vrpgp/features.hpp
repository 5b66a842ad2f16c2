#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "vrpgp/cvrp.hpp"

namespace vrpgp {

// Terminal table: per-edge features a utility function can read.
enum Terminal : int {
    kEdgeLength = 0,     // T0 EL    d(i, j)
    kPenaltyCount = 1,   // T1 PC    p(i, j)
    kDepotDistI = 2,     // T2 DDI   d(depot, i), i = min endpoint
    kDepotDistJ = 3,     // T3 DDJ   d(depot, j), j = max endpoint
    kEdgeDemand = 4,     // T4 DEM   demand(i) + demand(j)
    kRouteLoad = 5,      // T5 RLOAD route load / Q
    kRouteCost = 6,      // T6 RCOST true cost of the route
    kRouteLength = 7,    // T7 RLEN  customers on the route
    kMeanEdge = 8,       // T8 AVGE  mean edge length of the solution
    kScale = 9,          // T9 SCALE customer count n
};

inline constexpr int kTerminalCount = 10;

using EdgeFeatures = std::array<double, kTerminalCount>;

std::string_view terminal_name(int t);

// Undirected edge, stored with i < j.
struct Edge {
    int i = 0;
    int j = 0;

    static Edge of(int a, int b) noexcept { return a < b ? Edge{a, b} : Edge{b, a}; }

    friend auto operator<=>(const Edge &, const Edge &) = default;
};

struct EdgeFeatureRow {
    Edge edge;
    int route = 0;
    EdgeFeatures features{};
};

// Features of every traversed edge, in route order (an out-and-back route yields
// its depot edge twice).
std::vector<EdgeFeatureRow> solution_edge_features(const Instance &inst, const DistanceMatrix &d, const Solution &sol,
                                                   const PenaltyMap &pen);

// Throws ContractError if the edge is not traversed by sol.
EdgeFeatures extract_features(const Instance &inst, const DistanceMatrix &d, const Solution &sol, const PenaltyMap &pen,
                              Edge edge);

}  // namespace vrpgp
