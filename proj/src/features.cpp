#include "vrpgp/features.hpp"

#include "vrpgp/errors.hpp"

namespace vrpgp {

std::string_view terminal_name(int t) {
    static constexpr std::array<std::string_view, kTerminalCount> names = {
        "EL", "PC", "DDI", "DDJ", "DEM", "RLOAD", "RCOST", "RLEN", "AVGE", "SCALE"};
    if (t < 0 || t >= kTerminalCount) {
        throw ContractError("terminal id out of range: " + std::to_string(t));
    }
    return names[static_cast<std::size_t>(t)];
}

namespace {

struct RouteSummary {
    double load = 0;
    double cost = 0;
    double length = 0;
};

RouteSummary summarize(const Instance &inst, const DistanceMatrix &d, const Route &route) {
    RouteSummary s;
    int prev = kDepot;
    for (const int c : route) {
        s.load += inst.demands[c];
        s.cost += d(prev, c);
        prev = c;
    }
    s.cost += d(prev, kDepot);
    s.length = static_cast<double>(route.size());
    return s;
}

EdgeFeatures features_for(const Instance &inst, const DistanceMatrix &d, const PenaltyMap &pen, const RouteSummary &rs,
                          double mean_edge, Edge e) {
    EdgeFeatures f{};
    f[kEdgeLength] = d(e.i, e.j);
    f[kPenaltyCount] = pen.count(e.i, e.j);
    f[kDepotDistI] = d(kDepot, e.i);
    f[kDepotDistJ] = d(kDepot, e.j);
    f[kEdgeDemand] = inst.demands[e.i] + inst.demands[e.j];
    f[kRouteLoad] = rs.load / inst.capacity;
    f[kRouteCost] = rs.cost;
    f[kRouteLength] = rs.length;
    f[kMeanEdge] = mean_edge;
    f[kScale] = inst.customer_count();
    return f;
}

double mean_edge_length(const Solution &sol, const DistanceMatrix &d) {
    double total = 0;
    std::size_t m = 0;
    for_each_edge(sol, [&](int i, int j) {
        total += d(i, j);
        ++m;
    });
    return m == 0 ? 0.0 : total / static_cast<double>(m);
}

}  // namespace

std::vector<EdgeFeatureRow> solution_edge_features(const Instance &inst, const DistanceMatrix &d, const Solution &sol,
                                                   const PenaltyMap &pen) {
    std::vector<EdgeFeatureRow> rows;
    rows.reserve(edge_count(sol));
    const double mean_edge = mean_edge_length(sol, d);
    for (int r = 0; r < static_cast<int>(sol.routes.size()); ++r) {
        const auto &route = sol.routes[r];
        if (route.empty()) {
            continue;
        }
        const auto rs = summarize(inst, d, route);
        int prev = kDepot;
        for (std::size_t k = 0; k <= route.size(); ++k) {
            const int next = k < route.size() ? route[k] : kDepot;
            const Edge e = Edge::of(prev, next);
            rows.push_back({e, r, features_for(inst, d, pen, rs, mean_edge, e)});
            prev = next;
        }
    }
    return rows;
}

EdgeFeatures extract_features(const Instance &inst, const DistanceMatrix &d, const Solution &sol, const PenaltyMap &pen,
                              Edge edge) {
    edge = Edge::of(edge.i, edge.j);
    for (const auto &route : sol.routes) {
        int prev = kDepot;
        bool found = false;
        for (std::size_t k = 0; k <= route.size() && !found && !route.empty(); ++k) {
            const int next = k < route.size() ? route[k] : kDepot;
            found = Edge::of(prev, next) == edge;
            prev = next;
        }
        if (found) {
            return features_for(inst, d, pen, summarize(inst, d, route), mean_edge_length(sol, d), edge);
        }
    }
    throw ContractError("extract_features: edge (" + std::to_string(edge.i) + "," + std::to_string(edge.j) +
                        ") is not in the solution");
}

}  // namespace vrpgp
