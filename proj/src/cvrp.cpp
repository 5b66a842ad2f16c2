#include "vrpgp/cvrp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vrpgp/errors.hpp"

namespace vrpgp {

void check_instance(const Instance &inst) {
    if (inst.points.size() < 2) {
        throw ContractError("instance " + inst.id + ": needs a depot and at least one customer");
    }
    if (inst.demands.size() != inst.points.size()) {
        throw ContractError("instance " + inst.id + ": demands and points differ in length");
    }
    if (inst.capacity <= 0) {
        throw ContractError("instance " + inst.id + ": capacity must be positive");
    }
    if (inst.demands[kDepot] != 0) {
        throw ContractError("instance " + inst.id + ": depot demand must be zero");
    }
    for (int i = 0; i < inst.node_count(); ++i) {
        const auto p = inst.points[i];
        if (!(p.x >= 0.0 && p.x <= kGridMax && p.y >= 0.0 && p.y <= kGridMax)) {
            throw ContractError("instance " + inst.id + ": node " + std::to_string(i) + " outside [0,1000]^2");
        }
        if (i > 0 && (inst.demands[i] < 1 || inst.demands[i] > inst.capacity)) {
            throw ContractError("instance " + inst.id + ": customer " + std::to_string(i) + " demand out of [1, Q]");
        }
    }
}

int euclidean_distance(Point a, Point b) noexcept {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return static_cast<int>(std::floor(std::sqrt(dx * dx + dy * dy) + 0.5));
}

DistanceMatrix::DistanceMatrix(const Instance &inst) : size_(inst.node_count()), d_(static_cast<std::size_t>(size_) * size_, 0) {
    for (int i = 0; i < size_; ++i) {
        for (int j = i + 1; j < size_; ++j) {
            const int v = euclidean_distance(inst.points[i], inst.points[j]);
            d_[static_cast<std::size_t>(i) * size_ + j] = v;
            d_[static_cast<std::size_t>(j) * size_ + i] = v;
        }
    }
}

DistanceMatrix build_distance_matrix(const Instance &inst) { return DistanceMatrix(inst); }

std::size_t edge_count(const Solution &sol) noexcept {
    std::size_t m = 0;
    for (const auto &r : sol.routes) {
        if (!r.empty()) {
            m += r.size() + 1;
        }
    }
    return m;
}

std::int64_t solution_cost(const Solution &sol, const DistanceMatrix &d) {
    std::int64_t total = 0;
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        for (const int c : sol.routes[r]) {
            if (c < 0 || c >= d.size()) {
                throw MalformedSolution("route " + std::to_string(r) + " references node " + std::to_string(c) +
                                        " outside [0, " + std::to_string(d.size()) + ")");
            }
        }
    }
    for_each_edge(sol, [&](int i, int j) { total += d(i, j); });
    return total;
}

std::string Violation::describe() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::invalid_index: os << "invalid_index(route " << route << ", node " << customer << ")"; break;
    case Kind::empty_route: os << "empty_route(" << route << ")"; break;
    case Kind::missing_customer: os << "missing(" << customer << ")"; break;
    case Kind::duplicate_customer: os << "duplicate(" << customer << ", x" << amount << ")"; break;
    case Kind::capacity_excess: os << "capacity_excess(route " << route << ", +" << amount << ")"; break;
    case Kind::cost_mismatch: os << "cost_mismatch(" << amount << ")"; break;
    }
    return os.str();
}

std::vector<Violation> validate_solution(const Solution &sol, const Instance &inst) {
    std::vector<Violation> out;
    const int n = inst.customer_count();
    std::vector<int> seen(static_cast<std::size_t>(std::max(n, 0)) + 1, 0);
    bool indices_ok = true;

    for (int r = 0; r < static_cast<int>(sol.routes.size()); ++r) {
        const auto &route = sol.routes[r];
        if (route.empty()) {
            out.push_back({Violation::Kind::empty_route, r});
            continue;
        }
        std::int64_t load = 0;
        for (const int c : route) {
            if (c < 1 || c > n) {
                out.push_back({Violation::Kind::invalid_index, r, c});
                indices_ok = false;
                continue;
            }
            ++seen[c];
            load += inst.demands[c];
        }
        if (load > inst.capacity) {
            out.push_back({Violation::Kind::capacity_excess, r, -1, load - inst.capacity});
        }
    }
    for (int c = 1; c <= n; ++c) {
        if (seen[c] == 0) {
            out.push_back({Violation::Kind::missing_customer, -1, c});
        } else if (seen[c] > 1) {
            out.push_back({Violation::Kind::duplicate_customer, -1, c, seen[c]});
        }
    }
    if (indices_ok) {
        std::int64_t recomputed = 0;
        for_each_edge(sol, [&](int i, int j) { recomputed += euclidean_distance(inst.points[i], inst.points[j]); });
        if (recomputed != sol.cost) {
            out.push_back({Violation::Kind::cost_mismatch, -1, -1, sol.cost - recomputed});
        }
    }
    return out;
}

std::uint64_t PenaltyMap::key(int i, int j) noexcept {
    const auto lo = static_cast<std::uint64_t>(std::min(i, j));
    const auto hi = static_cast<std::uint64_t>(std::max(i, j));
    return (lo << 32) | hi;
}

int PenaltyMap::count(int i, int j) const {
    if (i == j) {
        return 0;
    }
    const auto it = counts_.find(key(i, j));
    return it == counts_.end() ? 0 : it->second;
}

int PenaltyMap::increment(int i, int j) {
    if (i == j || i < 0 || j < 0) {
        throw ContractError("PenaltyMap::increment: invalid edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    ++total_;
    return ++counts_[key(i, j)];
}

std::vector<std::pair<std::pair<int, int>, int>> PenaltyMap::entries() const {
    std::vector<std::pair<std::pair<int, int>, int>> out;
    out.reserve(counts_.size());
    for (const auto &[k, v] : counts_) {
        out.push_back({{static_cast<int>(k >> 32), static_cast<int>(k & 0xffffffffULL)}, v});
    }
    std::sort(out.begin(), out.end());
    return out;
}

double augmented_cost(const Solution &sol, const DistanceMatrix &d, const PenaltyMap &pen, double lambda) {
    if (!(lambda >= 0.0)) {
        throw ParameterError("augmented_cost: lambda must be non-negative");
    }
    const auto f = static_cast<double>(solution_cost(sol, d));
    if (lambda == 0.0 || pen.empty()) {
        return f;
    }
    double penalty = 0.0;
    for_each_edge(sol, [&](int i, int j) { penalty += static_cast<double>(pen.count(i, j)) * d(i, j); });
    return f + lambda * penalty;
}

}  // namespace vrpgp
