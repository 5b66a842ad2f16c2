#include "vrpgp/gls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "vrpgp/audit.hpp"
#include "vrpgp/errors.hpp"

namespace vrpgp {

audit::Counters &audit::counters() noexcept {
    static Counters c;
    return c;
}

}  // namespace vrpgp

namespace vrpgp::gls {

NeighborLists build_neighbor_lists(const DistanceMatrix &d, int k) {
    if (k < 1) {
        throw ParameterError("build_neighbor_lists: k must be >= 1");
    }
    const int nodes = d.size();
    std::vector<std::vector<int>> lists(static_cast<std::size_t>(nodes));
    std::vector<int> order;
    for (int i = 0; i < nodes; ++i) {
        order.clear();
        for (int j = 0; j < nodes; ++j) {
            if (j != i) {
                order.push_back(j);
            }
        }
        const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
        auto closer = [&](int a, int b) { return d(i, a) != d(i, b) ? d(i, a) < d(i, b) : a < b; };
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), closer);
        lists[static_cast<std::size_t>(i)].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
    }
    return NeighborLists(std::move(lists));
}

Budget Budget::parse(const std::string &text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ParameterError("budget '" + text + "': expected time:<seconds> or moves:<count>");
    }
    const std::string kind = text.substr(0, colon);
    const std::string value = text.substr(colon + 1);
    Budget b;
    try {
        std::size_t used = 0;
        if (kind == "time") {
            b = seconds(std::stod(value, &used));
        } else if (kind == "moves") {
            b = moves(std::stoll(value, &used));
        } else {
            throw ParameterError("budget '" + text + "': unknown mode '" + kind + "'");
        }
        if (used != value.size()) {
            throw ParameterError("budget '" + text + "': trailing characters");
        }
    } catch (const std::logic_error &e) {
        if (dynamic_cast<const ParameterError *>(&e) != nullptr) {
            throw;
        }
        throw ParameterError("budget '" + text + "': bad number");
    }
    b.check();
    return b;
}

std::string Budget::to_string() const {
    std::ostringstream os;
    if (mode == Mode::wall_clock) {
        os << "time:" << limit;
    } else {
        os << "moves:" << static_cast<std::int64_t>(limit);
    }
    return os.str();
}

void Budget::check() const {
    if (!std::isfinite(limit) || limit < 0) {
        throw ParameterError("budget limit must be a non-negative finite number, got " + std::to_string(limit));
    }
}

UtilityFn kgls_baseline_utility() {
    return [](const EdgeFeatures &f) { return f[kEdgeLength] / (1.0 + f[kPenaltyCount]); };
}

Solution construct_initial(const Instance &inst, const DistanceMatrix &d) {
    const int n = inst.customer_count();
    for (int c = 1; c <= n; ++c) {
        if (inst.demands[static_cast<std::size_t>(c)] > inst.capacity) {
            throw InfeasibleInstance("customer " + std::to_string(c) + " demand exceeds vehicle capacity");
        }
    }

    struct Saving {
        int value;
        int i;
        int j;
    };
    std::vector<Saving> savings;
    savings.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            const int s = d(kDepot, i) + d(kDepot, j) - d(i, j);
            if (s > 0) {
                savings.push_back({s, i, j});
            }
        }
    }
    std::sort(savings.begin(), savings.end(), [](const Saving &a, const Saving &b) {
        if (a.value != b.value) {
            return a.value > b.value;
        }
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });

    std::vector<Route> routes(static_cast<std::size_t>(n) + 1);
    std::vector<int> load(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> owner(static_cast<std::size_t>(n) + 1);
    for (int c = 1; c <= n; ++c) {
        routes[static_cast<std::size_t>(c)] = {c};
        load[static_cast<std::size_t>(c)] = inst.demands[static_cast<std::size_t>(c)];
        owner[static_cast<std::size_t>(c)] = c;
    }

    for (const auto &s : savings) {
        const int ri = owner[static_cast<std::size_t>(s.i)];
        const int rj = owner[static_cast<std::size_t>(s.j)];
        if (ri == rj || load[static_cast<std::size_t>(ri)] + load[static_cast<std::size_t>(rj)] > inst.capacity) {
            continue;
        }
        auto &a = routes[static_cast<std::size_t>(ri)];
        auto &b = routes[static_cast<std::size_t>(rj)];
        const bool i_end = a.front() == s.i || a.back() == s.i;
        const bool j_end = b.front() == s.j || b.back() == s.j;
        if (!i_end || !j_end) {
            continue;
        }
        if (a.back() != s.i) {
            std::reverse(a.begin(), a.end());
        }
        if (b.front() != s.j) {
            std::reverse(b.begin(), b.end());
        }
        for (const int c : b) {
            owner[static_cast<std::size_t>(c)] = ri;
        }
        a.insert(a.end(), b.begin(), b.end());
        b.clear();
        load[static_cast<std::size_t>(ri)] += load[static_cast<std::size_t>(rj)];
        load[static_cast<std::size_t>(rj)] = 0;
    }

    Solution sol;
    for (auto &r : routes) {
        if (!r.empty()) {
            sol.routes.push_back(std::move(r));
        }
    }
    sol.cost = solution_cost(sol, d);
    return sol;
}

namespace {

enum class MoveKind { relocate, swap, two_opt, two_opt_star };

struct Move {
    MoveKind kind = MoveKind::relocate;
    int a = 0;
    int b = 0;
    int c = 0;
    int d = 0;
    double delta = 0;
};

class MoveScanner {
public:
    MoveScanner(const SearchState &s, const AugmentedWeights &w) : s_(s), w_(w) { best_.delta = -kImprovementEpsilon; }

    bool found() const noexcept { return found_; }
    const Move &best() const noexcept { return best_; }

    // Moves that make u (a customer) adjacent to v.
    void scan_pair(int u, int v) {
        if (v == kDepot) {
            scan_depot(u);
            return;
        }
        const int ru = s_.route_of(u);
        const int pu = s_.position_of(u);
        const int rv = s_.route_of(v);
        const int pv = s_.position_of(v);

        const int v_index = (rv == ru && pv > pu) ? pv - 1 : pv;
        offer_relocate(u, {rv, v_index + 1});
        offer_relocate(u, {rv, v_index});
        offer({MoveKind::swap, u, v}, delta_swap(s_, w_, u, v));
        if (ru == rv) {
            if (pu < pv) {
                offer({MoveKind::two_opt, ru, pu + 1, pv}, delta_two_opt(s_, w_, ru, pu + 1, pv));
            } else {
                offer({MoveKind::two_opt, ru, pv, pu - 1}, delta_two_opt(s_, w_, ru, pv, pu - 1));
            }
        } else {
            offer({MoveKind::two_opt_star, ru, pu + 1, rv, pv}, delta_two_opt_star(s_, w_, ru, pu + 1, rv, pv));
            offer({MoveKind::two_opt_star, ru, pu, rv, pv + 1}, delta_two_opt_star(s_, w_, ru, pu, rv, pv + 1));
        }
    }

private:
    void scan_depot(int u) {
        const int ru = s_.route_of(u);
        const int pu = s_.position_of(u);
        const int len_u = static_cast<int>(s_.route(ru).size());
        for (int r = 0; r < s_.route_count(); ++r) {
            const int len = static_cast<int>(s_.route(r).size()) - (r == ru ? 1 : 0);
            offer_relocate(u, {r, 0});
            offer_relocate(u, {r, len});
        }
        if (len_u > 1) {
            offer_relocate(u, {s_.route_count(), 0});
        }
        offer({MoveKind::two_opt, ru, 0, pu}, delta_two_opt(s_, w_, ru, 0, pu));
        offer({MoveKind::two_opt, ru, pu, len_u - 1}, delta_two_opt(s_, w_, ru, pu, len_u - 1));
        for (int r = 0; r < s_.route_count(); ++r) {
            if (r == ru) {
                continue;
            }
            const int len = static_cast<int>(s_.route(r).size());
            offer({MoveKind::two_opt_star, ru, pu + 1, r, len}, delta_two_opt_star(s_, w_, ru, pu + 1, r, len));
            offer({MoveKind::two_opt_star, ru, pu, r, 0}, delta_two_opt_star(s_, w_, ru, pu, r, 0));
        }
    }

    void offer_relocate(int u, InsertPosition t) {
        offer({MoveKind::relocate, u, t.route, t.position}, delta_relocate(s_, w_, u, t));
    }

    void offer(Move m, const std::optional<double> &delta) {
        if (delta && *delta < best_.delta) {
            m.delta = *delta;
            best_ = m;
            found_ = true;
        }
    }

    const SearchState &s_;
    const AugmentedWeights &w_;
    Move best_;
    bool found_ = false;
};

void apply(SearchState &s, const Move &m) {
    switch (m.kind) {
    case MoveKind::relocate: s.relocate(m.a, {m.b, m.c}); break;
    case MoveKind::swap: s.swap(m.a, m.b); break;
    case MoveKind::two_opt: s.two_opt(m.a, m.b, m.c); break;
    case MoveKind::two_opt_star: s.two_opt_star(m.a, m.b, m.c, m.d); break;
    }
}

double weighted_cost(const Solution &sol, const AugmentedWeights &w) {
    double total = 0;
    for_each_edge(sol, [&](int i, int j) { total += w(i, j); });
    return total;
}

void audit_move(const SearchState &before_state, double before, const SearchState &after_state, const AugmentedWeights &w,
                const Move &m) {
    if (!(m.delta < 0)) {
        throw audit::AuditFailure("accepted move with non-negative augmented delta " + std::to_string(m.delta));
    }
    const double after = weighted_cost(after_state.solution(), w);
    const double full = augmented_cost(after_state.solution(), w.distances(), w.penalties(), w.lambda()) -
                        augmented_cost(before_state.solution(), w.distances(), w.penalties(), w.lambda());
    if (std::abs((after - before) - m.delta) > 1e-6 || std::abs(full - m.delta) > 1e-6) {
        throw audit::AuditFailure("move delta " + std::to_string(m.delta) + " disagrees with recomputation " +
                                  std::to_string(full));
    }
    if (after_state.solution().cost != solution_cost(after_state.solution(), w.distances())) {
        throw audit::AuditFailure("cached true cost drifted after move");
    }
    audit::counters().moves.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace

LocalSearchStats local_search(SearchState &state, const AugmentedWeights &w, const NeighborLists &nbr,
                              const LocalSearchOptions &opts) {
    LocalSearchStats stats;
    const int n = state.instance().customer_count();
    for (;;) {
        MoveScanner scanner(state, w);
        if (opts.scope.empty()) {
            for (int u = 1; u <= n; ++u) {
                for (const int v : nbr[u]) {
                    scanner.scan_pair(u, v);
                }
            }
        } else {
            for (const int s : opts.scope) {
                for (const int v : nbr[s]) {
                    if (s != kDepot) {
                        scanner.scan_pair(s, v);
                    }
                    if (v != kDepot) {
                        scanner.scan_pair(v, s);
                    }
                }
            }
        }
        if (!scanner.found()) {
            break;
        }
        if constexpr (audit::enabled) {
            const SearchState before_state = state;
            const double before = weighted_cost(state.solution(), w);
            apply(state, scanner.best());
            audit_move(before_state, before, state, w, scanner.best());
        } else {
            apply(state, scanner.best());
        }
        ++stats.accepted;
        if (opts.should_stop && stats.accepted % kClockCheckInterval == 0 && opts.should_stop()) {
            stats.stopped = true;
            break;
        }
    }
    if constexpr (audit::enabled) {
        const auto violations = validate_solution(state.solution(), state.instance());
        if (!violations.empty()) {
            throw audit::AuditFailure("local search produced an invalid solution: " + violations.front().describe());
        }
        audit::counters().solutions.fetch_add(1, std::memory_order_relaxed);
    }
    return stats;
}

Solution local_search(const Instance &inst, const DistanceMatrix &d, Solution sol, const PenaltyMap &pen, double lambda,
                      const NeighborLists &nbr, std::span<const int> scope) {
    const AugmentedWeights w(d, pen, lambda);
    SearchState state(inst, d, std::move(sol));
    LocalSearchOptions opts;
    opts.scope = scope;
    local_search(state, w, nbr, opts);
    return state.solution();
}

Edge select_penalty_edge(std::span<const EdgeFeatureRow> rows, const UtilityFn &util) {
    if (rows.empty()) {
        throw ContractError("select_penalty_edge: solution has no edges");
    }
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    double best_u = neg_inf;
    Edge best = rows.front().edge;
    for (const auto &row : rows) {
        double u = util(row.features);
        if (!std::isfinite(u)) {
            u = neg_inf;
        }
        if (u > best_u || (u == best_u && row.edge < best)) {
            best_u = u;
            best = row.edge;
        }
    }
    return best;
}

PreparedInstance PreparedInstance::make(Instance inst, int k) {
    check_instance(inst);
    PreparedInstance p{std::move(inst), {}, {}};
    p.distances = DistanceMatrix(p.instance);
    p.neighbors = build_neighbor_lists(p.distances, k);
    return p;
}

namespace {

GlsResult run_gls(const Instance &inst, const DistanceMatrix &d, const NeighborLists &nbr, const UtilityFn &util,
                  const GlsParams &params) {
    params.budget.check();
    if (!(params.lambda_alpha >= 0)) {
        throw ParameterError("lambda_alpha must be non-negative");
    }
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const bool timed = params.budget.mode == Budget::Mode::wall_clock;
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

    GlsResult res;
    Solution initial = construct_initial(inst, d);
    res.init_cost = initial.cost;
    // The penalty term already scales with d(e), so lambda stays dimensionless.
    res.lambda = params.lambda_alpha;

    PenaltyMap pen;
    AugmentedWeights w(d, pen, res.lambda);
    SearchState state(inst, d, std::move(initial));
    res.accepted_moves += local_search(state, w, nbr).accepted;
    res.post_ls_cost = state.solution().cost;
    res.best = state.solution();
    res.trace.push_back({0, timed ? elapsed() : static_cast<double>(res.accepted_moves), res.best.cost});

    std::vector<int> scope;
    LocalSearchOptions opts;
    if (timed) {
        opts.should_stop = [&] { return elapsed() >= params.budget.limit; };
    }
    for (;;) {
        if (timed ? elapsed() >= params.budget.limit : static_cast<double>(res.rounds) >= params.budget.limit) {
            break;
        }
        const auto rows = solution_edge_features(inst, d, state.solution(), pen);
        const Edge e = select_penalty_edge(rows, util);
        pen.increment(e.i, e.j);
        w.refresh(e.i, e.j);
        ++res.rounds;
        for (const int node : {e.i, e.j}) {
            if (std::find(scope.begin(), scope.end(), node) == scope.end()) {
                scope.push_back(node);
            }
        }
        opts.scope = scope;
        const auto stats = local_search(state, w, nbr, opts);
        res.accepted_moves += stats.accepted;
        if (stats.accepted > 0) {
            scope.clear();
        }
        if (state.solution().cost < res.best.cost) {
            res.best = state.solution();
            res.trace.push_back({res.rounds, timed ? elapsed() : static_cast<double>(res.accepted_moves), res.best.cost});
        }
    }
    res.final_cost = res.best.cost;

    if constexpr (audit::enabled) {
        for (std::size_t k = 1; k < res.trace.size(); ++k) {
            if (res.trace[k].best_cost > res.trace[k - 1].best_cost) {
                throw audit::AuditFailure("best-so-far trace increased");
            }
        }
        if (res.final_cost > res.init_cost) {
            throw audit::AuditFailure("final cost exceeds initial cost");
        }
        const auto violations = validate_solution(res.best, inst);
        if (!violations.empty()) {
            throw audit::AuditFailure("GLS returned an invalid solution: " + violations.front().describe());
        }
        if (pen.total() != res.rounds) {
            throw audit::AuditFailure("penalty total differs from penalization rounds");
        }
        audit::counters().traces.fetch_add(1, std::memory_order_relaxed);
        audit::counters().solutions.fetch_add(1, std::memory_order_relaxed);
    }
    return res;
}

}  // namespace

GlsResult guided_local_search(const PreparedInstance &prepared, const UtilityFn &util, const GlsParams &params) {
    return run_gls(prepared.instance, prepared.distances, prepared.neighbors, util, params);
}

GlsResult guided_local_search(const Instance &inst, const DistanceMatrix &d, const UtilityFn &util, const GlsParams &params) {
    if (params.neighbors < 1) {
        throw ParameterError("neighbors must be >= 1");
    }
    const auto nbr = build_neighbor_lists(d, params.neighbors);
    return run_gls(inst, d, nbr, util, params);
}

void write_trace_csv(std::ostream &out, std::span<const TracePoint> trace) {
    out << "step,elapsed_or_moves,best_true_cost\n";
    for (const auto &t : trace) {
        out << t.step << ',' << t.elapsed_or_moves << ',' << t.best_cost << '\n';
    }
}

}  // namespace vrpgp::gls
