#include "vrpgp/search_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vrpgp/errors.hpp"

namespace vrpgp::gls {

AugmentedWeights::AugmentedWeights(const DistanceMatrix &d, const PenaltyMap &pen, double lambda)
    : d_(&d), pen_(&pen), lambda_(lambda), n_(d.size()), w_(static_cast<std::size_t>(n_) * n_) {
    if (!(lambda >= 0.0)) {
        throw ParameterError("AugmentedWeights: lambda must be non-negative");
    }
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            w_[static_cast<std::size_t>(i) * n_ + j] = d(i, j);
        }
    }
    for (const auto &[e, p] : pen.entries()) {
        refresh(e.first, e.second);
    }
}

double AugmentedWeights::weight(int i, int j) const {
    const double dij = (*d_)(i, j);
    return dij + lambda_ * pen_->count(i, j) * dij;
}

void AugmentedWeights::refresh(int i, int j) {
    const double v = weight(i, j);
    w_[static_cast<std::size_t>(i) * n_ + j] = v;
    w_[static_cast<std::size_t>(j) * n_ + i] = v;
}

namespace {

struct TrueWeights {
    const DistanceMatrix &d;
    double operator()(int i, int j) const noexcept { return d(i, j); }
};

bool valid_customer(const SearchState &s, int c) { return c >= 1 && c <= s.instance().customer_count(); }

template <typename W>
std::optional<double> relocate_delta(const SearchState &s, const W &w, int c, InsertPosition t) {
    if (!valid_customer(s, c)) {
        return std::nullopt;
    }
    const int r = s.route_of(c);
    const int p = s.position_of(c);
    const int len_r = static_cast<int>(s.route(r).size());
    if (t.route < 0 || t.route > s.route_count()) {
        return std::nullopt;
    }
    if (t.route == s.route_count()) {
        if (t.position != 0) {
            return std::nullopt;
        }
    } else {
        const int len_t = static_cast<int>(s.route(t.route).size()) - (t.route == r ? 1 : 0);
        if (t.position < 0 || t.position > len_t) {
            return std::nullopt;
        }
    }
    if (t.route == r && t.position == p) {
        return 0.0;
    }
    if (t.route != r && t.route < s.route_count() && s.load(t.route) + s.demand(c) > s.capacity()) {
        return std::nullopt;
    }

    const int prev = s.node_before(r, p);
    const int next = s.node_at(r, p + 1);
    const double removal = w(prev, next) - w(prev, c) - w(c, next);

    int left = kDepot;
    int right = kDepot;
    if (t.route == s.route_count()) {
        // new route: depot on both sides
    } else if (t.route != r) {
        left = s.node_before(t.route, t.position);
        right = s.node_at(t.route, t.position);
    } else {
        const auto &route = s.route(r);
        auto reduced_at = [&](int k) -> int {
            if (k < 0 || k >= len_r - 1) {
                return kDepot;
            }
            return route[static_cast<std::size_t>(k < p ? k : k + 1)];
        };
        left = reduced_at(t.position - 1);
        right = reduced_at(t.position);
    }
    const double insertion = w(left, c) + w(c, right) - w(left, right);
    return removal + insertion;
}

template <typename W>
std::optional<double> swap_delta(const SearchState &s, const W &w, int a, int b) {
    if (!valid_customer(s, a) || !valid_customer(s, b)) {
        return std::nullopt;
    }
    if (a == b) {
        return 0.0;
    }
    int ra = s.route_of(a);
    int rb = s.route_of(b);
    int pa = s.position_of(a);
    int pb = s.position_of(b);
    if (ra != rb) {
        const int da = s.demand(a);
        const int db = s.demand(b);
        if (s.load(ra) - da + db > s.capacity() || s.load(rb) - db + da > s.capacity()) {
            return std::nullopt;
        }
    } else if (std::abs(pa - pb) == 1) {
        if (pa > pb) {
            std::swap(a, b);
            std::swap(pa, pb);
        }
        const int prev = s.node_before(ra, pa);
        const int next = s.node_at(ra, pb + 1);
        const double added = w(prev, b) + w(a, next);
        const double removed = w(prev, a) + w(b, next);
        return added - removed;
    }
    const int a_prev = s.node_before(ra, pa);
    const int a_next = s.node_at(ra, pa + 1);
    const int b_prev = s.node_before(rb, pb);
    const int b_next = s.node_at(rb, pb + 1);
    const double added = w(a_prev, b) + w(b, a_next) + w(b_prev, a) + w(a, b_next);
    const double removed = w(a_prev, a) + w(a, a_next) + w(b_prev, b) + w(b, b_next);
    return added - removed;
}

template <typename W>
std::optional<double> two_opt_delta(const SearchState &s, const W &w, int r, int i, int j) {
    if (r < 0 || r >= s.route_count()) {
        return std::nullopt;
    }
    const int len = static_cast<int>(s.route(r).size());
    if (i < 0 || j >= len || i > j) {
        return std::nullopt;
    }
    if (i == j) {
        return 0.0;
    }
    const auto &route = s.route(r);
    const int prev = s.node_before(r, i);
    const int next = s.node_at(r, j + 1);
    const int first = route[static_cast<std::size_t>(i)];
    const int last = route[static_cast<std::size_t>(j)];
    const double added = w(prev, last) + w(first, next);
    const double removed = w(prev, first) + w(last, next);
    return added - removed;
}

template <typename W>
std::optional<double> two_opt_star_delta(const SearchState &s, const W &w, int ra, int ca, int rb, int cb) {
    if (ra == rb || ra < 0 || rb < 0 || ra >= s.route_count() || rb >= s.route_count()) {
        return std::nullopt;
    }
    const int len_a = static_cast<int>(s.route(ra).size());
    const int len_b = static_cast<int>(s.route(rb).size());
    if (ca < 0 || ca > len_a || cb < 0 || cb > len_b) {
        return std::nullopt;
    }
    const int head_a = s.prefix_load(ra, ca);
    const int head_b = s.prefix_load(rb, cb);
    const int new_a = head_a + (s.load(rb) - head_b);
    const int new_b = head_b + (s.load(ra) - head_a);
    if (new_a > s.capacity() || new_b > s.capacity()) {
        return std::nullopt;
    }
    const int a_prev = s.node_before(ra, ca);
    const int a_next = s.node_at(ra, ca);
    const int b_prev = s.node_before(rb, cb);
    const int b_next = s.node_at(rb, cb);
    const double added = w(a_prev, b_next) + w(b_prev, a_next);
    const double removed = w(a_prev, a_next) + w(b_prev, b_next);
    return added - removed;
}

std::int64_t as_cost_delta(const std::optional<double> &delta, const char *what) {
    if (!delta) {
        throw ContractError(std::string("SearchState: infeasible ") + what + " applied");
    }
    return std::llround(*delta);
}

}  // namespace

SearchState::SearchState(const Instance &inst, const DistanceMatrix &d, Solution sol)
    : inst_(&inst), d_(&d), sol_(std::move(sol)) {
    const auto n1 = static_cast<std::size_t>(inst.node_count());
    route_of_.assign(n1, -1);
    pos_of_.assign(n1, -1);
    drop_empty_routes();
    for (int r = 0; r < route_count(); ++r) {
        for (const int c : route(r)) {
            if (c < 1 || c >= inst.node_count()) {
                throw MalformedSolution("SearchState: node " + std::to_string(c) + " is not a customer");
            }
        }
    }
    prefix_.assign(sol_.routes.size(), {});
    for (int r = 0; r < route_count(); ++r) {
        reindex(r);
    }
    sol_.cost = solution_cost(sol_, d);
}

void SearchState::reindex(int r) {
    const auto &rt = sol_.routes[static_cast<std::size_t>(r)];
    auto &pre = prefix_[static_cast<std::size_t>(r)];
    pre.assign(rt.size() + 1, 0);
    for (std::size_t k = 0; k < rt.size(); ++k) {
        const int c = rt[k];
        route_of_[static_cast<std::size_t>(c)] = r;
        pos_of_[static_cast<std::size_t>(c)] = static_cast<int>(k);
        pre[k + 1] = pre[k] + inst_->demands[static_cast<std::size_t>(c)];
    }
}

void SearchState::drop_empty_routes() {
    const auto before = sol_.routes.size();
    std::erase_if(sol_.routes, [](const Route &r) { return r.empty(); });
    if (sol_.routes.size() != before && !prefix_.empty()) {
        prefix_.assign(sol_.routes.size(), {});
        for (int r = 0; r < route_count(); ++r) {
            reindex(r);
        }
    }
}

void SearchState::relocate(int c, InsertPosition t) {
    const auto delta = as_cost_delta(relocate_delta(*this, TrueWeights{*d_}, c, t), "relocate");
    const int r = route_of(c);
    const int p = position_of(c);
    auto &src = sol_.routes[static_cast<std::size_t>(r)];
    src.erase(src.begin() + p);
    if (t.route == route_count()) {
        sol_.routes.push_back({c});
        prefix_.emplace_back();
        reindex(t.route);
    } else {
        auto &dst = sol_.routes[static_cast<std::size_t>(t.route)];
        dst.insert(dst.begin() + t.position, c);
        reindex(t.route);
    }
    if (t.route != r) {
        reindex(r);
    }
    sol_.cost += delta;
    drop_empty_routes();
}

void SearchState::swap(int a, int b) {
    const auto delta = as_cost_delta(swap_delta(*this, TrueWeights{*d_}, a, b), "swap");
    if (a == b) {
        return;
    }
    const int ra = route_of(a);
    const int rb = route_of(b);
    std::swap(sol_.routes[static_cast<std::size_t>(ra)][static_cast<std::size_t>(position_of(a))],
              sol_.routes[static_cast<std::size_t>(rb)][static_cast<std::size_t>(position_of(b))]);
    reindex(ra);
    if (rb != ra) {
        reindex(rb);
    }
    sol_.cost += delta;
}

void SearchState::two_opt(int r, int i, int j) {
    const auto delta = as_cost_delta(two_opt_delta(*this, TrueWeights{*d_}, r, i, j), "2-opt");
    auto &rt = sol_.routes[static_cast<std::size_t>(r)];
    std::reverse(rt.begin() + i, rt.begin() + j + 1);
    reindex(r);
    sol_.cost += delta;
}

void SearchState::two_opt_star(int ra, int ca, int rb, int cb) {
    const auto delta = as_cost_delta(two_opt_star_delta(*this, TrueWeights{*d_}, ra, ca, rb, cb), "2-opt*");
    auto &a = sol_.routes[static_cast<std::size_t>(ra)];
    auto &b = sol_.routes[static_cast<std::size_t>(rb)];
    Route new_a(a.begin(), a.begin() + ca);
    new_a.insert(new_a.end(), b.begin() + cb, b.end());
    Route new_b(b.begin(), b.begin() + cb);
    new_b.insert(new_b.end(), a.begin() + ca, a.end());
    a = std::move(new_a);
    b = std::move(new_b);
    reindex(ra);
    reindex(rb);
    sol_.cost += delta;
    drop_empty_routes();
}

std::optional<double> delta_relocate(const SearchState &s, const AugmentedWeights &w, int customer, InsertPosition target) {
    return relocate_delta(s, w, customer, target);
}

std::optional<double> delta_swap(const SearchState &s, const AugmentedWeights &w, int a, int b) {
    return swap_delta(s, w, a, b);
}

std::optional<double> delta_two_opt(const SearchState &s, const AugmentedWeights &w, int r, int i, int j) {
    return two_opt_delta(s, w, r, i, j);
}

std::optional<double> delta_two_opt_star(const SearchState &s, const AugmentedWeights &w, int route_a, int cut_a,
                                         int route_b, int cut_b) {
    return two_opt_star_delta(s, w, route_a, cut_a, route_b, cut_b);
}

}  // namespace vrpgp::gls
