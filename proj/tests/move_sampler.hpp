#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>

#include "oracles.hpp"
#include "vrpgp/instance_io.hpp"
#include "vrpgp/search_state.hpp"

// Random feasible solutions and random moves for delta cross-checks.
namespace sampler {

using namespace vrpgp;
using namespace vrpgp::gls;

struct Fixture {
    Instance inst;
    DistanceMatrix d;
    PenaltyMap pen;
    double lambda;
};

inline Fixture make_fixture(int n, std::uint64_t seed, double lambda = 0.3) {
    io::GeneratorConfig cfg;
    cfg.n = n;
    cfg.seed = seed;
    Fixture f{io::generate_instance(cfg), {}, {}, lambda};
    f.d = DistanceMatrix(f.inst);
    std::mt19937_64 gen(seed * 31 + 1);
    std::uniform_int_distribution<int> node(0, n);
    for (int k = 0; k < 4 * n; ++k) {
        const int a = node(gen);
        const int b = node(gen);
        if (a != b) {
            f.pen.increment(a, b);
        }
    }
    return f;
}

// Random feasible solution: shuffled customers cut into routes of random size <= Q.
inline Solution random_solution(const Fixture &f, std::mt19937_64 &gen) {
    std::vector<int> customers(static_cast<std::size_t>(f.inst.customer_count()));
    std::iota(customers.begin(), customers.end(), 1);
    std::shuffle(customers.begin(), customers.end(), gen);
    Solution sol;
    std::uniform_int_distribution<int> len(1, f.inst.capacity);
    std::size_t k = 0;
    while (k < customers.size()) {
        const auto take = std::min<std::size_t>(static_cast<std::size_t>(len(gen)), customers.size() - k);
        sol.routes.emplace_back(customers.begin() + static_cast<std::ptrdiff_t>(k),
                                customers.begin() + static_cast<std::ptrdiff_t>(k + take));
        k += take;
    }
    sol.cost = oracle::solution_cost(f.inst, sol);
    return sol;
}

enum class Op { relocate, swap, two_opt, two_opt_star };

// Samples one random move of the given kind, returns its delta (or nullopt) and
// applies it to `after`.
struct Sampled {
    std::optional<double> delta;
    bool applied = false;
};

inline Sampled sample_move(Op op, const SearchState &s, SearchState &after, const AugmentedWeights &w, std::mt19937_64 &gen) {
    const int n = s.instance().customer_count();
    std::uniform_int_distribution<int> cust(1, n);
    auto pick = [&](int hi) { return std::uniform_int_distribution<int>(0, hi)(gen); };
    Sampled out;
    switch (op) {
    case Op::relocate: {
        const int c = cust(gen);
        const int r = pick(s.route_count());  // route_count() opens a new route
        int size = r < s.route_count() ? static_cast<int>(s.route(r).size()) : 0;
        if (r == s.route_of(c)) {
            size -= 1;
        }
        const InsertPosition target{r, pick(std::max(size, 0))};
        out.delta = delta_relocate(s, w, c, target);
        if (out.delta) {
            after.relocate(c, target);
            out.applied = true;
        }
        break;
    }
    case Op::swap: {
        const int a = cust(gen);
        const int b = cust(gen);
        out.delta = delta_swap(s, w, a, b);
        if (out.delta) {
            after.swap(a, b);
            out.applied = true;
        }
        break;
    }
    case Op::two_opt: {
        const int r = pick(s.route_count() - 1);
        const int size = static_cast<int>(s.route(r).size());
        int i = pick(size - 1);
        int j = pick(size - 1);
        if (i > j) {
            std::swap(i, j);
        }
        out.delta = delta_two_opt(s, w, r, i, j);
        if (out.delta) {
            after.two_opt(r, i, j);
            out.applied = true;
        }
        break;
    }
    case Op::two_opt_star: {
        if (s.route_count() < 2) {
            break;
        }
        const int ra = pick(s.route_count() - 1);
        int rb = pick(s.route_count() - 2);
        if (rb >= ra) {
            ++rb;
        }
        const int ca = pick(static_cast<int>(s.route(ra).size()));
        const int cb = pick(static_cast<int>(s.route(rb).size()));
        out.delta = delta_two_opt_star(s, w, ra, ca, rb, cb);
        if (out.delta) {
            after.two_opt_star(ra, ca, rb, cb);
            out.applied = true;
        }
        break;
    }
    }
    return out;
}

}  // namespace sampler
