#include "vrpgp/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vrpgp/errors.hpp"

namespace vrpgp::gp {

namespace {

void grow_into(std::vector<Node> &out, Rng &rng, int depth, int min_depth, int max_depth, bool full) {
    bool leaf = false;
    if (depth >= max_depth) {
        leaf = true;
    } else if (full || depth < min_depth) {
        leaf = false;
    } else {
        constexpr double leaf_p = static_cast<double>(kTerminalCount) / (kTerminalCount + kFunctionCount);
        leaf = rng.uniform01() < leaf_p;
    }
    if (leaf) {
        out.push_back(Node::terminal(static_cast<int>(rng.index(kTerminalCount))));
        return;
    }
    out.push_back(Node::function(static_cast<Op>(rng.index(kFunctionCount))));
    grow_into(out, rng, depth + 1, min_depth, max_depth, full);
    grow_into(out, rng, depth + 1, min_depth, max_depth, full);
}

}  // namespace

ExprTree full_tree(Rng &rng, int depth) {
    if (depth < 0) {
        throw ContractError("full_tree: negative depth");
    }
    std::vector<Node> nodes;
    grow_into(nodes, rng, 0, depth, depth, true);
    return ExprTree(std::move(nodes));
}

ExprTree grow_tree(Rng &rng, int min_depth, int max_depth) {
    if (min_depth < 0 || max_depth < min_depth) {
        throw ContractError("grow_tree: need 0 <= min_depth <= max_depth");
    }
    std::vector<Node> nodes;
    grow_into(nodes, rng, 0, min_depth, max_depth, false);
    return ExprTree(std::move(nodes));
}

Population ramped_half_and_half(int pop_size, int depth_min, int depth_max, Rng &rng) {
    if (depth_min < 1 || depth_max < depth_min) {
        throw ContractError("ramped_half_and_half: need 1 <= depth_min <= depth_max");
    }
    if (pop_size < 0) {
        throw ContractError("ramped_half_and_half: negative population size");
    }
    const int levels = depth_max - depth_min + 1;
    Population pop;
    pop.reserve(static_cast<std::size_t>(pop_size));
    for (int i = 0; i < pop_size; ++i) {
        const int depth = depth_min + (i / 2) % levels;
        pop.push_back({i % 2 == 0 ? full_tree(rng, depth) : grow_tree(rng, depth_min, depth), std::nullopt});
    }
    return pop;
}

std::pair<ExprTree, ExprTree> subtree_crossover(const ExprTree &a, const ExprTree &b, Rng &rng, int max_depth) {
    const auto ia = rng.index(a.size());
    const auto ib = rng.index(b.size());
    ExprTree c1 = a.with_subtree(ia, b.subtree(ib));
    ExprTree c2 = b.with_subtree(ib, a.subtree(ia));
    if (c1.depth() > max_depth) {
        c1 = a;
    }
    if (c2.depth() > max_depth) {
        c2 = b;
    }
    return {std::move(c1), std::move(c2)};
}

ExprTree subtree_mutation(const ExprTree &a, Rng &rng, int max_depth) {
    const auto at = rng.index(a.size());
    const ExprTree grown = grow_tree(rng, 0, kMutationSubtreeDepth);
    ExprTree child = a.with_subtree(at, grown);
    if (child.depth() > max_depth) {
        return a;
    }
    return child;
}

std::size_t tournament_winner(std::span<const Individual> pop, std::span<const std::size_t> draws) {
    if (draws.empty()) {
        throw ContractError("tournament_winner: no draws");
    }
    std::size_t best = draws.front();
    for (const auto idx : draws) {
        if (idx >= pop.size() || !pop[idx].fitness) {
            throw ContractError("tournament: unevaluated or out-of-range individual");
        }
        const double f = *pop[idx].fitness;
        const double fb = *pop[best].fitness;
        if (f < fb || (f == fb && idx < best)) {
            best = idx;
        }
    }
    return best;
}

std::size_t tournament_select(std::span<const Individual> pop, Rng &rng, int size) {
    if (pop.empty() || size < 1) {
        throw ContractError("tournament_select: empty population or bad tournament size");
    }
    std::vector<std::size_t> draws(static_cast<std::size_t>(size));
    for (auto &d : draws) {
        d = rng.index(pop.size());
    }
    return tournament_winner(pop, draws);
}

void VariationRates::check() const {
    for (const double r : {crossover, mutation, elite}) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw ConfigError("variation rates must lie in [0, 1]");
        }
    }
    if (std::abs(crossover + mutation + elite - 1.0) > 1e-9) {
        throw ConfigError("crossover + mutation + elite rates must sum to 1");
    }
}

Variation choose_variation(const VariationRates &rates, Rng &rng) {
    const double u = rng.uniform01();
    if (u < rates.crossover) {
        return Variation::crossover;
    }
    if (u < rates.crossover + rates.mutation) {
        return Variation::mutation;
    }
    return Variation::reproduction;
}

std::size_t elite_count(std::size_t pop_size, double elite_rate) {
    const auto e = static_cast<std::size_t>(std::ceil(elite_rate * static_cast<double>(pop_size) - 1e-9));
    return std::min(e, pop_size);
}

Population next_generation(const Population &pop, const VariationRates &rates, Rng &rng, int tournament_size, int max_depth) {
    rates.check();
    for (const auto &ind : pop) {
        if (!ind.fitness) {
            throw ContractError("next_generation: population has unevaluated members");
        }
    }
    const std::size_t n = pop.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return *pop[a].fitness < *pop[b].fitness; });

    Population next;
    next.reserve(n);
    const auto elites = elite_count(n, rates.elite);
    for (std::size_t k = 0; k < elites; ++k) {
        next.push_back(pop[order[k]]);
    }
    while (next.size() < n) {
        switch (choose_variation(rates, rng)) {
        case Variation::crossover: {
            const auto p1 = tournament_select(pop, rng, tournament_size);
            const auto p2 = tournament_select(pop, rng, tournament_size);
            next.push_back({subtree_crossover(pop[p1].tree, pop[p2].tree, rng, max_depth).first, std::nullopt});
            break;
        }
        case Variation::mutation: {
            const auto p = tournament_select(pop, rng, tournament_size);
            next.push_back({subtree_mutation(pop[p].tree, rng, max_depth), std::nullopt});
            break;
        }
        case Variation::reproduction: {
            const auto p = tournament_select(pop, rng, tournament_size);
            next.push_back({pop[p].tree, std::nullopt});
            break;
        }
        }
    }
    return next;
}

}  // namespace vrpgp::gp
