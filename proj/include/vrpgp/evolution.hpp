#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "vrpgp/expr_tree.hpp"
#include "vrpgp/rng.hpp"

namespace vrpgp::gp {

inline constexpr int kTournamentSize = 3;
inline constexpr int kMutationSubtreeDepth = 4;

struct Individual {
    ExprTree tree;
    std::optional<double> fitness;  // lower is better
};

using Population = std::vector<Individual>;

// "full": every leaf at exactly `depth`.
ExprTree full_tree(Rng &rng, int depth);
// "grow": functions forced above min_depth, leaves forced at max_depth, otherwise
// a leaf with probability |T| / (|T| + |F|).
ExprTree grow_tree(Rng &rng, int min_depth, int max_depth);

// Slot i gets depth depth_min + (i / 2) mod levels; even slots use full, odd slots grow.
Population ramped_half_and_half(int pop_size, int depth_min, int depth_max, Rng &rng);

// Swaps uniformly chosen subtrees. A child deeper than max_depth is replaced by
// its own parent.
std::pair<ExprTree, ExprTree> subtree_crossover(const ExprTree &a, const ExprTree &b, Rng &rng, int max_depth = kMaxDepth);

// Replaces a uniformly chosen subtree by a grown tree of depth <= 4; falls back to
// the parent when the result would exceed max_depth.
ExprTree subtree_mutation(const ExprTree &a, Rng &rng, int max_depth = kMaxDepth);

// Winner among explicitly drawn indices: lowest fitness, ties by lower index.
std::size_t tournament_winner(std::span<const Individual> pop, std::span<const std::size_t> draws);
// Draws `size` indices uniformly with replacement. Throws ContractError on an
// empty population or unevaluated member.
std::size_t tournament_select(std::span<const Individual> pop, Rng &rng, int size = kTournamentSize);

struct VariationRates {
    double crossover = 0.8;
    double mutation = 0.15;
    double elite = 0.05;  // elitism fraction, and the per-slot reproduction probability

    void check() const;  // ConfigError unless the rates are in [0,1] and sum to 1 within 1e-9
};

enum class Variation { crossover, mutation, reproduction };

Variation choose_variation(const VariationRates &rates, Rng &rng);
std::size_t elite_count(std::size_t pop_size, double elite_rate);

// Elites (best ceil(elite * N), ties by index) copied with their fitness, the rest
// filled slot by slot; crossover keeps only its first child.
Population next_generation(const Population &pop, const VariationRates &rates, Rng &rng,
                           int tournament_size = kTournamentSize, int max_depth = kMaxDepth);

}  // namespace vrpgp::gp
