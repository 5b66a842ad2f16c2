#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vrpgp/errors.hpp"
#include "vrpgp/evolution.hpp"
#include "vrpgp/expr_tree.hpp"
#include "vrpgp/features.hpp"
#include "vrpgp/gls.hpp"
#include "vrpgp/instance_io.hpp"

using namespace vrpgp;
using namespace vrpgp::gp;

namespace {

ExprTree T(int k) { return ExprTree::leaf(k); }
ExprTree add(const ExprTree &a, const ExprTree &b) { return ExprTree::make(Op::add, a, b); }
ExprTree mul(const ExprTree &a, const ExprTree &b) { return ExprTree::make(Op::mul, a, b); }
ExprTree pdiv(const ExprTree &a, const ExprTree &b) { return ExprTree::make(Op::pdiv, a, b); }
ExprTree sub(const ExprTree &a, const ExprTree &b) { return ExprTree::make(Op::sub, a, b); }

EdgeFeatures random_features(std::mt19937_64 &gen) {
    EdgeFeatures f{};
    std::uniform_real_distribution<double> len(0, 1500);
    std::uniform_int_distribution<int> small(0, 4);
    f[kEdgeLength] = std::round(len(gen));
    f[kPenaltyCount] = small(gen);
    f[kDepotDistI] = small(gen) == 0 ? 0 : std::round(len(gen));
    f[kDepotDistJ] = std::round(len(gen));
    f[kEdgeDemand] = small(gen) % 3;
    f[kRouteLoad] = small(gen) / 4.0;
    f[kRouteCost] = std::round(len(gen) * 5);
    f[kRouteLength] = small(gen) + 1;
    f[kMeanEdge] = len(gen) / 3;
    f[kScale] = 100 * (small(gen) + 1);
    return f;
}

// Independent recursive interpreter over the s-expression text.
double interpret(const std::string &s, std::size_t &pos, const EdgeFeatures &f) {
    while (s[pos] == ' ') {
        ++pos;
    }
    if (s[pos] == 'T') {
        ++pos;
        int k = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            k = k * 10 + (s[pos++] - '0');
        }
        return f[static_cast<std::size_t>(k)];
    }
    ++pos;  // '('
    const auto end = s.find(' ', pos);
    const auto op = s.substr(pos, end - pos);
    pos = end;
    const double a = interpret(s, pos, f);
    const double b = interpret(s, pos, f);
    while (s[pos] == ' ') {
        ++pos;
    }
    ++pos;  // ')'
    double v = 0;
    if (op == "add") {
        v = a + b;
    } else if (op == "sub") {
        v = a - b;
    } else if (op == "mul") {
        v = a * b;
    } else {
        v = b == 0 ? 1.0 : a / b;
    }
    if (std::isnan(v)) {
        v = 0;
    }
    return std::clamp(v, -kValueClamp, kValueClamp);
}

double interpret(const ExprTree &t, const EdgeFeatures &f) {
    const auto s = t.to_string();
    std::size_t pos = 0;
    return interpret(s, pos, f);
}

}  // namespace

TEST_CASE("eval_tree basics") {
    EdgeFeatures f{};
    f[kEdgeLength] = 7;
    CHECK(eval_tree(T(kEdgeLength), f) == 7.0);
    CHECK(eval_tree(pdiv(T(0), T(1)), f) == 1.0);  // PC = 0
    f[kEdgeLength] = 5;
    f[kPenaltyCount] = 2;
    f[kDepotDistI] = 3;
    CHECK(eval_tree(add(T(0), mul(T(1), T(2))), f) == 11.0);
    CHECK(eval_tree(sub(T(1), T(0)), f) == -3.0);
    CHECK(eval_tree(pdiv(T(0), T(1)), f) == 2.5);
    for (int k = 0; k < kTerminalCount; ++k) {
        EdgeFeatures g{};
        g[static_cast<std::size_t>(k)] = k * 1.5 + 0.25;
        CHECK(eval_tree(T(k), g) == k * 1.5 + 0.25);
    }
}

TEST_CASE("protected division returns 1 whenever the divisor evaluates to 0") {
    std::mt19937_64 gen(5);
    Rng rng(5);
    int zero_divisors = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto x = grow_tree(rng, 0, 4);
        // y = (sub a a) is exactly zero for any finite a
        const auto a = grow_tree(rng, 0, 3);
        const auto y = trial % 2 == 0 ? sub(a, a) : T(kPenaltyCount);
        auto f = random_features(gen);
        f[kPenaltyCount] = 0;
        if (eval_tree(y, f) == 0.0) {
            ++zero_divisors;
            CHECK(eval_tree(pdiv(x, y), f) == 1.0);
        }
    }
    CHECK(zero_divisors == 1000);
}

TEST_CASE("eval_tree is total and matches an independent interpreter") {
    std::mt19937_64 gen(99);
    Rng rng(99);
    for (int trial = 0; trial < 10000; ++trial) {
        const auto t = grow_tree(rng, 1, 8);
        const auto f = random_features(gen);
        const double v = eval_tree(t, f);
        REQUIRE(std::isfinite(v));
        CHECK(v == interpret(t, f));
    }
    // Overflow clamps.
    EdgeFeatures big{};
    big[0] = 1e200;
    CHECK(eval_tree(mul(T(0), T(0)), big) == kValueClamp);
    CHECK(eval_tree(sub(T(1), mul(T(0), T(0))), big) == -kValueClamp);
    CHECK(std::isfinite(eval_tree(sub(mul(T(0), T(0)), mul(T(0), T(0))), big)));
}

TEST_CASE("tree text round trip and validation") {
    const auto t = pdiv(add(T(0), T(2)), T(1));
    CHECK(t.to_string() == "(pdiv (add T0 T2) T1)");
    CHECK(ExprTree::parse("(pdiv (add T0 T2) T1)") == t);
    CHECK(ExprTree::parse("  T9 ") == T(9));
    CHECK(t.depth() == 2);
    CHECK(T(3).depth() == 0);
    CHECK_THROWS_AS(ExprTree::parse("(pdiv T0)"), ParseError);
    CHECK_THROWS_AS(ExprTree::parse("(pow T0 T1)"), ParseError);
    CHECK_THROWS_AS(ExprTree::parse("T10"), ParseError);
    CHECK_THROWS_AS(ExprTree::parse("(add T0 T1) T2"), ParseError);
    CHECK_THROWS_AS(ExprTree({Node::function(Op::add), Node::terminal(0)}), ContractError);
    Rng rng(3);
    for (int k = 0; k < 500; ++k) {
        const auto g = grow_tree(rng, 0, 6);
        CHECK(ExprTree::parse(g.to_string()) == g);
    }
}

TEST_CASE("extract_features") {
    const Instance inst{"f", {{0, 0}, {30, 40}, {60, 80}}, {0, 1, 1}, 10};
    const DistanceMatrix d(inst);
    const Solution single{{{1}, {2}}, 0};
    PenaltyMap pen;
    const auto f = extract_features(inst, d, single, pen, Edge{0, 1});
    CHECK(f[kPenaltyCount] == 0);
    CHECK(f[kRouteLoad] == doctest::Approx(0.1));
    CHECK(f[kRouteLength] == 1);
    CHECK(f[kScale] == 2);
    CHECK(f[kEdgeLength] == 50);
    CHECK(f[kDepotDistI] == 0);
    CHECK(f[kDepotDistJ] == 50);
    CHECK(f[kEdgeDemand] == 1);
    CHECK(f[kRouteCost] == 100);
    CHECK(f[kMeanEdge] == doctest::Approx((100.0 + 200.0) / 4));
    CHECK_THROWS_AS(extract_features(inst, d, single, pen, Edge{1, 2}), ContractError);

    pen.increment(0, 2);
    pen.increment(2, 0);
    CHECK(extract_features(inst, d, single, pen, Edge{0, 2})[kPenaltyCount] == 2);

    io::GeneratorConfig cfg;
    cfg.n = 40;
    cfg.seed = 2;
    const auto big = io::generate_instance(cfg);
    const DistanceMatrix db(big);
    const auto sol = gls::construct_initial(big, db);
    for (const auto &row : solution_edge_features(big, db, sol, PenaltyMap{})) {
        CHECK(row.features[kScale] == 40);
        CHECK(row.features[kPenaltyCount] == 0);
        for (const double v : row.features) {
            CHECK(std::isfinite(v));
        }
    }
}

TEST_CASE("ramped half-and-half") {
    Rng rng(1);
    const auto pop = ramped_half_and_half(100, 2, 6, rng);
    REQUIRE(pop.size() == 100);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const int level = 2 + static_cast<int>((i / 2) % 5);
        CHECK(pop[i].tree.depth() >= 2);
        CHECK(pop[i].tree.depth() <= level);
        if (i % 2 == 0) {
            CHECK(pop[i].tree.depth() == level);
            // full trees: 2^(d+1) - 1 nodes
            CHECK(pop[i].tree.size() == (std::size_t{1} << (level + 1)) - 1);
        }
        CHECK_FALSE(pop[i].fitness.has_value());
    }
    Rng rng2(1);
    const auto again = ramped_half_and_half(100, 2, 6, rng2);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        CHECK(again[i].tree == pop[i].tree);
    }
    Rng rng3(8);
    for (const auto &ind : ramped_half_and_half(10, 2, 2, rng3)) {
        CHECK(ind.tree.depth() == 2);
    }
}

TEST_CASE("subtree crossover") {
    Rng rng(4);
    const auto [c1, c2] = subtree_crossover(T(1), T(2), rng);
    CHECK(c1 == T(2));
    CHECK(c2 == T(1));

    Rng r(10);
    for (int k = 0; k < 2000; ++k) {
        const auto a = grow_tree(r, 0, 8);
        const auto b = grow_tree(r, 0, 8);
        const auto a_copy = a, b_copy = b;
        const auto [x, y] = subtree_crossover(a, b, r);
        CHECK(x.depth() <= kMaxDepth);
        CHECK(y.depth() <= kMaxDepth);
        CHECK(a == a_copy);
        CHECK(b == b_copy);
        // No child can exceed the cap here, so nothing is rejected and nodes are conserved.
        if (a.depth() + b.depth() <= kMaxDepth) {
            CHECK(x.size() + y.size() == a.size() + b.size());
        }
    }
}

TEST_CASE("subtree mutation") {
    Rng r(12);
    for (int k = 0; k < 2000; ++k) {
        const auto a = grow_tree(r, 0, 8);
        CHECK(subtree_mutation(a, r).depth() <= kMaxDepth);
    }
    Rng leaf_rng(21);
    const auto m = subtree_mutation(T(0), leaf_rng);
    Rng replay(21);
    replay.index(1);  // the only node
    CHECK(m == grow_tree(replay, 0, kMutationSubtreeDepth));
    CHECK(m.depth() <= kMutationSubtreeDepth);
}

// Recorded from the first implementation; any change to RNG consumption shows up here.
TEST_CASE("variation golden traces") {
    Rng init(2024);
    const auto a = full_tree(init, 3);
    const auto b = grow_tree(init, 1, 4);
    Rng rng(7);
    const auto [x, y] = subtree_crossover(a, b, rng);
    const auto m = subtree_mutation(a, rng);
    CHECK(a.to_string() == "(mul (sub (sub T4 T2) (sub T6 T5)) (mul (add T0 T6) (sub T2 T0)))");
    CHECK(b.to_string() == "(sub T2 (add (mul T1 T1) T9))");
    CHECK(x.to_string() == "T1");
    CHECK(y.to_string() == "(sub T2 (add (mul (mul (sub (sub T4 T2) (sub T6 T5)) (mul (add T0 T6) (sub T2 T0))) T1) T9))");
    CHECK(m.to_string() == "(mul (sub (sub (sub T9 (sub (mul T3 T2) T7)) T2) (sub T6 T5)) (mul (add T0 T6) (sub T2 T0)))");
}

TEST_CASE("tournament selection") {
    Population one{{T(0), -0.5}};
    Rng rng(1);
    CHECK(tournament_select(one, rng) == 0);

    Population pop;
    const double fit[] = {0.0, 0.0, -0.1, 0.0, 0.0, -0.3, -0.3};
    for (const double f : fit) {
        pop.push_back({T(0), f});
    }
    const std::size_t draws[] = {2, 5, 5};
    CHECK(tournament_winner(pop, draws) == 5);
    const std::size_t tie[] = {6, 5, 2};
    CHECK(tournament_winner(pop, tie) == 5);

    Population unevaluated{{T(0), std::nullopt}};
    CHECK_THROWS_AS(tournament_select(unevaluated, rng), ContractError);
    CHECK_THROWS_AS(tournament_select(Population{}, rng), ContractError);

    // P(best selected) = 1 - (1 - 1/N)^3.
    Population field;
    for (int i = 0; i < 10; ++i) {
        field.push_back({T(0), static_cast<double>(i)});
    }
    Rng draw(77);
    int hits = 0;
    for (int k = 0; k < 10000; ++k) {
        hits += tournament_select(field, draw) == 0;
    }
    const double expected = 1 - std::pow(0.9, 3);
    CHECK(std::abs(hits / 10000.0 - expected) <= 0.02);
}

TEST_CASE("variation choice frequencies and rates") {
    const VariationRates rates;
    Rng rng(5);
    int counts[3] = {0, 0, 0};
    for (int k = 0; k < 10000; ++k) {
        ++counts[static_cast<int>(choose_variation(rates, rng))];
    }
    CHECK(std::abs(counts[0] / 10000.0 - 0.80) <= 0.02);
    CHECK(std::abs(counts[1] / 10000.0 - 0.15) <= 0.02);
    CHECK(std::abs(counts[2] / 10000.0 - 0.05) <= 0.02);
    CHECK_THROWS_AS((VariationRates{0.8, 0.15, 0.1}.check()), ConfigError);
    CHECK_NOTHROW((VariationRates{0.8, 0.15, 0.05}.check()));
    CHECK(elite_count(100, 0.05) == 5);
    CHECK(elite_count(16, 0.05) == 1);
    CHECK(elite_count(20, 0.05) == 1);
}

TEST_CASE("next generation keeps elites and size") {
    Rng init(3);
    auto pop = ramped_half_and_half(100, 2, 6, init);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> fit(-0.3, 0.0);
    for (auto &ind : pop) {
        ind.fitness = fit(gen);
    }
    Rng rng(4);
    const auto next = next_generation(pop, VariationRates{}, rng);
    REQUIRE(next.size() == 100);
    std::vector<std::size_t> order(100);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return *pop[a].fitness < *pop[b].fitness; });
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(next[k].tree == pop[order[k]].tree);
        CHECK(next[k].fitness == pop[order[k]].fitness);
    }
    for (std::size_t k = 5; k < 100; ++k) {
        CHECK_FALSE(next[k].fitness.has_value());
    }
    pop[3].fitness.reset();
    CHECK_THROWS_AS(next_generation(pop, VariationRates{}, rng), ContractError);
    pop[3].fitness = 0;
    CHECK_THROWS_AS(next_generation(pop, VariationRates{0.5, 0.5, 0.5}, rng), ConfigError);
}

TEST_CASE("depth cap holds over 1000 generations of variation") {
    Rng rng(6);
    auto pop = ramped_half_and_half(20, 2, 6, rng);
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> fit(-1, 0);
    for (int g = 0; g < 1000; ++g) {
        for (auto &ind : pop) {
            if (!ind.fitness) {
                ind.fitness = fit(gen);
            }
            REQUIRE(ind.tree.depth() <= kMaxDepth);
        }
        pop = next_generation(pop, VariationRates{}, rng);
        REQUIRE(pop.size() == 20);
    }
}

TEST_CASE("as_utility wraps eval_tree") {
    const auto t = pdiv(T(0), add(T(1), T(1)));
    const auto u = as_utility(t);
    std::mt19937_64 gen(1);
    for (int k = 0; k < 100; ++k) {
        const auto f = random_features(gen);
        CHECK(u(f) == eval_tree(t, f));
    }
}
