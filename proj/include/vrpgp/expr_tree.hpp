#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vrpgp/features.hpp"
#include "vrpgp/gls.hpp"

namespace vrpgp::gp {

enum class Op : std::uint8_t { add, sub, mul, pdiv };

inline constexpr int kFunctionCount = 4;
inline constexpr int kMaxDepth = 8;
inline constexpr double kValueClamp = 1e300;

std::string_view op_name(Op op);

// One prefix-order node: either a binary function or a terminal leaf.
struct Node {
    bool is_function = false;
    std::uint8_t id = 0;  // Op for functions, terminal index for leaves

    static Node function(Op op) { return {true, static_cast<std::uint8_t>(op)}; }
    static Node terminal(int t) { return {false, static_cast<std::uint8_t>(t)}; }
    Op op() const { return static_cast<Op>(id); }

    friend bool operator==(const Node &, const Node &) = default;
};

// Binary expression tree stored in prefix order, so every subtree is a
// contiguous node range. Depth counts edges: a lone leaf has depth 0.
class ExprTree {
public:
    ExprTree() : nodes_{Node::terminal(0)} { }
    explicit ExprTree(std::vector<Node> prefix);  // throws ContractError if not a well-formed tree

    static ExprTree leaf(int terminal) { return ExprTree({Node::terminal(terminal)}); }
    static ExprTree make(Op op, const ExprTree &lhs, const ExprTree &rhs);

    std::span<const Node> nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    int depth() const;

    // One past the last node of the subtree rooted at `root`.
    std::size_t subtree_end(std::size_t root) const;
    int subtree_depth(std::size_t root) const;

    // Copy with the subtree at `root` replaced by `replacement`.
    ExprTree with_subtree(std::size_t root, const ExprTree &replacement) const;
    ExprTree subtree(std::size_t root) const;

    // Prefix s-expression: "(pdiv (add T0 T2) T1)", a leaf is "T3".
    std::string to_string() const;
    static ExprTree parse(std::string_view text);  // throws ParseError

    friend bool operator==(const ExprTree &, const ExprTree &) = default;

private:
    std::vector<Node> nodes_;
};

// Protected arithmetic: pdiv(a, 0) = 1; every intermediate clamped to +-1e300.
double eval_tree(const ExprTree &tree, const EdgeFeatures &features);

gls::UtilityFn as_utility(ExprTree tree);

}  // namespace vrpgp::gp
