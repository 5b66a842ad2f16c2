#include "vrpgp/expr_tree.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>

#include "vrpgp/errors.hpp"

namespace vrpgp::gp {

std::string_view op_name(Op op) {
    switch (op) {
    case Op::add: return "add";
    case Op::sub: return "sub";
    case Op::mul: return "mul";
    case Op::pdiv: return "pdiv";
    }
    return "?";
}

ExprTree::ExprTree(std::vector<Node> prefix) : nodes_(std::move(prefix)) {
    // A prefix sequence is a single tree iff the open-slot count reaches zero
    // exactly at the last node.
    long open = 1;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (open <= 0) {
            throw ContractError("ExprTree: trailing nodes after a complete tree");
        }
        const auto &n = nodes_[k];
        if (n.is_function ? n.id >= kFunctionCount : n.id >= kTerminalCount) {
            throw ContractError("ExprTree: node id out of range");
        }
        open += n.is_function ? 1 : -1;
    }
    if (nodes_.empty() || open != 0) {
        throw ContractError("ExprTree: incomplete prefix sequence");
    }
}

ExprTree ExprTree::make(Op op, const ExprTree &lhs, const ExprTree &rhs) {
    std::vector<Node> nodes;
    nodes.reserve(1 + lhs.size() + rhs.size());
    nodes.push_back(Node::function(op));
    nodes.insert(nodes.end(), lhs.nodes_.begin(), lhs.nodes_.end());
    nodes.insert(nodes.end(), rhs.nodes_.begin(), rhs.nodes_.end());
    return ExprTree(std::move(nodes));
}

std::size_t ExprTree::subtree_end(std::size_t root) const {
    long open = 1;
    std::size_t k = root;
    while (open > 0) {
        open += nodes_[k].is_function ? 1 : -1;
        ++k;
    }
    return k;
}

int ExprTree::subtree_depth(std::size_t root) const {
    // Depth of each pending slot on a stack walk.
    int best = 0;
    std::vector<int> pending{0};
    for (std::size_t k = root; !pending.empty(); ++k) {
        const int d = pending.back();
        pending.pop_back();
        best = std::max(best, d);
        if (nodes_[k].is_function) {
            pending.push_back(d + 1);
            pending.push_back(d + 1);
        }
    }
    return best;
}

int ExprTree::depth() const { return subtree_depth(0); }

ExprTree ExprTree::subtree(std::size_t root) const {
    return ExprTree(std::vector<Node>(nodes_.begin() + static_cast<std::ptrdiff_t>(root),
                                      nodes_.begin() + static_cast<std::ptrdiff_t>(subtree_end(root))));
}

ExprTree ExprTree::with_subtree(std::size_t root, const ExprTree &replacement) const {
    const auto end = subtree_end(root);
    std::vector<Node> out;
    out.reserve(nodes_.size() - (end - root) + replacement.size());
    out.insert(out.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(root));
    out.insert(out.end(), replacement.nodes_.begin(), replacement.nodes_.end());
    out.insert(out.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
    return ExprTree(std::move(out));
}

namespace {

void print_prefix(std::span<const Node> nodes, std::size_t &k, std::string &out) {
    const Node n = nodes[k++];
    if (!n.is_function) {
        out += 'T';
        out += std::to_string(n.id);
        return;
    }
    out += '(';
    out += op_name(n.op());
    out += ' ';
    print_prefix(nodes, k, out);
    out += ' ';
    print_prefix(nodes, k, out);
    out += ')';
}

}  // namespace

std::string ExprTree::to_string() const {
    std::string out;
    std::size_t k = 0;
    print_prefix(nodes_, k, out);
    return out;
}

namespace {

class SexprParser {
public:
    explicit SexprParser(std::string_view text) : text_(text) { }

    std::vector<Node> parse_all() {
        std::vector<Node> out;
        parse(out, 0);
        skip_ws();
        if (pos_ != text_.size()) {
            fail("unexpected trailing text");
        }
        return out;
    }

private:
    [[noreturn]] void fail(const std::string &what) const {
        throw ParseError("tree", 1, "column " + std::to_string(pos_ + 1) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    std::string_view token() {
        skip_ws();
        const auto start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
               text_[pos_] != ')') {
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }

    void parse(std::vector<Node> &out, int nesting) {
        if (nesting > 64) {
            fail("nesting too deep");
        }
        skip_ws();
        if (pos_ >= text_.size()) {
            fail("unexpected end of input");
        }
        if (text_[pos_] == '(') {
            ++pos_;
            const auto name = token();
            Op op{};
            if (name == "add") {
                op = Op::add;
            } else if (name == "sub") {
                op = Op::sub;
            } else if (name == "mul") {
                op = Op::mul;
            } else if (name == "pdiv") {
                op = Op::pdiv;
            } else {
                fail("unknown function '" + std::string(name) + "'");
            }
            out.push_back(Node::function(op));
            parse(out, nesting + 1);
            parse(out, nesting + 1);
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != ')') {
                fail("expected ')'");
            }
            ++pos_;
            return;
        }
        const auto tok = token();
        if (tok.size() < 2 || tok[0] != 'T') {
            fail("expected terminal, got '" + std::string(tok) + "'");
        }
        int id = 0;
        for (const char c : tok.substr(1)) {
            if (!std::isdigit(static_cast<unsigned char>(c))) {
                fail("bad terminal '" + std::string(tok) + "'");
            }
            id = id * 10 + (c - '0');
            if (id >= kTerminalCount) {
                fail("terminal out of range '" + std::string(tok) + "'");
            }
        }
        out.push_back(Node::terminal(id));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

double clamp(double v) {
    if (std::isnan(v)) {
        return 0.0;
    }
    return std::clamp(v, -kValueClamp, kValueClamp);
}

double eval_at(std::span<const Node> nodes, std::size_t &k, const EdgeFeatures &f) {
    const Node n = nodes[k++];
    if (!n.is_function) {
        return clamp(f[n.id]);
    }
    const double a = eval_at(nodes, k, f);
    const double b = eval_at(nodes, k, f);
    switch (n.op()) {
    case Op::add: return clamp(a + b);
    case Op::sub: return clamp(a - b);
    case Op::mul: return clamp(a * b);
    case Op::pdiv: return b == 0.0 ? 1.0 : clamp(a / b);
    }
    return 0.0;
}

}  // namespace

ExprTree ExprTree::parse(std::string_view text) { return ExprTree(SexprParser(text).parse_all()); }

double eval_tree(const ExprTree &tree, const EdgeFeatures &features) {
    std::size_t k = 0;
    return eval_at(tree.nodes(), k, features);
}

gls::UtilityFn as_utility(ExprTree tree) {
    auto shared = std::make_shared<const ExprTree>(std::move(tree));
    return [shared](const EdgeFeatures &f) { return eval_tree(*shared, f); };
}

}  // namespace vrpgp::gp
