#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace displace {

/**
 * Immutable scalar expression over a fixed set of named variables.
 *
 * Grammar: decimal literals, the constants `pi` and `e`, declared variables,
 * binary `+ - * / ^`, unary `-`, the functions `exp ln sin cos sqrt abs`
 * (one argument) and `min max` (two arguments), and parentheses.
 * `^` binds tighter than unary minus, which binds tighter than `* /`;
 * `^` is right-associative, everything else left-associative.
 *
 * Copies share the tree. Evaluation never returns NaN: every NaN-producing
 * operation raises DomainError naming the offending sub-expression.
 */
class Expr {
public:
    struct Node;
    using Bindings = std::map<std::string, double, std::less<>>;

    Expr() = default;

    /// Values are read in the order of variables().
    double eval(std::span<const double> values) const;
    double eval(const Bindings& bindings) const;

    const std::vector<std::string>& variables() const noexcept { return variables_; }
    /// Variables that actually occur in the tree, in declaration order.
    std::vector<std::string> free_variables() const;
    bool uses(std::string_view variable) const;
    const std::string& source() const noexcept { return source_; }
    bool empty() const noexcept { return root_ == nullptr; }

    /// Fully parenthesised text that reparses to a structurally equal tree.
    std::string to_string() const;
    /// As to_string(), with variables renamed through `rename`.
    std::string to_string(const std::map<std::string, std::string>& rename) const;

    /// Structural equality of the trees (variables compared by name).
    bool same_tree(const Expr& other) const;

    friend Expr parse(std::string_view source, std::vector<std::string> allowed_vars);

private:
    std::shared_ptr<const Node> root_;
    std::vector<std::string> variables_;
    std::vector<bool> used_;
    std::string source_;
};

/// Throws ParseError on syntax errors, unknown identifiers, or wrong arity.
Expr parse(std::string_view source, std::vector<std::string> allowed_vars);

} // namespace displace
