#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "heatctrl/errors.hpp"

namespace heatctrl::expr {

/// Syntax error with the byte offset it occurred at and what was expected.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t offset, std::string expected)
        : Error(msg + " at offset " + std::to_string(offset) +
                (expected.empty() ? "" : " (expected " + expected + ")")),
          offset(offset), expected(std::move(expected)) {}
    std::size_t offset;
    std::string expected;
};

/// Evaluation failure (division by zero, ln of a nonpositive value, ...)
/// tagged with the byte offset of the offending node in the source text.
class EvalError : public Error {
public:
    EvalError(const std::string& msg, std::size_t offset)
        : Error(msg + " (node at offset " + std::to_string(offset) + ")"),
          offset(offset) {}
    std::size_t offset;
};

/// Expression in one variable x: constants, + - * / ^ (right-associative,
/// unary minus binds tighter than a ^ base), and the functions
/// exp, ln, cosh, sinh, tanh, sqrt, abs, sgn.
class Ast {
public:
    static Ast parse(std::string_view src);

    double eval(double x) const;

    /// Canonical text form; parse(pretty()) reproduces the same tree.
    std::string pretty() const;

    enum class Kind : std::uint8_t { Number, Variable, Unary, Binary, Call };
    enum class Func : std::uint8_t { Exp, Ln, Cosh, Sinh, Tanh, Sqrt, Abs, Sgn };

    struct Node {
        Kind kind;
        char op = 0;     // binary: + - * / ^ ; unary: -
        Func fn = Func::Exp;
        double number = 0.0;
        std::int32_t lhs = -1;
        std::int32_t rhs = -1;
        std::uint32_t pos = 0;   // byte offset in the source
    };

    const std::vector<Node>& nodes() const { return nodes_; }

private:
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;

    double eval_node(std::int32_t idx, double x) const;
    void print_node(std::int32_t idx, int min_prec, std::string& out) const;
    friend class Parser;
};

} // namespace heatctrl::expr
