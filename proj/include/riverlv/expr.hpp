#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace riverlv {

// Small arithmetic expression in x and y, used for r(x), K(x) and initial data.
// Grammar: numbers, pi, x, y, + - * /, unary minus, sin(...), cos(...), parentheses.
class Expr {
public:
    Expr();  // the constant 0
    static Expr parse(std::string_view text);
    static Expr constant(double value);

    double operator()(double x, double y = 0.0) const;

    const std::string& source() const { return source_; }
    bool is_constant() const;
    // Meaningful only when is_constant().
    double constant_value() const { return (*this)(0.0, 0.0); }

    struct Node {
        enum class Kind { number, var_x, var_y, add, sub, mul, div, neg, sin, cos };
        Kind kind;
        double value = 0.0;
        int lhs = -1;
        int rhs = -1;
    };

private:
    std::string source_;
    std::vector<Node> nodes_;
    int root_ = -1;

    double eval(int node, double x, double y) const;
};

}  // namespace riverlv
