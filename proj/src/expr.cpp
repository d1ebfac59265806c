#include "riverlv/expr.hpp"

#include "riverlv/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace riverlv {

namespace {

using Kind = Expr::Node::Kind;

class Parser {
public:
    Parser(std::string_view text, std::vector<Expr::Node>& nodes) : text_(text), nodes_(nodes) {}

    int parse_all() {
        int root = parse_sum();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected character");
        return root;
    }

private:
    std::string_view text_;
    std::vector<Expr::Node>& nodes_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("expression '" + std::string(text_) + "': " + why + " at position " +
                          std::to_string(pos_));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int push(Kind kind, int lhs = -1, int rhs = -1, double value = 0.0) {
        nodes_.push_back({kind, value, lhs, rhs});
        return static_cast<int>(nodes_.size()) - 1;
    }

    int parse_sum() {
        int lhs = parse_product();
        for (;;) {
            if (accept('+'))
                lhs = push(Kind::add, lhs, parse_product());
            else if (accept('-'))
                lhs = push(Kind::sub, lhs, parse_product());
            else
                return lhs;
        }
    }

    int parse_product() {
        int lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = push(Kind::mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = push(Kind::div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    int parse_unary() {
        if (accept('-')) return push(Kind::neg, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_primary();
    }

    int parse_primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            int inner = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            std::string_view word = text_.substr(start, pos_ - start);
            if (word == "x") return push(Kind::var_x);
            if (word == "y") return push(Kind::var_y);
            if (word == "pi") return push(Kind::number, -1, -1, std::numbers::pi);
            if (word == "sin" || word == "cos") {
                if (!accept('(')) fail("expected '(' after " + std::string(word));
                int arg = parse_sum();
                if (!accept(')')) fail("expected ')'");
                return push(word == "sin" ? Kind::sin : Kind::cos, arg);
            }
            pos_ = start;
            fail("unknown identifier '" + std::string(word) + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    int parse_number() {
        double value = 0.0;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc()) fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - first);
        return push(Kind::number, -1, -1, value);
    }
};

}  // namespace

Expr::Expr() : source_("0"), nodes_{{Kind::number, 0.0, -1, -1}}, root_(0) {}

Expr Expr::parse(std::string_view text) {
    Expr e;
    e.source_ = std::string(text);
    e.nodes_.clear();
    Parser parser(text, e.nodes_);
    e.root_ = parser.parse_all();
    return e;
}

Expr Expr::constant(double value) {
    Expr e;
    e.nodes_[0].value = value;
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    e.source_.assign(buf, res.ptr);
    return e;
}

bool Expr::is_constant() const {
    for (const auto& n : nodes_)
        if (n.kind == Kind::var_x || n.kind == Kind::var_y) return false;
    return true;
}

double Expr::operator()(double x, double y) const { return eval(root_, x, y); }

double Expr::eval(int i, double x, double y) const {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    switch (n.kind) {
        case Kind::number: return n.value;
        case Kind::var_x: return x;
        case Kind::var_y: return y;
        case Kind::add: return eval(n.lhs, x, y) + eval(n.rhs, x, y);
        case Kind::sub: return eval(n.lhs, x, y) - eval(n.rhs, x, y);
        case Kind::mul: return eval(n.lhs, x, y) * eval(n.rhs, x, y);
        case Kind::div: return eval(n.lhs, x, y) / eval(n.rhs, x, y);
        case Kind::neg: return -eval(n.lhs, x, y);
        case Kind::sin: return std::sin(eval(n.lhs, x, y));
        case Kind::cos: return std::cos(eval(n.lhs, x, y));
    }
    return 0.0;
}

}  // namespace riverlv
