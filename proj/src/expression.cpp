#include "whitwave/expression.hpp"

#include "whitwave/errors.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

namespace whitwave {
namespace detail {

enum class Op { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };

using UnaryFn = double (*)(double);

struct ExprNode {
    Op op = Op::Number;
    double number = 0.0;
    UnaryFn fn = nullptr;
    std::shared_ptr<const ExprNode> lhs;
    std::shared_ptr<const ExprNode> rhs;

    double eval(double x) const {
        switch (op) {
        case Op::Number: return number;
        case Op::Variable: return x;
        case Op::Neg: return -lhs->eval(x);
        case Op::Add: return lhs->eval(x) + rhs->eval(x);
        case Op::Sub: return lhs->eval(x) - rhs->eval(x);
        case Op::Mul: return lhs->eval(x) * rhs->eval(x);
        case Op::Div: return lhs->eval(x) / rhs->eval(x);
        case Op::Pow: return std::pow(lhs->eval(x), rhs->eval(x));
        case Op::Call: return fn(lhs->eval(x));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

struct FunctionEntry {
    const char* name;
    UnaryFn fn;
};

const FunctionEntry kFunctions[] = {
    {"sqrt", [](double v) { return std::sqrt(v); }},
    {"exp", [](double v) { return std::exp(v); }},
    {"log", [](double v) { return std::log(v); }},
    {"sin", [](double v) { return std::sin(v); }},
    {"cos", [](double v) { return std::cos(v); }},
    {"tan", [](double v) { return std::tan(v); }},
    {"sinh", [](double v) { return std::sinh(v); }},
    {"cosh", [](double v) { return std::cosh(v); }},
    {"tanh", [](double v) { return std::tanh(v); }},
    {"abs", [](double v) { return std::fabs(v); }},
};

// Recursive descent:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
class Parser {
public:
    Parser(const std::string& text, const std::string& variable)
        : text_(text), variable_(variable) {}

    NodePtr parse() {
        NodePtr root = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return root;
    }

private:
    const std::string& text_;
    const std::string& variable_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("expression '" + text_ + "': " + what + " at position " +
                         std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Op::Add, lhs, term());
            else if (accept('-')) lhs = make(Op::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Op::Mul, lhs, unary());
            else if (accept('/')) lhs = make(Op::Div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Op::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (accept('^')) return make(Op::Pow, base, unary());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        if (accept('(')) {
            NodePtr inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double value = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        auto n = std::make_shared<ExprNode>();
        n->op = Op::Number;
        n->number = value;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name = text_.substr(start, pos_ - start);
        if (name == variable_) return make(Op::Variable);
        if (name == "pi") {
            auto n = std::make_shared<ExprNode>();
            n->number = std::numbers::pi;
            return n;
        }
        for (const auto& entry : kFunctions) {
            if (name == entry.name) {
                if (!accept('(')) fail("expected '(' after " + name);
                NodePtr arg = expr();
                if (!accept(')')) fail("expected ')'");
                auto n = std::make_shared<ExprNode>();
                n->op = Op::Call;
                n->fn = entry.fn;
                n->lhs = std::move(arg);
                return n;
            }
        }
        pos_ = start;
        fail("unknown identifier '" + name + "'");
    }
};

} // namespace
} // namespace detail

Expression::Expression(const std::string& text, const std::string& variable)
    : text_(text), root_(detail::Parser(text, variable).parse()) {}

double Expression::operator()(double value) const { return root_->eval(value); }

} // namespace whitwave
