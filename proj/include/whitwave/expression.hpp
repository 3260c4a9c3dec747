#pragma once

#include <memory>
#include <string>

namespace whitwave {

namespace detail { struct ExprNode; }

/// A compiled scalar expression in one variable, e.g. "sqrt(tanh(k)/k)".
///
/// Grammar: numbers, the bound variable, + - * / ^ (right associative),
/// unary minus, parentheses, constant `pi`, and the functions
/// sqrt exp log sin cos tan sinh cosh tanh abs.
/// Parse errors throw InputError with the offending position.
class Expression {
public:
    Expression(const std::string& text, const std::string& variable);

    double operator()(double value) const;
    const std::string& text() const { return text_; }

private:
    std::string text_;
    std::shared_ptr<const detail::ExprNode> root_;
};

} // namespace whitwave
