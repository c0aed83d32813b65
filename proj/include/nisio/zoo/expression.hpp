#pragma once

#include <memory>
#include <string>

namespace nisio {

/// Scalar expression in one variable x.
///
/// Grammar: numbers, x, pi, + - * / ^ (right associative), unary minus,
/// parentheses and the functions sin cos tan exp log sqrt abs tanh.
class Expression {
public:
    /// Throws ConfigError on a syntax error.
    explicit Expression(std::string source);

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] const std::string& source() const { return source_; }

    struct Node;

private:
    std::string source_;
    std::shared_ptr<const Node> root_;
};

}  // namespace nisio
