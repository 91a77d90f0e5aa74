#ifndef RADSHOCK_EXPR_HPP
#define RADSHOCK_EXPR_HPP

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace radshock {

// Error thrown by the expression parser; `offset` is the 0-based position
// in the input text where parsing failed.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Expression tree over variables u (scalar) or u1..un.
// Supported: + - * /, '^' with integer exponent, exp/log/sin/cos/sqrt.
// abs and other non-C^2 constructs are rejected at parse time.
class Expr {
public:
    enum class Kind { Number, Var, Add, Sub, Mul, Div, Pow, Func };
    enum class Fn { Exp, Log, Sin, Cos, Sqrt };

    using Ptr = std::shared_ptr<const Expr>;

    static Ptr number(double v);
    static Ptr var(int index);  // 0-based component index
    static Ptr add(Ptr a, Ptr b);
    static Ptr sub(Ptr a, Ptr b);
    static Ptr mul(Ptr a, Ptr b);
    static Ptr div(Ptr a, Ptr b);
    static Ptr pow(Ptr base, long exponent);
    static Ptr call(Fn fn, Ptr arg);

    Kind kind() const { return kind_; }
    double value() const { return value_; }
    int var_index() const { return var_index_; }
    long exponent() const { return exponent_; }
    Fn fn() const { return fn_; }
    const Ptr& left() const { return a_; }
    const Ptr& right() const { return b_; }

    double eval(std::span<const double> u) const;

    // Exact symbolic partial derivative with respect to component `index`.
    Ptr derivative(int index) const;

    std::string to_string() const;

private:
    Expr() = default;

    Kind kind_ = Kind::Number;
    double value_ = 0.0;
    int var_index_ = 0;
    long exponent_ = 0;
    Fn fn_ = Fn::Exp;
    Ptr a_, b_;
};

// Parse `text` as an expression in `dimension` variables (u for scalar,
// u1..un otherwise). Throws ParseError on malformed input or unknown
// identifiers.
Expr::Ptr parse_expression(const std::string& text, int dimension);

}  // namespace radshock

#endif
