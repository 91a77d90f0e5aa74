#include "radshock/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace radshock {

namespace {

bool is_const(const Expr::Ptr& e, double v) {
    return e->kind() == Expr::Kind::Number && e->value() == v;
}

}  // namespace

Expr::Ptr Expr::number(double v) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::Number;
    e->value_ = v;
    return e;
}

Expr::Ptr Expr::var(int index) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::Var;
    e->var_index_ = index;
    return e;
}

Expr::Ptr Expr::add(Ptr a, Ptr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (a->kind() == Kind::Number && b->kind() == Kind::Number)
        return number(a->value() + b->value());
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::Add;
    e->a_ = std::move(a);
    e->b_ = std::move(b);
    return e;
}

Expr::Ptr Expr::sub(Ptr a, Ptr b) {
    if (is_const(b, 0.0)) return a;
    if (a->kind() == Kind::Number && b->kind() == Kind::Number)
        return number(a->value() - b->value());
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::Sub;
    e->a_ = std::move(a);
    e->b_ = std::move(b);
    return e;
}

Expr::Ptr Expr::mul(Ptr a, Ptr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return number(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (a->kind() == Kind::Number && b->kind() == Kind::Number)
        return number(a->value() * b->value());
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::Mul;
    e->a_ = std::move(a);
    e->b_ = std::move(b);
    return e;
}

Expr::Ptr Expr::div(Ptr a, Ptr b) {
    if (is_const(a, 0.0)) return number(0.0);
    if (is_const(b, 1.0)) return a;
    if (a->kind() == Kind::Number && b->kind() == Kind::Number && b->value() != 0.0)
        return number(a->value() / b->value());
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::Div;
    e->a_ = std::move(a);
    e->b_ = std::move(b);
    return e;
}

Expr::Ptr Expr::pow(Ptr base, long exponent) {
    if (exponent == 0) return number(1.0);
    if (exponent == 1) return base;
    if (base->kind() == Kind::Number)
        return number(std::pow(base->value(), static_cast<double>(exponent)));
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::Pow;
    e->a_ = std::move(base);
    e->exponent_ = exponent;
    return e;
}

Expr::Ptr Expr::call(Fn fn, Ptr arg) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = Kind::Func;
    e->fn_ = fn;
    e->a_ = std::move(arg);
    return e;
}

double Expr::eval(std::span<const double> u) const {
    switch (kind_) {
        case Kind::Number: return value_;
        case Kind::Var:
            if (var_index_ >= static_cast<int>(u.size()))
                throw EvalError("state vector too short for expression");
            return u[var_index_];
        case Kind::Add: return a_->eval(u) + b_->eval(u);
        case Kind::Sub: return a_->eval(u) - b_->eval(u);
        case Kind::Mul: return a_->eval(u) * b_->eval(u);
        case Kind::Div: return a_->eval(u) / b_->eval(u);
        case Kind::Pow: {
            double base = a_->eval(u);
            return std::pow(base, static_cast<double>(exponent_));
        }
        case Kind::Func: {
            double x = a_->eval(u);
            switch (fn_) {
                case Fn::Exp: return std::exp(x);
                case Fn::Log: return std::log(x);
                case Fn::Sin: return std::sin(x);
                case Fn::Cos: return std::cos(x);
                case Fn::Sqrt: return std::sqrt(x);
            }
        }
    }
    throw EvalError("corrupt expression node");
}

Expr::Ptr Expr::derivative(int index) const {
    switch (kind_) {
        case Kind::Number: return number(0.0);
        case Kind::Var: return number(var_index_ == index ? 1.0 : 0.0);
        case Kind::Add: return add(a_->derivative(index), b_->derivative(index));
        case Kind::Sub: return sub(a_->derivative(index), b_->derivative(index));
        case Kind::Mul:
            return add(mul(a_->derivative(index), b_), mul(a_, b_->derivative(index)));
        case Kind::Div:
            // (a/b)' = a'/b - a b'/b^2
            return sub(div(a_->derivative(index), b_),
                       div(mul(a_, b_->derivative(index)), pow(b_, 2)));
        case Kind::Pow:
            return mul(mul(number(static_cast<double>(exponent_)), pow(a_, exponent_ - 1)),
                       a_->derivative(index));
        case Kind::Func: {
            Ptr inner = a_->derivative(index);
            Ptr self = std::shared_ptr<Expr>(new Expr(*this));
            switch (fn_) {
                case Fn::Exp: return mul(self, inner);
                case Fn::Log: return div(inner, a_);
                case Fn::Sin: return mul(call(Fn::Cos, a_), inner);
                case Fn::Cos: return mul(sub(number(0.0), call(Fn::Sin, a_)), inner);
                case Fn::Sqrt: return div(inner, mul(number(2.0), self));
            }
        }
    }
    throw EvalError("corrupt expression node");
}

std::string Expr::to_string() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Number: {
            os.precision(17);
            os << value_;
            break;
        }
        case Kind::Var:
            os << "u" << (var_index_ + 1);
            break;
        case Kind::Add:
            os << "(" << a_->to_string() << " + " << b_->to_string() << ")";
            break;
        case Kind::Sub:
            os << "(" << a_->to_string() << " - " << b_->to_string() << ")";
            break;
        case Kind::Mul:
            os << "(" << a_->to_string() << " * " << b_->to_string() << ")";
            break;
        case Kind::Div:
            os << "(" << a_->to_string() << " / " << b_->to_string() << ")";
            break;
        case Kind::Pow:
            os << "(" << a_->to_string() << ")^" << exponent_;
            break;
        case Kind::Func: {
            static const char* names[] = {"exp", "log", "sin", "cos", "sqrt"};
            os << names[static_cast<int>(fn_)] << "(" << a_->to_string() << ")";
            break;
        }
    }
    return os.str();
}

namespace {

class Parser {
public:
    Parser(const std::string& text, int dimension) : text_(text), dim_(dimension) {}

    Expr::Ptr parse() {
        Expr::Ptr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Expr::Ptr parse_expr() {
        skip_ws();
        // leading sign admitted as a convenience over the strict grammar
        bool negate = false;
        if (peek() == '+' || peek() == '-') {
            negate = (text_[pos_] == '-');
            ++pos_;
        }
        Expr::Ptr e = parse_term();
        if (negate) e = Expr::sub(Expr::number(0.0), e);
        while (true) {
            char c = peek();
            if (c == '+') {
                ++pos_;
                e = Expr::add(e, parse_term());
            } else if (c == '-') {
                ++pos_;
                e = Expr::sub(e, parse_term());
            } else {
                return e;
            }
        }
    }

    Expr::Ptr parse_term() {
        Expr::Ptr e = parse_factor();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                e = Expr::mul(e, parse_factor());
            } else if (c == '/') {
                ++pos_;
                e = Expr::div(e, parse_factor());
            } else {
                return e;
            }
        }
    }

    Expr::Ptr parse_factor() {
        Expr::Ptr base = parse_base();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            bool neg = false;
            if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
                neg = (text_[pos_] == '-');
                ++pos_;
            }
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (pos_ == start)
                throw ParseError("expected integer exponent", pos_);
            long exponent = std::stol(text_.substr(start, pos_ - start));
            if (neg) exponent = -exponent;
            return Expr::pow(base, exponent);
        }
        return base;
    }

    Expr::Ptr parse_base() {
        skip_ws();
        if (pos_ >= text_.size())
            throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = text_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin)
                throw ParseError("malformed number", pos_);
            pos_ += static_cast<std::size_t>(end - begin);
            return Expr::number(v);
        }
        if (c == '(') {
            ++pos_;
            Expr::Ptr e = parse_expr();
            if (peek() != ')')
                throw ParseError("expected ')'", pos_);
            ++pos_;
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)))
            return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Expr::Ptr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name = text_.substr(start, pos_ - start);

        static const std::pair<const char*, Expr::Fn> funcs[] = {
            {"exp", Expr::Fn::Exp}, {"log", Expr::Fn::Log}, {"sin", Expr::Fn::Sin},
            {"cos", Expr::Fn::Cos}, {"sqrt", Expr::Fn::Sqrt}};
        for (const auto& [fname, fn] : funcs) {
            if (name == fname) {
                if (peek() != '(')
                    throw ParseError("expected '(' after function name", pos_);
                ++pos_;
                Expr::Ptr arg = parse_expr();
                if (peek() != ')')
                    throw ParseError("expected ')'", pos_);
                ++pos_;
                return Expr::call(fn, arg);
            }
        }
        if (name == "abs")
            throw ParseError("abs is not differentiable and is rejected", start);

        if (name == "u") {
            if (dim_ != 1)
                throw ParseError("variable u only valid for scalar flux; use u1..un", start);
            return Expr::var(0);
        }
        if (name.size() > 1 && name[0] == 'u') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                int idx = std::stoi(name.substr(1));
                if (idx < 1 || idx > dim_)
                    throw ParseError("variable index out of range: " + name, start);
                return Expr::var(idx - 1);
            }
        }
        throw ParseError("unknown identifier '" + name + "'", start);
    }

    const std::string& text_;
    int dim_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr::Ptr parse_expression(const std::string& text, int dimension) {
    if (dimension < 1)
        throw ParseError("dimension must be positive", 0);
    return Parser(text, dimension).parse();
}

}  // namespace radshock
