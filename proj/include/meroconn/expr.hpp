#pragma once

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rational_fn.hpp"

namespace meroconn {

// Recursive-descent parser for the input expression grammar: identifiers,
// integer literals, `i`, operators + - * / ^ (integer exponents), and
// parentheses.  Whitespace-insensitive.  Rational literals are spelled as
// quotients, e.g. 1/2.
class ExprParser {
  public:
    ExprParser(std::string text, const std::vector<std::string>& vars,
               const std::map<std::string, RationalFn>* constants = nullptr)
        : text_(std::move(text)), vars_(vars), constants_(constants) {}

    RationalFn parse() {
        RationalFn r = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return r;
    }

  private:
    RationalFn parse_expr() {
        skip_ws();
        bool neg = false;
        while (peek() == '+' || peek() == '-') {
            if (get() == '-') neg = !neg;
            skip_ws();
        }
        RationalFn acc = parse_term();
        if (neg) acc = -acc;
        for (;;) {
            skip_ws();
            char c = peek();
            if (c == '+') {
                get();
                acc += parse_term();
            } else if (c == '-') {
                get();
                acc -= parse_term();
            } else {
                return acc;
            }
        }
    }

    RationalFn parse_term() {
        RationalFn acc = parse_factor();
        for (;;) {
            skip_ws();
            char c = peek();
            if (c == '*') {
                get();
                acc *= parse_factor();
            } else if (c == '/') {
                get();
                RationalFn d = parse_factor();
                if (d.is_zero()) fail("division by zero");
                acc /= d;
            } else {
                return acc;
            }
        }
    }

    RationalFn parse_factor() {
        skip_ws();
        if (peek() == '-') {
            get();
            return -parse_factor();
        }
        RationalFn base = parse_atom();
        skip_ws();
        if (peek() == '^') {
            get();
            skip_ws();
            bool neg = false;
            if (peek() == '-') {
                get();
                neg = true;
            }
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected integer exponent");
            long e = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) e = e * 10 + (get() - '0');
            if (neg && base.is_zero()) fail("zero raised to a negative power");
            return base.pow(static_cast<int>(neg ? -e : e));
        }
        return base;
    }

    RationalFn parse_atom() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            get();
            RationalFn r = parse_expr();
            skip_ws();
            if (peek() != ')') fail("expected ')'");
            get();
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string digits;
            while (std::isdigit(static_cast<unsigned char>(peek()))) digits.push_back(get());
            return RationalFn::constant(vars_.size(), GaussianRational(mpq_class(digits)));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
                name.push_back(get());
            if (name == "i") return RationalFn::constant(vars_.size(), GaussianRational::i());
            for (std::size_t k = 0; k < vars_.size(); ++k)
                if (vars_[k] == name) return RationalFn::variable(vars_.size(), k);
            if (constants_) {
                auto it = constants_->find(name);
                if (it != constants_->end()) return it->second;
            }
            fail("unknown identifier '" + name + "'");
        }
        fail(c == '\0' ? "unexpected end of expression" : std::string("unexpected character '") + c + "'");
        return RationalFn(); // unreachable
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char get() {
        char c = peek();
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
        return c;
    }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) get();
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

    std::string text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    const std::vector<std::string>& vars_;
    const std::map<std::string, RationalFn>* constants_;
};

inline RationalFn parse_expression(const std::string& text, const std::vector<std::string>& vars,
                                   const std::map<std::string, RationalFn>* constants = nullptr) {
    return ExprParser(text, vars, constants).parse();
}

} // namespace meroconn
