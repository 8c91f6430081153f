// Recursive-descent parser for the expression grammar.
//
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '/') factor)*
//   factor  := unary ('^' ['-'] digits)?
//   unary   := '-' unary | primary
//   primary := number | ident | theta(expr) | e2pi(expr) | ltheta(...) | '(' expr ')'
//
// Numbers are decimal literals with an optional trailing 'i' for imaginary
// parts (mixed constants are written as sums, e.g. (1.5 + 0.3i)). Arguments of
// theta/e2pi/ltheta must be affine in the variables; 'tau' and 'eta' are
// reserved names bound from the parameters at evaluation time.
#ifndef ELLQ_PARSE_HPP
#define ELLQ_PARSE_HPP

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ellq/errors.hpp"
#include "ellq/expr.hpp"

namespace ellq {

// Coerce a parsed subtree to an affine form; fails on non-affine structure.
inline std::optional<AffineForm> to_affine(const Expr& e) {
    switch (e->kind) {
        case ExprKind::Const: return AffineForm(e->value);
        case ExprKind::Var: return AffineForm::var(e->name);
        case ExprKind::Add: {
            auto a = to_affine(e->a), b = to_affine(e->b);
            if (!a || !b) return std::nullopt;
            return *a + *b;
        }
        case ExprKind::Sub: {
            auto a = to_affine(e->a), b = to_affine(e->b);
            if (!a || !b) return std::nullopt;
            return *a - *b;
        }
        case ExprKind::Mul: {
            auto a = to_affine(e->a), b = to_affine(e->b);
            if (!a || !b) return std::nullopt;
            if (a->is_constant()) return *b * a->constant;
            if (b->is_constant()) return *a * b->constant;
            return std::nullopt;
        }
        case ExprKind::Div: {
            auto a = to_affine(e->a), b = to_affine(e->b);
            if (!a || !b || !b->is_constant() || b->constant == 0.0) return std::nullopt;
            return *a * (1.0 / b->constant);
        }
        case ExprKind::IntPow: {
            auto a = to_affine(e->a);
            if (!a || !a->is_constant()) return std::nullopt;
            cplx acc{1.0, 0.0};
            cplx cur = e->power < 0 ? 1.0 / a->constant : a->constant;
            for (int i = std::abs(e->power); i > 0; --i) acc *= cur;
            return AffineForm(acc);
        }
        default: return std::nullopt;
    }
}

namespace detail {

struct Token {
    enum Kind { Ident, Number, Punct, End } kind;
    std::string text;
    cplx value;
    int line, col;
};

class Lexer {
  public:
    explicit Lexer(const std::string& s) : s_(s) {}

    Token next() {
        skip_space();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= s_.size()) {
            t.kind = Token::End;
            return t;
        }
        const char c = s_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                advance();
            t.kind = Token::Ident;
            t.text = s_.substr(start, pos_ - start);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
                                        s_[pos_] == '.'))
                advance();
            if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
                size_t mark = pos_;
                advance();
                if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) advance();
                if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                        advance();
                } else {
                    pos_ = mark; // not an exponent after all
                }
            }
            const double v = std::stod(s_.substr(start, pos_ - start));
            t.kind = Token::Number;
            if (pos_ < s_.size() && s_[pos_] == 'i') {
                advance();
                t.value = cplx(0.0, v);
            } else {
                t.value = cplx(v, 0.0);
            }
            return t;
        }
        t.kind = Token::Punct;
        t.text = std::string(1, c);
        advance();
        return t;
    }

  private:
    void skip_space() {
        while (pos_ < s_.size() &&
               std::isspace(static_cast<unsigned char>(s_[pos_])))
            advance();
    }
    void advance() {
        if (s_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
        ++pos_;
    }
    const std::string& s_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

class Parser {
  public:
    explicit Parser(const std::string& text) : lex_(text) { cur_ = lex_.next(); }

    Expr parse_full() {
        Expr e = parse_expr();
        if (cur_.kind != Token::End) fail("unexpected trailing input");
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string& msg) { throw parse_error(msg, cur_.line, cur_.col); }

    bool is_punct(const char* p) const { return cur_.kind == Token::Punct && cur_.text == p; }

    void expect(const char* p) {
        if (!is_punct(p)) fail(std::string("expected '") + p + "'");
        bump();
    }

    void bump() { cur_ = lex_.next(); }

    Expr parse_expr() {
        Expr e = parse_term();
        while (is_punct("+") || is_punct("-")) {
            const bool add = cur_.text == "+";
            bump();
            Expr rhs = parse_term();
            e = add ? make_add(e, rhs) : make_sub(e, rhs);
        }
        return e;
    }

    Expr parse_term() {
        Expr e = parse_factor();
        while (is_punct("*") || is_punct("/")) {
            const bool mul = cur_.text == "*";
            bump();
            Expr rhs = parse_factor();
            e = mul ? make_mul(e, rhs) : make_div(e, rhs);
        }
        return e;
    }

    Expr parse_factor() {
        Expr e = parse_unary();
        if (is_punct("^")) {
            bump();
            long sign = 1;
            if (is_punct("-")) { sign = -1; bump(); }
            if (cur_.kind != Token::Number || cur_.value.imag() != 0.0 ||
                cur_.value.real() != std::floor(cur_.value.real()))
                fail("expected an integer exponent");
            const int k = static_cast<int>(sign * std::lround(cur_.value.real()));
            bump();
            e = make_pow(e, k);
        }
        return e;
    }

    Expr parse_unary() {
        if (is_punct("-")) {
            bump();
            Expr e = parse_unary();
            if (e->kind == ExprKind::Const) return make_const(-e->value);
            return make_sub(make_const(0.0), e);
        }
        return parse_primary();
    }

    AffineForm parse_affine_arg() {
        const Token at = cur_;
        Expr e = parse_expr();
        auto aff = to_affine(e);
        if (!aff) throw parse_error("argument must be affine in the variables", at.line, at.col);
        return *aff;
    }

    long parse_integer() {
        long sign = 1;
        if (is_punct("-")) { sign = -1; bump(); }
        if (cur_.kind != Token::Number || cur_.value.imag() != 0.0 ||
            cur_.value.real() != std::floor(cur_.value.real()))
            fail("expected an integer");
        const long v = sign * std::lround(cur_.value.real());
        bump();
        return v;
    }

    IntVec parse_int_list() {
        expect("[");
        IntVec v;
        if (!is_punct("]")) {
            v.push_back(parse_integer());
            while (is_punct(",")) { bump(); v.push_back(parse_integer()); }
        }
        expect("]");
        return v;
    }

    std::vector<AffineForm> parse_affine_list() {
        expect("[");
        std::vector<AffineForm> v;
        if (!is_punct("]")) {
            v.push_back(parse_affine_arg());
            while (is_punct(",")) { bump(); v.push_back(parse_affine_arg()); }
        }
        expect("]");
        return v;
    }

    Expr parse_ltheta() {
        const Token at = cur_;
        expect("(");
        expect("[");
        IntMat a;
        a.push_back(parse_int_list());
        while (is_punct(",")) { bump(); a.push_back(parse_int_list()); }
        expect("]");
        expect(";");
        IntVec rep = parse_int_list();
        expect(";");
        std::vector<AffineForm> shifts = parse_affine_list();
        expect(";");
        std::vector<AffineForm> args = parse_affine_list();
        expect(")");
        const size_t n = a.size();
        for (const auto& row : a)
            if (row.size() != n)
                throw parse_error("ltheta: matrix must be square", at.line, at.col);
        if (rep.size() != n || shifts.size() != n || args.size() != n)
            throw parse_error("ltheta: class, shifts and arguments must match the matrix size",
                              at.line, at.col);
        LatticeData d;
        d.A = std::move(a);
        d.rep = std::move(rep);
        d.sum_dirs = detail::image_columns(d.A);
        const auto snf = smith_decompose(d.A);
        for (size_t i = 0; i < n; ++i) {
            if (snf.S[i][i] != 0) continue;
            IntVec k(n);
            for (size_t r = 0; r < n; ++r) k[r] = snf.Q[r][i];
            d.kernel.push_back(k);
        }
        detail::recenter_rep(d);
        return make_lattice_theta(std::move(d), std::move(args), std::move(shifts));
    }

    Expr parse_primary() {
        if (cur_.kind == Token::Number) {
            Expr e = make_const(cur_.value);
            bump();
            return e;
        }
        if (cur_.kind == Token::Ident) {
            const std::string name = cur_.text;
            bump();
            if (name == "theta" || name == "e2pi") {
                expect("(");
                AffineForm arg = parse_affine_arg();
                expect(")");
                return name == "theta" ? make_theta(std::move(arg)) : make_e2pi(std::move(arg));
            }
            if (name == "ltheta") return parse_ltheta();
            return make_var(name);
        }
        if (is_punct("(")) {
            bump();
            Expr e = parse_expr();
            expect(")");
            return e;
        }
        fail("expected a number, identifier, function call or parenthesized expression");
    }

    Lexer lex_;
    Token cur_;
};

} // namespace detail

inline Expr parse(const std::string& text) { return detail::Parser(text).parse_full(); }

// Every variable of e must be declared (tau/eta are always available).
inline void validate_context(const Expr& e, const std::set<std::string>& declared) {
    std::map<std::string, int> used;
    collect_variables(e, used);
    for (const auto& [name, _] : used) {
        if (name == "tau" || name == "eta") continue;
        if (!declared.count(name)) {
            std::string have = "tau, eta";
            for (const auto& d : declared) have += ", " + d;
            throw context_error("unknown identifier '" + name + "' (declared context: " + have + ")");
        }
    }
}

} // namespace ellq

#endif
