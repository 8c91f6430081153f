// Expression trees for the meromorphic functions the algebra elements are made of:
// theta factors and lattice-theta sections with affine arguments, exponential
// factors, and rational combinations. Trees are immutable and shared; there is
// no automatic simplification, and equality downstream is decided by sampling.
#ifndef ELLQ_EXPR_HPP
#define ELLQ_EXPR_HPP

#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ellq/errors.hpp"
#include "ellq/numeric.hpp"
#include "ellq/params.hpp"
#include "ellq/theta.hpp"
#include "ellq/theta_space.hpp"

namespace ellq {

using Assignment = std::map<std::string, cplx>;

// Sum of coeff * variable plus a constant. "tau" and "eta" are ordinary
// variable names here, bound from EllipticParams at evaluation time, so one
// parsed element serves parameter sweeps.
struct AffineForm {
    std::map<std::string, cplx> coeff;
    cplx constant{0.0, 0.0};

    AffineForm() = default;
    explicit AffineForm(cplx c) : constant(c) {}

    static AffineForm var(const std::string& name, cplx c = 1.0) {
        AffineForm f;
        f.coeff[name] = c;
        return f;
    }

    AffineForm& add_term(const std::string& name, cplx c) {
        auto it = coeff.find(name);
        if (it == coeff.end()) {
            if (c != 0.0) coeff[name] = c;
        } else {
            it->second += c;
            if (it->second == 0.0) coeff.erase(it);
        }
        return *this;
    }

    AffineForm operator+(const AffineForm& o) const {
        AffineForm r = *this;
        r.constant += o.constant;
        for (const auto& [n, c] : o.coeff) r.add_term(n, c);
        return r;
    }
    AffineForm operator-(const AffineForm& o) const {
        AffineForm r = *this;
        r.constant -= o.constant;
        for (const auto& [n, c] : o.coeff) r.add_term(n, -c);
        return r;
    }
    AffineForm operator*(cplx s) const {
        AffineForm r;
        r.constant = constant * s;
        if (s != 0.0)
            for (const auto& [n, c] : coeff) r.coeff[n] = c * s;
        return r;
    }
    AffineForm operator-() const { return *this * cplx(-1.0, 0.0); }

    bool is_constant() const { return coeff.empty(); }

    // Exact composition: substitute sigma(v) for every variable sigma covers.
    AffineForm compose(const std::map<std::string, AffineForm>& sigma) const {
        AffineForm r;
        r.constant = constant;
        for (const auto& [n, c] : coeff) {
            auto it = sigma.find(n);
            if (it == sigma.end()) {
                r.add_term(n, c);
            } else {
                r.constant += c * it->second.constant;
                for (const auto& [m, d] : it->second.coeff) r.add_term(m, c * d);
            }
        }
        return r;
    }

    cplx eval(const Assignment& a, const EllipticParams& params) const {
        cplx v = constant;
        for (const auto& [n, c] : coeff) {
            if (n == "tau") { v += c * params.tau; continue; }
            if (n == "eta") { v += c * params.eta; continue; }
            auto it = a.find(n);
            if (it == a.end())
                throw context_error("evaluate: variable '" + n + "' missing from the assignment");
            v += c * it->second;
        }
        return v;
    }
};

enum class ExprKind { Const, Var, Theta, ExpTwoPiI, Add, Sub, Mul, Div, IntPow, LatticeTheta };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

// Lattice-theta payload: one residue-class section with affine arguments and shifts.
struct LatticeRef {
    LatticeData data;
    std::vector<AffineForm> args;
    std::vector<AffineForm> shifts;
};

struct ExprNode {
    ExprKind kind;
    cplx value{0.0, 0.0};                       // Const
    std::string name;                           // Var
    AffineForm affine;                          // Theta / ExpTwoPiI argument
    Expr a, b;                                  // children (IntPow base in a)
    int power = 0;                              // IntPow
    std::shared_ptr<const LatticeRef> lattice;  // LatticeTheta
};

inline Expr make_const(cplx v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Const;
    n->value = v;
    return n;
}
inline Expr make_var(const std::string& name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Var;
    n->name = name;
    return n;
}
inline Expr make_theta(AffineForm arg) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Theta;
    n->affine = std::move(arg);
    return n;
}
inline Expr make_e2pi(AffineForm arg) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::ExpTwoPiI;
    n->affine = std::move(arg);
    return n;
}
inline Expr make_binary(ExprKind k, Expr a, Expr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}
inline Expr make_add(Expr a, Expr b) { return make_binary(ExprKind::Add, std::move(a), std::move(b)); }
inline Expr make_sub(Expr a, Expr b) { return make_binary(ExprKind::Sub, std::move(a), std::move(b)); }
inline Expr make_mul(Expr a, Expr b) { return make_binary(ExprKind::Mul, std::move(a), std::move(b)); }
inline Expr make_div(Expr a, Expr b) { return make_binary(ExprKind::Div, std::move(a), std::move(b)); }
inline Expr make_pow(Expr base, int k) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::IntPow;
    n->a = std::move(base);
    n->power = k;
    return n;
}
inline Expr make_lattice_theta(LatticeData data, std::vector<AffineForm> args,
                               std::vector<AffineForm> shifts) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::LatticeTheta;
    auto ref = std::make_shared<LatticeRef>();
    ref->data = std::move(data);
    ref->args = std::move(args);
    ref->shifts = std::move(shifts);
    n->lattice = std::move(ref);
    return n;
}

// Product / sum of a list, left-associated; empty product is 1, empty sum is 0.
inline Expr make_product(const std::vector<Expr>& factors) {
    if (factors.empty()) return make_const(1.0);
    Expr r = factors[0];
    for (size_t i = 1; i < factors.size(); ++i) r = make_mul(r, factors[i]);
    return r;
}
inline Expr make_sum(const std::vector<Expr>& terms) {
    if (terms.empty()) return make_const(0.0);
    Expr r = terms[0];
    for (size_t i = 1; i < terms.size(); ++i) r = make_add(r, terms[i]);
    return r;
}

namespace detail {

struct EvalCtx {
    const Assignment& vars;
    const EllipticParams& params;
    std::unordered_map<const ExprNode*, cplx> memo;
};

inline cplx eval_node(const Expr& e, EvalCtx& ctx) {
    auto hit = ctx.memo.find(e.get());
    if (hit != ctx.memo.end()) return hit->second;
    cplx v;
    switch (e->kind) {
        case ExprKind::Const: v = e->value; break;
        case ExprKind::Var: {
            if (e->name == "tau") { v = ctx.params.tau; break; }
            if (e->name == "eta") { v = ctx.params.eta; break; }
            auto it = ctx.vars.find(e->name);
            if (it == ctx.vars.end()) {
                std::string have;
                for (const auto& [n, _] : ctx.vars) have += (have.empty() ? "" : ", ") + n;
                throw context_error("evaluate: variable '" + e->name +
                                    "' missing from the assignment (declared: " + have + ")");
            }
            v = it->second;
            break;
        }
        case ExprKind::Theta: v = theta(e->affine.eval(ctx.vars, ctx.params), ctx.params); break;
        case ExprKind::ExpTwoPiI: v = exp2pii(e->affine.eval(ctx.vars, ctx.params)); break;
        case ExprKind::Add: v = eval_node(e->a, ctx) + eval_node(e->b, ctx); break;
        case ExprKind::Sub: v = eval_node(e->a, ctx) - eval_node(e->b, ctx); break;
        case ExprKind::Mul: v = eval_node(e->a, ctx) * eval_node(e->b, ctx); break;
        case ExprKind::Div: {
            const cplx num = eval_node(e->a, ctx);
            const cplx den = eval_node(e->b, ctx);
            if (std::abs(den) < 1e-14)
                throw near_pole_error("evaluate: denominator magnitude below 1e-14");
            v = num / den;
            break;
        }
        case ExprKind::IntPow: {
            const cplx base = eval_node(e->a, ctx);
            int k = e->power;
            if (k < 0 && std::abs(base) < 1e-14)
                throw near_pole_error("evaluate: negative power of a near-zero base");
            cplx acc{1.0, 0.0};
            cplx cur = (k < 0) ? 1.0 / base : base;
            for (int i = std::abs(k); i > 0; --i) acc *= cur;
            v = acc;
            break;
        }
        case ExprKind::LatticeTheta: {
            std::vector<cplx> zs, bs;
            zs.reserve(e->lattice->args.size());
            bs.reserve(e->lattice->shifts.size());
            for (const auto& f : e->lattice->args) zs.push_back(f.eval(ctx.vars, ctx.params));
            for (const auto& f : e->lattice->shifts) bs.push_back(f.eval(ctx.vars, ctx.params));
            v = lattice_theta_eval(e->lattice->data, zs, bs, ctx.params.eta, ctx.params.series_eps);
            break;
        }
    }
    ctx.memo.emplace(e.get(), v);
    return v;
}

} // namespace detail

inline cplx evaluate(const Expr& e, const Assignment& assignment, const EllipticParams& params) {
    detail::EvalCtx ctx{assignment, params, {}};
    return detail::eval_node(e, ctx);
}

// Render an affine form as an Expr tree (used when substitution hits a bare Var).
inline Expr affine_to_expr(const AffineForm& f) {
    std::vector<Expr> terms;
    for (const auto& [n, c] : f.coeff) {
        if (c == cplx(1.0, 0.0))
            terms.push_back(make_var(n));
        else
            terms.push_back(make_mul(make_const(c), make_var(n)));
    }
    if (f.constant != 0.0 || terms.empty()) terms.push_back(make_const(f.constant));
    return make_sum(terms);
}

// Structural substitution; affine arguments compose exactly, untouched subtrees
// are shared with the input.
inline Expr substitute(const Expr& e, const std::map<std::string, AffineForm>& sigma) {
    if (sigma.empty()) return e;
    switch (e->kind) {
        case ExprKind::Const: return e;
        case ExprKind::Var: {
            auto it = sigma.find(e->name);
            if (it == sigma.end()) return e;
            return affine_to_expr(it->second);
        }
        case ExprKind::Theta:
        case ExprKind::ExpTwoPiI: {
            bool touched = false;
            for (const auto& [n, _] : e->affine.coeff)
                if (sigma.count(n)) touched = true;
            if (!touched) return e;
            AffineForm composed = e->affine.compose(sigma);
            return e->kind == ExprKind::Theta ? make_theta(std::move(composed))
                                              : make_e2pi(std::move(composed));
        }
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul:
        case ExprKind::Div: {
            Expr a = substitute(e->a, sigma);
            Expr b = substitute(e->b, sigma);
            if (a == e->a && b == e->b) return e;
            return make_binary(e->kind, std::move(a), std::move(b));
        }
        case ExprKind::IntPow: {
            Expr a = substitute(e->a, sigma);
            if (a == e->a) return e;
            return make_pow(std::move(a), e->power);
        }
        case ExprKind::LatticeTheta: {
            bool touched = false;
            auto scan = [&](const std::vector<AffineForm>& fs) {
                for (const auto& f : fs)
                    for (const auto& [n, _] : f.coeff)
                        if (sigma.count(n)) touched = true;
            };
            scan(e->lattice->args);
            scan(e->lattice->shifts);
            if (!touched) return e;
            std::vector<AffineForm> args, shifts;
            for (const auto& f : e->lattice->args) args.push_back(f.compose(sigma));
            for (const auto& f : e->lattice->shifts) shifts.push_back(f.compose(sigma));
            return make_lattice_theta(e->lattice->data, std::move(args), std::move(shifts));
        }
    }
    return e;
}

// Collect the variable names appearing in the tree.
inline void collect_variables(const Expr& e, std::map<std::string, int>& out) {
    switch (e->kind) {
        case ExprKind::Const: return;
        case ExprKind::Var: ++out[e->name]; return;
        case ExprKind::Theta:
        case ExprKind::ExpTwoPiI:
            for (const auto& [n, _] : e->affine.coeff) ++out[n];
            return;
        case ExprKind::IntPow: collect_variables(e->a, out); return;
        case ExprKind::LatticeTheta:
            for (const auto& f : e->lattice->args)
                for (const auto& [n, _] : f.coeff) ++out[n];
            for (const auto& f : e->lattice->shifts)
                for (const auto& [n, _] : f.coeff) ++out[n];
            return;
        default:
            collect_variables(e->a, out);
            collect_variables(e->b, out);
            return;
    }
}

// Pole-divisor report: the zero sets of the syntactic denominators.
struct DivisorReport {
    std::vector<AffineForm> theta_divisors;  // theta(arg) factors in denominators
    std::vector<std::string> var_divisors;   // bare variables in denominators
    bool opaque = false;                     // a denominator we could not factor
};

namespace detail {

inline void gather_zero_factors(const Expr& e, DivisorReport& rep) {
    switch (e->kind) {
        case ExprKind::Theta: rep.theta_divisors.push_back(e->affine); return;
        case ExprKind::Var: rep.var_divisors.push_back(e->name); return;
        case ExprKind::Mul:
            gather_zero_factors(e->a, rep);
            gather_zero_factors(e->b, rep);
            return;
        case ExprKind::IntPow:
            if (e->power > 0) gather_zero_factors(e->a, rep);
            if (e->power < 0) rep.opaque = true; // inverted factor inside a denominator
            return;
        case ExprKind::Const:
        case ExprKind::ExpTwoPiI:
            return; // nonvanishing (a zero constant denominator fails at evaluation)
        default: rep.opaque = true; return;
    }
}

inline void walk_divisors(const Expr& e, DivisorReport& rep) {
    switch (e->kind) {
        case ExprKind::Div:
            walk_divisors(e->a, rep);
            walk_divisors(e->b, rep); // poles of the denominator's own denominators
            gather_zero_factors(e->b, rep);
            return;
        case ExprKind::IntPow:
            walk_divisors(e->a, rep);
            if (e->power < 0) gather_zero_factors(e->a, rep);
            return;
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul:
            walk_divisors(e->a, rep);
            walk_divisors(e->b, rep);
            return;
        default: return;
    }
}

} // namespace detail

inline DivisorReport pole_divisors(const Expr& e) {
    DivisorReport rep;
    detail::walk_divisors(e, rep);
    return rep;
}

// ---- printing ----------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Pure reals print bare, pure imaginaries with an i suffix, mixed values as a
// parenthesized sum. Negative leading parts are parenthesized so the result
// re-parses in any position.
inline std::string format_const(cplx v) {
    const double re = v.real(), im = v.imag();
    if (im == 0.0) {
        std::string s = format_double(re);
        return re < 0.0 ? "(" + s + ")" : s;
    }
    if (re == 0.0) {
        std::string s = format_double(im) + "i";
        return im < 0.0 ? "(" + s + ")" : s;
    }
    return "(" + format_double(re) + (im > 0.0 ? " + " + format_double(im) + "i"
                                               : " - " + format_double(-im) + "i") + ")";
}

inline std::string format_affine(const AffineForm& f) {
    std::string out;
    for (const auto& [n, c] : f.coeff) {
        if (out.empty()) {
            if (c == cplx(1.0, 0.0)) out = n;
            else if (c == cplx(-1.0, 0.0)) out = "-" + n;
            else out = format_const(c) + "*" + n;
        } else {
            if (c == cplx(1.0, 0.0)) out += " + " + n;
            else if (c == cplx(-1.0, 0.0)) out += " - " + n;
            else if (c.imag() == 0.0 && c.real() < 0.0)
                out += " - " + format_const(-c) + "*" + n;
            else out += " + " + format_const(c) + "*" + n;
        }
    }
    if (f.constant != 0.0 || out.empty()) {
        const cplx c = f.constant;
        if (out.empty()) out = format_const(c);
        else if (c.imag() == 0.0 && c.real() < 0.0) out += " - " + format_double(-c.real());
        else out += " + " + format_const(c);
    }
    return out;
}

inline int precedence(ExprKind k) {
    switch (k) {
        case ExprKind::Add:
        case ExprKind::Sub: return 1;
        case ExprKind::Mul:
        case ExprKind::Div: return 2;
        case ExprKind::IntPow: return 3;
        default: return 4;
    }
}

inline std::string print_node(const Expr& e);

inline std::string print_child(const Expr& child, int parent_prec, bool right_side) {
    std::string s = print_node(child);
    int prec = precedence(child->kind);
    if (prec < parent_prec || (prec == parent_prec && right_side && prec <= 2))
        return "(" + s + ")";
    return s;
}

inline std::string print_node(const Expr& e) {
    switch (e->kind) {
        case ExprKind::Const: return format_const(e->value);
        case ExprKind::Var: return e->name;
        case ExprKind::Theta: return "theta(" + format_affine(e->affine) + ")";
        case ExprKind::ExpTwoPiI: return "e2pi(" + format_affine(e->affine) + ")";
        case ExprKind::Add:
            return print_child(e->a, 1, false) + " + " + print_child(e->b, 1, true);
        case ExprKind::Sub:
            return print_child(e->a, 1, false) + " - " + print_child(e->b, 1, true);
        case ExprKind::Mul:
            return print_child(e->a, 2, false) + "*" + print_child(e->b, 2, true);
        case ExprKind::Div:
            return print_child(e->a, 2, false) + "/" + print_child(e->b, 2, true);
        case ExprKind::IntPow:
            return print_child(e->a, 3, true) + "^" + std::to_string(e->power);
        case ExprKind::LatticeTheta: {
            const auto& L = *e->lattice;
            std::string s = "ltheta([";
            for (size_t i = 0; i < L.data.A.size(); ++i) {
                s += (i ? ", [" : "[");
                for (size_t j = 0; j < L.data.A[i].size(); ++j)
                    s += (j ? ", " : "") + std::to_string(L.data.A[i][j]);
                s += "]";
            }
            s += "]; [";
            for (size_t i = 0; i < L.data.rep.size(); ++i)
                s += (i ? ", " : "") + std::to_string(L.data.rep[i]);
            s += "]; [";
            for (size_t i = 0; i < L.shifts.size(); ++i)
                s += (i ? ", " : "") + format_affine(L.shifts[i]);
            s += "]; [";
            for (size_t i = 0; i < L.args.size(); ++i)
                s += (i ? ", " : "") + format_affine(L.args[i]);
            return s + "])";
        }
    }
    return "";
}

} // namespace detail

inline std::string print(const Expr& e) { return detail::print_node(e); }

} // namespace ellq

#endif
