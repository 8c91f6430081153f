// Normal-ordering engine over function-valued coefficients, and the map
// sending graded elements to difference-operator elements.
//
// Terms are coefficient expressions in {y_{a,i}, u_i} times an ordered monomial
// in the invertible generators e_{a,i}; the fixed global order is (color, index)
// ascending. Products are normal-ordered by moving coefficients through
// generators (argument shifts) and exchanging adjacent generators with the
// theta-quotient factor; opposite powers of one generator cancel.
#ifndef ELLQ_OPERATOR_ALGEBRA_HPP
#define ELLQ_OPERATOR_ALGEBRA_HPP

#include <map>
#include <string>
#include <vector>

#include "ellq/dimension.hpp"
#include "ellq/sampling.hpp"
#include "ellq/star.hpp"

namespace ellq {

struct GenKey {
    int color = 0; // 1-based
    int alpha = 0; // 1-based
    bool operator<(const GenKey& o) const {
        return color != o.color ? color < o.color : alpha < o.alpha;
    }
    bool operator==(const GenKey& o) const { return color == o.color && alpha == o.alpha; }
};

using ExpMap = std::map<GenKey, int>;

struct OpTerm {
    Expr coeff;
    ExpMap exps;
};

struct OperatorElement {
    std::vector<OpTerm> terms;
};

// Evaluation context for one operator algebra: root data, site counts p, the
// sign of tau in every relation (the primed algebra runs at -tau), and the
// variable prefixes ("y"/"u" or "yp"/"up").
struct OpAlgebra {
    RootData roots;
    Grade p;
    int tau_sign = 1;
    std::string yvar = "y";
    std::string uvar = "u";

    std::string y(int alpha, int color) const {
        return yvar + "_" + std::to_string(alpha) + "_" + std::to_string(color);
    }
    std::string u(int color) const { return uvar + "_" + std::to_string(color); }

    std::vector<std::string> variables() const {
        std::vector<std::string> v;
        for (int i = 1; i <= roots.rank; ++i)
            for (int a = 1; a <= p.counts[i - 1]; ++a) v.push_back(y(a, i));
        for (int i = 1; i <= roots.rank; ++i) v.push_back(u(i));
        return v;
    }
};

namespace detail {

// Substitution implementing e^k moving left past a function: y_{a,i} gains
// k (d_i,d_i) tau and every u_j gains -2 k (d_i,d_j) tau.
inline std::map<std::string, AffineForm> shift_by_exponents(const ExpMap& exps,
                                                            const OpAlgebra& alg) {
    std::map<std::string, AffineForm> sigma;
    std::vector<long> ushift(alg.roots.rank, 0);
    for (const auto& [key, k] : exps) {
        if (k == 0) continue;
        const long gii = alg.roots.gram[key.color - 1][key.color - 1];
        AffineForm f = AffineForm::var(alg.y(key.alpha, key.color));
        f.add_term("tau", cplx(static_cast<double>(alg.tau_sign * k * gii), 0.0));
        sigma[alg.y(key.alpha, key.color)] = f;
        for (int j = 0; j < alg.roots.rank; ++j)
            ushift[j] -= 2L * k * alg.roots.gram[key.color - 1][j];
    }
    for (int j = 0; j < alg.roots.rank; ++j) {
        if (ushift[j] == 0) continue;
        AffineForm f = AffineForm::var(alg.u(j + 1));
        f.add_term("tau", cplx(static_cast<double>(alg.tau_sign * ushift[j]), 0.0));
        sigma[alg.u(j + 1)] = f;
    }
    return sigma;
}

// Base exchange coefficient X with  e_a e_b = X e_b e_a  (a != b as letters);
// flip builds 1/X directly.
inline Expr exchange_coeff(const GenKey& a, const GenKey& b, const OpAlgebra& alg, bool flip) {
    const long gij = alg.roots.gram[a.color - 1][b.color - 1];
    const AffineForm ya = AffineForm::var(alg.y(a.alpha, a.color));
    const AffineForm yb = AffineForm::var(alg.y(b.alpha, b.color));
    AffineForm top = ya - yb;
    top.add_term("tau", cplx(-static_cast<double>(alg.tau_sign * gij), 0.0));
    AffineForm bot = yb - ya;
    bot.add_term("tau", cplx(-static_cast<double>(alg.tau_sign * gij), 0.0));
    if (!flip)
        return make_mul(make_const(-1.0),
                        make_mul(make_e2pi(yb - ya), make_div(make_theta(top), make_theta(bot))));
    return make_mul(make_const(-1.0),
                    make_mul(make_e2pi(ya - yb), make_div(make_theta(bot), make_theta(top))));
}

struct Letter {
    GenKey key;
    int sign;
};

inline std::vector<Letter> letters_of(const ExpMap& exps) {
    std::vector<Letter> w;
    for (const auto& [key, k] : exps)
        for (int c = 0; c < std::abs(k); ++c) w.push_back({key, k > 0 ? 1 : -1});
    return w;
}

} // namespace detail

inline IntVec op_degree(const OpTerm& t, int rank) {
    IntVec d(rank, 0);
    for (const auto& [key, k] : t.exps) d[key.color - 1] += k;
    return d;
}

inline OperatorElement op_scalar(Expr coeff) { return {{OpTerm{std::move(coeff), {}}}}; }

inline OperatorElement op_generator(int alpha, int color, int power = 1) {
    OpTerm t{make_const(1.0), {{GenKey{color, alpha}, power}}};
    return {{std::move(t)}};
}

// Sum with like-term merge on the exponent support.
inline OperatorElement op_add(const OperatorElement& a, const OperatorElement& b) {
    std::map<ExpMap, Expr> acc;
    for (const auto& t : a.terms) {
        auto it = acc.find(t.exps);
        if (it == acc.end()) acc[t.exps] = t.coeff;
        else it->second = make_add(it->second, t.coeff);
    }
    for (const auto& t : b.terms) {
        auto it = acc.find(t.exps);
        if (it == acc.end()) acc[t.exps] = t.coeff;
        else it->second = make_add(it->second, t.coeff);
    }
    OperatorElement out;
    for (auto& [e, c] : acc) out.terms.push_back({c, e});
    return out;
}

inline OperatorElement op_multiply(const OperatorElement& A, const OperatorElement& B,
                                   const OpAlgebra& alg) {
    std::map<ExpMap, Expr> acc;
    for (const auto& ta : A.terms) {
        for (const auto& tb : B.terms) {
            Expr coeff = make_mul(
                ta.coeff, substitute(tb.coeff, detail::shift_by_exponents(ta.exps, alg)));
            std::vector<detail::Letter> word = detail::letters_of(ta.exps);
            {
                auto wb = detail::letters_of(tb.exps);
                word.insert(word.end(), wb.begin(), wb.end());
            }
            // Bubble into canonical order, tracking exchange coefficients.
            bool changed = true;
            while (changed) {
                changed = false;
                for (size_t i = 0; i + 1 < word.size(); ++i) {
                    const auto& L = word[i];
                    const auto& R = word[i + 1];
                    if (L.key == R.key) {
                        if (L.sign != R.sign) {
                            word.erase(word.begin() + i, word.begin() + i + 2);
                            changed = true;
                            break;
                        }
                        continue;
                    }
                    if (!(R.key < L.key)) continue;
                    // swap e_a^s e_b^t -> W e_b^t e_a^s
                    const GenKey a = L.key, b = R.key;
                    const int s = L.sign, t = R.sign;
                    Expr w;
                    const bool coupled = alg.roots.gram[a.color - 1][b.color - 1] != 0 ||
                                         a.color == b.color;
                    if (!coupled) {
                        w = nullptr; // exchange coefficient is exactly 1
                    } else if (s > 0 && t > 0) {
                        w = detail::exchange_coeff(a, b, alg, false);
                    } else if (s > 0 && t < 0) {
                        w = detail::exchange_coeff(b, a, alg, false);
                        w = substitute(w, detail::shift_by_exponents({{b, -1}}, alg));
                    } else if (s < 0 && t > 0) {
                        w = detail::exchange_coeff(a, b, alg, true);
                        w = substitute(w, detail::shift_by_exponents({{a, -1}}, alg));
                    } else {
                        w = detail::exchange_coeff(b, a, alg, true);
                        w = substitute(w, detail::shift_by_exponents({{a, -1}, {b, -1}}, alg));
                    }
                    if (w) {
                        ExpMap prefix;
                        for (size_t q = 0; q < i; ++q) prefix[word[q].key] += word[q].sign;
                        coeff = make_mul(coeff,
                                         substitute(w, detail::shift_by_exponents(prefix, alg)));
                    }
                    std::swap(word[i], word[i + 1]);
                    changed = true;
                    break;
                }
            }
            ExpMap exps;
            for (const auto& L : word) exps[L.key] += L.sign;
            for (auto it = exps.begin(); it != exps.end();) {
                if (std::abs(it->second) > 16)
                    throw desk_scale_error("op_multiply: generator exponent beyond desk scale");
                it = it->second == 0 ? exps.erase(it) : std::next(it);
            }
            auto slot = acc.find(exps);
            if (slot == acc.end()) acc[exps] = coeff;
            else slot->second = make_add(slot->second, coeff);
        }
    }
    OperatorElement out;
    for (auto& [e, c] : acc) out.terms.push_back({c, e});
    return out;
}

// Max coefficient residual over the union of supports at sampled (y, u).
inline ResidualReport op_equal_numeric(const OperatorElement& A, const OperatorElement& B,
                                       const OpAlgebra& alg, const EllipticParams& params,
                                       Rng& rng) {
    params.validate();
    std::map<ExpMap, std::pair<Expr, Expr>> merged;
    for (const auto& t : A.terms) merged[t.exps].first = t.coeff;
    for (const auto& t : B.terms) merged[t.exps].second = t.coeff;
    const Expr zero = make_const(0.0);
    SampleSpec spec{alg.variables(), {}};
    std::vector<DivisorReport> divs;
    for (const auto& [e, pair] : merged) {
        if (pair.first) divs.push_back(pole_divisors(pair.first));
        if (pair.second) divs.push_back(pole_divisors(pair.second));
    }
    ResidualReport rep;
    int budget = 10 * params.sample_count;
    const int wanted = std::max(8, params.sample_count / 2);
    while (rep.samples < wanted) {
        if (budget-- <= 0)
            throw degenerate_sample_error("op_equal_numeric: sampling budget exhausted");
        const Assignment pt = sample_admissible(spec, divs, params, rng);
        try {
            for (const auto& [e, pair] : merged) {
                const cplx va = evaluate(pair.first ? pair.first : zero, pt, params);
                const cplx vb = evaluate(pair.second ? pair.second : zero, pt, params);
                rep.max_residual = std::max(rep.max_residual, residual(va, vb));
            }
            ++rep.samples;
        } catch (const near_pole_error&) {
        }
    }
    return rep;
}

// Difference-operator image of a graded element: sum over per-color
// compositions of the grade into the p_i sites, with arithmetic-progression
// argument insertion and the pairwise theta-quotient prefactor.
inline OperatorElement x_map(const GradedElement& f, const OpAlgebra& alg) {
    const int h = alg.roots.rank;
    const Grade& l = f.grade;

    // compositions of l_i into p_i nonnegative parts, per color
    std::vector<std::vector<std::vector<int>>> comps(h);
    for (int i = 0; i < h; ++i) {
        const int li = l.counts[i], pi = alg.p.counts[i];
        std::vector<int> cur(pi, 0);
        std::vector<std::vector<int>>& list = comps[i];
        // odometer over weak compositions
        if (pi == 0) {
            if (li == 0) list.push_back({});
            else return {}; // no sites to carry this color
        } else {
            cur[0] = li;
            while (true) {
                list.push_back(cur);
                // next weak composition in colex order
                int k = 0;
                while (k < pi && cur[k] == 0) ++k;
                if (k == pi - 1 || k == pi) break;
                const int v = cur[k];
                cur[k] = 0;
                cur[0] = v - 1;
                ++cur[k + 1];
            }
        }
    }

    OperatorElement out;
    std::vector<size_t> pick(h, 0);
    while (true) {
        // slots of inserted arguments: (color i, site alpha, step mu)
        std::map<std::string, AffineForm> sub;
        if (alg.uvar != "u")
            for (int i = 1; i <= h; ++i) sub[u_name(i)] = AffineForm::var(alg.u(i));
        std::vector<std::vector<std::pair<int, int>>> inserted(h); // per color: (alpha, mu)
        ExpMap exps;
        for (int i = 0; i < h; ++i) {
            const auto& phi = comps[i].empty() ? std::vector<int>{} : comps[i][pick[i]];
            int slot = 0;
            const double gii = static_cast<double>(alg.roots.gram[i][i]);
            for (int a = 1; a <= alg.p.counts[i]; ++a) {
                const int k = phi[a - 1];
                if (k == 0) continue;
                exps[GenKey{i + 1, a}] = k;
                for (int mu = 0; mu < k; ++mu) {
                    ++slot;
                    AffineForm arg = AffineForm::var(alg.y(a, i + 1));
                    arg.add_term("tau", cplx(alg.tau_sign * mu * gii, 0.0));
                    sub[x_name(slot, i + 1)] = arg;
                    inserted[i].push_back({a, mu});
                }
            }
        }
        std::vector<Expr> nums{substitute(f.body, sub)};
        std::vector<Expr> dens;
        for (int i = 0; i < h; ++i)
            for (int j = i; j < h; ++j) {
                const long gij = alg.roots.gram[i][j];
                if (gij == 0) continue;
                const double gii = static_cast<double>(alg.roots.gram[i][i]);
                const double gjj = static_cast<double>(alg.roots.gram[j][j]);
                for (const auto& [a, mu] : inserted[i])
                    for (const auto& [b, nu] : inserted[j]) {
                        if (i == j && (a > b || (a == b && mu >= nu))) continue;
                        AffineForm arg = AffineForm::var(alg.y(a, i + 1)) -
                                         AffineForm::var(alg.y(b, j + 1));
                        arg.add_term("tau", cplx(alg.tau_sign * (mu * gii - nu * gjj), 0.0));
                        AffineForm arg_shift = arg;
                        arg_shift.add_term("tau", cplx(-alg.tau_sign * static_cast<double>(gij), 0.0));
                        nums.push_back(make_theta(arg));
                        dens.push_back(make_theta(arg_shift));
                    }
            }
        Expr coeff = dens.empty() ? make_product(nums)
                                  : make_div(make_product(nums), make_product(dens));
        out = op_add(out, OperatorElement{{OpTerm{coeff, exps}}});
        int i = 0;
        while (i < h && (comps[i].empty() || pick[i] + 1 == comps[i].size())) pick[i++] = 0;
        if (i == h) break;
        ++pick[i];
    }
    return out;
}

struct HomomorphismReport {
    ResidualReport residuals;
    bool support_equal = true;
};

// x(f * g) against x(f) x(g), support plus coefficients.
inline HomomorphismReport homomorphism_check(const GradedElement& f, const GradedElement& g,
                                             const OpAlgebra& alg, const EllipticParams& params,
                                             Rng& rng) {
    const GradedElement fg = star(f, g, alg.roots, params);
    const OperatorElement lhs = x_map(fg, alg);
    const OperatorElement rhs = op_multiply(x_map(f, alg), x_map(g, alg), alg);
    HomomorphismReport rep;
    rep.residuals = op_equal_numeric(lhs, rhs, alg, params, rng);
    return rep;
}

struct InjectivityReport {
    int dim = 0;
    std::vector<std::pair<int, int>> ranks; // (p, rank) for uniform site counts
    int smallest_full = -1;
};

// Rank of the coefficient-evaluation matrix of the images of an ansatz basis,
// for uniform site counts p = 1..pmax.
inline InjectivityReport injectivity_probe(const WeightForm& n, const Grade& l,
                                           const RootData& roots, int pmax,
                                           const EllipticParams& params, Rng& rng) {
    InjectivityReport rep;
    const auto basis = ansatz_space(n, l, roots, params, rng);
    rep.dim = static_cast<int>(basis.size());
    if (basis.empty()) return rep;
    for (int pv = 1; pv <= pmax; ++pv) {
        OpAlgebra alg{roots, Grade(std::vector<int>(roots.rank, pv)), 1, "y", "u"};
        std::vector<OperatorElement> images;
        images.reserve(basis.size());
        for (const auto& b : basis) images.push_back(x_map(b, alg));
        // union support
        std::map<ExpMap, int> support;
        for (const auto& img : images)
            for (const auto& t : img.terms)
                if (!support.count(t.exps))
                    support[t.exps] = static_cast<int>(support.size());
        SampleSpec spec{alg.variables(), {}};
        std::vector<DivisorReport> divs;
        for (const auto& img : images)
            for (const auto& t : img.terms) divs.push_back(pole_divisors(t.coeff));
        const int points = 4;
        Eigen::MatrixXcd M(static_cast<int>(support.size()) * points,
                           static_cast<int>(images.size()));
        M.setZero();
        for (int s = 0; s < points;) {
            const Assignment pt = sample_admissible(spec, divs, params, rng);
            try {
                for (size_t c = 0; c < images.size(); ++c)
                    for (const auto& t : images[c].terms)
                        M(support[t.exps] * points + s, static_cast<int>(c)) =
                            evaluate(t.coeff, pt, params);
                ++s;
            } catch (const near_pole_error&) {
            }
        }
        const int r = numeric_rank(M);
        rep.ranks.emplace_back(pv, r);
        if (r == rep.dim && rep.smallest_full < 0) rep.smallest_full = pv;
    }
    return rep;
}

// Syntactic admissible-pole check for operator coefficients: every denominator
// divisor is a y-difference whose tau offset lies in (d_i,d_j) + Z(d_i,d_i) + Z(d_j,d_j)
// with no other symbolic content.
inline bool op_pole_pattern_ok(const OperatorElement& A, const OpAlgebra& alg) {
    for (const auto& t : A.terms) {
        const DivisorReport rep = pole_divisors(t.coeff);
        if (!rep.var_divisors.empty()) return false;
        for (const auto& d : rep.theta_divisors) {
            std::vector<std::pair<std::string, cplx>> ys;
            double tau_c = 0.0;
            for (const auto& [name, c] : d.coeff) {
                if (name == "tau") {
                    tau_c = c.real();
                    if (c.imag() != 0.0) return false;
                    continue;
                }
                if (name == "eta") return false;
                if (name.rfind(alg.yvar + "_", 0) != 0) return false;
                ys.emplace_back(name, c);
            }
            if (d.constant != 0.0) return false;
            if (ys.size() != 2 || ys[0].second != -ys[1].second ||
                (ys[0].second != cplx(1, 0) && ys[0].second != cplx(-1, 0)))
                return false;
            auto color_of = [](const std::string& v) {
                const auto p = v.rfind('_');
                return std::stoi(v.substr(p + 1));
            };
            const int i = color_of(ys[0].first), j = color_of(ys[1].first);
            const long gij = alg.roots.gram[i - 1][j - 1];
            const long gii = alg.roots.gram[i - 1][i - 1];
            const long gjj = alg.roots.gram[j - 1][j - 1];
            // tau_c must equal -s(gij + mu gii + nu gjj) for integers mu, nu and
            // the sign s of the leading y; reduce modulo gcd.
            long g = std::labs(gii);
            long b = std::labs(gjj);
            while (b) { const long r = g % b; g = b; b = r; }
            const double base = ys[0].second.real() > 0
                                    ? -static_cast<double>(alg.tau_sign) * tau_c
                                    : static_cast<double>(alg.tau_sign) * tau_c;
            const double frac = base - static_cast<double>(gij);
            const double q = frac / static_cast<double>(g);
            if (std::abs(q - std::round(q)) > 1e-9) return false;
        }
    }
    return true;
}

inline std::string to_string(const OperatorElement& A, const OpAlgebra& alg) {
    std::string s;
    for (const auto& t : A.terms) {
        if (!s.empty()) s += "  +  ";
        s += "(" + print(t.coeff) + ")";
        for (const auto& [key, k] : t.exps) {
            s += " e_" + std::to_string(key.alpha) + "_" + std::to_string(key.color);
            if (k != 1) s += "^" + std::to_string(k);
        }
    }
    if (s.empty()) s = "0";
    return s;
}

} // namespace ellq

#endif
