// The degree-graded symmetric-function family with the triple-theta kernel:
// product, the commuting elements, and their membership properties (symmetry,
// pole order at most two, triple vanishing, periodicity).
#ifndef ELLQ_HM_HPP
#define ELLQ_HM_HPP

#include <vector>

#include "ellq/membership.hpp"
#include "ellq/star.hpp"

namespace ellq {

// Kernel parameters: three shifts summing to zero, plus the multiplier line.
struct HmContext {
    cplx tau1{0.05, 0.11};
    cplx tau2{0.21, -0.07};
    cplx tau3{-0.26, -0.04};
    int m = 0;
    cplx c{0.0, 0.0};

    void validate() const {
        if (std::abs(tau1 + tau2 + tau3) > 1e-12)
            throw invalid_parameter_error("HmContext: the three shifts must sum to zero");
    }
    Assignment fixed_symbols() const {
        return {{"tau1", tau1}, {"tau2", tau2}, {"tau3", tau3}};
    }
};

// Elements are rank-1 graded: arity = grade, body in x_1_1 ... x_arity_1 and
// the symbols tau1/tau2/tau3.
inline SampleSpec hm_spec(int arity, const HmContext& hm) {
    SampleSpec spec;
    for (int a = 1; a <= arity; ++a) spec.vars.push_back(x_name(a, 1));
    spec.fixed = hm.fixed_symbols();
    return spec;
}

namespace detail {

inline Expr hm_kernel(int mu, int nu) { // lambda(x_mu, x_nu)
    const AffineForm d = AffineForm::var(x_name(mu, 1)) - AffineForm::var(x_name(nu, 1));
    std::vector<Expr> nums;
    for (const char* t : {"tau1", "tau2", "tau3"}) {
        AffineForm arg = d;
        arg.add_term(t, cplx(-1.0, 0.0));
        nums.push_back(make_theta(arg));
    }
    return make_div(make_product(nums), make_pow(make_theta(d), 3));
}

} // namespace detail

// Symmetrized shuffle product with the triple-theta kernel between the blocks.
inline GradedElement hm_product(const GradedElement& f, const GradedElement& g,
                                const HmContext& hm, const EllipticParams& params) {
    (void)hm;
    (void)params;
    const int a = f.grade.counts[0], b = g.grade.counts[0];
    const int total = a + b;
    std::vector<Expr> summands;
    for (const auto& sel : detail::combinations(total, a)) {
        std::map<std::string, AffineForm> sf, sg;
        std::vector<bool> used(total, false);
        std::vector<int> fpos, gpos;
        for (size_t k = 0; k < sel.size(); ++k) {
            used[sel[k]] = true;
            fpos.push_back(sel[k] + 1);
            if (sel[k] != static_cast<int>(k))
                sf[x_name(static_cast<int>(k) + 1, 1)] = AffineForm::var(x_name(sel[k] + 1, 1));
        }
        int slot = 0;
        for (int pos = 0; pos < total; ++pos) {
            if (used[pos]) continue;
            gpos.push_back(pos + 1);
            ++slot;
            if (pos + 1 != slot) sg[x_name(slot, 1)] = AffineForm::var(x_name(pos + 1, 1));
        }
        std::vector<Expr> factors{substitute(f.body, sf), substitute(g.body, sg)};
        for (int mu : fpos)
            for (int nu : gpos) factors.push_back(detail::hm_kernel(mu, nu));
        summands.push_back(make_product(factors));
    }
    return {Grade({total}), make_sum(summands)};
}

// The commuting elements: products of paired shifted quotients; degree one is
// the unit of the family.
inline GradedElement hm_k_element(int alpha) {
    if (alpha == 1) return {Grade({1}), make_const(1.0)};
    std::vector<Expr> factors;
    for (int mu = 1; mu <= alpha; ++mu)
        for (int nu = mu + 1; nu <= alpha; ++nu) {
            const AffineForm d = AffineForm::var(x_name(mu, 1)) - AffineForm::var(x_name(nu, 1));
            AffineForm minus = d, plus = d;
            minus.add_term("tau1", cplx(-1.0, 0.0));
            plus.add_term("tau1", cplx(1.0, 0.0));
            factors.push_back(make_div(make_mul(make_theta(minus), make_theta(plus)),
                                       make_pow(make_theta(d), 2)));
        }
    return {Grade({alpha}), make_product(factors)};
}

struct HmMembershipReport {
    double symmetry = 0.0;
    double pole_order = 0.0;      // third Laurent coefficient on every divisor
    double triple_vanishing = 0.0;
    bool triple_vacuous = false;
    double periodicity = 0.0;
    double max_residual() const {
        return std::max(std::max(symmetry, pole_order),
                        std::max(triple_vacuous ? 0.0 : triple_vanishing, periodicity));
    }
    bool pass(double tol) const { return max_residual() < tol; }
};

inline HmMembershipReport hm_membership(const GradedElement& f, const HmContext& hm,
                                        const EllipticParams& params, Rng& rng) {
    hm.validate();
    params.validate();
    const int arity = f.grade.counts[0];
    const SampleSpec spec = hm_spec(arity, hm);
    const std::vector<DivisorReport> divs{pole_divisors(f.body)};
    HmMembershipReport rep;
    rep.symmetry = symmetry_residual(f, params, rng, 1, &spec).max_residual;

    // pole order <= 2 on the difference divisors
    for (const auto& dc : detail::classify_divisors(f, RootData::type_a(1), params)) {
        // rank-1 world: every difference divisor is same-color; order two allowed
        for (int freeze = 0; freeze < 2; ++freeze) {
            std::optional<detail::LaurentProbe> probe;
            for (int attempt = 0; attempt < 24 && !probe; ++attempt) {
                Assignment base = sample_admissible(spec, divs, params, rng);
                probe = detail::laurent_probe(f.body, dc, base, params, 3);
            }
            if (!probe) throw degenerate_sample_error("hm_membership: contour freeze failed");
            rep.pole_order = std::max(rep.pole_order, probe->res3);
        }
    }

    // triple vanishing for arity >= 3: f(x, x+t1, x+t1+t2, ...) = 0 and with t1<->t2
    if (arity < 3) {
        rep.triple_vacuous = true;
    } else {
        int done = 0, budget = 200;
        while (done < 6) {
            if (budget-- <= 0)
                throw degenerate_sample_error("hm_membership: triple-vanishing sampling failed");
            Assignment pt = sample_admissible(spec, divs, params, rng);
            try {
                const double scale = std::abs(evaluate(f.body, pt, params));
                for (int variant = 0; variant < 2; ++variant) {
                    Assignment sub = pt;
                    const cplx x = pt.at(x_name(1, 1));
                    const cplx first = variant == 0 ? hm.tau1 : hm.tau2;
                    sub[x_name(2, 1)] = x + first;
                    sub[x_name(3, 1)] = x + hm.tau1 + hm.tau2;
                    rep.triple_vanishing = std::max(
                        rep.triple_vanishing, std::abs(evaluate(f.body, sub, params)) / (scale + 1.0));
                }
                ++done;
            } catch (const near_pole_error&) {
            }
        }
    }

    // periodicity in the first variable (symmetry covers the rest)
    {
        int done = 0, budget = 200;
        while (done < 8) {
            if (budget-- <= 0)
                throw degenerate_sample_error("hm_membership: periodicity sampling failed");
            Assignment pt = sample_admissible(spec, divs, params, rng);
            try {
                const cplx base = evaluate(f.body, pt, params);
                Assignment p1 = pt;
                p1[x_name(1, 1)] += 1.0;
                rep.periodicity =
                    std::max(rep.periodicity, residual(evaluate(f.body, p1, params), base));
                Assignment pe = pt;
                pe[x_name(1, 1)] += params.eta;
                const cplx mult =
                    exp2pii(-(static_cast<double>(hm.m) * pt.at(x_name(1, 1)) + hm.c));
                rep.periodicity =
                    std::max(rep.periodicity, residual(evaluate(f.body, pe, params), mult * base));
                ++done;
            } catch (const near_pole_error&) {
            }
        }
    }
    return rep;
}

struct HmCommutingReport {
    std::vector<std::pair<std::string, double>> commutators;
    std::vector<std::pair<std::string, HmMembershipReport>> memberships;
    double max_residual(double /*unused*/ = 0.0) const {
        double r = 0.0;
        for (const auto& [n, v] : commutators) r = std::max(r, v);
        for (const auto& [n, m] : memberships) r = std::max(r, m.max_residual());
        return r;
    }
};

inline HmCommutingReport hm_commuting_check(int alpha_max, const HmContext& hm,
                                            const EllipticParams& params, Rng& rng) {
    hm.validate();
    HmCommutingReport rep;
    std::vector<GradedElement> K;
    for (int a = 1; a <= alpha_max; ++a) K.push_back(hm_k_element(a));
    for (int a = 2; a <= alpha_max; ++a)
        rep.memberships.push_back(
            {"K_" + std::to_string(a), hm_membership(K[a - 1], hm, params, rng)});
    for (int a = 1; a <= alpha_max; ++a)
        for (int b = a; b <= alpha_max; ++b) {
            const GradedElement ab = hm_product(K[a - 1], K[b - 1], hm, params);
            const GradedElement ba = hm_product(K[b - 1], K[a - 1], hm, params);
            SampleSpec spec = hm_spec(a + b, hm);
            rep.commutators.push_back(
                {"[K_" + std::to_string(a) + ",K_" + std::to_string(b) + "]",
                 equal_numeric(ab, ba, params, rng, &spec).max_residual});
        }
    return rep;
}

} // namespace ellq

#endif
