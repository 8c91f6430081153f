// Membership test for the graded subalgebra: pole-order bound on coupled
// divisors, per-variable quasi-periodicity, chain vanishing, and component-wise
// translation invariance.
#ifndef ELLQ_MEMBERSHIP_HPP
#define ELLQ_MEMBERSHIP_HPP

#include <optional>
#include <string>
#include <vector>

#include "ellq/sampling.hpp"
#include "ellq/star.hpp"

namespace ellq {

struct ConditionReport {
    double residual = 0.0;
    bool vacuous = false;
    std::string note;
};

struct MembershipReport {
    ConditionReport pole_order;       // holomorphic away from coupled divisors, order <= 1 there
    ConditionReport multiplier;       // both period relations per variable
    ConditionReport chain_vanishing;  // vanishing on the chain subspaces
    ConditionReport translation;      // simultaneous translation invariance

    double max_residual() const {
        double m = 0.0;
        for (const auto* c : {&pole_order, &multiplier, &chain_vanishing, &translation})
            if (!c->vacuous) m = std::max(m, c->residual);
        return m;
    }
    bool pass(double tol) const { return max_residual() < tol; }
};

namespace detail {

struct DivisorClass {
    AffineForm form;
    std::string transverse;   // variable solved for on the divisor
    cplx coeff{1.0, 0.0};     // its coefficient in the form
    bool order_one_allowed = false;
};

inline bool is_x_var(const std::string& n) { return n.rfind("x_", 0) == 0; }

inline std::pair<int, int> x_indices(const std::string& n) {
    const auto p1 = n.find('_');
    const auto p2 = n.find('_', p1 + 1);
    return {std::stoi(n.substr(p1 + 1, p2 - p1 - 1)), std::stoi(n.substr(p2 + 1))};
}

// Decide, per syntactic divisor, whether a simple pole is admissible there.
inline std::vector<DivisorClass> classify_divisors(const GradedElement& f,
                                                   const RootData& roots,
                                                   const EllipticParams& params) {
    std::vector<DivisorClass> out;
    const DivisorReport rep = pole_divisors(f.body);
    for (const auto& d : rep.theta_divisors) {
        std::vector<std::pair<std::string, cplx>> xs;
        bool has_u = false;
        for (const auto& [n, c] : d.coeff) {
            if (n == "tau" || n == "eta") continue;
            if (is_x_var(n)) xs.emplace_back(n, c);
            else has_u = true;
        }
        if (xs.empty()) continue; // a u-only denominator is no x-divisor
        DivisorClass dc;
        dc.form = d;
        dc.transverse = xs[0].first;
        dc.coeff = xs[0].second;
        if (!has_u && xs.size() == 2 && xs[0].second == -xs[1].second &&
            (xs[0].second == cplx(1, 0) || xs[0].second == cplx(-1, 0))) {
            // difference divisor x_{a,i} - x_{b,j} + const
            AffineForm constant = d;
            constant.coeff.erase(xs[0].first);
            constant.coeff.erase(xs[1].first);
            const cplx cval = constant.eval({}, params);
            if (lattice_distance(cval, params.eta) < 1e-9) {
                const auto [a1, i1] = x_indices(xs[0].first);
                const auto [a2, i2] = x_indices(xs[1].first);
                (void)a1; (void)a2;
                if (i1 != i2 && roots.gram[i1 - 1][i2 - 1] != 0) dc.order_one_allowed = true;
            }
        }
        out.push_back(std::move(dc));
    }
    return out;
}

// Laurent coefficients c_{-1}, c_{-2} (optionally c_{-3}) by a small circular
// contour in the transverse variable, normalized by the contour magnitude.
struct LaurentProbe {
    double res1 = 0.0;
    double res2 = 0.0;
    double res3 = 0.0;
};

inline std::optional<LaurentProbe> laurent_probe(const Expr& body, const DivisorClass& dc,
                                                 Assignment base, const EllipticParams& params,
                                                 int max_order = 2) {
    constexpr int kNodes = 64;
    constexpr double kRadius = 0.02;
    // Solve the affine divisor for the transverse variable.
    const cplx w = dc.form.eval(base, params);
    const cplx t0 = base.at(dc.transverse) - w / dc.coeff;
    cplx c1{0, 0}, c2{0, 0}, c3{0, 0};
    double fmax = 0.0;
    for (int j = 0; j < kNodes; ++j) {
        const double ang = 2.0 * kPi * j / kNodes;
        const cplx ph{std::cos(ang), std::sin(ang)};
        base[dc.transverse] = t0 + kRadius * ph;
        cplx v;
        try {
            v = evaluate(body, base, params);
        } catch (const near_pole_error&) {
            return std::nullopt; // another divisor crosses the contour; caller refreezes
        }
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return std::nullopt;
        fmax = std::max(fmax, std::abs(v));
        c1 += v * (kRadius * ph);
        c2 += v * (kRadius * kRadius * ph * ph);
        if (max_order >= 3) c3 += v * (kRadius * kRadius * kRadius * ph * ph * ph);
    }
    c1 /= kNodes;
    c2 /= kNodes;
    c3 /= kNodes;
    LaurentProbe p;
    p.res1 = std::abs(c1) / (kRadius * fmax + 1.0);
    p.res2 = std::abs(c2) / (kRadius * kRadius * fmax + 1.0);
    p.res3 = std::abs(c3) / (kRadius * kRadius * kRadius * fmax + 1.0);
    return p;
}

} // namespace detail

// Condition 1: order <= 1 on coupled cross-color divisors, no pole anywhere else
// a syntactic denominator could put one.
inline ConditionReport pole_order_condition(const GradedElement& f, const RootData& roots,
                                            const EllipticParams& params, Rng& rng,
                                            const SampleSpec* custom_spec = nullptr) {
    ConditionReport rep;
    const auto classes = detail::classify_divisors(f, roots, params);
    const SampleSpec spec = custom_spec ? *custom_spec : spec_for(f.grade, roots.rank);
    const std::vector<DivisorReport> divs{pole_divisors(f.body)};
    if (classes.empty()) {
        rep.vacuous = true;
        rep.note = "no syntactic divisors";
        return rep;
    }
    for (const auto& dc : classes) {
        for (int freeze = 0; freeze < 2; ++freeze) {
            std::optional<detail::LaurentProbe> probe;
            for (int attempt = 0; attempt < 24 && !probe; ++attempt) {
                Assignment base = sample_admissible(spec, divs, params, rng);
                probe = detail::laurent_probe(f.body, dc, base, params);
            }
            if (!probe)
                throw degenerate_sample_error("pole_order_condition: contour freeze failed");
            rep.residual = std::max(rep.residual, probe->res2);
            if (!dc.order_one_allowed) rep.residual = std::max(rep.residual, probe->res1);
        }
    }
    // Holomorphy spot-check away from divisors.
    for (int s = 0; s < 4; ++s) {
        const Assignment pt = sample_admissible(spec, divs, params, rng);
        try {
            const cplx v = evaluate(f.body, pt, params);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) rep.residual = 1e300;
        } catch (const near_pole_error&) {
            --s; // resample
        }
    }
    return rep;
}

// Condition 2: both period relations for every x variable, with multiplier
// order n_i and shift u_i - (delta_i, l) tau.
inline ConditionReport multiplier_condition(const GradedElement& f, const WeightForm& n,
                                            const RootData& roots, const EllipticParams& params,
                                            Rng& rng, const SampleSpec* custom_spec = nullptr) {
    ConditionReport rep;
    if (f.grade.total() == 0) {
        rep.vacuous = true;
        rep.note = "grade zero has no x variables";
        return rep;
    }
    const SampleSpec spec = custom_spec ? *custom_spec : spec_for(f.grade, roots.rank);
    const std::vector<DivisorReport> divs{pole_divisors(f.body)};
    const int samples = std::max(8, params.sample_count / 4);
    for (int i = 1; i <= roots.rank; ++i) {
        for (int a = 1; a <= f.grade.counts[i - 1]; ++a) {
            const std::string var = x_name(a, i);
            int done = 0, budget = 40 * samples;
            while (done < samples) {
                if (budget-- <= 0)
                    throw degenerate_sample_error("multiplier_condition: sampling budget exhausted");
                Assignment pt = sample_admissible(spec, divs, params, rng);
                try {
                    const cplx base = evaluate(f.body, pt, params);
                    Assignment p1 = pt;
                    p1[var] += 1.0;
                    rep.residual = std::max(rep.residual, residual(evaluate(f.body, p1, params), base));
                    Assignment pe = pt;
                    pe[var] += params.eta;
                    const cplx cshift = pt.at(u_name(i)) -
                                        static_cast<double>(grade_pairing(roots, i - 1, f.grade)) *
                                            params.tau;
                    const cplx mult = exp2pii(-(static_cast<double>(n.values[i - 1]) * pt.at(var) + cshift));
                    rep.residual = std::max(rep.residual,
                                            residual(evaluate(f.body, pe, params), mult * base));
                    ++done;
                } catch (const near_pole_error&) {
                }
            }
        }
    }
    return rep;
}

// Condition 3: vanishing on the chain subspaces attached to each ordered pair
// of coupled colors with a_{i,j} < 0.
inline ConditionReport chain_vanishing_condition(const GradedElement& f, const RootData& roots,
                                                 const EllipticParams& params, Rng& rng,
                                                 const SampleSpec* custom_spec = nullptr) {
    ConditionReport rep;
    rep.vacuous = true;
    const SampleSpec spec = custom_spec ? *custom_spec : spec_for(f.grade, roots.rank);
    const std::vector<DivisorReport> divs{pole_divisors(f.body)};
    for (int i = 1; i <= roots.rank; ++i) {
        for (int j = 1; j <= roots.rank; ++j) {
            if (i == j || roots.cartan[i - 1][j - 1] >= 0) continue;
            const int chain = -roots.cartan[i - 1][j - 1] + 1; // variables of color i in the chain
            if (f.grade.counts[i - 1] < chain || f.grade.counts[j - 1] < 1) continue;
            rep.vacuous = false;
            const double dii = static_cast<double>(roots.gram[i - 1][i - 1]);
            const double dij = static_cast<double>(roots.gram[i - 1][j - 1]);
            int done = 0, budget = 200;
            while (done < 6) {
                if (budget-- <= 0)
                    throw degenerate_sample_error("chain_vanishing_condition: sampling budget exhausted");
                Assignment pt = sample_admissible(spec, divs, params, rng);
                try {
                    const double scale = std::abs(evaluate(f.body, pt, params));
                    // Canonical chain on the lowest indices; symmetry covers the rest,
                    // and the transposition check is performed separately.
                    Assignment sub = pt;
                    const cplx t = pt.at(x_name(1, i));
                    for (int k = 2; k <= chain; ++k)
                        sub[x_name(k, i)] = t - static_cast<double>(k - 1) * dii * params.tau;
                    sub[x_name(1, j)] =
                        t - static_cast<double>(chain - 1) * dii * params.tau - dij * params.tau;
                    const cplx v = evaluate(f.body, sub, params);
                    rep.residual = std::max(rep.residual, std::abs(v) / (scale + 1.0));
                    ++done;
                } catch (const near_pole_error&) {
                }
            }
        }
    }
    if (rep.vacuous) rep.note = "grade too small to populate any chain";
    return rep;
}

// Condition 4: invariance under x -> x - nu, u_i -> u_i + n_i nu on each
// irreducible component.
inline ConditionReport translation_condition(const GradedElement& f, const WeightForm& n,
                                             const RootData& roots, const EllipticParams& params,
                                             Rng& rng, const SampleSpec* custom_spec = nullptr) {
    ConditionReport rep;
    const SampleSpec spec = custom_spec ? *custom_spec : spec_for(f.grade, roots.rank);
    const std::vector<DivisorReport> divs{pole_divisors(f.body)};
    const auto components = roots.coxeter_components();
    int done = 0, budget = 200;
    while (done < 6) {
        if (budget-- <= 0)
            throw degenerate_sample_error("translation_condition: sampling budget exhausted");
        Assignment pt = sample_admissible(spec, divs, params, rng);
        try {
            const cplx base = evaluate(f.body, pt, params);
            for (const auto& comp : components) {
                const cplx nu = rng.cell_point(params.eta);
                Assignment shifted = pt;
                for (int ci : comp) {
                    for (int a = 1; a <= f.grade.counts[ci]; ++a)
                        shifted[x_name(a, ci + 1)] -= nu;
                    shifted[u_name(ci + 1)] += static_cast<double>(n.values[ci]) * nu;
                }
                rep.residual =
                    std::max(rep.residual, residual(evaluate(f.body, shifted, params), base));
            }
            ++done;
        } catch (const near_pole_error&) {
        }
    }
    return rep;
}

inline MembershipReport q_membership(const GradedElement& f, const WeightForm& n,
                                     const RootData& roots, const EllipticParams& params,
                                     Rng& rng, const SampleSpec* custom_spec = nullptr) {
    params.validate();
    roots.validate();
    MembershipReport rep;
    rep.pole_order = pole_order_condition(f, roots, params, rng, custom_spec);
    rep.multiplier = multiplier_condition(f, n, roots, params, rng, custom_spec);
    rep.chain_vanishing = chain_vanishing_condition(f, roots, params, rng, custom_spec);
    rep.translation = translation_condition(f, n, roots, params, rng, custom_spec);
    return rep;
}

// Product membership: the closure property at a concrete pair.
inline MembershipReport closure_check(const GradedElement& f, const GradedElement& g,
                                      const WeightForm& n, const RootData& roots,
                                      const EllipticParams& params, Rng& rng) {
    return q_membership(star(f, g, roots, params), n, roots, params, rng);
}

// Star computed inside a subsystem agrees with star computed in the ambient
// system on elements supported on the kept colors.
inline ResidualReport subsystem_embedding_check(const RootData& ambient,
                                                const std::vector<int>& keep,
                                                const std::vector<GradedElement>& sub_elements,
                                                const EllipticParams& params, Rng& rng) {
    const RootData sub = ambient.subsystem(keep);
    ResidualReport rep;
    if (keep.empty() || sub_elements.size() < 2) {
        rep.samples = 0;
        return rep; // only grade 0 embeds; trivially
    }
    // Rename subsystem variables to their ambient positions.
    auto embed = [&](const GradedElement& e) {
        std::map<std::string, AffineForm> ren;
        for (int k = 0; k < sub.rank; ++k) {
            if (k + 1 != keep[k] + 1) {
                for (int a = 1; a <= e.grade.counts[k]; ++a)
                    ren[x_name(a, k + 1)] = AffineForm::var(x_name(a, keep[k] + 1));
                ren[u_name(k + 1)] = AffineForm::var(u_name(keep[k] + 1));
            }
        }
        std::vector<int> counts(ambient.rank, 0);
        for (int k = 0; k < sub.rank; ++k) counts[keep[k]] = e.grade.counts[k];
        return GradedElement{Grade(counts), substitute(e.body, ren)};
    };
    for (size_t i = 0; i + 1 < sub_elements.size(); i += 2) {
        const GradedElement sub_prod = star(sub_elements[i], sub_elements[i + 1], sub, params);
        const GradedElement ambient_prod =
            star(embed(sub_elements[i]), embed(sub_elements[i + 1]), ambient, params);
        const auto r = equal_numeric(embed(sub_prod), ambient_prod, params, rng);
        rep.max_residual = std::max(rep.max_residual, r.max_residual);
        rep.samples += r.samples;
    }
    return rep;
}

} // namespace ellq

#endif
