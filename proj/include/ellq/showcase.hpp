// Explicit families and their stated relations: the Belavin-type generators
// and exchange relations, the Grassmannian element, the diagonal-subalgebra
// dimension data, the generalized exchange relations with their Yang-Baxter
// consistency, and the affine commuting family.
#ifndef ELLQ_SHOWCASE_HPP
#define ELLQ_SHOWCASE_HPP

#include <functional>
#include <string>
#include <vector>

#include "ellq/intertwiner.hpp"

namespace ellq {

struct NamedResidual {
    std::string name;
    double residual = 0.0;
    bool pass(double tol) const { return residual < tol; }
};

namespace detail {

// One-variable section of order m with shift form c, as a lattice-theta node.
inline Expr order_m_section(int m, const AffineForm& arg, const AffineForm& shift, int klass) {
    LatticeData d;
    d.A = {{static_cast<long>(m)}};
    d.rep = {static_cast<long>(klass)};
    d.sum_dirs = {0};
    return make_lattice_theta(d, {arg}, {shift});
}

inline AffineForm u_sum(int from, int to) { // u_from + ... + u_to (1-based, inclusive)
    AffineForm f;
    for (int k = from; k <= to; ++k) f.add_term(u_name(k), cplx(1.0, 0.0));
    return f;
}

} // namespace detail

// ---- Zamolodchikov-type generators -----------------------------------------

struct BelavinData {
    OpAlgebra alg;
    int m = 1;
    // f[alpha-1][i-1]: the ladder generators; site index runs over the first color.
    std::vector<std::vector<OperatorElement>> f;
};

// Ladder elements: nested sums over one site index per color, with the
// telescoping theta-quotient coefficients.
inline BelavinData belavin_generators(int h, int m, const Grade& p, const EllipticParams& params) {
    (void)params;
    BelavinData data;
    data.alg = OpAlgebra{RootData::type_a(h), p, 1, "y", "u"};
    data.m = m;
    const int p1 = p.counts[0];
    data.f.resize(p1);
    for (int alpha = 1; alpha <= p1; ++alpha) {
        for (int i = 1; i <= h; ++i) {
            OperatorElement fi;
            // iterate alpha_2..alpha_i over sites of colors 2..i
            std::vector<int> idx(i, 0);
            idx[0] = alpha - 1;
            while (true) {
                std::vector<Expr> nums, dens;
                for (int nu = 1; nu < i; ++nu) {
                    // v_nu - v_i = -(u_{nu+1} + ... + u_i)
                    AffineForm base = AffineForm::var(y_name(idx[nu - 1] + 1, nu)) -
                                      AffineForm::var(y_name(idx[nu] + 1, nu + 1));
                    base.add_term("tau", cplx(1.0, 0.0));
                    AffineForm top = base - detail::u_sum(nu + 1, i);
                    nums.push_back(make_theta(top));
                    dens.push_back(make_theta(base));
                }
                Expr coeff = dens.empty() ? make_product(nums)
                                          : make_div(make_product(nums), make_product(dens));
                ExpMap exps;
                for (int nu = 1; nu <= i; ++nu) exps[GenKey{nu, idx[nu - 1] + 1}] = 1;
                fi = op_add(fi, OperatorElement{{OpTerm{coeff, exps}}});
                int nu = 1; // advance alpha_2..alpha_i
                while (nu < i && idx[nu] + 1 == p.counts[nu]) idx[nu++] = 0;
                if (nu == i) break;
                ++idx[nu];
            }
            data.f[alpha - 1].push_back(fi);
        }
    }
    return data;
}

// z element from the ladder generators: sum over the first-color site of the
// order-m section evaluated there.
inline OperatorElement belavin_z(const BelavinData& data, int i, int klass) {
    OperatorElement z;
    for (int alpha = 1; alpha <= data.alg.p.counts[0]; ++alpha) {
        const Expr phi = detail::order_m_section(
            data.m, AffineForm::var(y_name(alpha, 1)), detail::u_sum(1, i), klass);
        z = op_add(z, op_multiply(op_scalar(phi), data.f[alpha - 1][i - 1], data.alg));
    }
    return z;
}

// Direct nested-sum expansion of the same z element.
inline OperatorElement belavin_z_direct(const BelavinData& data, int i, int klass) {
    const Grade& p = data.alg.p;
    OperatorElement z;
    std::vector<int> idx(i, 0);
    while (true) {
        std::vector<Expr> nums{detail::order_m_section(
            data.m, AffineForm::var(y_name(idx[0] + 1, 1)), detail::u_sum(1, i), klass)};
        std::vector<Expr> dens;
        for (int nu = 1; nu < i; ++nu) {
            AffineForm base = AffineForm::var(y_name(idx[nu - 1] + 1, nu)) -
                              AffineForm::var(y_name(idx[nu] + 1, nu + 1));
            base.add_term("tau", cplx(1.0, 0.0));
            nums.push_back(make_theta(base - detail::u_sum(nu + 1, i)));
            dens.push_back(make_theta(base));
        }
        Expr coeff = dens.empty() ? make_product(nums)
                                  : make_div(make_product(nums), make_product(dens));
        ExpMap exps;
        for (int nu = 1; nu <= i; ++nu) exps[GenKey{nu, idx[nu - 1] + 1}] = 1;
        z = op_add(z, OperatorElement{{OpTerm{coeff, exps}}});
        int nu = 0;
        while (nu < i && idx[nu] + 1 == p.counts[nu]) idx[nu++] = 0;
        if (nu == i) break;
        ++idx[nu];
    }
    return z;
}

// The graded element whose difference-operator image the z expansion is.
inline GradedElement belavin_q_element(int h, int m, int i, int klass) {
    std::vector<int> counts(h, 0);
    for (int k = 0; k < i; ++k) counts[k] = 1;
    std::vector<Expr> nums{detail::order_m_section(m, AffineForm::var(x_name(1, 1)),
                                                   detail::u_sum(1, i), klass)};
    std::vector<Expr> dens;
    for (int a = 1; a < i; ++a) {
        AffineForm base = AffineForm::var(x_name(1, a)) - AffineForm::var(x_name(1, a + 1));
        nums.push_back(make_theta(base - detail::u_sum(a + 1, i) +
                                  AffineForm::var("tau")));
        dens.push_back(make_theta(base));
    }
    Expr body = dens.empty() ? make_product(nums)
                             : make_div(make_product(nums), make_product(dens));
    return {Grade(counts), body};
}

// Exchange, shift and commutation relations among the ladder generators.
inline std::vector<NamedResidual> relations10_check(int h, int m, const Grade& p,
                                                    const EllipticParams& params, Rng& rng) {
    BelavinData data = belavin_generators(h, m, p, params);
    const OpAlgebra& alg = data.alg;
    std::vector<NamedResidual> out;
    auto tau_form = [&](double k) {
        AffineForm f;
        f.add_term("tau", cplx(k, 0.0));
        return f;
    };
    auto vdiff = [&](int i, int j) { return detail::u_sum(1, i) - detail::u_sum(1, j); };
    const int p1 = p.counts[0];
    auto check = [&](const std::string& name, const OperatorElement& A, const OperatorElement& B) {
        out.push_back({name, op_equal_numeric(A, B, alg, params, rng).max_residual});
    };
    for (int i = 1; i <= h; ++i)
        for (int j = i + 1; j <= h; ++j)
            for (int alpha = 1; alpha <= p1; ++alpha)
                for (int beta = 1; beta <= p1; ++beta) {
                    if (alpha == beta) continue;
                    // two-term exchange
                    AffineForm ydiff = AffineForm::var(y_name(alpha, 1)) -
                                       AffineForm::var(y_name(beta, 1));
                    Expr c1 = make_div(
                        make_product({make_e2pi(tau_form(1)), make_theta(vdiff(i, j)),
                                      make_theta(ydiff - tau_form(2))}),
                        make_mul(make_theta(vdiff(i, j) + tau_form(2)), make_theta(ydiff)));
                    Expr c2 = make_div(
                        make_product({make_e2pi(vdiff(i, j) - tau_form(1)),
                                      make_theta(tau_form(2)),
                                      make_theta(ydiff - vdiff(i, j))}),
                        make_mul(make_theta(vdiff(i, j) + tau_form(2)), make_theta(ydiff)));
                    const auto& F = data.f;
                    OperatorElement lhs = op_multiply(F[alpha - 1][i - 1], F[beta - 1][j - 1], alg);
                    OperatorElement rhs = op_add(
                        op_multiply(op_scalar(c1),
                                    op_multiply(F[beta - 1][j - 1], F[alpha - 1][i - 1], alg), alg),
                        op_multiply(op_scalar(c2),
                                    op_multiply(F[alpha - 1][j - 1], F[beta - 1][i - 1], alg), alg));
                    check("two-term f(" + std::to_string(alpha) + "," + std::to_string(i) +
                              ")f(" + std::to_string(beta) + "," + std::to_string(j) + ")",
                          lhs, rhs);
                }
    for (int i = 1; i <= h; ++i)
        for (int alpha = 1; alpha <= p1; ++alpha)
            for (int beta = alpha + 1; beta <= p1; ++beta) {
                AffineForm ydiff = AffineForm::var(y_name(alpha, 1)) -
                                   AffineForm::var(y_name(beta, 1));
                Expr c = make_mul(make_const(-1.0),
                                  make_mul(make_e2pi(-ydiff),
                                           make_div(make_theta(ydiff - tau_form(2)),
                                                    make_theta(-ydiff - tau_form(2)))));
                check("same-column f(" + std::to_string(alpha) + "," + std::to_string(i) + ")f(" +
                          std::to_string(beta) + "," + std::to_string(i) + ")",
                      op_multiply(data.f[alpha - 1][i - 1], data.f[beta - 1][i - 1], alg),
                      op_multiply(op_scalar(c),
                                  op_multiply(data.f[beta - 1][i - 1], data.f[alpha - 1][i - 1], alg),
                                  alg));
            }
    for (int i = 1; i <= h; ++i)
        for (int j = i + 1; j <= h; ++j)
            for (int alpha = 1; alpha <= p1; ++alpha)
                check("same-row f(" + std::to_string(alpha) + "," + std::to_string(j) + ")f(" +
                          std::to_string(alpha) + "," + std::to_string(i) + ")",
                      op_multiply(data.f[alpha - 1][j - 1], data.f[alpha - 1][i - 1], alg),
                      op_multiply(op_scalar(make_e2pi(tau_form(1))),
                                  op_multiply(data.f[alpha - 1][i - 1], data.f[alpha - 1][j - 1], alg),
                                  alg));
    // coordinate and v shifts
    for (int i = 1; i <= h; ++i)
        for (int alpha = 1; alpha <= p1; ++alpha) {
            for (int beta = 1; beta <= p1; ++beta) {
                Expr yb = make_var(y_name(beta, 1));
                Expr shifted = beta == alpha
                                   ? affine_to_expr(AffineForm::var(y_name(beta, 1)) + tau_form(2))
                                   : yb;
                check("y-shift f(" + std::to_string(alpha) + "," + std::to_string(i) + ") y_" +
                          std::to_string(beta),
                      op_multiply(data.f[alpha - 1][i - 1], op_scalar(yb), alg),
                      op_multiply(op_scalar(shifted), data.f[alpha - 1][i - 1], alg));
            }
            for (int j = 1; j <= h; ++j) {
                AffineForm vj = detail::u_sum(1, j);
                AffineForm shifted = vj - tau_form(i == j ? 4.0 : 2.0);
                check("v-shift f(" + std::to_string(alpha) + "," + std::to_string(i) + ") v_" +
                          std::to_string(j),
                      op_multiply(data.f[alpha - 1][i - 1], op_scalar(affine_to_expr(vj)), alg),
                      op_multiply(op_scalar(affine_to_expr(shifted)), data.f[alpha - 1][i - 1], alg));
            }
        }
    return out;
}

// ---- Grassmannian element ---------------------------------------------------

// Symmetric several-variable sections for the top color: multiplier order
// m-2h+2 in each variable with unit cross-coefficients. The shift carries the
// corrections (-(h+1) tau, -(h-1) eta, (3-h)/2) forced by the multiplier
// bookkeeping of the assembled element.
inline std::vector<Expr> grassmann_phi_basis(int h, int m, const EllipticParams& params,
                                             Rng& rng) {
    const int n = h;
    IntMat A(n, IntVec(n, 1));
    for (int i = 0; i < n; ++i) A[i][i] = m - 2 * h + 2;
    LatticeSpace space = build_lattice_space(A, std::vector<double>(n, -(h - 1.0)));
    std::vector<Expr> cand;
    for (const auto& d : space.basis) {
        std::vector<AffineForm> args, shifts;
        for (int v = 0; v < n; ++v) {
            args.push_back(AffineForm::var(x_name(v + 1, h)));
            AffineForm b = detail::u_sum(1, h);
            b.add_term("tau", cplx(-(h + 1.0), 0.0));
            b.add_term("eta", cplx(-(h - 1.0), 0.0));
            b.constant += 0.5 * (3.0 - h);
            shifts.push_back(b);
        }
        cand.push_back(make_lattice_theta(d, args, shifts));
    }
    if (cand.empty() || n == 1) return cand;
    // Constrain to the symmetric subspace by sampled transposition rows;
    // candidates are normalized to O(1) so satisfied constraints read as zero.
    const int nc = static_cast<int>(cand.size());
    SampleSpec spec;
    for (int v = 1; v <= n; ++v) spec.vars.push_back(x_name(v, h));
    for (int i = 1; i <= h; ++i) spec.vars.push_back(u_name(i));
    std::vector<double> scale(nc, 0.0);
    for (int s = 0; s < 4; ++s) {
        const Assignment pt = sample_admissible(spec, {}, params, rng);
        for (int c = 0; c < nc; ++c)
            scale[c] = std::max(scale[c], std::abs(evaluate(cand[c], pt, params)));
    }
    for (auto& v : scale)
        if (v == 0.0) v = 1.0;
    std::vector<std::vector<cplx>> rows;
    for (int a = 1; a < n; ++a)
        for (int s = 0; s < std::max(4, nc); ++s) {
            Assignment pt = sample_admissible(spec, {}, params, rng);
            Assignment sw = pt;
            std::swap(sw[x_name(a, h)], sw[x_name(a + 1, h)]);
            std::vector<cplx> row(nc);
            for (int c = 0; c < nc; ++c)
                row[c] = (evaluate(cand[c], sw, params) - evaluate(cand[c], pt, params)) / scale[c];
            rows.push_back(std::move(row));
        }
    Eigen::MatrixXcd C(static_cast<int>(rows.size()), nc);
    for (size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < nc; ++c) C(static_cast<int>(r), c) = rows[r][c];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = std::max(sv.size() ? 1e-8 * sv(0) : 0.0, 1e-7);
    int null_dim = nc - static_cast<int>(sv.size());
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) <= cut) ++null_dim;
    std::vector<Expr> out;
    for (int k = 0; k < null_dim; ++k) {
        const auto vec = svd.matrixV().col(nc - 1 - k);
        std::vector<Expr> terms;
        for (int c = 0; c < nc; ++c)
            if (std::abs(vec(c)) > 1e-12)
                terms.push_back(make_mul(make_const(vec(c) / scale[c]), cand[c]));
        out.push_back(make_sum(terms));
    }
    return out;
}

// The explicit element of grade delta_1 + 2 delta_2 + ... + h delta_h.
inline GradedElement grassmann_element(int h, int m, const Expr& phi) {
    std::vector<int> counts(h);
    for (int i = 1; i <= h; ++i) counts[i - 1] = i;
    std::vector<Expr> nums, dens;
    for (int i = 1; i < h; ++i) {
        AffineForm arg;
        for (int a = 1; a <= i; ++a) arg = arg + AffineForm::var(x_name(a, i));
        for (int a = 1; a <= i + 1; ++a) arg = arg - AffineForm::var(x_name(a, i + 1));
        arg = arg + detail::u_sum(1, i);
        // half-period and eta corrections from the multiplier bookkeeping
        arg.constant += 0.5;
        arg.add_term("eta", cplx(-(i - 1.0), 0.0));
        nums.push_back(make_theta(arg));
    }
    for (int i = 1; i <= h; ++i)
        for (int a = 1; a <= i; ++a)
            for (int b = 1; b <= i; ++b) {
                if (a == b) continue;
                AffineForm arg = AffineForm::var(x_name(a, i)) - AffineForm::var(x_name(b, i));
                arg.add_term("tau", cplx(-1.0, 0.0));
                nums.push_back(make_theta(arg));
            }
    // phi takes the top-color variables
    nums.push_back(phi);
    for (int i = 1; i < h; ++i)
        for (int a = 1; a <= i; ++a)
            for (int b = 1; b <= i + 1; ++b)
                dens.push_back(make_theta(AffineForm::var(x_name(a, i)) -
                                          AffineForm::var(x_name(b, i + 1))));
    Expr body = dens.empty() ? make_product(nums)
                             : make_div(make_product(nums), make_product(dens));
    (void)m;
    return {Grade(counts), body};
}

inline WeightForm grassmann_weight(int h, int m) {
    std::vector<int> n(h, 0);
    if (h == 1) {
        n[0] = m;
    } else {
        n[0] = -1;
        n[h - 1] = m;
    }
    return WeightForm(n);
}

// ---- generalized exchange relations ------------------------------------------

inline WeightForm genr_weight(int h, int nu) {
    std::vector<int> n(h, 0);
    n[nu - 1] = 1;
    return WeightForm(n);
}

inline Grade genr_grade(int h, int i1, int i2) {
    std::vector<int> c(h, 0);
    for (int i = i1; i <= i2; ++i) c[i - 1] = 1;
    return Grade(c);
}

// The distinguished interval element of grade delta_{i1} + ... + delta_{i2}.
inline GradedElement genr_element(int h, int nu, int i1, int i2) {
    std::vector<Expr> nums, dens;
    for (int phi = i1; phi < nu; ++phi) {
        AffineForm arg = AffineForm::var(x_name(1, phi)) - AffineForm::var(x_name(1, phi + 1)) +
                         detail::u_sum(i1, phi);
        arg.add_term("tau", cplx(-1.0, 0.0));
        nums.push_back(make_theta(arg));
    }
    for (int psi = nu; psi < i2; ++psi) {
        AffineForm arg = AffineForm::var(x_name(1, psi)) - AffineForm::var(x_name(1, psi + 1)) -
                         detail::u_sum(psi + 1, i2);
        arg.add_term("tau", cplx(1.0, 0.0));
        nums.push_back(make_theta(arg));
    }
    {
        AffineForm arg = AffineForm::var(x_name(1, nu)) + detail::u_sum(i1, i2);
        arg.add_term("tau", cplx(-2.0, 0.0));
        nums.push_back(make_theta(arg));
    }
    for (int p = i1; p < i2; ++p)
        dens.push_back(make_theta(AffineForm::var(x_name(1, p)) - AffineForm::var(x_name(1, p + 1))));
    Expr body = dens.empty() ? make_product(nums)
                             : make_div(make_product(nums), make_product(dens));
    return {genr_grade(h, i1, i2), body};
}

namespace detail {

inline Expr genr_q(int j, int jp) { // e^{2 pi i tau} for j < j', inverse for j > j'
    if (j == jp) return make_const(1.0);
    AffineForm f;
    f.add_term("tau", cplx(j < jp ? 1.0 : -1.0, 0.0));
    return make_e2pi(f);
}

inline AffineForm genr_v(int i, int nu) { return u_sum(i, nu); }   // u_i + ... + u_nu
inline AffineForm genr_w(int i, int nu) { return u_sum(nu, i); }   // u_nu + ... + u_i

// Exchange coefficients of the two-term relation.
inline std::pair<Expr, Expr> genr_two_term(int i1, int i2, int i1p, int i2p, int nu) {
    AffineForm t2;
    t2.add_term("tau", cplx(2.0, 0.0));
    const AffineForm dv = genr_v(i1, nu) - genr_v(i1p, nu);
    const AffineForm dw = genr_w(i2p, nu) - genr_w(i2, nu);
    Expr c1 = make_div(make_product({make_theta(dv - t2), make_theta(dw), genr_q(i1p, i1),
                                     genr_q(i2p, i2)}),
                       make_mul(make_theta(dv), make_theta(dw - t2)));
    Expr c2 = make_div(make_product({make_theta(-t2), genr_q(i2p, i2), make_theta(dw - dv)}),
                       make_mul(make_theta(-dv), make_theta(dw - t2)));
    return {c1, c2};
}

} // namespace detail

inline GradedElement q0_times(const Expr& c, const GradedElement& e) {
    return {e.grade, make_mul(c, e.body)};
}

// Every relation of the family, verified as a star-product identity, plus the
// one-dimensionality of the interval grades.
inline std::vector<NamedResidual> relations13_check(int h, int nu, const EllipticParams& params,
                                                    Rng& rng) {
    const RootData roots = RootData::type_a(h);
    const WeightForm n = genr_weight(h, nu);
    std::vector<NamedResidual> out;
    auto E = [&](int a, int b) { return genr_element(h, nu, a, b); };
    auto pair_name = [](int a, int b) {
        return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
    };
    std::vector<std::pair<int, int>> pairs;
    for (int a = 1; a <= nu; ++a)
        for (int b = nu; b <= h; ++b) pairs.emplace_back(a, b);
    // two-term exchanges
    for (const auto& [a, b] : pairs)
        for (const auto& [ap, bp] : pairs) {
            if (a == ap || b == bp) continue;
            auto [c1, c2] = detail::genr_two_term(a, b, ap, bp, nu);
            GradedElement lhs = star(E(a, b), E(ap, bp), roots, params);
            GradedElement rhs = add(q0_times(c1, star(E(ap, bp), E(a, b), roots, params)),
                                    q0_times(c2, star(E(a, bp), E(ap, b), roots, params)));
            out.push_back({"two-term " + pair_name(a, b) + "x" + pair_name(ap, bp),
                           equal_numeric(lhs, rhs, params, rng).max_residual});
        }
    // single-q exchanges
    for (const auto& [a, b] : pairs)
        for (const auto& [ap, bp] : pairs) {
            if (a == ap && b == bp) continue;
            if (a != ap && b != bp) continue;
            const Expr q = a == ap ? detail::genr_q(bp, b) : detail::genr_q(ap, a);
            GradedElement lhs = star(E(a, b), E(ap, bp), roots, params);
            GradedElement rhs = q0_times(q, star(E(ap, bp), E(a, b), roots, params));
            out.push_back({"q-exchange " + pair_name(a, b) + "x" + pair_name(ap, bp),
                           equal_numeric(lhs, rhs, params, rng).max_residual});
        }
    // v / w shifts
    AffineForm t2;
    t2.add_term("tau", cplx(2.0, 0.0));
    for (const auto& [a, b] : pairs) {
        for (int ap = 1; ap <= nu; ++ap) {
            const AffineForm v = detail::genr_v(ap, nu);
            GradedElement lhs = star(E(a, b), {Grade::zero(h), affine_to_expr(v)}, roots, params);
            GradedElement rhs = q0_times(affine_to_expr(ap == a ? v - t2 : v), E(a, b));
            out.push_back({"v-shift " + pair_name(a, b) + " v_" + std::to_string(ap),
                           equal_numeric(lhs, rhs, params, rng).max_residual});
        }
        for (int bp = nu; bp <= h; ++bp) {
            const AffineForm w = detail::genr_w(bp, nu);
            GradedElement lhs = star(E(a, b), {Grade::zero(h), affine_to_expr(w)}, roots, params);
            GradedElement rhs = q0_times(affine_to_expr(bp == b ? w - t2 : w), E(a, b));
            out.push_back({"w-shift " + pair_name(a, b) + " w_" + std::to_string(bp),
                           equal_numeric(lhs, rhs, params, rng).max_residual});
        }
    }
    // interval dimensions
    for (int a = 1; a <= h; ++a)
        for (int b = a; b <= h; ++b) {
            const int expected = (a <= nu && nu <= b) ? 1 : 0;
            const int got = numeric_dim(n, genr_grade(h, a, b), roots, params, rng);
            out.push_back({"dim " + pair_name(a, b), got == expected ? 0.0 : 1.0});
        }
    return out;
}

// ---- Yang-Baxter consistency of the exchange map ------------------------------

namespace detail {

struct GenrWord {
    Expr coeff;
    std::vector<std::pair<int, int>> pairs;
};

// u_k -> u_k - 2 (grade(prefix), delta_k) tau for a coefficient created to the
// right of the prefix.
inline Expr genr_prefix_shift(const Expr& c, const std::vector<std::pair<int, int>>& prefix,
                              const RootData& roots) {
    std::vector<long> l(roots.rank, 0);
    for (const auto& [a, b] : prefix)
        for (int t = a; t <= b; ++t) ++l[t - 1];
    std::map<std::string, AffineForm> sigma;
    for (int k = 1; k <= roots.rank; ++k) {
        long pair = 0;
        for (int t = 0; t < roots.rank; ++t) pair += l[t] * roots.gram[t][k - 1];
        if (pair == 0) continue;
        AffineForm f = AffineForm::var(u_name(k));
        f.add_term("tau", cplx(-2.0 * static_cast<double>(pair), 0.0));
        sigma[u_name(k)] = f;
    }
    return substitute(c, sigma);
}

inline std::vector<GenrWord> genr_exchange_at(const GenrWord& w, int pos, int nu,
                                              const RootData& roots) {
    const auto [a, b] = w.pairs[pos];
    const auto [ap, bp] = w.pairs[pos + 1];
    std::vector<std::pair<Expr, std::pair<std::pair<int, int>, std::pair<int, int>>>> local;
    if (a == ap && b == bp) {
        local.push_back({make_const(1.0), {{ap, bp}, {a, b}}});
    } else if (a == ap || b == bp) {
        const Expr q = a == ap ? genr_q(bp, b) : genr_q(ap, a);
        local.push_back({q, {{ap, bp}, {a, b}}});
    } else {
        auto [c1, c2] = genr_two_term(a, b, ap, bp, nu);
        local.push_back({c1, {{ap, bp}, {a, b}}});
        local.push_back({c2, {{a, bp}, {ap, b}}});
    }
    std::vector<GenrWord> out;
    const std::vector<std::pair<int, int>> prefix(w.pairs.begin(), w.pairs.begin() + pos);
    for (auto& [c, repl] : local) {
        GenrWord nw = w;
        nw.pairs[pos] = repl.first;
        nw.pairs[pos + 1] = repl.second;
        nw.coeff = make_mul(w.coeff, genr_prefix_shift(c, prefix, roots));
        out.push_back(std::move(nw));
    }
    return out;
}

inline std::vector<GenrWord> genr_apply(const std::vector<GenrWord>& ws, int pos, int nu,
                                        const RootData& roots) {
    std::vector<GenrWord> out;
    for (const auto& w : ws)
        for (auto& nw : genr_exchange_at(w, pos, nu, roots)) out.push_back(std::move(nw));
    return out;
}

} // namespace detail

// Reverse a three-letter word by the two braid routes and compare the
// coefficient of every resulting word at sampled u.
inline NamedResidual ybe_probe(int h, int nu, const std::vector<std::pair<int, int>>& triple,
                               const EllipticParams& params, Rng& rng) {
    const RootData roots = RootData::type_a(h);
    detail::GenrWord start{make_const(1.0), {triple[0], triple[1], triple[2]}};
    auto routeA = detail::genr_apply(
        detail::genr_apply(detail::genr_apply({start}, 0, nu, roots), 1, nu, roots), 0, nu, roots);
    auto routeB = detail::genr_apply(
        detail::genr_apply(detail::genr_apply({start}, 1, nu, roots), 0, nu, roots), 1, nu, roots);
    // collect coefficients by word
    std::map<std::vector<std::pair<int, int>>, std::pair<Expr, Expr>> merged;
    for (const auto& w : routeA) {
        auto& slot = merged[w.pairs].first;
        slot = slot ? make_add(slot, w.coeff) : w.coeff;
    }
    for (const auto& w : routeB) {
        auto& slot = merged[w.pairs].second;
        slot = slot ? make_add(slot, w.coeff) : w.coeff;
    }
    SampleSpec spec;
    for (int i = 1; i <= h; ++i) spec.vars.push_back(u_name(i));
    std::vector<DivisorReport> divs;
    for (const auto& [word, pair] : merged) {
        if (pair.first) divs.push_back(pole_divisors(pair.first));
        if (pair.second) divs.push_back(pole_divisors(pair.second));
    }
    NamedResidual res{"ybe", 0.0};
    const Expr zero = make_const(0.0);
    for (int s = 0; s < params.sample_count;) {
        const Assignment pt = sample_admissible(spec, divs, params, rng);
        try {
            for (const auto& [word, pair] : merged) {
                const cplx va = evaluate(pair.first ? pair.first : zero, pt, params);
                const cplx vb = evaluate(pair.second ? pair.second : zero, pt, params);
                res.residual = std::max(res.residual, residual(va, vb));
            }
            ++s;
        } catch (const near_pole_error&) {
        }
    }
    return res;
}

// ---- affine commuting family -------------------------------------------------

// The translation-invariant several-variable sections entering the family.
inline LatticeSpace affine_g_space(int h) {
    const RootData roots = RootData::affine_sl(h);
    return build_lattice_space(roots.gram, std::vector<double>(h, 1.0));
}

// Element of grade alpha(delta_1 + ... + delta_h) built from a g-section.
inline GradedElement affine_k_element(int h, int alpha, const LatticeData& g) {
    std::vector<Expr> nums, dens;
    std::vector<AffineForm> args, shifts;
    for (int i = 1; i <= h; ++i) {
        AffineForm X;
        for (int mu = 1; mu <= alpha; ++mu) X = X + AffineForm::var(x_name(mu, i));
        args.push_back(X);
        AffineForm b = AffineForm::var(u_name(i));
        b.add_term("eta", cplx(1.0, 0.0));
        shifts.push_back(b);
    }
    for (int i = 1; i <= h; ++i) {
        const int inext = i % h + 1;
        for (int mu = 1; mu <= alpha; ++mu)
            for (int nu = 1; nu <= alpha; ++nu) {
                if (mu != nu) {
                    AffineForm arg = AffineForm::var(x_name(mu, i)) - AffineForm::var(x_name(nu, i));
                    arg.add_term("tau", cplx(-2.0, 0.0));
                    nums.push_back(make_theta(arg));
                }
                dens.push_back(make_theta(AffineForm::var(x_name(mu, i)) -
                                          AffineForm::var(x_name(nu, inext))));
            }
    }
    nums.push_back(make_lattice_theta(g, args, shifts));
    Expr body = make_div(make_product(nums), make_product(dens));
    return {Grade(std::vector<int>(h, alpha)), body};
}

} // namespace ellq

#endif
