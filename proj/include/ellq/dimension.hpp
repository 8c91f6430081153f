// Dimension estimation: ansatz bases for the graded pieces, numeric ranks, and
// the closed-form Hilbert coefficients they are compared against.
//
// Ansatz: every admissible element is h / D with D the product of one theta
// factor per coupled cross-color variable pair (the minimal divisor the
// pole-order bound allows) and h entire with multiplier data read off from the
// per-variable periodicity condition and D. The entire numerators form a
// lattice-theta space; per-color symmetry, chain vanishing and translation
// invariance are then imposed as sampled linear constraints.
#ifndef ELLQ_DIMENSION_HPP
#define ELLQ_DIMENSION_HPP

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "ellq/membership.hpp"
#include "ellq/rank.hpp"
#include "ellq/sampling.hpp"
#include "ellq/star.hpp"

namespace ellq {

namespace detail {

struct VarSlot {
    int alpha; // 1-based within color
    int color; // 1-based
};

// Candidate basis of the unconstrained ansatz space (numerators over D).
inline std::vector<GradedElement> ansatz_candidates(const WeightForm& n, const Grade& l,
                                                    const RootData& roots,
                                                    bool zero_sum_u) {
    const int h = roots.rank;
    std::vector<VarSlot> slots;
    for (int i = 1; i <= h; ++i)
        for (int a = 1; a <= l.counts[i - 1]; ++a) slots.push_back({a, i});
    const int nv = static_cast<int>(slots.size());
    if (nv == 0) return {GradedElement{l, make_const(1.0)}};

    auto coupled = [&](int c1, int c2) { return c1 != c2 && roots.gram[c1 - 1][c2 - 1] != 0; };

    // Denominator factors theta(x_{a,i} - x_{b,j}), i < j coupled.
    std::vector<Expr> dens;
    for (int v = 0; v < nv; ++v)
        for (int w = 0; w < nv; ++w) {
            if (slots[v].color >= slots[w].color || !coupled(slots[v].color, slots[w].color))
                continue;
            dens.push_back(make_theta(AffineForm::var(x_name(slots[v].alpha, slots[v].color)) -
                                      AffineForm::var(x_name(slots[w].alpha, slots[w].color))));
        }

    // Multiplier data of the numerator space.
    IntMat A(nv, IntVec(nv, 0));
    std::vector<AffineForm> shifts(nv);
    std::vector<double> b_eta(nv, 0.0);
    for (int v = 0; v < nv; ++v) {
        const int i = slots[v].color;
        long first = 0, second = 0; // D factors with v on the left / right
        for (int w = 0; w < nv; ++w) {
            if (!coupled(i, slots[w].color)) continue;
            A[v][w] = -1;
            if (i < slots[w].color) ++first;
            else ++second;
        }
        A[v][v] = n.values[i - 1] + first + second;
        AffineForm b = AffineForm::var(u_name(i));
        b.add_term("tau", cplx(-static_cast<double>(grade_pairing(roots, i - 1, l)), 0.0));
        b.constant += 0.5 * static_cast<double>(first) - 0.5 * static_cast<double>(second);
        b.add_term("eta", cplx(static_cast<double>(second), 0.0));
        shifts[v] = b;
        b_eta[v] = static_cast<double>(second);
    }

    // Kernel directions whose shift carries unconstrained symbols make the
    // whole space empty (no consistent class series exists for generic u).
    {
        const auto snf = smith_decompose(A);
        for (int i = 0; i < nv; ++i) {
            if (snf.S[i][i] != 0) continue;
            std::vector<long> per_color(h, 0);
            for (int v = 0; v < nv; ++v) per_color[slots[v].color - 1] += snf.Q[v][i];
            bool all_zero = true, all_equal = true;
            for (int c = 0; c < h; ++c) {
                if (per_color[c] != 0) all_zero = false;
                if (per_color[c] != per_color[0]) all_equal = false;
            }
            if (!all_zero && !(zero_sum_u && all_equal)) return {};
        }
    }

    // Split into blocks of mutually coupled variables; each block gets its own
    // lattice series and the candidate is their product.
    std::vector<int> block(nv, -1);
    std::vector<std::vector<int>> blocks;
    for (int s = 0; s < nv; ++s) {
        if (block[s] >= 0) continue;
        const int id = static_cast<int>(blocks.size());
        blocks.emplace_back();
        std::vector<int> stack{s};
        block[s] = id;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            blocks[id].push_back(v);
            for (int w = 0; w < nv; ++w)
                if (w != v && A[v][w] != 0 && block[w] < 0) {
                    block[w] = id;
                    stack.push_back(w);
                }
        }
    }

    struct BlockBasis {
        std::vector<int> vars;
        LatticeSpace space;
    };
    std::vector<BlockBasis> bases;
    for (const auto& bl : blocks) {
        const int m = static_cast<int>(bl.size());
        IntMat sa(m, IntVec(m, 0));
        std::vector<double> seta(m);
        for (int p = 0; p < m; ++p) {
            seta[p] = b_eta[bl[p]];
            for (int q = 0; q < m; ++q) sa[p][q] = A[bl[p]][bl[q]];
        }
        BlockBasis bb{bl, build_lattice_space(sa, seta)};
        if (bb.space.basis.empty()) return {}; // an empty factor kills the product
        bases.push_back(std::move(bb));
    }

    const auto components = roots.coxeter_components();
    std::vector<GradedElement> out;
    std::vector<size_t> pick(bases.size(), 0);
    while (true) {
        std::vector<Expr> nums;
        IntVec rep_full(nv, 0);
        for (size_t bi = 0; bi < bases.size(); ++bi) {
            const auto& bb = bases[bi];
            const auto& data = bb.space.basis[pick[bi]];
            std::vector<AffineForm> args, sub_shifts;
            for (int v : bb.vars) {
                args.push_back(AffineForm::var(x_name(slots[v].alpha, slots[v].color)));
                sub_shifts.push_back(shifts[v]);
            }
            for (size_t p = 0; p < bb.vars.size(); ++p) rep_full[bb.vars[p]] = data.rep[p];
            nums.push_back(make_lattice_theta(data, std::move(args), std::move(sub_shifts)));
        }
        // Exponential u-prefactor making each candidate translation-covariant:
        // on a component C the class picks up e^{-2 pi i nu R_C}; a shift of a
        // color with n_j != 0 compensates exactly.
        AffineForm pref(cplx(0.0, 0.0));
        bool representable = true;
        for (const auto& comp : components) {
            long rc = 0;
            for (int v = 0; v < nv; ++v)
                if (std::find(comp.begin(), comp.end(), slots[v].color - 1) != comp.end())
                    rc += rep_full[v];
            if (rc == 0) continue;
            int j0 = -1;
            for (int c : comp)
                if (n.values[c] != 0) { j0 = c; break; }
            if (j0 < 0) { representable = false; break; } // constraint rows will not save it
            pref.add_term(u_name(j0 + 1),
                          cplx(static_cast<double>(rc) / static_cast<double>(n.values[j0]), 0.0));
        }
        if (representable) {
            if (!pref.coeff.empty()) nums.insert(nums.begin(), make_e2pi(pref));
            Expr body = dens.empty() ? make_product(nums)
                                     : make_div(make_product(nums), make_product(dens));
            out.push_back({l, body});
        }
        size_t bi = 0;
        while (bi < bases.size() && pick[bi] + 1 == bases[bi].space.basis.size()) pick[bi++] = 0;
        if (bi == bases.size()) break;
        ++pick[bi];
    }
    return out;
}

} // namespace detail

// Spanning set of the graded piece: candidates constrained by per-color
// symmetry, chain vanishing and translation invariance via sampled rows.
inline std::vector<GradedElement> ansatz_space(const WeightForm& n, const Grade& l,
                                               const RootData& roots,
                                               const EllipticParams& params, Rng& rng,
                                               bool zero_sum_u = false) {
    params.validate();
    auto cands = detail::ansatz_candidates(n, l, roots, zero_sum_u);
    if (cands.empty()) return {};
    if (l.total() == 0) return cands;
    const int nc = static_cast<int>(cands.size());

    SampleSpec spec = spec_for(l, roots.rank);
    if (zero_sum_u)
        for (int i = 1; i <= roots.rank; ++i) spec.zero_sum_group.push_back(u_name(i));
    std::vector<DivisorReport> divs;
    for (const auto& c : cands) divs.push_back(pole_divisors(c.body));

    for (int attempt = 0;; ++attempt) {
        // The grade is a vector space over the grade-zero function field, so the
        // linear conditions are read on one generic frozen u-slice; coefficient
        // functions of u track the conditions across slices.
        const Assignment uframe = sample_admissible(spec, divs, params, rng);
        auto freeze_u = [&](Assignment& pt) {
            for (int i = 1; i <= roots.rank; ++i) pt[u_name(i)] = uframe.at(u_name(i));
        };
        // Column scaling keeps the constraint system comparable across classes.
        std::vector<double> scale(nc, 0.0);
        for (int s = 0; s < 4; ++s) {
            Assignment pt = sample_admissible(spec, divs, params, rng);
            freeze_u(pt);
            for (int c = 0; c < nc; ++c)
                scale[c] = std::max(scale[c], std::abs(evaluate(cands[c].body, pt, params)));
        }
        for (auto& v : scale)
            if (v == 0.0) v = 1.0;

        std::vector<std::vector<cplx>> rows;
        auto add_row = [&](const Assignment& a, const Assignment& b, bool difference) {
            std::vector<cplx> row(nc);
            try {
                for (int c = 0; c < nc; ++c) {
                    const cplx va = evaluate(cands[c].body, a, params);
                    row[c] = (difference ? va - evaluate(cands[c].body, b, params) : va) / scale[c];
                }
            } catch (const near_pole_error&) {
                return;
            }
            rows.push_back(std::move(row));
        };

        // Per-color transposition symmetry.
        for (int i = 1; i <= roots.rank; ++i) {
            const int li = l.counts[i - 1];
            for (int a = 1; a < li; ++a) {
                for (int s = 0; s < std::max(4, nc); ++s) {
                    Assignment pt = sample_admissible(spec, divs, params, rng);
                    freeze_u(pt);
                    Assignment sw = pt;
                    std::swap(sw[x_name(a, i)], sw[x_name(a + 1, i)]);
                    add_row(sw, pt, true);
                }
            }
        }
        // Chain vanishing.
        for (int i = 1; i <= roots.rank; ++i)
            for (int j = 1; j <= roots.rank; ++j) {
                if (i == j || roots.cartan[i - 1][j - 1] >= 0) continue;
                const int chain = -roots.cartan[i - 1][j - 1] + 1;
                if (l.counts[i - 1] < chain || l.counts[j - 1] < 1) continue;
                const double dii = static_cast<double>(roots.gram[i - 1][i - 1]);
                const double dij = static_cast<double>(roots.gram[i - 1][j - 1]);
                for (int a1 = 1; a1 <= l.counts[i - 1]; ++a1) {
                    for (int s = 0; s < std::max(4, nc); ++s) {
                        Assignment pt = sample_admissible(spec, divs, params, rng);
                        freeze_u(pt);
                        // chain rooted at a1, continued on the cyclically next slots
                        const cplx t = pt.at(x_name(a1, i));
                        int slot = a1;
                        for (int k = 2; k <= chain; ++k) {
                            slot = slot % l.counts[i - 1] + 1;
                            pt[x_name(slot, i)] = t - static_cast<double>(k - 1) * dii * params.tau;
                        }
                        pt[x_name(1, j)] = t - static_cast<double>(chain - 1) * dii * params.tau -
                                           dij * params.tau;
                        add_row(pt, pt, false);
                    }
                }
            }
        // Translation invariance per component.
        for (const auto& comp : roots.coxeter_components()) {
            for (int s = 0; s < std::max(4, nc / 2); ++s) {
                Assignment pt = sample_admissible(spec, divs, params, rng);
                const cplx nu = rng.cell_point(params.eta);
                Assignment sh = pt;
                for (int ci : comp) {
                    for (int a = 1; a <= l.counts[ci]; ++a) sh[x_name(a, ci + 1)] -= nu;
                    sh[u_name(ci + 1)] += static_cast<double>(n.values[ci]) * nu;
                }
                add_row(sh, pt, true);
            }
        }

        std::vector<GradedElement> result;
        if (rows.empty()) {
            for (int c = 0; c < nc; ++c)
                result.push_back({l, make_mul(make_const(1.0 / scale[c]), cands[c].body)});
            return result;
        }
        Eigen::MatrixXcd C(static_cast<int>(rows.size()), nc);
        for (size_t r = 0; r < rows.size(); ++r)
            for (int c = 0; c < nc; ++c) C(static_cast<int>(r), c) = rows[r][c];
        // Column equilibration: the class series have genuinely different
        // dynamic ranges, and scaling a column only rescales the corresponding
        // coordinate of the nullspace. A column that is already numerically
        // zero satisfies every constraint on its own.
        std::vector<double> colw(nc, 1.0);
        std::vector<bool> outright_null(nc, false);
        for (int c = 0; c < nc; ++c) {
            const double m = C.col(c).cwiseAbs().maxCoeff();
            if (m < 1e-10) outright_null[c] = true;
            else { colw[c] = m; C.col(c) /= m; }
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        // Entries are O(1) after equilibration; honest constraints sit well
        // above the absolute floor, satisfied ones at rounding level.
        const double null_cut = 1e-7;
        const double gap_cut = 1e-4;
        int null_dim = nc - static_cast<int>(sv.size());
        bool ambiguous = false;
        for (Eigen::Index k = 0; k < sv.size(); ++k) {
            if (sv(k) <= null_cut) ++null_dim;
            else if (sv(k) <= gap_cut) ambiguous = true;
        }
        if (ambiguous && attempt < 3) continue; // resample fresh constraint points
        if (ambiguous)
            throw degenerate_sample_error("ansatz_space: constraint system stayed ill-conditioned");
        for (int k = 0; k < null_dim; ++k) {
            const auto vec = svd.matrixV().col(nc - 1 - k);
            std::vector<Expr> terms;
            for (int c = 0; c < nc; ++c) {
                if (outright_null[c] || std::abs(vec(c)) < 1e-12) continue;
                terms.push_back(make_mul(make_const(vec(c) / (colw[c] * scale[c])), cands[c].body));
            }
            if (!terms.empty()) result.push_back({l, make_sum(terms)});
        }
        for (int c = 0; c < nc; ++c)
            if (outright_null[c])
                result.push_back({l, make_mul(make_const(1.0 / scale[c]), cands[c].body)});
        return result;
    }
}

// Singular-value rank of the ansatz basis sampled at 2x points (u frozen per
// matrix; the grade is a vector space over the grade-zero function field).
inline int numeric_dim(const WeightForm& n, const Grade& l, const RootData& roots,
                       const EllipticParams& params, Rng& rng, bool zero_sum_u = false) {
    const auto basis = ansatz_space(n, l, roots, params, rng, zero_sum_u);
    if (basis.empty()) return 0;
    if (l.total() == 0) return 1;
    const int nb = static_cast<int>(basis.size());
    SampleSpec spec = spec_for(l, roots.rank);
    if (zero_sum_u)
        for (int i = 1; i <= roots.rank; ++i) spec.zero_sum_group.push_back(u_name(i));
    std::vector<DivisorReport> divs;
    for (const auto& e : basis) divs.push_back(pole_divisors(e.body));

    Assignment ubase = sample_admissible(spec, divs, params, rng);
    const int rows = 2 * nb + 2;
    Eigen::MatrixXcd M(rows, nb);
    for (int r = 0; r < rows;) {
        Assignment pt = sample_admissible(spec, divs, params, rng);
        for (int i = 1; i <= roots.rank; ++i) pt[u_name(i)] = ubase[u_name(i)];
        try {
            for (int c = 0; c < nb; ++c) M(r, c) = evaluate(basis[c].body, pt, params);
            ++r;
        } catch (const near_pole_error&) {
        }
    }
    return numeric_rank(M);
}

// ---- Hilbert coefficients -------------------------------------------------

using GradeSeries = std::map<std::vector<int>, long long>;

namespace detail {

inline long long binom(long n, long k) {
    long long r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline bool leq(const std::vector<int>& a, const std::vector<int>& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

// series *= (1 - w^gamma)^(-e), truncated to grades <= cutoff.
inline void multiply_factor(GradeSeries& series, const std::vector<int>& gamma, long e,
                            const std::vector<int>& cutoff) {
    if (e == 0) return;
    GradeSeries out;
    for (const auto& [g, coeff] : series) {
        std::vector<int> cur = g;
        long k = 0;
        while (leq(cur, cutoff)) {
            out[cur] += coeff * binom(e - 1 + k, k);
            for (size_t i = 0; i < cur.size(); ++i) cur[i] += gamma[i];
            ++k;
        }
    }
    series = std::move(out);
}

inline long norm2(const RootData& roots, const std::vector<int>& v) {
    long s = 0;
    for (int i = 0; i < roots.rank; ++i)
        for (int j = 0; j < roots.rank; ++j)
            s += static_cast<long>(v[i]) * roots.gram[i][j] * v[j];
    return s;
}

} // namespace detail

// Grade-indexed coefficients of the dimension generating series, expanded up
// to the cutoff. Finite type: product over positive roots of
// (1 - w^gamma)^(-n(gamma)), requiring dominant n. Affine type adds root
// multiplicities and the imaginary-root factor with the small-rank threshold.
inline GradeSeries hilbert_coeffs(const RootData& roots, const WeightForm& n,
                                  const Grade& cutoff) {
    roots.validate();
    const int h = roots.rank;
    GradeSeries series;
    series[std::vector<int>(h, 0)] = 1;

    // Positive roots up to the cutoff: in the simply-laced lattices used here
    // the real roots are exactly the norm-2 vectors of L+.
    std::vector<int> v(h, 0);
    std::vector<std::vector<int>> real_roots;
    while (true) {
        if (detail::norm2(roots, v) == 2) {
            long nv = 0;
            for (int i = 0; i < h; ++i) nv += static_cast<long>(n.values[i]) * v[i];
            if (nv < 0)
                throw invalid_parameter_error(
                    "hilbert_coeffs: series is stated for dominant weights only");
            real_roots.push_back(v);
        }
        int i = 0;
        while (i < h && v[i] == cutoff.counts[i]) v[i++] = 0;
        if (i == h) break;
        ++v[i];
    }
    const long mult = roots.affine ? h - 1 : 1;
    for (const auto& gamma : real_roots) {
        long nv = 0;
        for (int i = 0; i < h; ++i) nv += static_cast<long>(n.values[i]) * gamma[i];
        detail::multiply_factor(series, gamma, nv, cutoff.counts);
    }
    if (roots.affine) {
        long ndelta = 0;
        for (int i = 0; i < h; ++i) ndelta += n.values[i];
        const int mu = (h == 2) ? 2 : 1;
        // imaginary roots with multiplicity h-1, then the extra factor
        for (int alpha = 1;; ++alpha) {
            std::vector<int> gamma(h, alpha);
            if (!detail::leq(gamma, cutoff.counts)) break;
            detail::multiply_factor(series, gamma, mult * alpha * ndelta, cutoff.counts);
            if (alpha >= mu) detail::multiply_factor(series, gamma, alpha * ndelta, cutoff.counts);
        }
    }
    return series;
}

struct DimComparison {
    Grade grade;
    int measured = 0;
    long long expected = 0;
    bool match() const { return measured == expected; }
};

// Measured rank against the series coefficient for every grade up to the cutoff.
inline std::vector<DimComparison> dim_vs_hilbert(const RootData& roots, const WeightForm& n,
                                                 const Grade& cutoff,
                                                 const EllipticParams& params, Rng& rng) {
    const GradeSeries series = hilbert_coeffs(roots, n, cutoff);
    std::vector<DimComparison> out;
    std::vector<int> v(roots.rank, 0);
    while (true) {
        DimComparison cmp;
        cmp.grade = Grade(v);
        auto it = series.find(v);
        cmp.expected = it == series.end() ? 0 : it->second;
        cmp.measured = numeric_dim(n, cmp.grade, roots, params, rng);
        out.push_back(cmp);
        int i = 0;
        while (i < roots.rank && v[i] == cutoff.counts[i]) v[i++] = 0;
        if (i == roots.rank) break;
        ++v[i];
    }
    return out;
}

} // namespace ellq

#endif
