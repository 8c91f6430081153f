// The graded star product: colorwise shuffles of the two variable blocks, the
// shifted second factor, and the theta-quotient kernel between the blocks.
// Since both factors are symmetric per color, the full symmetric-group sum
// with its 1/(l! l'!) prefactor collapses to the shuffle sum with prefactor 1.
#ifndef ELLQ_STAR_HPP
#define ELLQ_STAR_HPP

#include <algorithm>
#include <vector>

#include "ellq/element.hpp"
#include "ellq/expr.hpp"
#include "ellq/params.hpp"
#include "ellq/roots.hpp"

namespace ellq {

namespace detail {

inline std::vector<std::vector<int>> combinations(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > n) return out;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

} // namespace detail

// Shuffle-sum form of the defining product. The second factor sees
// u_i -> u_i - 2 (l, delta_i) tau where l is the grade of the first factor.
inline GradedElement star(const GradedElement& f, const GradedElement& g,
                          const RootData& roots, const EllipticParams& params) {
    (void)params;
    const int h = roots.rank;
    if (f.grade.rank() != h || g.grade.rank() != h)
        throw invalid_parameter_error("star: grade rank does not match the root data");
    const Grade total = f.grade + g.grade;

    // u-shift applied to the second factor.
    std::map<std::string, AffineForm> ushift;
    for (int i = 1; i <= h; ++i) {
        const long pair = grade_pairing(roots, i - 1, f.grade);
        if (pair != 0)
            ushift[u_name(i)] =
                AffineForm::var(u_name(i)).add_term("tau", cplx(-2.0 * pair, 0.0));
    }

    // Per-color shuffles: positions for the first block, complement for the second.
    std::vector<std::vector<std::vector<int>>> choices(h);
    for (int i = 0; i < h; ++i)
        choices[i] = detail::combinations(total.counts[i], f.grade.counts[i]);

    std::vector<Expr> summands;
    std::vector<size_t> pick(h, 0);
    while (true) {
        std::map<std::string, AffineForm> sf;
        std::map<std::string, AffineForm> sg = ushift;
        std::vector<std::vector<int>> fpos(h), gpos(h);
        for (int i = 0; i < h; ++i) {
            const auto& sel = choices[i].empty() ? std::vector<int>{} : choices[i][pick[i]];
            std::vector<bool> used(total.counts[i], false);
            for (size_t a = 0; a < sel.size(); ++a) {
                used[sel[a]] = true;
                fpos[i].push_back(sel[a] + 1);
                if (sel[a] + 1 != static_cast<int>(a) + 1)
                    sf[x_name(static_cast<int>(a) + 1, i + 1)] =
                        AffineForm::var(x_name(sel[a] + 1, i + 1));
            }
            int b = 0;
            for (int pos = 0; pos < total.counts[i]; ++pos) {
                if (used[pos]) continue;
                gpos[i].push_back(pos + 1);
                ++b;
                if (pos + 1 != b) sg[x_name(b, i + 1)] = AffineForm::var(x_name(pos + 1, i + 1));
            }
        }
        std::vector<Expr> nums{substitute(f.body, sf), substitute(g.body, sg)};
        std::vector<Expr> dens;
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < h; ++j) {
                if (roots.gram[i][j] == 0) continue; // kernel factor is exactly 1
                for (int a : fpos[i])
                    for (int b : gpos[j]) {
                        AffineForm arg = AffineForm::var(x_name(a, i + 1)) -
                                         AffineForm::var(x_name(b, j + 1));
                        AffineForm shifted = arg;
                        shifted.add_term("tau", cplx(-static_cast<double>(roots.gram[i][j]), 0.0));
                        nums.push_back(make_theta(std::move(shifted)));
                        dens.push_back(make_theta(std::move(arg)));
                    }
            }
        Expr summand = dens.empty() ? make_product(nums)
                                    : make_div(make_product(nums), make_product(dens));
        summands.push_back(std::move(summand));
        int i = 0;
        while (i < h && (choices[i].empty() || pick[i] + 1 == choices[i].size())) pick[i++] = 0;
        if (i == h) break;
        ++pick[i];
    }
    return {total, make_sum(summands)};
}

// Reference form of the product: the full symmetric-group sum with the
// 1/(l! l'!) prefactor. Exponentially larger than star(); used once to
// validate the shuffle reduction on small cases.
inline GradedElement star_full_sum(const GradedElement& f, const GradedElement& g,
                                   const RootData& roots, const EllipticParams& params) {
    (void)params;
    const int h = roots.rank;
    const Grade total = f.grade + g.grade;

    std::map<std::string, AffineForm> ushift;
    for (int i = 1; i <= h; ++i) {
        const long pair = grade_pairing(roots, i - 1, f.grade);
        if (pair != 0)
            ushift[u_name(i)] =
                AffineForm::var(u_name(i)).add_term("tau", cplx(-2.0 * pair, 0.0));
    }

    std::vector<std::vector<std::vector<int>>> perms(h);
    double prefac = 1.0;
    for (int i = 0; i < h; ++i) {
        std::vector<int> p(total.counts[i]);
        for (int k = 0; k < total.counts[i]; ++k) p[k] = k;
        do perms[i].push_back(p); while (std::next_permutation(p.begin(), p.end()));
        auto fact = [](int n) { double f = 1; for (int k = 2; k <= n; ++k) f *= k; return f; };
        prefac *= fact(f.grade.counts[i]) * fact(g.grade.counts[i]);
    }

    std::vector<Expr> summands;
    std::vector<size_t> pick(h, 0);
    while (true) {
        std::map<std::string, AffineForm> sf;
        std::map<std::string, AffineForm> sg = ushift;
        std::vector<std::vector<int>> fpos(h), gpos(h);
        for (int i = 0; i < h; ++i) {
            const auto& p = perms[i].empty() ? std::vector<int>{} : perms[i][pick[i]];
            for (int a = 0; a < f.grade.counts[i]; ++a) {
                fpos[i].push_back(p[a] + 1);
                sf[x_name(a + 1, i + 1)] = AffineForm::var(x_name(p[a] + 1, i + 1));
            }
            for (int b = 0; b < g.grade.counts[i]; ++b) {
                gpos[i].push_back(p[f.grade.counts[i] + b] + 1);
                sg[x_name(b + 1, i + 1)] =
                    AffineForm::var(x_name(p[f.grade.counts[i] + b] + 1, i + 1));
            }
        }
        std::vector<Expr> nums{substitute(f.body, sf), substitute(g.body, sg)};
        std::vector<Expr> dens;
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < h; ++j) {
                if (roots.gram[i][j] == 0) continue;
                for (int a : fpos[i])
                    for (int b : gpos[j]) {
                        AffineForm arg = AffineForm::var(x_name(a, i + 1)) -
                                         AffineForm::var(x_name(b, j + 1));
                        AffineForm shifted = arg;
                        shifted.add_term("tau", cplx(-static_cast<double>(roots.gram[i][j]), 0.0));
                        nums.push_back(make_theta(std::move(shifted)));
                        dens.push_back(make_theta(std::move(arg)));
                    }
            }
        Expr summand = dens.empty() ? make_product(nums)
                                    : make_div(make_product(nums), make_product(dens));
        summands.push_back(std::move(summand));
        int i = 0;
        while (i < h && (perms[i].empty() || pick[i] + 1 == perms[i].size())) pick[i++] = 0;
        if (i == h) break;
        ++pick[i];
    }
    return {total, make_mul(make_const(1.0 / prefac), make_sum(summands))};
}

} // namespace ellq

#endif
