// Admissible random points and sampling-based equality of elements.
#ifndef ELLQ_SAMPLING_HPP
#define ELLQ_SAMPLING_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "ellq/element.hpp"
#include "ellq/expr.hpp"
#include "ellq/numeric.hpp"
#include "ellq/params.hpp"

namespace ellq {

struct SampleSpec {
    std::vector<std::string> vars;
    // Constrain the listed group to sum to zero (last entry is solved for);
    // used by the affine checks where u_1 + ... + u_h = 0.
    std::vector<std::string> zero_sum_group;
    // Auxiliary symbols bound to fixed values in every sample (e.g. the three
    // kernel parameters of the degree-graded family).
    Assignment fixed;
};

inline SampleSpec spec_for(const Grade& l, int rank) {
    return SampleSpec{element_variables(l, rank), {}};
}

namespace detail {

inline bool admissible(const Assignment& a, const std::vector<DivisorReport>& reps,
                       const EllipticParams& params) {
    for (const auto& rep : reps) {
        for (const auto& d : rep.theta_divisors) {
            const cplx w = d.eval(a, params);
            if (lattice_distance(w, params.eta) < params.pole_margin) return false;
        }
        for (const auto& v : rep.var_divisors) {
            auto it = a.find(v);
            if (it != a.end() && lattice_distance(it->second, params.eta) < params.pole_margin)
                return false;
        }
    }
    return true;
}

} // namespace detail

// Draw an assignment with every coordinate uniform in the fundamental
// parallelogram, rejecting draws that land within pole_margin of any
// syntactic pole divisor of the supplied expressions.
inline Assignment sample_admissible(const SampleSpec& spec,
                                    const std::vector<DivisorReport>& divisors,
                                    const EllipticParams& params, Rng& rng,
                                    int max_attempts = 400) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Assignment a = spec.fixed;
        for (const auto& v : spec.vars) a[v] = rng.cell_point(params.eta);
        if (!spec.zero_sum_group.empty()) {
            cplx s{0.0, 0.0};
            for (size_t i = 0; i + 1 < spec.zero_sum_group.size(); ++i)
                s += a[spec.zero_sum_group[i]];
            a[spec.zero_sum_group.back()] = -s;
        }
        if (detail::admissible(a, divisors, params)) return a;
    }
    throw degenerate_sample_error("sample_admissible: no admissible point found");
}

struct ResidualReport {
    double max_residual = 0.0;
    int samples = 0;
    bool pass(double tol) const { return max_residual < tol; }
};

// Max normalized residual |A-B| / (|A|+|B|+1) over admissible sample points.
inline ResidualReport equal_numeric(const GradedElement& a, const GradedElement& b,
                                    const EllipticParams& params, Rng& rng,
                                    const SampleSpec* custom_spec = nullptr) {
    if (!(a.grade == b.grade))
        throw invalid_parameter_error("equal_numeric: grade mismatch");
    params.validate();
    const SampleSpec spec =
        custom_spec ? *custom_spec : spec_for(a.grade, a.grade.rank());
    const std::vector<DivisorReport> divs{pole_divisors(a.body), pole_divisors(b.body)};
    ResidualReport rep;
    int budget = 10 * params.sample_count;
    while (rep.samples < params.sample_count) {
        if (budget-- <= 0)
            throw degenerate_sample_error("equal_numeric: sampling budget exhausted");
        const Assignment pt = sample_admissible(spec, divs, params, rng);
        try {
            const cplx va = evaluate(a.body, pt, params);
            const cplx vb = evaluate(b.body, pt, params);
            rep.max_residual = std::max(rep.max_residual, residual(va, vb));
            ++rep.samples;
        } catch (const near_pole_error&) {
            // opaque denominator hit; draw again
        }
    }
    return rep;
}

// Per-color symmetry of the body under transpositions, checked by sampling.
inline ResidualReport symmetry_residual(const GradedElement& e, const EllipticParams& params,
                                        Rng& rng, int rank,
                                        const SampleSpec* custom_spec = nullptr) {
    const SampleSpec spec = custom_spec ? *custom_spec : spec_for(e.grade, rank);
    const std::vector<DivisorReport> divs{pole_divisors(e.body)};
    ResidualReport rep;
    int budget = 10 * params.sample_count;
    const int wanted = std::max(8, params.sample_count / 4);
    while (rep.samples < wanted) {
        if (budget-- <= 0)
            throw degenerate_sample_error("symmetry_residual: sampling budget exhausted");
        Assignment pt = sample_admissible(spec, divs, params, rng);
        try {
            const cplx base = evaluate(e.body, pt, params);
            for (int i = 1; i <= e.grade.rank(); ++i) {
                const int li = e.grade.counts[i - 1];
                if (li < 2) continue;
                const int a = 1 + static_cast<int>(rng.integer(li));
                int b = 1 + static_cast<int>(rng.integer(li - 1));
                if (b >= a) ++b;
                Assignment swapped = pt;
                std::swap(swapped[x_name(a, i)], swapped[x_name(b, i)]);
                rep.max_residual =
                    std::max(rep.max_residual, residual(evaluate(e.body, swapped, params), base));
            }
            ++rep.samples;
        } catch (const near_pole_error&) {
        }
    }
    return rep;
}

} // namespace ellq

#endif
