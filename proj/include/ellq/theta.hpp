// The odd theta series and the per-line section checks (multipliers, zero structure).
#ifndef ELLQ_THETA_HPP
#define ELLQ_THETA_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "ellq/errors.hpp"
#include "ellq/numeric.hpp"
#include "ellq/params.hpp"

namespace ellq {

// theta(z) = sum over alpha in Z of (-1)^alpha exp(2 pi i (alpha z + alpha(alpha-1)/2 eta)).
// Truncated adaptively over the symmetric range -N..N+1; the Gaussian decay in alpha
// makes this converge in a handful of shells for any reasonable Im(eta). The hard cap
// turns a pathological Im(eta) -> 0 configuration into an explicit error.
inline cplx theta(cplx z, const EllipticParams& params) {
    if (!(params.eta.imag() > 0.0))
        throw invalid_parameter_error("theta: Im(eta) must be positive");
    const cplx eta = params.eta;
    auto term = [&](long alpha) {
        const double a = static_cast<double>(alpha);
        const cplx expo = cplx(0.0, 2.0 * kPi) * (a * z + 0.5 * a * (a - 1.0) * eta);
        const cplx t = std::exp(expo);
        return (alpha & 1L) ? -t : t;
    };
    cplx sum = term(0) + term(1);
    constexpr long kMaxN = 200;
    for (long n = 1;; ++n) {
        if (n > kMaxN)
            throw invalid_parameter_error("theta: series did not converge within the term cap");
        const cplx lo = term(-n);
        const cplx hi = term(n + 1);
        sum += lo + hi;
        const double last = std::max(std::abs(lo), std::abs(hi));
        if (last < params.series_eps * (std::abs(sum) + 1.0))
            break;
    }
    return sum;
}

// Multiplier datum (m, c) of the line whose sections satisfy
// f(z+1) = f(z) and f(z+eta) = exp(-2 pi i (m z + c)) f(z).
struct ThetaLine {
    int order = 1;
    cplx shift{0.5, 0.0};
};

struct MultiplierReport {
    double period_residual = 0.0; // z -> z+1
    double eta_residual = 0.0;    // z -> z+eta against the multiplier
    double max_residual() const { return std::max(period_residual, eta_residual); }
};

using ScalarFn = std::function<cplx(cplx)>;

// Max normalized residual of both period relations over sampled points.
inline MultiplierReport verify_multiplier(const ScalarFn& f, const ThetaLine& line,
                                          const EllipticParams& params, Rng& rng,
                                          int samples = 0) {
    params.validate();
    if (samples <= 0) samples = params.sample_count;
    MultiplierReport rep;
    for (int s = 0; s < samples; ++s) {
        const cplx z = rng.cell_point(params.eta);
        const cplx fz = f(z);
        rep.period_residual = std::max(rep.period_residual, residual(f(z + 1.0), fz));
        const cplx mult = exp2pii(-(static_cast<double>(line.order) * z + line.shift));
        rep.eta_residual = std::max(rep.eta_residual, residual(f(z + params.eta), mult * fz));
    }
    return rep;
}

struct ZeroSumReport {
    double count = 0.0;         // contour value of the zero count
    cplx zero_sum{0.0, 0.0};    // contour value of the zero sum
    double count_residual = 0.0;
    double sum_residual = 0.0;  // lattice distance from the expected anchor
    int attempts = 1;
    bool ok = true;
};

namespace detail {

inline cplx log_derivative(const ScalarFn& f, cplx z, double h = 1e-6) {
    const cplx num = f(z + h) - f(z - h);
    return num / (2.0 * h * f(z));
}

} // namespace detail

// Argument-principle contour check: integrates f'/f and z f'/f along the boundary
// of a randomly shifted fundamental parallelogram (512-point trapezoid per edge).
// The zero count of an order-m section is m; the zero sum is congruent to
// m/2 - c modulo the lattice.
inline ZeroSumReport zero_sum_check(const ScalarFn& f, const ThetaLine& line,
                                    const EllipticParams& params, Rng& rng) {
    params.validate();
    if (line.order <= 0)
        throw empty_space_error("zero_sum_check: needs a line of positive order");
    constexpr int kNodes = 512;
    ZeroSumReport rep;
    for (int attempt = 0; attempt < 5; ++attempt) {
        rep.attempts = attempt + 1;
        const cplx z0 = cplx(0.05 + 0.9 * rng.uniform(), 0.0) +
                        (0.05 + 0.9 * rng.uniform()) * params.eta;
        const cplx corners[5] = {z0, z0 + 1.0, z0 + 1.0 + params.eta, z0 + params.eta, z0};
        bool too_close = false;
        cplx count{0.0, 0.0};
        cplx sum{0.0, 0.0};
        double fmax = 0.0;
        double fmin = 1e300;
        // First sweep for the zero-proximity guard, then the quadrature itself.
        for (int e = 0; e < 4 && !too_close; ++e) {
            for (int k = 0; k < kNodes; ++k) {
                const double t = static_cast<double>(k) / kNodes;
                const cplx z = corners[e] + t * (corners[e + 1] - corners[e]);
                const double a = std::abs(f(z));
                fmax = std::max(fmax, a);
                fmin = std::min(fmin, a);
            }
        }
        if (fmax == 0.0 || fmin < 1e-7 * fmax) too_close = true;
        if (!too_close) {
            for (int e = 0; e < 4; ++e) {
                const cplx dz = (corners[e + 1] - corners[e]) / static_cast<double>(kNodes);
                for (int k = 0; k < kNodes; ++k) {
                    const cplx z = corners[e] + static_cast<double>(k) * dz +
                                   0.5 * dz; // midpoint rule, same order on smooth edges
                    const cplx ld = detail::log_derivative(f, z);
                    count += ld * dz;
                    sum += z * ld * dz;
                }
            }
            count /= cplx(0.0, 2.0 * kPi);
            sum /= cplx(0.0, 2.0 * kPi);
            rep.count = count.real();
            rep.zero_sum = sum;
            rep.count_residual = std::abs(count - cplx(static_cast<double>(line.order), 0.0));
            const cplx anchor = 0.5 * static_cast<double>(line.order) - line.shift;
            rep.sum_residual = lattice_distance(sum - anchor, params.eta);
            rep.ok = true;
            return rep;
        }
    }
    rep.ok = false;
    rep.count_residual = 1e300;
    rep.sum_residual = 1e300;
    return rep;
}

} // namespace ellq

#endif
