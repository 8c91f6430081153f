// Small numeric helpers: complex alias, residuals, lattice coordinates, deterministic RNG.
#ifndef ELLQ_NUMERIC_HPP
#define ELLQ_NUMERIC_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace ellq {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// Normalized discrepancy used for every identity verdict.
inline double residual(cplx a, cplx b) {
    return std::abs(a - b) / (std::abs(a) + std::abs(b) + 1.0);
}

inline cplx exp2pii(cplx w) { return std::exp(cplx(0.0, 2.0 * kPi) * w); }

// Coordinates of w in the lattice basis (1, eta): w = p + q*eta.
struct LatticeCoords {
    double p;
    double q;
};

inline LatticeCoords lattice_coords(cplx w, cplx eta) {
    const double q = w.imag() / eta.imag();
    const double p = w.real() - q * eta.real();
    return {p, q};
}

// Max-norm distance, in lattice coordinates, from w to the nearest lattice point.
inline double lattice_distance(cplx w, cplx eta) {
    const auto c = lattice_coords(w, eta);
    const double dp = c.p - std::round(c.p);
    const double dq = c.q - std::round(c.q);
    return std::max(std::abs(dp), std::abs(dq));
}

// Reduce w modulo the lattice to coordinates in [0,1)^2.
inline cplx lattice_reduce(cplx w, cplx eta) {
    const auto c = lattice_coords(w, eta);
    const double p = c.p - std::floor(c.p);
    const double q = c.q - std::floor(c.q);
    return cplx(p, 0.0) + q * eta;
}

// Deterministic RNG. uniform() avoids std::uniform_real_distribution so that the
// same seed reproduces the same sample stream on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform point of the fundamental parallelogram spanned by (1, eta).
    cplx cell_point(cplx eta) { return cplx(uniform(), 0.0) + uniform() * eta; }

    std::uint64_t integer(std::uint64_t bound) { return gen_() % bound; }

  private:
    std::mt19937_64 gen_;
};

} // namespace ellq

#endif
