// Spaces of multivariate theta-type functions cut out by multiplier data.
//
// A space is described by a symmetric integer matrix A and shift forms b:
// entire functions f on C^N, 1-periodic in every variable, with
//   f(z + eta e_j) = exp(-2 pi i (A_j . z + b_j)) f(z).
// Fourier coefficients obey c_{k+A_j} = exp(2 pi i (k_j eta + b_j)) c_k, so a
// basis is indexed by the residue classes of Z^N modulo the column lattice of A.
// This single mechanism yields the one-variable bases Theta_{m,c}, the ansatz
// numerators of the dimension lab, and the several-variable section spaces of
// the showcase constructions.
#ifndef ELLQ_THETA_SPACE_HPP
#define ELLQ_THETA_SPACE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "ellq/errors.hpp"
#include "ellq/numeric.hpp"
#include "ellq/params.hpp"
#include "ellq/snf.hpp"
#include "ellq/theta.hpp"

namespace ellq {

// One basis element: the sub-series supported on rep + A Z^N.
struct LatticeData {
    IntMat A;
    IntVec rep;
    std::vector<int> sum_dirs;  // columns of A parametrizing the orbit
    IntMat kernel;              // integer kernel generators of A (rows)
};

namespace detail {

// exponent E(s) with  c_{rep + A s} = exp(2 pi i E(s)),  E(0) = 0:
//   E(s) = eta (rep.s + s.A s / 2 - diag(A).s / 2) + b.s
inline cplx lattice_exponent(const LatticeData& d, const IntVec& s,
                             const std::vector<cplx>& b, cplx eta) {
    const int n = static_cast<int>(d.A.size());
    double rs = 0.0, quad = 0.0, diag = 0.0;
    cplx bs{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        rs += static_cast<double>(d.rep[i] * s[i]);
        diag += static_cast<double>(d.A[i][i] * s[i]);
        bs += static_cast<double>(s[i]) * b[i];
        for (int j = 0; j < n; ++j) quad += static_cast<double>(s[i] * d.A[i][j] * s[j]);
    }
    return eta * (rs + 0.5 * quad - 0.5 * diag) + bs;
}

} // namespace detail

// Evaluate the class series at z with shift values b. Terms decay like a
// Gaussian in the orbit parameters; shells are added until they fall below
// eps relative to the running sum.
inline cplx lattice_theta_eval(const LatticeData& d, const std::vector<cplx>& z,
                               const std::vector<cplx>& b, cplx eta, double eps) {
    const int n = static_cast<int>(d.A.size());
    // Closed orbits must carry trivial monodromy; otherwise the class series
    // is not well defined in the supplied context (e.g. unconstrained u's).
    for (const auto& kappa : d.kernel) {
        const cplx e = detail::lattice_exponent(d, kappa, b, eta);
        if (std::abs(e - std::round(e.real())) > 1e-6)
            throw context_error("lattice_theta_eval: inconsistent shift context on a closed orbit");
    }
    const int kdirs = static_cast<int>(d.sum_dirs.size());
    auto term_at = [&](const IntVec& s) {
        cplx expo = detail::lattice_exponent(d, s, b, eta);
        for (int i = 0; i < n; ++i) {
            double ki = static_cast<double>(d.rep[i]);
            for (int j = 0; j < n; ++j) ki += static_cast<double>(d.A[i][j] * s[j]);
            expo += ki * z[i];
        }
        return exp2pii(expo);
    };
    IntVec s(n, 0);
    cplx sum = term_at(s);
    if (kdirs == 0) return sum;
    constexpr int kMaxShell = 60;
    for (int radius = 1;; ++radius) {
        if (radius > kMaxShell)
            throw invalid_parameter_error("lattice_theta_eval: series did not converge");
        double shell_max = 0.0;
        // Odometer over the cube [-radius, radius]^kdirs, keeping only the shell.
        std::vector<int> c(kdirs, -radius);
        while (true) {
            bool on_shell = false;
            for (int i = 0; i < kdirs; ++i)
                if (std::abs(c[i]) == radius) on_shell = true;
            if (on_shell) {
                for (int i = 0; i < n; ++i) s[i] = 0;
                for (int i = 0; i < kdirs; ++i) s[d.sum_dirs[i]] = c[i];
                const cplx t = term_at(s);
                shell_max = std::max(shell_max, std::abs(t));
                sum += t;
            }
            int pos = 0;
            while (pos < kdirs && c[pos] == radius) c[pos++] = -radius;
            if (pos == kdirs) break;
            ++c[pos];
        }
        if (radius >= 2 && shell_max < eps * (std::abs(sum) + 1.0)) break;
    }
    return sum;
}

struct LatticeSpace {
    int n = 0;
    IntMat A;
    std::vector<LatticeData> basis;
};

namespace detail {

// Greedy choice of columns of A spanning its image (dropped columns lie in the
// integer span of the kept ones for the Laplacian-plus-diagonal matrices used here).
inline std::vector<int> image_columns(const IntMat& a) {
    const int n = static_cast<int>(a.size());
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(a[i][j]);
    std::vector<int> cols;
    Eigen::MatrixXd chosen(n, 0);
    for (int j = 0; j < n; ++j) {
        Eigen::MatrixXd trial(n, chosen.cols() + 1);
        trial << chosen, m.col(j);
        if (trial.colPivHouseholderQr().rank() > chosen.cols()) {
            chosen = trial;
            cols.push_back(j);
        }
    }
    return cols;
}

inline void recenter_rep(LatticeData& d) {
    const int n = static_cast<int>(d.A.size());
    Eigen::MatrixXd m(n, n);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
        r(i) = static_cast<double>(d.rep[i]);
        for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(d.A[i][j]);
    }
    const Eigen::VectorXd x = m.colPivHouseholderQr().solve(r);
    for (int j : d.sum_dirs) {
        const long step = -std::lround(x(j));
        for (int i = 0; i < n; ++i) d.rep[i] += step * d.A[i][j];
    }
    auto norm2 = [&]() {
        long s = 0;
        for (int i = 0; i < n; ++i) s += d.rep[i] * d.rep[i];
        return s;
    };
    for (int pass = 0; pass < 500; ++pass) {
        bool moved = false;
        for (int j : d.sum_dirs) {
            for (long sgn : {1L, -1L}) {
                const long before = norm2();
                for (int i = 0; i < n; ++i) d.rep[i] += sgn * d.A[i][j];
                if (norm2() < before) {
                    moved = true;
                } else {
                    for (int i = 0; i < n; ++i) d.rep[i] -= sgn * d.A[i][j];
                }
            }
        }
        if (!moved) break;
    }
}

} // namespace detail

// Enumerate the admissible residue classes of the space (A, b). b_eta_coeff[j]
// is the coefficient of eta in b_j; it enters the solvability condition along
// integer kernel directions of A (closed orbits). A space whose matrix is not
// positive semidefinite is empty.
inline LatticeSpace build_lattice_space(const IntMat& a,
                                        const std::vector<double>& b_eta_coeff) {
    LatticeSpace space;
    space.n = static_cast<int>(a.size());
    space.A = a;
    const int n = space.n;
    if (n == 0) return space;

    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(a[i][j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    const double scale = std::max(1.0, std::abs(eig.eigenvalues().maxCoeff()));
    if (eig.eigenvalues().minCoeff() < -1e-9 * scale) return space; // indefinite: empty

    const auto snf = smith_decompose(a);
    std::vector<int> torsion_slots, free_slots;
    for (int i = 0; i < n; ++i) {
        if (snf.S[i][i] == 0)
            free_slots.push_back(i);
        else if (snf.S[i][i] > 1)
            torsion_slots.push_back(i);
    }
    IntMat kernel;
    for (int i : free_slots) {
        IntVec kcol(n);
        for (int k = 0; k < n; ++k) kcol[k] = snf.Q[k][i];
        kernel.push_back(kcol);
    }
    const std::vector<int> dirs = detail::image_columns(a);

    // eta-coefficient of the closed-orbit exponent for candidate rep r:
    //   beta(r, kappa) = r.kappa - diag(A).kappa / 2 + b_eta.kappa
    auto beta = [&](const IntVec& r, const IntVec& kappa) {
        double v = 0.0;
        for (int i = 0; i < n; ++i) {
            v += static_cast<double>(r[i] * kappa[i]);
            v -= 0.5 * static_cast<double>(a[i][i] * kappa[i]);
            v += b_eta_coeff[i] * static_cast<double>(kappa[i]);
        }
        return v;
    };

    const int nfree = static_cast<int>(free_slots.size());
    std::vector<long> t(n, 0);
    // Odometer over torsion residues.
    while (true) {
        // Find free-slot integers making every closed orbit monodromy-free.
        bool found = nfree == 0;
        std::vector<long> fvals(nfree, 0);
        if (!found) {
            std::vector<long> f(nfree, -20);
            while (true) {
                IntVec tt = t;
                for (int i = 0; i < nfree; ++i) tt[free_slots[i]] = f[i];
                IntVec r = int_mat_vec(snf.Pinv, tt);
                bool ok = true;
                for (const auto& kappa : kernel)
                    if (std::abs(beta(r, kappa)) > 1e-9) ok = false;
                if (ok) {
                    found = true;
                    fvals = f;
                    break;
                }
                int pos = 0;
                while (pos < nfree && f[pos] == 20) f[pos++] = -20;
                if (pos == nfree) break;
                ++f[pos];
            }
        }
        if (found) {
            IntVec tt = t;
            for (int i = 0; i < nfree; ++i) tt[free_slots[i]] = fvals[i];
            LatticeData d;
            d.A = a;
            d.rep = int_mat_vec(snf.Pinv, tt);
            d.sum_dirs = dirs;
            d.kernel = kernel;
            detail::recenter_rep(d);
            space.basis.push_back(d);
        }
        // Next torsion tuple.
        size_t pos = 0;
        while (pos < torsion_slots.size() &&
               t[torsion_slots[pos]] == snf.S[torsion_slots[pos]][torsion_slots[pos]] - 1)
            t[torsion_slots[pos++]] = 0;
        if (pos == torsion_slots.size()) break;
        ++t[torsion_slots[pos]];
    }
    return space;
}

// One-variable section space of the line (m, c).
inline LatticeSpace theta_line_space(const ThetaLine& line, const EllipticParams& params) {
    IntMat a{{static_cast<long>(line.order)}};
    const auto c = lattice_coords(line.shift, params.eta);
    double eta_coeff = 0.0;
    if (line.order == 0) {
        // dimension 1 exactly when the shift is a lattice point
        if (std::abs(c.q - std::round(c.q)) > 1e-9 || std::abs(c.p - std::round(c.p)) > 1e-9)
            return LatticeSpace{1, a, {}};
        eta_coeff = std::round(c.q);
    }
    return build_lattice_space(a, {eta_coeff});
}

// Basis of Theta_{m,c} as callables; the Fourier class index j = 0..m-1 selects
// the residue of the mode index modulo m.
inline std::vector<ScalarFn> theta_basis(const ThetaLine& line, const EllipticParams& params) {
    params.validate();
    if (line.order <= 0)
        throw empty_space_error(
            "theta_basis: the space has dimension m only for m > 0; it is 0 for m < 0 "
            "and, for m = 0, has dimension 1 exactly when the shift lies on the lattice");
    const LatticeSpace space = theta_line_space(line, params);
    std::vector<ScalarFn> fns;
    fns.reserve(space.basis.size());
    for (const auto& data : space.basis) {
        const cplx c = line.shift;
        const cplx eta = params.eta;
        const double eps = params.series_eps;
        fns.push_back([data, c, eta, eps](cplx z) {
            return lattice_theta_eval(data, {z}, {c}, eta, eps);
        });
    }
    return fns;
}

} // namespace ellq

#endif
