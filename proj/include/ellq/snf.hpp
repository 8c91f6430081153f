// Smith-style diagonalization of small integer matrices, with transform tracking.
#ifndef ELLQ_SNF_HPP
#define ELLQ_SNF_HPP

#include <cstdlib>
#include <vector>

namespace ellq {

using IntMat = std::vector<std::vector<long>>;
using IntVec = std::vector<long>;

inline IntMat int_identity(int n) {
    IntMat m(n, IntVec(n, 0));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline IntVec int_mat_vec(const IntMat& m, const IntVec& v) {
    IntVec out(m.size(), 0);
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

// P * A * Q = S with S diagonal (entries nonnegative), P, Q unimodular.
// Pinv satisfies P * Pinv = identity. Intended for the small symmetric
// multiplier matrices of this project; entries stay far from overflow.
struct SmithDecomposition {
    IntMat S;
    IntMat P, Pinv, Q;
};

inline SmithDecomposition smith_decompose(IntMat a) {
    const int n = static_cast<int>(a.size());
    SmithDecomposition r{a, int_identity(n), int_identity(n), int_identity(n)};
    auto& s = r.S;

    auto swap_rows = [&](int i, int j) {
        std::swap(s[i], s[j]);
        std::swap(r.P[i], r.P[j]);
        for (int k = 0; k < n; ++k) std::swap(r.Pinv[k][i], r.Pinv[k][j]);
    };
    auto swap_cols = [&](int i, int j) {
        for (int k = 0; k < n; ++k) std::swap(s[k][i], s[k][j]);
        for (int k = 0; k < n; ++k) std::swap(r.Q[k][i], r.Q[k][j]);
    };
    auto add_row = [&](int dst, int src, long mult) { // row dst += mult * row src
        for (int k = 0; k < n; ++k) s[dst][k] += mult * s[src][k];
        for (int k = 0; k < n; ++k) r.P[dst][k] += mult * r.P[src][k];
        for (int k = 0; k < n; ++k) r.Pinv[k][src] -= mult * r.Pinv[k][dst];
    };
    auto add_col = [&](int dst, int src, long mult) { // col dst += mult * col src
        for (int k = 0; k < n; ++k) s[k][dst] += mult * s[k][src];
        for (int k = 0; k < n; ++k) r.Q[k][dst] += mult * r.Q[k][src];
    };
    auto negate_row = [&](int i) {
        for (int k = 0; k < n; ++k) s[i][k] = -s[i][k];
        for (int k = 0; k < n; ++k) r.P[i][k] = -r.P[i][k];
        for (int k = 0; k < n; ++k) r.Pinv[k][i] = -r.Pinv[k][i];
    };

    for (int d = 0; d < n; ++d) {
        // Select the smallest nonzero pivot in the trailing block.
        int pi = -1, pj = -1;
        for (int i = d; i < n; ++i)
            for (int j = d; j < n; ++j)
                if (s[i][j] != 0 &&
                    (pi < 0 || std::labs(s[i][j]) < std::labs(s[pi][pj]))) {
                    pi = i;
                    pj = j;
                }
        if (pi < 0) break;
        if (pi != d) swap_rows(d, pi);
        if (pj != d) swap_cols(d, pj);
        bool clean = false;
        while (!clean) {
            clean = true;
            for (int i = d + 1; i < n; ++i) {
                if (s[i][d] == 0) continue;
                const long q = s[i][d] / s[d][d];
                add_row(i, d, -q);
                if (s[i][d] != 0) { swap_rows(d, i); clean = false; }
            }
            for (int j = d + 1; j < n; ++j) {
                if (s[d][j] == 0) continue;
                const long q = s[d][j] / s[d][d];
                add_col(j, d, -q);
                if (s[d][j] != 0) { swap_cols(d, j); clean = false; }
            }
        }
        if (s[d][d] < 0) negate_row(d);
    }
    return r;
}

} // namespace ellq

#endif
