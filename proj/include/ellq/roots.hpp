// Root-system data: Gram and Cartan matrices, grades, weight forms.
#ifndef ELLQ_ROOTS_HPP
#define ELLQ_ROOTS_HPP

#include <numeric>
#include <string>
#include <vector>

#include "ellq/errors.hpp"
#include "ellq/snf.hpp"

namespace ellq {

struct RootData {
    int rank = 0;
    IntMat gram;    // scalar products (delta_i, delta_j)
    IntMat cartan;  // a_{i,j} = 2 (delta_i, delta_j) / (delta_i, delta_i)
    bool affine = false;

    void validate() const {
        if (rank <= 0 || gram.size() != static_cast<size_t>(rank) ||
            cartan.size() != static_cast<size_t>(rank))
            throw invalid_parameter_error("RootData: inconsistent rank");
        for (int i = 0; i < rank; ++i) {
            if (gram[i].size() != static_cast<size_t>(rank) ||
                cartan[i].size() != static_cast<size_t>(rank))
                throw invalid_parameter_error("RootData: ragged matrix");
            if (gram[i][i] == 0)
                throw invalid_parameter_error("RootData: zero diagonal scalar product");
            for (int j = 0; j < rank; ++j) {
                if (gram[i][j] != gram[j][i])
                    throw invalid_parameter_error("RootData: gram matrix not symmetric");
                if (cartan[i][j] * gram[i][i] != 2 * gram[i][j])
                    throw invalid_parameter_error("RootData: cartan/gram mismatch");
            }
        }
    }

    static RootData type_a(int h) {
        RootData r;
        r.rank = h;
        r.gram = IntMat(h, IntVec(h, 0));
        for (int i = 0; i < h; ++i) {
            r.gram[i][i] = 2;
            if (i + 1 < h) r.gram[i][i + 1] = r.gram[i + 1][i] = -1;
        }
        r.cartan = r.gram; // simply laced
        r.validate();
        return r;
    }

    // Affine sl_h: cyclic index arithmetic; for h = 2 the two simple roots pair to -2.
    static RootData affine_sl(int h) {
        if (h < 2) throw invalid_parameter_error("affine_sl: rank must be at least 2");
        RootData r;
        r.rank = h;
        r.affine = true;
        r.gram = IntMat(h, IntVec(h, 0));
        for (int i = 0; i < h; ++i) r.gram[i][i] = 2;
        if (h == 2) {
            r.gram[0][1] = r.gram[1][0] = -2;
        } else {
            for (int i = 0; i < h; ++i) {
                r.gram[i][(i + 1) % h] = -1;
                r.gram[(i + 1) % h][i] = -1;
            }
        }
        r.cartan = r.gram;
        r.validate();
        return r;
    }

    // Root subsystem generated by the kept simple roots.
    RootData subsystem(const std::vector<int>& keep) const {
        RootData r;
        r.rank = static_cast<int>(keep.size());
        r.affine = false;
        r.gram = IntMat(r.rank, IntVec(r.rank, 0));
        r.cartan = r.gram;
        for (int i = 0; i < r.rank; ++i)
            for (int j = 0; j < r.rank; ++j) {
                r.gram[i][j] = gram[keep[i]][keep[j]];
                r.cartan[i][j] = cartan[keep[i]][keep[j]];
            }
        if (r.rank > 0) r.validate();
        return r;
    }

    // Connected components of the Coxeter graph (edges where the pairing is nonzero).
    std::vector<std::vector<int>> coxeter_components() const {
        std::vector<int> comp(rank, -1);
        std::vector<std::vector<int>> out;
        for (int s = 0; s < rank; ++s) {
            if (comp[s] >= 0) continue;
            const int id = static_cast<int>(out.size());
            out.emplace_back();
            std::vector<int> stack{s};
            comp[s] = id;
            while (!stack.empty()) {
                const int v = stack.back();
                stack.pop_back();
                out[id].push_back(v);
                for (int w = 0; w < rank; ++w)
                    if (w != v && gram[v][w] != 0 && comp[w] < 0) {
                        comp[w] = id;
                        stack.push_back(w);
                    }
            }
        }
        return out;
    }
};

// Element of the positive grade lattice L+.
struct Grade {
    std::vector<int> counts;

    Grade() = default;
    explicit Grade(std::vector<int> c) : counts(std::move(c)) {
        for (int v : counts)
            if (v < 0) throw invalid_parameter_error("Grade: entries must be nonnegative");
    }
    static Grade zero(int h) { return Grade(std::vector<int>(h, 0)); }

    int rank() const { return static_cast<int>(counts.size()); }
    int total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

    Grade operator+(const Grade& o) const {
        Grade r = *this;
        for (size_t i = 0; i < counts.size(); ++i) r.counts[i] += o.counts[i];
        return r;
    }
    bool operator==(const Grade& o) const { return counts == o.counts; }
    bool operator<(const Grade& o) const { return counts < o.counts; }

    std::string str() const {
        std::string s = "(";
        for (size_t i = 0; i < counts.size(); ++i)
            s += (i ? "," : "") + std::to_string(counts[i]);
        return s + ")";
    }
};

// Linear form n : L -> Z.
struct WeightForm {
    std::vector<int> values;

    WeightForm() = default;
    explicit WeightForm(std::vector<int> v) : values(std::move(v)) {}

    long operator()(const Grade& l) const {
        long s = 0;
        for (size_t i = 0; i < values.size(); ++i) s += static_cast<long>(values[i]) * l.counts[i];
        return s;
    }
};

// (delta_i, l) = sum_j gram[i][j] l_j
inline long grade_pairing(const RootData& roots, int i, const Grade& l) {
    long s = 0;
    for (int j = 0; j < roots.rank; ++j)
        s += static_cast<long>(roots.gram[i][j]) * l.counts[j];
    return s;
}

} // namespace ellq

#endif
