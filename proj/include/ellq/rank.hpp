// Numerical rank of sampled-evaluation matrices.
#ifndef ELLQ_RANK_HPP
#define ELLQ_RANK_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace ellq {

// Singular values below rel_threshold * sigma_max count as zero.
inline int numeric_rank(const Eigen::MatrixXcd& m, double rel_threshold = 1e-8) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_threshold * sv(0)) ++rank;
    return rank;
}

// Condition proxy: sigma_max / sigma_min (infinite when singular).
inline double condition_number(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) == 0.0) return 1e300;
    return sv(0) / sv(sv.size() - 1);
}

} // namespace ellq

#endif
