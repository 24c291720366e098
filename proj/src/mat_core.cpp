#include "fomas/mat_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <string>

namespace fomas {

Mat pseudo_inverse(const Mat& m) {
    if (m.size() == 0)
        throw std::invalid_argument("pseudo_inverse: empty matrix");
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& s = svd.singularValues();
    const double cutoff = s.size() > 0
                              ? s(0) * 1e-12 * static_cast<double>(std::max(m.rows(), m.cols()))
                              : 0.0;
    Vec inv_s = Vec::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff)
            inv_s(i) = 1.0 / s(i);
    return svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().transpose();
}

Spectrum spectrum(const Mat& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("spectrum: matrix must be square");
    if (!m.allFinite())
        throw std::invalid_argument("spectrum: matrix has non-finite entries");
    Eigen::EigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("spectrum: eigenvalue iteration failed for dimension " +
                                 std::to_string(m.rows()));
    return es.eigenvalues();
}

double max_eig_sym(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()),
                                          Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("max_eig_sym: eigenvalue iteration failed");
    return es.eigenvalues().maxCoeff();
}

}  // namespace fomas
