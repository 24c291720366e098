#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace fomas {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Eigenvalues of a real square matrix, in Eigen's solver ordering.
using Spectrum = Eigen::VectorXcd;

/// Kronecker product: block (i,j) of the result is a(i,j) * b.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>
kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                              a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b.derived();
    return out;
}

/// sym(M) = M + M^T. Throws on non-square input.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
sym(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("sym: matrix must be square");
    return m.derived() + m.derived().transpose().eval();
}

/// Moore-Penrose pseudo-inverse via SVD. Singular values below
/// sigma_max * 1e-12 * max(rows, cols) are treated as zero.
Mat pseudo_inverse(const Mat& m);

/// Eigenvalues of a square real matrix (general nonsymmetric path).
/// Throws on non-square input or solver failure.
Spectrum spectrum(const Mat& m);

/// Largest eigenvalue of a symmetric matrix (symmetrized before solving).
double max_eig_sym(const Mat& m);

}  // namespace fomas
