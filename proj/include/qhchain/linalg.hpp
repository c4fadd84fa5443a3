// linalg.hpp — dense-matrix utilities: symplectic form, sine transform,
// tridiagonal Toeplitz mode frequencies, matrix exponential, Hadamard and
// Kronecker products.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace qhchain {

using Mat  = Eigen::MatrixXd;
using Vec  = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

/// The canonical symplectic matrix [[0, I], [-I, 0]] for n modes.
inline Mat symplectic_form(int n) {
    if (n < 1) throw std::invalid_argument("symplectic_form: n must be >= 1");
    Mat J = Mat::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n).setIdentity();
    J.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    return J;
}

/// Orthogonal, symmetric, involutory sine-transform matrix,
/// O_kl = sqrt(2/(n+1)) sin(k l pi / (n+1)) with 1-based k, l.
inline Mat sine_transform(int n) {
    if (n < 1) throw std::invalid_argument("sine_transform: n must be >= 1");
    Mat O(n, n);
    const double norm = std::sqrt(2.0 / (n + 1));
    for (int k = 1; k <= n; ++k)
        for (int l = 1; l <= n; ++l)
            O(k - 1, l - 1) = norm * std::sin(k * l * pi / (n + 1));
    return O;
}

/// Mode frequencies of the uniform tridiagonal Toeplitz block:
/// nu_m = omega + 2 Omega cos(m pi / (n+1)), ordered by mode index m.
inline Vec toeplitz_mode_frequencies(int n, double omega, double Omega) {
    if (n < 1) throw std::invalid_argument("toeplitz_mode_frequencies: n must be >= 1");
    Vec nu(n);
    for (int m = 1; m <= n; ++m)
        nu(m - 1) = omega + 2.0 * Omega * std::cos(m * pi / (n + 1));
    return nu;
}

/// exp(A t) for a square real matrix (scaling-and-squaring Pade).
inline Mat matrix_exp(const Mat& A, double t = 1.0) {
    if (A.rows() != A.cols()) throw std::invalid_argument("matrix_exp: matrix must be square");
    if (!all_finite(A) || !std::isfinite(t)) throw std::invalid_argument("matrix_exp: non-finite input");
    return (A * t).exp();
}

/// Elementwise (Hadamard) product of same-shape matrices.
template <typename DerivedA, typename DerivedB>
auto hadamard(const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("hadamard: shape mismatch");
    return (A.derived().array() * B.derived().array()).matrix().eval();
}

/// Kronecker product, (A (x) B)(i*rB+k, j*cB+l) = A(i,j) B(k,l).
inline Mat kron(const Mat& A, const Mat& B) {
    Mat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

/// Direct sum B = blkdiag(A, A).
inline Mat block_doubled(const Mat& A) {
    const auto n = A.rows();
    Mat B = Mat::Zero(2 * n, 2 * n);
    B.topLeftCorner(n, n) = A;
    B.bottomRightCorner(n, n) = A;
    return B;
}

} // namespace qhchain
