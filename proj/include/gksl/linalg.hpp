// Dense complex matrix aliases, tolerance handling and small predicates

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gksl {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Global default tolerance. Predicates scale it by the largest entry magnitude.
inline constexpr double kDefaultTol = 1e-9;

inline constexpr cd kI{0.0, 1.0};

inline double max_abs(const CMatrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline double max_abs(const RMatrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// tol * max(1, largest |entry|)
inline double scaled_tol(double tol, const CMatrix& a) {
    return tol * std::max(1.0, max_abs(a));
}

inline void require_square(const CMatrix& a, const char* what) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument(std::string(what) + " must be square, got " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

inline void require_same_shape(const CMatrix& a, const CMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch (" +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()) + ")");
    }
}

inline bool is_hermitian(const CMatrix& a, double tol = kDefaultTol) {
    if (a.rows() != a.cols()) return false;
    return max_abs(CMatrix(a - a.adjoint())) <= scaled_tol(tol, a);
}

/// Eigenvalues of the Hermitian part (A + A*)/2, ascending.
inline RVector hermitian_eigenvalues(const CMatrix& a) {
    require_square(a, "hermitian_eigenvalues");
    if (a.size() == 0) return RVector();
    const CMatrix h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

/// Hermitian and min eigenvalue >= -tol * max(1, max eigenvalue).
inline bool is_psd(const CMatrix& a, double tol = kDefaultTol) {
    if (!is_hermitian(a, tol)) return false;
    if (a.size() == 0) return true;
    const RVector ev = hermitian_eigenvalues(a);
    return ev.minCoeff() >= -tol * std::max(1.0, ev.maxCoeff());
}

/// Hilbert-Schmidt inner product Tr(A* B), conjugate-linear in the first slot.
inline cd hs_inner(const CMatrix& a, const CMatrix& b) {
    require_same_shape(a, b, "hs_inner");
    return (a.adjoint() * b).trace();
}

inline double hs_norm(const CMatrix& a) { return a.norm(); }

/// Unit matrix E_ij of size n x n (0-based).
inline CMatrix unit_matrix(Index n, Index i, Index j) {
    CMatrix e = CMatrix::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

}  // namespace gksl
