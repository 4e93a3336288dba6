// Ordered operator bases of M_N (standard and Gell-Mann) and conversions between them
//
// Both orderings pair the (i,j)/(j,i) labels for i<j in lexicographic order,
// then list the diagonal labels. The Gell-Mann ordering ends with I_N/sqrt(N).
// All indices are 0-based here; file formats use 1-based indices.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gksl/linalg.hpp"

namespace gksl {

enum class BasisKind { standard, gellmann };

/// A basis label (row, col). For the Gell-Mann basis, (i,j) with i<j is the
/// symmetric matrix, (j,i) the antisymmetric one and (n,n) the n-th diagonal
/// matrix; `identity` marks I_N/sqrt(N).
struct BasisLabel {
    Index row{0};
    Index col{0};
    bool identity{false};

    bool operator==(const BasisLabel&) const = default;
};

/// Number of i<j pairs preceding (i,j) in lexicographic order.
inline Index pair_index(Index n, Index i, Index j) {
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

class BasisOrdering {
public:
    static BasisOrdering standard(Index n) { return BasisOrdering(n, BasisKind::standard); }
    static BasisOrdering gellmann(Index n) { return BasisOrdering(n, BasisKind::gellmann); }

    Index n() const { return n_; }
    Index size() const { return n_ * n_; }
    BasisKind kind() const { return kind_; }
    const std::vector<BasisLabel>& labels() const { return labels_; }
    const BasisLabel& label(Index k) const { return labels_.at(static_cast<std::size_t>(k)); }

    /// Position of label (i,j). Off-diagonal: pair slot; diagonal: after all pairs.
    Index position(Index i, Index j) const {
        check_index(i);
        check_index(j);
        if (i == j) {
            if (kind_ == BasisKind::gellmann && i == n_ - 1) {
                throw std::out_of_range("Gell-Mann diagonal label index must be < N-1");
            }
            return n_ * (n_ - 1) + i;
        }
        const Index lo = std::min(i, j);
        const Index hi = std::max(i, j);
        return 2 * pair_index(n_, lo, hi) + (i < j ? 0 : 1);
    }

    Index position(const BasisLabel& l) const {
        if (l.identity) return identity_position();
        return position(l.row, l.col);
    }

    /// Index of I_N/sqrt(N) (Gell-Mann only).
    Index identity_position() const {
        if (kind_ != BasisKind::gellmann) {
            throw std::logic_error("standard ordering has no identity label");
        }
        return n_ * n_ - 1;
    }

    /// Positions belonging to the off-diagonal subspace (first N(N-1) slots).
    Index off_diagonal_count() const { return n_ * (n_ - 1); }

    bool is_diagonal_position(Index k) const { return k >= off_diagonal_count(); }

    /// For an off-diagonal position, the i<j pair block it belongs to.
    Index pair_of(Index k) const { return k / 2; }

    /// The k-th basis matrix.
    CMatrix matrix(Index k) const;

private:
    BasisOrdering(Index n, BasisKind kind) : n_(n), kind_(kind) {
        if (n < 1) throw std::invalid_argument("dimension must be positive");
        labels_.reserve(static_cast<std::size_t>(n * n));
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                labels_.push_back({i, j, false});
                labels_.push_back({j, i, false});
            }
        }
        const Index diag_count = kind == BasisKind::standard ? n : n - 1;
        for (Index d = 0; d < diag_count; ++d) labels_.push_back({d, d, false});
        if (kind == BasisKind::gellmann) labels_.push_back({0, 0, true});
    }

    void check_index(Index i) const {
        if (i < 0 || i >= n_) {
            throw std::out_of_range("basis index " + std::to_string(i) + " out of range for N=" +
                                    std::to_string(n_));
        }
    }

    Index n_;
    BasisKind kind_;
    std::vector<BasisLabel> labels_;
};

/// Generalized Gell-Mann matrix lambda_(i,j), 0-based:
/// i<j symmetric, i>j antisymmetric, i==j (< N-1) diagonal.
inline CMatrix gellmann(Index i, Index j, Index n) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
        throw std::out_of_range("gellmann: index out of range");
    }
    CMatrix m = CMatrix::Zero(n, n);
    const double r2 = 1.0 / std::sqrt(2.0);
    if (i < j) {
        m(i, j) = r2;
        m(j, i) = r2;
    } else if (i > j) {
        // lambda_(i,j) for i>j is -i/sqrt2 (E_ji - E_ij)
        m(j, i) = -kI * r2;
        m(i, j) = kI * r2;
    } else {
        if (i == n - 1) throw std::out_of_range("gellmann: diagonal index must be < N-1");
        const double k = static_cast<double>(i + 1);
        const double norm = 1.0 / std::sqrt(k * (k + 1.0));
        for (Index m_idx = 0; m_idx <= i; ++m_idx) m(m_idx, m_idx) = norm;
        m(i + 1, i + 1) = -k * norm;
    }
    return m;
}

inline CMatrix gellmann_identity(Index n) {
    return CMatrix::Identity(n, n) / std::sqrt(static_cast<double>(n));
}

inline CMatrix BasisOrdering::matrix(Index k) const {
    const BasisLabel& l = label(k);
    if (kind_ == BasisKind::standard) return unit_matrix(n_, l.row, l.col);
    if (l.identity) return gellmann_identity(n_);
    return ::gksl::gellmann(l.row, l.col, n_);
}

/// Coefficients of E_ij over the Gell-Mann ordering, from the closed-form expansion.
inline CVector expand_standard_in_gellmann(Index i, Index j, Index n) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
        throw std::out_of_range("expand_standard_in_gellmann: index out of range");
    }
    const BasisOrdering gm = BasisOrdering::gellmann(n);
    CVector c = CVector::Zero(n * n);
    const double r2 = 1.0 / std::sqrt(2.0);
    if (i < j) {
        c(gm.position(i, j)) = r2;
        c(gm.position(j, i)) = kI * r2;
    } else if (i > j) {
        c(gm.position(j, i)) = r2;
        c(gm.position(i, j)) = -kI * r2;
    } else {
        // 1-based jj = i+1:  -sqrt((jj-1)/jj) lambda_{jj-1} + sum_{m=jj}^{N-1} lambda_m / sqrt(m(m+1)) + I/N
        const double jj = static_cast<double>(i + 1);
        if (i >= 1) c(gm.position(i - 1, i - 1)) += -std::sqrt((jj - 1.0) / jj);
        for (Index m = i; m < n - 1; ++m) {
            const double mm = static_cast<double>(m + 1);
            c(gm.position(m, m)) += 1.0 / std::sqrt(mm * (mm + 1.0));
        }
        // I_N/N = (1/sqrt(N)) * (I_N/sqrt(N))
        c(gm.identity_position()) = 1.0 / std::sqrt(static_cast<double>(n));
    }
    return c;
}

/// Coordinates of rho in an orthonormal ordering: c_k = <F_k, rho>.
inline CVector coordinates(const CMatrix& rho, const BasisOrdering& basis) {
    if (rho.rows() != basis.n() || rho.cols() != basis.n()) {
        throw std::invalid_argument("coordinates: matrix does not match basis dimension");
    }
    CVector c(basis.size());
    for (Index k = 0; k < basis.size(); ++k) {
        const BasisLabel& l = basis.label(k);
        if (basis.kind() == BasisKind::standard) {
            c(k) = rho(l.row, l.col);
        } else {
            c(k) = hs_inner(basis.matrix(k), rho);
        }
    }
    return c;
}

inline CMatrix assemble(const CVector& coords, const BasisOrdering& basis) {
    if (coords.size() != basis.size()) {
        throw std::invalid_argument("assemble: coordinate vector length mismatch");
    }
    CMatrix m = CMatrix::Zero(basis.n(), basis.n());
    for (Index k = 0; k < basis.size(); ++k) {
        if (coords(k) == cd(0.0)) continue;
        if (basis.kind() == BasisKind::standard) {
            const BasisLabel& l = basis.label(k);
            m(l.row, l.col) += coords(k);
        } else {
            m += coords(k) * basis.matrix(k);
        }
    }
    return m;
}

/// Unitary W whose k-th column holds the `from`-coordinates of the k-th `to` basis matrix.
inline CMatrix change_of_basis(const BasisOrdering& from, const BasisOrdering& to) {
    if (from.n() != to.n()) throw std::invalid_argument("change_of_basis: dimension mismatch");
    CMatrix w(from.size(), to.size());
    for (Index k = 0; k < to.size(); ++k) w.col(k) = coordinates(to.matrix(k), from);
    return w;
}

/// Re-express an operator on M_N (given as a matrix in `from`) in the `to` ordering.
inline CMatrix operator_basis_change(const CMatrix& m, const BasisOrdering& from,
                                     const BasisOrdering& to) {
    if (from.n() != to.n()) throw std::invalid_argument("operator_basis_change: dimension mismatch");
    if (m.rows() != from.size() || m.cols() != from.size()) {
        throw std::invalid_argument("operator_basis_change: operator is " +
                                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                    ", expected " + std::to_string(from.size()) + " square");
    }
    const CMatrix w = change_of_basis(from, to);
    return w.adjoint() * m * w;
}

/// Coefficient matrix representation of a 2x2 ij block.
enum class BlockRep { standard, gellmann };

/// One ij block: [[g_ij, x], [y, g_ji]] where x = alpha + i beta (standard) or
/// a + i b (Gell-Mann).
struct Block2 {
    Eigen::Matrix2cd m{Eigen::Matrix2cd::Zero()};
    BlockRep rep{BlockRep::standard};

    bool is_hermitian(double tol = kDefaultTol) const {
        const double s = tol * std::max(1.0, m.cwiseAbs().maxCoeff());
        return std::abs(m(0, 0).imag()) <= s && std::abs(m(1, 1).imag()) <= s &&
               std::abs(m(0, 1) - std::conj(m(1, 0))) <= s;
    }
};

/// Equal-contribution conversion between standard (Gamma) and Gell-Mann (C) blocks.
inline Block2 convert_block(const Block2& b, BlockRep target) {
    if (b.rep == target) return b;
    const cd g1 = b.m(0, 0);
    const cd g2 = b.m(1, 1);
    // x = re + i im of the upper-right entry; the lower-left is taken as its conjugate partner
    const cd upper = b.m(0, 1);
    const cd lower = b.m(1, 0);
    const cd re = 0.5 * (upper + lower);
    const cd im = (upper - lower) / (2.0 * kI);
    Block2 out;
    out.rep = target;
    if (b.rep == BlockRep::gellmann) {
        out.m(0, 0) = 0.5 * (g1 + g2 - 2.0 * im);
        out.m(0, 1) = 0.5 * (g1 - g2 - 2.0 * kI * re);
        out.m(1, 0) = 0.5 * (g1 - g2 + 2.0 * kI * re);
        out.m(1, 1) = 0.5 * (g1 + g2 + 2.0 * im);
    } else {
        out.m(0, 0) = 0.5 * (g1 + g2 + 2.0 * re);
        out.m(0, 1) = 0.5 * (-2.0 * im - kI * (g1 - g2));
        out.m(1, 0) = 0.5 * (-2.0 * im + kI * (g1 - g2));
        out.m(1, 1) = 0.5 * (g1 + g2 - 2.0 * re);
    }
    return out;
}

}  // namespace gksl
