// GKSL generators in the standard basis: action, superoperator, validity,
// canonical form and pair-block-diagonal classification

#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gksl/basis.hpp"
#include "gksl/linalg.hpp"

namespace gksl {

/// L(rho) = -i[H, rho] + 1/2 sum gamma_{ij,kl} ([E_ij, rho E_kl*] + [E_ij rho, E_kl*]).
/// `gamma` is N^2 x N^2 in the standard ordering. Validity is checked by
/// validate(), not enforced here.
struct GeneratorSpec {
    Index n{0};
    CMatrix hamiltonian;
    CMatrix gamma;

    static GeneratorSpec zero(Index n) {
        return {n, CMatrix::Zero(n, n), CMatrix::Zero(n * n, n * n)};
    }

    /// gamma_{ij,kl}, 0-based.
    cd& coeff(Index i, Index j, Index k, Index l) {
        const BasisOrdering b = BasisOrdering::standard(n);
        return gamma(b.position(i, j), b.position(k, l));
    }
    cd coeff(Index i, Index j, Index k, Index l) const {
        const BasisOrdering b = BasisOrdering::standard(n);
        return gamma(b.position(i, j), b.position(k, l));
    }

    /// Writes a 2x2 ij block (i<j) into Gamma's (E_ij, E_ji) rows/columns.
    void set_pair_block(Index i, Index j, const Eigen::Matrix2cd& block) {
        if (!(i < j)) throw std::invalid_argument("set_pair_block requires i < j");
        coeff(i, j, i, j) = block(0, 0);
        coeff(i, j, j, i) = block(0, 1);
        coeff(j, i, i, j) = block(1, 0);
        coeff(j, i, j, i) = block(1, 1);
    }

    Eigen::Matrix2cd pair_block(Index i, Index j) const {
        Eigen::Matrix2cd m;
        m << coeff(i, j, i, j), coeff(i, j, j, i), coeff(j, i, i, j), coeff(j, i, j, i);
        return m;
    }
};

/// Same generator in the Gell-Mann basis; `c` is (N^2-1) x (N^2-1) over the
/// traceless labels (identity excluded).
struct GellMannSpec {
    Index n{0};
    CMatrix hamiltonian;
    CMatrix c;
};

inline void check_shapes(const GeneratorSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("generator dimension must be positive");
    if (spec.hamiltonian.rows() != spec.n || spec.hamiltonian.cols() != spec.n) {
        throw std::invalid_argument("hamiltonian must be N x N");
    }
    if (spec.gamma.rows() != spec.n * spec.n || spec.gamma.cols() != spec.n * spec.n) {
        throw std::invalid_argument("gamma must be N^2 x N^2");
    }
}

inline void check_shapes(const GellMannSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("generator dimension must be positive");
    if (spec.hamiltonian.rows() != spec.n || spec.hamiltonian.cols() != spec.n) {
        throw std::invalid_argument("hamiltonian must be N x N");
    }
    const Index m = spec.n * spec.n - 1;
    if (spec.c.rows() != m || spec.c.cols() != m) {
        throw std::invalid_argument("Gell-Mann coefficient matrix must be (N^2-1) x (N^2-1)");
    }
}

inline double spec_scale(const GeneratorSpec& spec) {
    return std::max({1.0, max_abs(spec.hamiltonian), max_abs(spec.gamma)});
}

// ---------------------------------------------------------------- action

inline CMatrix apply_generator(const GeneratorSpec& spec, const CMatrix& rho) {
    check_shapes(spec);
    if (rho.rows() != spec.n || rho.cols() != spec.n) {
        throw std::invalid_argument("apply_generator: rho must be N x N");
    }
    const Index n = spec.n;
    const BasisOrdering basis = BasisOrdering::standard(n);
    CMatrix out = -kI * (spec.hamiltonian * rho - rho * spec.hamiltonian);

    // sum g E_ij rho E_lk contributes rho(j,l) at (i,k); E_lk E_ij = delta_ki E_lj feeds M.
    CMatrix jump = CMatrix::Zero(n, n);
    CMatrix m = CMatrix::Zero(n, n);
    for (Index q = 0; q < basis.size(); ++q) {
        const BasisLabel& lq = basis.label(q);
        for (Index p = 0; p < basis.size(); ++p) {
            const cd g = spec.gamma(p, q);
            if (g == cd(0.0)) continue;
            const BasisLabel& lp = basis.label(p);
            jump(lp.row, lq.row) += g * rho(lp.col, lq.col);
            if (lp.row == lq.row) m(lq.col, lp.col) += g;
        }
    }
    out += jump - 0.5 * (m * rho + rho * m);
    return out;
}

/// D_{ijkl}(rho) = 2 E_ij rho E_lk - rho E_lk E_ij - E_lk E_ij rho, by explicit products.
inline CMatrix lindblad_dissipator(Index i, Index j, Index k, Index l, const CMatrix& rho) {
    require_square(rho, "lindblad_dissipator");
    const Index n = rho.rows();
    for (Index idx : {i, j, k, l}) {
        if (idx < 0 || idx >= n) throw std::out_of_range("lindblad_dissipator: index out of range");
    }
    const CMatrix eij = unit_matrix(n, i, j);
    const CMatrix elk = unit_matrix(n, l, k);
    return 2.0 * eij * rho * elk - rho * elk * eij - elk * eij * rho;
}

/// Scalar c with D^lambda_nn(lambda_kl) = c lambda_kl for the diagonal Gell-Mann
/// dissipator. 0-based: n < N-1 is a diagonal label, k < l.
inline double gm_diag_dissipator_coeff(Index n, Index k, Index l, Index dim) {
    if (n < 0 || n >= dim - 1 || k < 0 || l >= dim || !(k < l)) {
        throw std::out_of_range("gm_diag_dissipator_coeff: index out of range");
    }
    const double m = static_cast<double>(n + 1);  // 1-based label
    if (n == k - 1) return -m / (m + 1.0);
    if (k <= n && n <= l - 2) return -1.0 / (m * (m + 1.0));
    if (n == l - 1) return -(m + 1.0) / m;
    return 0.0;
}

/// Matrix of L in the standard ordering: column q holds the coordinates of L(E_q).
inline CMatrix superoperator(const GeneratorSpec& spec) {
    check_shapes(spec);
    const BasisOrdering basis = BasisOrdering::standard(spec.n);
    CMatrix s(basis.size(), basis.size());
    for (Index q = 0; q < basis.size(); ++q) {
        const BasisLabel& l = basis.label(q);
        s.col(q) = coordinates(apply_generator(spec, unit_matrix(spec.n, l.row, l.col)), basis);
    }
    return s;
}

/// L restricted and projected to the diagonal subalgebra (N x N, standard coordinates).
inline CMatrix diagonal_compression(const CMatrix& superop, Index n) {
    const Index off = n * (n - 1);
    return superop.block(off, off, n, n);
}

/// L restricted and projected to the off-diagonal subspace.
inline CMatrix off_diagonal_compression(const CMatrix& superop, Index n) {
    const Index off = n * (n - 1);
    return superop.block(0, 0, off, off);
}

/// L restricted and projected to the traceless diagonal subspace, in Gell-Mann coordinates.
inline CMatrix traceless_diagonal_compression(const CMatrix& superop, Index n) {
    const BasisOrdering gm = BasisOrdering::gellmann(n);
    const BasisOrdering st = BasisOrdering::standard(n);
    CMatrix w(st.size(), n - 1);
    for (Index d = 0; d < n - 1; ++d) w.col(d) = coordinates(gellmann(d, d, n), st);
    return w.adjoint() * superop * w;
}

// ------------------------------------------------------------- validity

struct ValidationReport {
    bool hamiltonian_hermitian{false};
    bool psd_on_traceless{false};
    bool trace_condition{false};
    bool verdict{false};

    double min_traceless_eigenvalue{0.0};
    double traceless_hermiticity_defect{0.0};
    double max_trace_defect{0.0};
    /// Hermitian test matrix A that breaks Re Tr(Gamma(A)) = Re Tr(Gamma(I)A).
    std::optional<CMatrix> trace_witness;
    /// Traceless matrix on which the compressed quadratic form is most negative.
    std::optional<CMatrix> psd_witness;
};

/// Full Gamma as an operator matrix in the Gell-Mann ordering (identity label last).
inline CMatrix gamma_in_gellmann(const GeneratorSpec& spec) {
    check_shapes(spec);
    return operator_basis_change(spec.gamma, BasisOrdering::standard(spec.n),
                                 BasisOrdering::gellmann(spec.n));
}

inline ValidationReport validate(const GeneratorSpec& spec, double tol = kDefaultTol) {
    check_shapes(spec);
    ValidationReport r;
    const Index n = spec.n;
    const Index m = n * n - 1;
    r.hamiltonian_hermitian = is_hermitian(spec.hamiltonian, tol);

    const CMatrix full = gamma_in_gellmann(spec);
    const CMatrix compressed = full.topLeftCorner(m, m);
    const double scale = scaled_tol(tol, full);
    r.traceless_hermiticity_defect = max_abs(CMatrix(compressed - compressed.adjoint()));
    if (m == 0) {
        r.psd_on_traceless = true;
    } else {
        const CMatrix herm = 0.5 * (compressed + compressed.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm);
        const RVector ev = solver.eigenvalues();
        r.min_traceless_eigenvalue = ev.minCoeff();
        const bool herm_ok = r.traceless_hermiticity_defect <= scale;
        const bool eig_ok = ev.minCoeff() >= -tol * std::max(1.0, ev.maxCoeff());
        r.psd_on_traceless = herm_ok && eig_ok;
        if (!eig_ok) {
            const BasisOrdering gm = BasisOrdering::gellmann(n);
            CVector coords = CVector::Zero(n * n);
            coords.head(m) = solver.eigenvectors().col(0);
            r.psd_witness = assemble(coords, gm);
        }
    }

    // Re Tr(Gamma(A)) vs Re Tr(Gamma(I) A) over the Hermitian basis {lambda} u {I/sqrt N}.
    const BasisOrdering gm = BasisOrdering::gellmann(n);
    const Index id = gm.identity_position();
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    double worst = 0.0;
    Index worst_k = -1;
    for (Index k = 0; k < gm.size(); ++k) {
        // Tr(X) = sqrt(N) x_id; Tr(Gamma(I) F_k) = sqrt(N) Gamma_{k,id} for Hermitian F_k
        const double lhs = (sqrt_n * full(id, k)).real();
        const double rhs = (sqrt_n * full(k, id)).real();
        const double d = std::abs(lhs - rhs);
        if (d > worst) {
            worst = d;
            worst_k = k;
        }
    }
    r.max_trace_defect = worst;
    r.trace_condition = worst <= scale;
    if (!r.trace_condition && worst_k >= 0) r.trace_witness = gm.matrix(worst_k);

    r.verdict = r.hamiltonian_hermitian && r.psd_on_traceless && r.trace_condition;
    return r;
}

inline std::string describe_failure(const ValidationReport& r) {
    std::ostringstream os;
    if (!r.hamiltonian_hermitian) os << "hamiltonian is not Hermitian; ";
    if (!r.psd_on_traceless) {
        os << "traceless compression of Gamma is not positive semidefinite (min eigenvalue "
           << r.min_traceless_eigenvalue << ", hermiticity defect "
           << r.traceless_hermiticity_defect << "); ";
    }
    if (!r.trace_condition) {
        os << "trace condition fails (defect " << r.max_trace_defect << "); ";
    }
    std::string s = os.str();
    if (s.size() >= 2) s.resize(s.size() - 2);
    return s;
}

// --------------------------------------------------------- canonical form

namespace detail {

inline bool is_canonical(const GeneratorSpec& spec, const CMatrix& full, double tight) {
    const Index id = spec.n * spec.n - 1;
    if (max_abs(CMatrix(full.row(id))) > tight) return false;
    if (max_abs(CMatrix(full.col(id))) > tight) return false;
    if (std::abs(spec.hamiltonian.trace()) > tight) return false;
    if (max_abs(CMatrix(spec.gamma - spec.gamma.adjoint())) > tight) return false;
    if (max_abs(CMatrix(spec.hamiltonian - spec.hamiltonian.adjoint())) > tight) return false;
    return true;
}

}  // namespace detail

/// Unique representative with traceless H and Gamma >= 0, Gamma(I) = 0,
/// Tr Gamma(A) = 0. Throws on invalid input.
inline GeneratorSpec canonicalize(const GeneratorSpec& spec, double tol = kDefaultTol) {
    const ValidationReport report = validate(spec, tol);
    if (!report.verdict) {
        throw std::invalid_argument("canonicalize: invalid generator: " + describe_failure(report));
    }
    const Index n = spec.n;
    const BasisOrdering gm = BasisOrdering::gellmann(n);
    const BasisOrdering st = BasisOrdering::standard(n);
    CMatrix full = gamma_in_gellmann(spec);
    const double tight = 1e-12 * spec_scale(spec);
    if (detail::is_canonical(spec, full, tight)) return spec;

    const Index id = gm.identity_position();
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    CMatrix h = spec.hamiltonian;
    for (Index k = 0; k < id; ++k) {
        const double shift = (full(id, k) - full(k, id)).imag() / (2.0 * sqrt_n);
        if (shift != 0.0) h += shift * gm.matrix(k);
    }
    full.row(id).setZero();
    full.col(id).setZero();
    const CMatrix t = full.topLeftCorner(id, id);
    full.topLeftCorner(id, id) = 0.5 * (t + t.adjoint());

    h = 0.5 * (h + h.adjoint());
    h -= (h.trace() / static_cast<double>(n)) * CMatrix::Identity(n, n);

    GeneratorSpec out;
    out.n = n;
    out.hamiltonian = h;
    out.gamma = operator_basis_change(full, gm, st);
    return out;
}

inline GeneratorSpec to_standard(const GellMannSpec& spec) {
    check_shapes(spec);
    const Index m = spec.n * spec.n - 1;
    CMatrix full = CMatrix::Zero(m + 1, m + 1);
    full.topLeftCorner(m, m) = spec.c;
    return {spec.n, spec.hamiltonian,
            operator_basis_change(full, BasisOrdering::gellmann(spec.n),
                                  BasisOrdering::standard(spec.n))};
}

/// Canonical Gell-Mann form (requires a valid spec).
inline GellMannSpec to_gellmann(const GeneratorSpec& spec, double tol = kDefaultTol) {
    const GeneratorSpec canon = canonicalize(spec, tol);
    const Index m = spec.n * spec.n - 1;
    return {spec.n, canon.hamiltonian, gamma_in_gellmann(canon).topLeftCorner(m, m)};
}

// ---------------------------------------------------------- classification

struct PairBlockClass {
    bool is_pbd{false};
    bool h_diagonal{false};
};

/// Pair block diagonal: Gamma has no O-D coupling and Gamma^O lives on its 2x2 ij blocks.
inline PairBlockClass classify_pair_block_diagonal(const GeneratorSpec& spec,
                                                   double tol = kDefaultTol) {
    check_shapes(spec);
    const BasisOrdering b = BasisOrdering::standard(spec.n);
    const double gt = scaled_tol(tol, spec.gamma);
    PairBlockClass c;
    c.is_pbd = true;
    for (Index q = 0; q < b.size() && c.is_pbd; ++q) {
        for (Index p = 0; p < b.size(); ++p) {
            const bool pd = b.is_diagonal_position(p);
            const bool qd = b.is_diagonal_position(q);
            const bool allowed = (pd && qd) || (!pd && !qd && b.pair_of(p) == b.pair_of(q));
            if (!allowed && std::abs(spec.gamma(p, q)) > gt) {
                c.is_pbd = false;
                break;
            }
        }
    }
    const double ht = scaled_tol(tol, spec.hamiltonian);
    CMatrix off = spec.hamiltonian;
    off.diagonal().setZero();
    c.h_diagonal = max_abs(off) <= ht;
    return c;
}

/// ij block of the coefficient matrix for a jump between the superpositions
/// a|i> + b|j>  ->  c|i> + d|j>  at the given rate.
inline Block2 superposition_block(cd a, cd b, cd c, cd d, double rate, double tol = kDefaultTol) {
    if (std::abs(a) <= tol || std::abs(b) <= tol) {
        throw std::invalid_argument(
            "superposition_block: source amplitudes must both be nonzero");
    }
    if (std::abs(std::norm(a) + std::norm(b) - 1.0) > tol ||
        std::abs(std::norm(c) + std::norm(d) - 1.0) > tol) {
        throw std::invalid_argument("superposition_block: superpositions must be normalized");
    }
    if (rate < 0.0) throw std::invalid_argument("superposition_block: rate must be nonnegative");
    Block2 out;
    out.rep = BlockRep::standard;
    out.m(0, 0) = rate * c * std::conj(c) / (b * std::conj(b));
    out.m(0, 1) = rate * c * std::conj(d) / (std::conj(a) * b);
    out.m(1, 0) = rate * std::conj(c) * d / (a * std::conj(b));
    out.m(1, 1) = rate * d * std::conj(d) / (a * std::conj(a));
    return out;
}

/// L(I_N) == 0, equivalently contractivity in every Schatten p-norm, p > 1.
inline bool identity_preserving(const GeneratorSpec& spec, double tol = kDefaultTol) {
    const CMatrix l_id = apply_generator(spec, CMatrix::Identity(spec.n, spec.n));
    return max_abs(l_id) <= tol * spec_scale(spec);
}

}  // namespace gksl
