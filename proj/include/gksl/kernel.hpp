// Invariant states: closed-form kernel of pair-block-diagonal generators,
// 2x2 block eigenpairs, the SVD null-space oracle, the K-operator and consistency bounds

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gksl/basis.hpp"
#include "gksl/digraph.hpp"
#include "gksl/expm.hpp"
#include "gksl/generator.hpp"
#include "gksl/linalg.hpp"

namespace gksl {

/// Thrown when a closed-form routine is called outside its hypotheses
/// (not pair block diagonal, H not diagonal, Gamma not PSD).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct EigenPair {
    cd mu;
    CMatrix a;
    int branch{+1};  // +1 or -1
};

enum class KernelTagKind { diagonal, sink_pair, singular_2sink, numerical };

inline const char* to_string(KernelTagKind k) {
    switch (k) {
        case KernelTagKind::diagonal: return "diagonal";
        case KernelTagKind::sink_pair: return "sink-pair";
        case KernelTagKind::singular_2sink: return "singular-2-sink";
        case KernelTagKind::numerical: return "numerical";
    }
    return "?";
}

struct KernelTag {
    KernelTagKind kind{KernelTagKind::numerical};
    Index k{-1};  // pair (k,l) for block elements, -1 otherwise
    Index l{-1};
    std::vector<Index> component;  // TSCC vertices for diagonal elements
};

struct KernelBasis {
    std::vector<CMatrix> basis;
    std::vector<KernelTag> tags;
    std::vector<std::string> warnings;
    std::string method;

    std::size_t dimension() const { return basis.size(); }

    void add(CMatrix m, KernelTag t) {
        basis.push_back(std::move(m));
        tags.push_back(std::move(t));
    }
    void append(const KernelBasis& other) {
        basis.insert(basis.end(), other.basis.begin(), other.basis.end());
        tags.insert(tags.end(), other.tags.begin(), other.tags.end());
        warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
    }
};

// ------------------------------------------------------------ diagonal part

/// One diagonal state per terminal SCC of the induced digraph. Holds for every generator.
inline KernelBasis diagonal_kernel(const GeneratorSpec& spec, double tol = kDefaultTol) {
    const InducedDigraph g = induced_digraph(spec, tol);
    KernelBasis kb;
    kb.method = "closed-form";
    for (const StationaryVector& sv : tscc_stationary_vectors(g)) {
        CMatrix d = CMatrix::Zero(spec.n, spec.n);
        for (Index v = 0; v < spec.n; ++v) d(v, v) = sv.rho(v);
        kb.add(std::move(d), {KernelTagKind::diagonal, -1, -1, sv.vertices});
    }
    return kb;
}

// ---------------------------------------------------------- pair blocks

namespace detail {

inline void require_pair(const GeneratorSpec& spec, Index k, Index l) {
    if (k < 0 || l >= spec.n || !(k < l)) {
        throw std::out_of_range("pair (k,l) must satisfy 0 <= k < l < N");
    }
}

inline void require_pbd(const GeneratorSpec& spec, double tol) {
    const PairBlockClass c = classify_pair_block_diagonal(spec, tol);
    if (!c.is_pbd) throw PreconditionError("generator is not pair block diagonal");
    if (!c.h_diagonal) throw PreconditionError("hamiltonian is not diagonal");
}

/// The kl block of L on span{E_kl, E_lk} as a 2x2 matrix [[m11, m12], [m21, m22]].
struct PairGenerator {
    cd m11, m12, m21, m22;
    cd delta;  // (m11 - m22)/2
};

inline PairGenerator pair_generator(const GeneratorSpec& spec, Index k, Index l) {
    const cd dh = spec.hamiltonian(k, k) - spec.hamiltonian(l, l);
    const cd g_kk = spec.coeff(k, k, k, k);
    const cd g_ll = spec.coeff(l, l, l, l);
    const cd g_kkll = spec.coeff(k, k, l, l);
    const cd g_llkk = spec.coeff(l, l, k, k);
    // out-weights computed from the unthresholded diagonal of Gamma
    double out_k = 0.0;
    double out_l = 0.0;
    for (Index i = 0; i < spec.n; ++i) {
        if (i != k) out_k += spec.coeff(i, k, i, k).real();
        if (i != l) out_l += spec.coeff(i, l, i, l).real();
    }
    const cd common = -0.5 * (g_kk + g_ll) - 0.5 * (out_k + out_l);
    PairGenerator p;
    p.m11 = -kI * dh + g_kkll + common;
    p.m22 = kI * dh + g_llkk + common;
    p.m12 = spec.coeff(k, l, l, k);  // alpha + i beta
    p.m21 = spec.coeff(l, k, k, l);  // alpha - i beta
    p.delta = 0.5 * (p.m11 - p.m22);
    return p;
}

inline CMatrix pair_matrix(Index n, Index k, Index l, cd x, cd y) {
    CMatrix a = CMatrix::Zero(n, n);
    a(k, l) = x;
    a(l, k) = y;
    return a;
}

/// Unit HS norm, E_kl coefficient real positive (E_lk's if the former vanishes).
inline CMatrix normalize_pair_element(CMatrix a, Index k, Index l) {
    const double norm = hs_norm(a);
    if (norm == 0.0) return a;
    a /= norm;
    const cd lead = std::abs(a(k, l)) > 1e-14 ? a(k, l) : a(l, k);
    a *= std::conj(lead) / std::abs(lead);
    return a;
}

}  // namespace detail

/// Eigenvalues and eigenmatrices of L restricted to span{E_kl, E_lk}.
inline std::pair<EigenPair, EigenPair> block_eigenpairs(const GeneratorSpec& spec, Index k,
                                                        Index l, double tol = kDefaultTol) {
    check_shapes(spec);
    detail::require_pair(spec, k, l);
    detail::require_pbd(spec, tol);
    const detail::PairGenerator p = detail::pair_generator(spec, k, l);
    const double off_tol = scaled_tol(tol, spec.gamma);

    if (std::abs(p.m12) <= off_tol && std::abs(p.m21) <= off_tol) {
        return {EigenPair{p.m11, unit_matrix(spec.n, k, l), +1},
                EigenPair{p.m22, unit_matrix(spec.n, l, k), -1}};
    }
    const cd mean = 0.5 * (p.m11 + p.m22);
    const cd root = std::sqrt(p.delta * p.delta + p.m12 * p.m21);
    auto branch = [&](int s) {
        const cd mu = mean + static_cast<double>(s) * root;
        const cd sr = static_cast<double>(s) * root;
        cd x = p.m12 + p.delta + sr;
        cd y = p.m21 - p.delta + sr;
        // the symmetric form can cancel; fall back to a single row of (M - mu) v = 0
        const double size = std::abs(x) + std::abs(y);
        const double ref = std::abs(p.m12) + std::abs(p.m21) + std::abs(p.delta) + std::abs(root);
        if (size <= 1e-8 * ref) {
            const cd x1 = p.m12, y1 = mu - p.m11;
            const cd x2 = mu - p.m22, y2 = p.m21;
            if (std::abs(x1) + std::abs(y1) >= std::abs(x2) + std::abs(y2)) {
                x = x1;
                y = y1;
            } else {
                x = x2;
                y = y2;
            }
        }
        return EigenPair{mu, detail::pair_matrix(spec.n, k, l, x, y), s};
    };
    return {branch(+1), branch(-1)};
}

/// Kernel of the kl block for a canonical (Gamma >= 0) pair-block-diagonal generator with
/// diagonal H. Near-boundary equality tests are reported through `warnings`.
inline KernelBasis block_kernel(const GeneratorSpec& spec, Index k, Index l,
                                double tol = kDefaultTol) {
    check_shapes(spec);
    detail::require_pair(spec, k, l);
    detail::require_pbd(spec, tol);
    if (!is_psd(spec.gamma, tol)) {
        throw PreconditionError("block_kernel requires Gamma >= 0 (canonicalize first)");
    }
    KernelBasis kb;
    kb.method = "closed-form";
    const double t = scaled_tol(tol, spec.gamma);
    const double th = scaled_tol(tol, spec.hamiltonian);

    const double dh = std::abs(spec.hamiltonian(k, k) - spec.hamiltonian(l, l));
    const cd g_kk = spec.coeff(k, k, k, k);
    const cd g_ll = spec.coeff(l, l, l, l);
    const cd g_kkll = spec.coeff(k, k, l, l);
    const double d1 = std::abs(g_kk - g_ll);
    const double d2 = std::abs(g_kk - g_kkll);

    auto near = [&](double v, double thr) { return v > thr && v <= 10.0 * thr; };
    auto warn = [&](const std::string& what) {
        std::ostringstream os;
        os << "pair (" << k + 1 << "," << l + 1 << "): " << what
           << " is within 10*tol of the equality boundary";
        kb.warnings.push_back(os.str());
    };
    if (near(dh, th)) warn("h_k - h_l");
    if (near(d1, t)) warn("gamma_kk - gamma_ll");
    if (near(d2, t)) warn("gamma_kk - gamma_kkll");
    if (dh > th || d1 > t || d2 > t) return kb;

    const SinkReport sr = sinks_and_singular_2sinks(spec, tol);
    const auto is_sink = [&](Index v) {
        return std::find(sr.sinks.begin(), sr.sinks.end(), v) != sr.sinks.end();
    };
    if (is_sink(k) && is_sink(l)) {
        kb.add(unit_matrix(spec.n, k, l), {KernelTagKind::sink_pair, k, l, {}});
        kb.add(unit_matrix(spec.n, l, k), {KernelTagKind::sink_pair, k, l, {}});
        return kb;
    }
    const bool singular2 = std::find(sr.singular_2sinks.begin(), sr.singular_2sinks.end(),
                                     std::make_pair(k, l)) != sr.singular_2sinks.end();
    if (!singular2) return kb;

    const double gamma = spec.coeff(k, l, k, l).real();
    const cd x = spec.coeff(k, l, l, k);  // alpha + i beta
    cd cx = gamma + x;
    cd cy = gamma + std::conj(x);
    if (std::abs(cx) + std::abs(cy) <= 1e-8 * std::max(1.0, gamma)) {
        // alpha = -gamma, beta = 0: the kernel direction is E_kl - E_lk
        cx = x;
        cy = gamma;
    }
    kb.add(detail::normalize_pair_element(detail::pair_matrix(spec.n, k, l, cx, cy), k, l),
           {KernelTagKind::singular_2sink, k, l, {}});
    return kb;
}

/// Closed-form kernel for pair-block-diagonal generators with diagonal H. The spec is
/// validated and canonicalized first. Throws PreconditionError when the hypotheses fail.
inline KernelBasis full_kernel(const GeneratorSpec& spec, double tol = kDefaultTol) {
    const ValidationReport vr = validate(spec, tol);
    if (!vr.verdict) throw std::invalid_argument("invalid generator: " + describe_failure(vr));
    const GeneratorSpec canon = canonicalize(spec, tol);
    detail::require_pbd(canon, tol);
    if (!is_psd(canon.gamma, tol)) {
        throw PreconditionError("canonical Gamma is not positive semidefinite");
    }
    KernelBasis kb;
    kb.method = "closed-form";
    for (Index k = 0; k < canon.n; ++k)
        for (Index l = k + 1; l < canon.n; ++l) kb.append(block_kernel(canon, k, l, tol));
    kb.append(diagonal_kernel(canon, tol));
    return kb;
}

// -------------------------------------------------------------- oracle

/// Null space of the superoperator by SVD, threshold tol * sigma_max.
inline KernelBasis brute_force_kernel(const GeneratorSpec& spec, double tol = kDefaultTol) {
    const CMatrix s = superoperator(spec);
    Eigen::JacobiSVD<CMatrix> svd(s, Eigen::ComputeFullV);
    const RVector sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double thr = tol * smax;
    const BasisOrdering basis = BasisOrdering::standard(spec.n);
    KernelBasis kb;
    kb.method = "oracle";
    for (Index c = 0; c < sv.size(); ++c) {
        if (smax == 0.0 || sv(c) <= thr) {
            kb.add(assemble(svd.matrixV().col(c), basis), {KernelTagKind::numerical, -1, -1, {}});
        }
    }
    return kb;
}

/// Numerical rank of vectorized matrices (relative threshold 1e-10).
inline CMatrix orthonormal_span(const std::vector<CMatrix>& mats) {
    if (mats.empty()) return CMatrix();
    const Index n2 = mats.front().size();
    CMatrix stack(n2, static_cast<Index>(mats.size()));
    for (std::size_t c = 0; c < mats.size(); ++c)
        stack.col(static_cast<Index>(c)) = Eigen::Map<const CVector>(mats[c].data(), n2);
    Eigen::JacobiSVD<CMatrix> svd(stack, Eigen::ComputeThinU);
    const RVector sv = svd.singularValues();
    Index rank = 0;
    const double thr = sv.size() ? 1e-10 * sv(0) : 0.0;
    for (Index c = 0; c < sv.size(); ++c)
        if (sv(c) > thr) ++rank;
    return svd.matrixU().leftCols(rank);
}

/// Principal angles (radians, ascending) between span(a) and span(b); min(dim) of them.
/// Computed from sines so small angles keep full accuracy.
inline RVector principal_angles(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b) {
    CMatrix qa = orthonormal_span(a);
    CMatrix qb = orthonormal_span(b);
    if (qa.cols() == 0 || qb.cols() == 0) return RVector();
    if (qb.cols() > qa.cols()) std::swap(qa, qb);
    const CMatrix resid = qb - qa * (qa.adjoint() * qb);
    Eigen::JacobiSVD<CMatrix> svd(resid);
    RVector s = svd.singularValues();
    for (Index i = 0; i < s.size(); ++i) s(i) = std::asin(std::min(1.0, s(i)));
    std::sort(s.data(), s.data() + s.size());
    return s;
}

inline double max_principal_angle(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b) {
    const RVector ang = principal_angles(a, b);
    return ang.size() ? ang.maxCoeff() : 0.0;
}

// ----------------------------------------------------------- K-operator

struct KOperatorSpec {
    GellMannSpec k_generator;  // H = 0, C = K
    RVector k_diagonal;        // 0/1 per traceless Gell-Mann label
    std::optional<double> epsilon;
    CMatrix c;                 // canonical Gell-Mann coefficient matrix
};

inline KOperatorSpec k_operator(const GeneratorSpec& spec, double tol = kDefaultTol) {
    if (!validate(spec, tol).verdict) throw std::invalid_argument("k_operator: invalid generator");
    if (!identity_preserving(spec, tol)) {
        throw PreconditionError("k_operator requires an identity-preserving generator");
    }
    const GellMannSpec gm = to_gellmann(spec, tol);
    const Index m = gm.c.rows();
    KOperatorSpec out;
    out.c = gm.c;
    out.k_diagonal = RVector::Zero(m);
    if (m > 0) {
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(CMatrix(0.5 * (gm.c + gm.c.adjoint())));
        const RVector ev = solver.eigenvalues();
        const double thr = tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
        std::vector<Index> null_cols;
        for (Index i = 0; i < m; ++i) {
            if (ev(i) <= thr) {
                null_cols.push_back(i);
            } else if (!out.epsilon) {
                out.epsilon = ev(i);
            }
        }
        CMatrix ker(m, static_cast<Index>(null_cols.size()));
        for (std::size_t c = 0; c < null_cols.size(); ++c)
            ker.col(static_cast<Index>(c)) = solver.eigenvectors().col(null_cols[c]);
        for (Index i = 0; i < m; ++i) {
            const double proj = ker.cols() ? ker.row(i).norm() : 0.0;
            if (proj <= tol) out.k_diagonal(i) = 1.0;
        }
    }
    CMatrix kmat = CMatrix::Zero(m, m);
    for (Index i = 0; i < m; ++i) kmat(i, i) = out.k_diagonal(i);
    out.k_generator = GellMannSpec{spec.n, CMatrix::Zero(spec.n, spec.n), kmat};
    return out;
}

/// ker L is contained in ker K; residual threshold 1e-7 per oracle basis element.
inline bool kernel_containment_check(const GeneratorSpec& spec, double tol = kDefaultTol) {
    const KOperatorSpec ko = k_operator(spec, tol);
    const CMatrix sk = superoperator(to_standard(ko.k_generator));
    const BasisOrdering basis = BasisOrdering::standard(spec.n);
    for (const CMatrix& b : brute_force_kernel(spec, tol).basis) {
        const CVector v = coordinates(b, basis);
        if ((sk * v).norm() > 1e-7 * std::max(1.0, v.norm())) return false;
    }
    return true;
}

// -------------------------------------------------------- consistency

struct ConsistencyReport {
    bool consistent{false};
    std::optional<Index> lower_bound;
    std::vector<std::vector<Index>> components;
    Index oracle_nullity{0};
    bool bound_holds{true};
    /// max |Tr(P_k L(E_st))| over components k and basis matrices E_st (consistent case).
    double max_projected_trace{0.0};
    bool projected_traces_vanish{true};
};

inline ConsistencyReport consistency_and_bound(const GeneratorSpec& spec, double tol = kDefaultTol) {
    const GeneratorSpec canon = canonicalize(spec, tol);
    const InducedDigraph g = induced_digraph(canon, tol);
    ConsistencyReport r;
    r.components = undirected_components(g);
    std::vector<Index> comp_of(static_cast<std::size_t>(spec.n), 0);
    for (std::size_t c = 0; c < r.components.size(); ++c)
        for (Index v : r.components[c]) comp_of[static_cast<std::size_t>(v)] = static_cast<Index>(c);

    const double th = scaled_tol(tol, canon.hamiltonian);
    r.consistent = true;
    for (Index i = 0; i < spec.n; ++i)
        for (Index j = 0; j < spec.n; ++j)
            if (comp_of[static_cast<std::size_t>(i)] != comp_of[static_cast<std::size_t>(j)] &&
                std::abs(canon.hamiltonian(i, j)) > th)
                r.consistent = false;

    r.oracle_nullity = static_cast<Index>(brute_force_kernel(spec, tol).dimension());
    if (!r.consistent) return r;

    r.lower_bound = static_cast<Index>(r.components.size());
    r.bound_holds = *r.lower_bound <= r.oracle_nullity;
    for (Index s = 0; s < spec.n; ++s) {
        for (Index t = 0; t < spec.n; ++t) {
            const CMatrix out = apply_generator(canon, unit_matrix(spec.n, s, t));
            for (const auto& comp : r.components) {
                cd tr = 0.0;
                for (Index v : comp) tr += out(v, v);
                r.max_projected_trace = std::max(r.max_projected_trace, std::abs(tr));
            }
        }
    }
    r.projected_traces_vanish = r.max_projected_trace <= tol * spec_scale(canon);
    return r;
}

// ------------------------------------------------------ state checks

inline bool is_state(const CMatrix& rho, double tol = kDefaultTol) {
    if (rho.rows() != rho.cols()) return false;
    return is_psd(rho, tol) && std::abs(rho.trace() - cd(1.0)) <= tol * std::max<double>(1.0, static_cast<double>(rho.rows()));
}

struct InvarianceReport {
    bool invariant{false};
    bool is_state{false};
    double generator_residual{0.0};
    std::vector<double> evolution_residuals;
};

/// T_t(rho) = rho for each sampled t (residual <= 1e-7) and ||L(rho)|| <= 1e-9.
inline InvarianceReport verify_invariant(const GeneratorSpec& spec, const CMatrix& rho,
                                         const std::vector<double>& times,
                                         double tol = kDefaultTol) {
    check_shapes(spec);
    if (rho.rows() != spec.n || rho.cols() != spec.n) {
        throw std::invalid_argument("verify_invariant: rho must be N x N");
    }
    InvarianceReport r;
    r.is_state = is_state(rho, tol);
    r.generator_residual = hs_norm(apply_generator(spec, rho));
    const CMatrix s = superoperator(spec);
    const BasisOrdering basis = BasisOrdering::standard(spec.n);
    const CVector v = coordinates(rho, basis);
    bool ok = r.generator_residual <= 1e-9;
    for (double t : times) {
        const CVector evolved = expm(CMatrix(t * s)) * v;
        const double res = (evolved - v).norm();
        r.evolution_residuals.push_back(res);
        if (res > 1e-7) ok = false;
    }
    r.invariant = ok;
    return r;
}

}  // namespace gksl
