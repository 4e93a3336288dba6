// Fixtures, random generator families and independent oracles shared by the test suites

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "gksl/basis.hpp"
#include "gksl/digraph.hpp"
#include "gksl/generator.hpp"
#include "gksl/kernel.hpp"

namespace gksl::testing {

using Rng = std::mt19937_64;

// ------------------------------------------------------------ fixtures
// Indices below are 0-based; comments use the 1-based labels of the worked examples.

/// Jump (|1> + i|2>)/sqrt2 -> (i|1> + |2>)/sqrt2 at rate a, plus 3 -> 1 (rate b) and 3 -> 2 (rate c).
inline GeneratorSpec superposition_spec(double a = 1.0, double b = 2.0, double c = 3.0) {
    GeneratorSpec s = GeneratorSpec::zero(3);
    Eigen::Matrix2cd blk;
    blk << a, a, a, a;
    s.set_pair_block(0, 1, blk);
    blk << b, 0, 0, 0;
    s.set_pair_block(0, 2, blk);
    blk << c, 0, 0, 0;
    s.set_pair_block(1, 2, blk);
    return s;
}

/// Eight levels: 45 block [[1,i],[-i,1]], 67 [[1,0],[0,2]], 68 [[3,0],[0,3]], 78 [[4,0],[0,1]].
inline GeneratorSpec manifest_spec(const std::vector<double>& h) {
    GeneratorSpec s = GeneratorSpec::zero(8);
    for (Index i = 0; i < 8; ++i) s.hamiltonian(i, i) = h[static_cast<std::size_t>(i)];
    Eigen::Matrix2cd blk;
    blk << 1.0, kI, -kI, 1.0;
    s.set_pair_block(3, 4, blk);
    blk << 1, 0, 0, 2;
    s.set_pair_block(5, 6, blk);
    blk << 3, 0, 0, 3;
    s.set_pair_block(5, 7, blk);
    blk << 4, 0, 0, 1;
    s.set_pair_block(6, 7, blk);
    return s;
}

inline GeneratorSpec manifest_generic() { return manifest_spec({1, 2, 2, 3, 3, 0.5, -1, 0.25}); }
inline GeneratorSpec manifest_degenerate() { return manifest_spec({2, 2, 2, 3, 3, 0.5, -1, 0.25}); }

/// Three-level dephasing with laser widths (ge, er, gr); Gamma lives on the diagonal labels.
inline GeneratorSpec rydberg_spec(double ge, double er, double gr) {
    GeneratorSpec s = GeneratorSpec::zero(3);
    s.coeff(0, 0, 0, 0) = 0.5 * (ge + gr - er);
    s.coeff(1, 1, 1, 1) = 0.5 * (ge + er - gr);
    s.coeff(2, 2, 2, 2) = 0.5 * (gr + er - ge);
    return s;
}

/// The displayed canonical replacement of Gamma on the diagonal labels (entries times 18).
inline RMatrix rydberg_canonical_times18(double ge, double er, double gr) {
    RMatrix m(3, 3);
    m << 4 * ge + 4 * gr - 2 * er, gr - 5 * ge + er, ge - 5 * gr + er,
        gr - 5 * ge + er, 4 * ge - 2 * gr + 4 * er, ge + gr - 5 * er,
        ge - 5 * gr + er, ge + gr - 5 * er, 4 * gr - 2 * ge + 4 * er;
    return m;
}

// ------------------------------------------------------------- random

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline cd gaussian_c(Rng& rng) {
    std::normal_distribution<double> g;
    return {g(rng), g(rng)};
}

inline CMatrix random_complex(Rng& rng, Index rows, Index cols) {
    CMatrix m(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) m(r, c) = gaussian_c(rng);
    return m;
}

inline CMatrix random_hermitian(Rng& rng, Index n) {
    const CMatrix a = random_complex(rng, n, n);
    return 0.5 * (a + a.adjoint());
}

/// PSD of random rank in [1, n] (rank 0 when n == 0).
inline CMatrix random_psd(Rng& rng, Index n, Index rank = -1) {
    if (n == 0) return CMatrix(0, 0);
    if (rank < 0) rank = uniform_int(rng, 1, static_cast<int>(n));
    const CMatrix a = random_complex(rng, n, rank);
    return a * a.adjoint() / static_cast<double>(std::max<Index>(rank, 1));
}

inline CMatrix random_state(Rng& rng, Index n) {
    CMatrix p = random_psd(rng, n);
    return p / p.trace().real();
}

/// Valid generator with identity components left in: PSD traceless block, Hermitian
/// identity row/column and a real (possibly negative) identity-identity entry.
inline GeneratorSpec random_valid_spec(Rng& rng, Index n) {
    const Index m = n * n - 1;
    CMatrix full = CMatrix::Zero(m + 1, m + 1);
    full.topLeftCorner(m, m) = random_psd(rng, m);
    if (coin(rng, 0.7)) {
        for (Index k = 0; k < m; ++k) {
            const cd z = coin(rng, 0.5) ? gaussian_c(rng) : cd(0.0);
            full(m, k) = z;
            full(k, m) = std::conj(z);
        }
        full(m, m) = uniform(rng, -2.0, 2.0);
    }
    GeneratorSpec s;
    s.n = n;
    s.hamiltonian = random_hermitian(rng, n);
    s.gamma = operator_basis_change(full, BasisOrdering::gellmann(n), BasisOrdering::standard(n));
    return s;
}

/// Pair-block-diagonal generator with Gamma >= 0 and diagonal H. Small integer-valued
/// rates make sinks, 2-sinks and exact equalities common.
inline GeneratorSpec random_pbd_spec(Rng& rng, Index n, bool degenerate_h) {
    GeneratorSpec s = GeneratorSpec::zero(n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const int kind = uniform_int(rng, 0, 9);
            const double g = static_cast<double>(uniform_int(rng, 1, 4));
            Eigen::Matrix2cd blk = Eigen::Matrix2cd::Zero();
            if (kind <= 3) {
                // no edge
            } else if (kind == 4 || kind == 5) {
                const double phi = uniform(rng, 0.0, 2.0 * M_PI);
                const cd e = std::polar(1.0, phi);
                blk << g, g * e, g * std::conj(e), g;
            } else if (kind == 6) {
                if (coin(rng, 0.5)) blk(0, 0) = g;
                else blk(1, 1) = g;
            } else if (kind == 7) {
                blk(0, 0) = g;
                blk(1, 1) = static_cast<double>(uniform_int(rng, 1, 4));
            } else {
                const CMatrix p = random_psd(rng, 2);
                blk = p;
            }
            s.set_pair_block(i, j, blk);
        }
    const Index off = n * (n - 1);
    const int dkind = uniform_int(rng, 0, 9);
    if (dkind <= 3) {
        // zero
    } else if (dkind <= 6) {
        s.gamma.block(off, off, n, n).setConstant(static_cast<double>(uniform_int(rng, 1, 3)));
    } else if (dkind == 7) {
        for (Index d = 0; d < n; ++d) s.gamma(off + d, off + d) = uniform(rng, 0.0, 2.0);
    } else {
        s.gamma.block(off, off, n, n) = random_psd(rng, n);
    }
    for (Index i = 0; i < n; ++i) {
        s.hamiltonian(i, i) = degenerate_h ? static_cast<double>(uniform_int(rng, -1, 1))
                                           : uniform(rng, -2.0, 2.0);
    }
    return s;
}

/// Identity-preserving generator given in the Gell-Mann basis.
inline GeneratorSpec random_identity_preserving_spec(Rng& rng, Index n) {
    const Index m = n * n - 1;
    CMatrix c = CMatrix::Zero(m, m);
    if (coin(rng, 0.5)) {
        // real symmetric PSD supported on a random subset of labels
        std::vector<Index> support;
        for (Index k = 0; k < m; ++k)
            if (coin(rng, 0.5)) support.push_back(k);
        if (support.empty()) support.push_back(uniform_int(rng, 0, static_cast<int>(m - 1)));
        const auto sz = static_cast<Index>(support.size());
        RMatrix a(sz, sz);
        std::normal_distribution<double> g;
        for (Index r = 0; r < sz; ++r)
            for (Index q = 0; q < sz; ++q) a(r, q) = g(rng);
        const RMatrix p = a * a.transpose();
        for (Index r = 0; r < sz; ++r)
            for (Index q = 0; q < sz; ++q)
                c(support[static_cast<std::size_t>(r)], support[static_cast<std::size_t>(q)]) = p(r, q);
    } else {
        // diagonal on the off-diagonal labels, arbitrary PSD on the traceless diagonal labels
        const Index off = n * (n - 1);
        for (Index k = 0; k < off; ++k)
            if (coin(rng, 0.6)) c(k, k) = uniform(rng, 0.0, 3.0);
        c.block(off, off, n - 1, n - 1) = random_psd(rng, n - 1);
    }
    return to_standard(GellMannSpec{n, random_hermitian(rng, n), c});
}

/// Generator whose induced graph has exactly `groups` undirected components and whose H
/// is block diagonal along them. Couplings between labels of different groups are allowed.
inline GeneratorSpec random_consistent_spec(Rng& rng, Index n, int groups) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> group_of(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) {
        // first `groups` shuffled vertices seed the groups, the rest land anywhere
        group_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] =
            k < groups ? static_cast<int>(k) : uniform_int(rng, 0, groups - 1);
    }
    const BasisOrdering b = BasisOrdering::standard(n);
    std::vector<Index> labels;  // standard positions with both indices in one group
    for (Index p = 0; p < b.size(); ++p) {
        const BasisLabel& l = b.label(p);
        if (group_of[static_cast<std::size_t>(l.row)] == group_of[static_cast<std::size_t>(l.col)])
            labels.push_back(p);
    }
    GeneratorSpec s = GeneratorSpec::zero(n);
    const int rank = uniform_int(rng, 1, 3);
    for (int r = 0; r < rank; ++r) {
        CVector v = CVector::Zero(b.size());
        for (Index p : labels)
            if (coin(rng, 0.4)) v(p) = gaussian_c(rng);
        s.gamma += v * v.adjoint();
    }
    // connect every group along a path
    for (int g = 0; g < groups; ++g) {
        std::vector<Index> members;
        for (Index v = 0; v < n; ++v)
            if (group_of[static_cast<std::size_t>(v)] == g) members.push_back(v);
        for (std::size_t k = 0; k + 1 < members.size(); ++k) {
            const Index p = b.position(members[k + 1], members[k]);
            s.gamma(p, p) += uniform(rng, 0.5, 2.0);
        }
    }
    for (Index i = 0; i < n; ++i)
        for (Index j = i; j < n; ++j) {
            if (group_of[static_cast<std::size_t>(i)] != group_of[static_cast<std::size_t>(j)]) continue;
            const cd z = i == j ? cd(uniform(rng, -1, 1), 0.0) : gaussian_c(rng);
            s.hamiltonian(i, j) = z;
            s.hamiltonian(j, i) = std::conj(z);
        }
    return s;
}

/// Random weighted digraph; each ordered pair gets an edge with probability p.
inline InducedDigraph random_digraph(Rng& rng, Index n, double p) {
    RMatrix w = RMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (i != j && coin(rng, p)) w(i, j) = uniform(rng, 0.1, 3.0);
    return InducedDigraph::from_weights(w);
}

// ------------------------------------------------------------- oracles

/// Sum over spanning in-arborescences of g[s] rooted at `root`, by enumerating
/// every parent assignment and discarding those with cycles.
inline double arborescence_weight_bruteforce(const InducedDigraph& g, const std::vector<Index>& s,
                                             Index root) {
    const std::size_t m = s.size();
    std::vector<Index> others;
    for (Index v : s)
        if (v != root) others.push_back(v);
    std::vector<std::size_t> choice(others.size(), 0);
    double total = 0.0;
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
        if (pos == others.size()) {
            // parent[v] = s[choice]; check every vertex reaches root
            double w = 1.0;
            for (std::size_t k = 0; k < others.size(); ++k) {
                const Index parent = s[choice[k]];
                w *= g.weight(parent, others[k]);  // edge others[k] -> parent
            }
            if (w == 0.0) return;
            for (std::size_t k = 0; k < others.size(); ++k) {
                Index v = others[k];
                std::size_t steps = 0;
                while (v != root && steps <= m) {
                    const auto idx = static_cast<std::size_t>(
                        std::find(others.begin(), others.end(), v) - others.begin());
                    v = s[choice[idx]];
                    ++steps;
                }
                if (v != root) return;
            }
            total += w;
            return;
        }
        for (std::size_t c = 0; c < m; ++c) {
            if (s[c] == others[pos]) continue;
            choice[pos] = c;
            rec(pos + 1);
        }
    };
    rec(0);
    return total;
}

/// Direct evaluation of D^lambda_nn(X) = 2 l X l - l l X - X l l for the Hermitian lambda_nn.
inline CMatrix gm_diag_dissipator_direct(Index n, const CMatrix& x) {
    const CMatrix l = gellmann(n, n, x.rows());
    return 2.0 * l * x * l - l * l * x - x * l * l;
}

/// Numerical nullity of a square matrix by SVD with relative threshold.
inline Index nullity(const CMatrix& a, double rel = 1e-9) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<CMatrix> svd(a);
    const RVector sv = svd.singularValues();
    const double thr = rel * std::max(sv(0), 1e-300);
    Index k = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= thr || sv(0) == 0.0) ++k;
    return k;
}

}  // namespace gksl::testing
