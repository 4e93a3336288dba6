// The weighted digraph induced by a generator: Laplacian, SCCs, matrix-tree
// stationary vectors, sinks, singular 2-sinks and DOT export

#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gksl/basis.hpp"
#include "gksl/generator.hpp"
#include "gksl/linalg.hpp"

namespace gksl {

/// Vertices 0..n-1. weight(i, j) is the weight of the edge j -> i (gamma_ij);
/// zero means no edge.
struct InducedDigraph {
    Index n{0};
    RMatrix weight;

    bool has_edge(Index from, Index to) const { return weight(to, from) > 0.0; }

    double out_weight(Index v) const { return weight.col(v).sum() - weight(v, v); }

    Index edge_count() const {
        Index c = 0;
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i)
                if (i != j && weight(i, j) > 0.0) ++c;
        return c;
    }

    static InducedDigraph from_weights(const RMatrix& w, double tol = kDefaultTol) {
        if (w.rows() != w.cols()) throw std::invalid_argument("weight matrix must be square");
        InducedDigraph g{w.rows(), RMatrix::Zero(w.rows(), w.cols())};
        for (Index j = 0; j < g.n; ++j)
            for (Index i = 0; i < g.n; ++i)
                if (i != j && w(i, j) > tol) g.weight(i, j) = w(i, j);
        return g;
    }
};

/// gamma_ij read off the diagonal of Gamma; weights at or below the (scaled) tolerance are dropped.
inline InducedDigraph induced_digraph(const GeneratorSpec& spec, double tol = kDefaultTol) {
    check_shapes(spec);
    const BasisOrdering b = BasisOrdering::standard(spec.n);
    const double t = scaled_tol(tol, spec.gamma);
    InducedDigraph g{spec.n, RMatrix::Zero(spec.n, spec.n)};
    for (Index i = 0; i < spec.n; ++i) {
        for (Index j = 0; j < spec.n; ++j) {
            if (i == j) continue;
            const Index p = b.position(i, j);
            const double w = spec.gamma(p, p).real();
            if (w > t) g.weight(i, j) = w;
        }
    }
    return g;
}

/// Same digraph from Gell-Mann data: gamma_ij = (c_ij + c_ji -+ 2 b_ij)/2 per ij block.
inline InducedDigraph induced_digraph(const GellMannSpec& spec, double tol = kDefaultTol) {
    check_shapes(spec);
    const BasisOrdering gm = BasisOrdering::gellmann(spec.n);
    const double t = scaled_tol(tol, spec.c);
    InducedDigraph g{spec.n, RMatrix::Zero(spec.n, spec.n)};
    for (Index i = 0; i < spec.n; ++i) {
        for (Index j = i + 1; j < spec.n; ++j) {
            const Index s = gm.position(i, j);
            const Index a = gm.position(j, i);
            Block2 blk;
            blk.rep = BlockRep::gellmann;
            blk.m << spec.c(s, s), spec.c(s, a), spec.c(a, s), spec.c(a, a);
            const Block2 st = convert_block(blk, BlockRep::standard);
            const double wij = st.m(0, 0).real();
            const double wji = st.m(1, 1).real();
            if (wij > t) g.weight(i, j) = wij;
            if (wji > t) g.weight(j, i) = wji;
        }
    }
    return g;
}

/// L(i,j) = w_ij off the diagonal, L(j,j) = -(out-weight of j). Columns sum to zero.
inline RMatrix laplacian(const InducedDigraph& g) {
    RMatrix l = g.weight;
    for (Index j = 0; j < g.n; ++j) {
        l(j, j) = 0.0;
        l(j, j) = -l.col(j).sum();
    }
    return l;
}

struct SCCDecomposition {
    /// Components sorted by smallest vertex; vertices sorted within each.
    std::vector<std::vector<Index>> components;
    std::vector<bool> terminal;
    std::vector<Index> component_of;
    /// reaches[a][b]: some vertex of b is reachable from a (a reaches itself).
    std::vector<std::vector<bool>> reaches;

    std::vector<std::size_t> terminal_indices() const {
        std::vector<std::size_t> out;
        for (std::size_t c = 0; c < components.size(); ++c)
            if (terminal[c]) out.push_back(c);
        return out;
    }
};

/// Tarjan's algorithm over edges present in `g`.
inline SCCDecomposition scc_decompose(const InducedDigraph& g) {
    const Index n = g.n;
    std::vector<Index> index(static_cast<std::size_t>(n), -1);
    std::vector<Index> low(static_cast<std::size_t>(n), 0);
    std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
    std::vector<Index> stack;
    std::vector<std::vector<Index>> comps;
    Index counter = 0;

    std::function<void(Index)> strongconnect = [&](Index v) {
        const auto vs = static_cast<std::size_t>(v);
        index[vs] = low[vs] = counter++;
        stack.push_back(v);
        on_stack[vs] = true;
        for (Index w = 0; w < n; ++w) {
            if (w == v || !g.has_edge(v, w)) continue;
            const auto ws = static_cast<std::size_t>(w);
            if (index[ws] < 0) {
                strongconnect(w);
                low[vs] = std::min(low[vs], low[ws]);
            } else if (on_stack[ws]) {
                low[vs] = std::min(low[vs], index[ws]);
            }
        }
        if (low[vs] == index[vs]) {
            std::vector<Index> comp;
            Index w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[static_cast<std::size_t>(w)] = false;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
    };
    for (Index v = 0; v < n; ++v)
        if (index[static_cast<std::size_t>(v)] < 0) strongconnect(v);

    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    SCCDecomposition d;
    d.components = std::move(comps);
    const std::size_t m = d.components.size();
    d.component_of.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t c = 0; c < m; ++c)
        for (Index v : d.components[c]) d.component_of[static_cast<std::size_t>(v)] = static_cast<Index>(c);

    std::vector<std::vector<bool>> adj(m, std::vector<bool>(m, false));
    for (Index v = 0; v < n; ++v) {
        for (Index w = 0; w < n; ++w) {
            if (v == w || !g.has_edge(v, w)) continue;
            const auto a = static_cast<std::size_t>(d.component_of[static_cast<std::size_t>(v)]);
            const auto b = static_cast<std::size_t>(d.component_of[static_cast<std::size_t>(w)]);
            if (a != b) adj[a][b] = true;
        }
    }
    d.terminal.assign(m, true);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            if (adj[a][b]) d.terminal[a] = false;

    d.reaches.assign(m, std::vector<bool>(m, false));
    for (std::size_t a = 0; a < m; ++a) {
        std::vector<std::size_t> frontier{a};
        d.reaches[a][a] = true;
        while (!frontier.empty()) {
            const std::size_t c = frontier.back();
            frontier.pop_back();
            for (std::size_t b = 0; b < m; ++b) {
                if (adj[c][b] && !d.reaches[a][b]) {
                    d.reaches[a][b] = true;
                    frontier.push_back(b);
                }
            }
        }
    }
    return d;
}

/// Laplacian of the subdigraph induced on `s` (vertex order as given).
inline RMatrix induced_laplacian(const InducedDigraph& g, const std::vector<Index>& s) {
    const auto m = static_cast<Index>(s.size());
    RMatrix l = RMatrix::Zero(m, m);
    for (Index b = 0; b < m; ++b) {
        for (Index a = 0; a < m; ++a) {
            if (a == b) continue;
            l(a, b) = g.weight(s[static_cast<std::size_t>(a)], s[static_cast<std::size_t>(b)]);
        }
        l(b, b) = -l.col(b).sum();
    }
    return l;
}

/// Total weight of spanning in-trees of g[s] rooted at `root`, via the matrix-tree theorem:
/// (-1)^{|s|-1} det of the induced Laplacian with the root row/column deleted.
inline double rooted_spanning_weight(const InducedDigraph& g, const std::vector<Index>& s,
                                     Index root) {
    const auto it = std::find(s.begin(), s.end(), root);
    if (it == s.end()) throw std::invalid_argument("rooted_spanning_weight: root not in vertex set");
    const auto m = static_cast<Index>(s.size());
    if (m == 1) return 1.0;
    const RMatrix l = induced_laplacian(g, s);
    const Index r = static_cast<Index>(it - s.begin());
    RMatrix minor(m - 1, m - 1);
    for (Index a = 0, ra = 0; a < m; ++a) {
        if (a == r) continue;
        for (Index b = 0, cb = 0; b < m; ++b) {
            if (b == r) continue;
            minor(ra, cb++) = l(a, b);
        }
        ++ra;
    }
    const double det = minor.partialPivLu().determinant();
    return ((m - 1) % 2 == 0) ? det : -det;
}

struct StationaryVector {
    std::size_t component{0};
    std::vector<Index> vertices;
    RVector unnormalized;  // rooted weights, indexed by vertex
    double normalization{1.0};
    RVector rho;           // unnormalized / normalization
};

/// One stationary probability vector per terminal SCC.
inline std::vector<StationaryVector> tscc_stationary_vectors(const InducedDigraph& g) {
    const SCCDecomposition d = scc_decompose(g);
    std::vector<StationaryVector> out;
    for (std::size_t c : d.terminal_indices()) {
        StationaryVector sv;
        sv.component = c;
        sv.vertices = d.components[c];
        sv.unnormalized = RVector::Zero(g.n);
        for (Index v : sv.vertices) sv.unnormalized(v) = rooted_spanning_weight(g, sv.vertices, v);
        sv.normalization = sv.unnormalized.sum();
        sv.rho = sv.unnormalized / sv.normalization;
        out.push_back(std::move(sv));
    }
    return out;
}

struct SinkReport {
    std::vector<Index> sinks;
    std::vector<std::pair<Index, Index>> singular_2sinks;  // (k, l) with k < l
};

/// Sinks (no out-edges) and singular 2-sinks: two-vertex TSCCs {k,l} with
/// gamma_kl = gamma_lk and a singular kl block.
inline SinkReport sinks_and_singular_2sinks(const GeneratorSpec& spec, double tol = kDefaultTol) {
    const InducedDigraph g = induced_digraph(spec, tol);
    const SCCDecomposition d = scc_decompose(g);
    SinkReport r;
    for (Index v = 0; v < g.n; ++v)
        if (g.out_weight(v) == 0.0) r.sinks.push_back(v);
    for (std::size_t c : d.terminal_indices()) {
        const auto& comp = d.components[c];
        if (comp.size() != 2) continue;
        const Index k = comp[0];
        const Index l = comp[1];
        const Eigen::Matrix2cd blk = spec.pair_block(k, l);
        const double scale = std::max(1.0, blk.cwiseAbs().maxCoeff());
        const bool balanced = std::abs(g.weight(k, l) - g.weight(l, k)) <= tol * scale;
        const bool singular = std::abs(blk.determinant()) <= tol * scale * scale;
        if (balanced && singular) r.singular_2sinks.emplace_back(k, l);
    }
    return r;
}

/// Connected components after forgetting direction and weights; sorted by smallest vertex.
inline std::vector<std::vector<Index>> undirected_components(const InducedDigraph& g) {
    std::vector<Index> comp(static_cast<std::size_t>(g.n), -1);
    std::vector<std::vector<Index>> out;
    for (Index s = 0; s < g.n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        const auto id = static_cast<Index>(out.size());
        std::vector<Index> members;
        std::vector<Index> frontier{s};
        comp[static_cast<std::size_t>(s)] = id;
        while (!frontier.empty()) {
            const Index v = frontier.back();
            frontier.pop_back();
            members.push_back(v);
            for (Index w = 0; w < g.n; ++w) {
                if (w == v || comp[static_cast<std::size_t>(w)] >= 0) continue;
                if (g.has_edge(v, w) || g.has_edge(w, v)) {
                    comp[static_cast<std::size_t>(w)] = id;
                    frontier.push_back(w);
                }
            }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

namespace detail {

inline std::string format_weight(double w) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", w);
    return buf;
}

}  // namespace detail

/// Graphviz rendering. Vertices are printed 1-based. Terminal SCCs become
/// `cluster_tscc_<k>` subgraphs, sinks get shape=doublecircle and class="sink",
/// edges inside a singular 2-sink get style=dashed and class="singular-2-sink".
inline std::string to_dot(const InducedDigraph& g, const SCCDecomposition& d,
                          const SinkReport& sinks) {
    std::ostringstream os;
    os << "digraph G {\n";
    std::vector<bool> is_sink(static_cast<std::size_t>(g.n), false);
    for (Index v : sinks.sinks) is_sink[static_cast<std::size_t>(v)] = true;
    auto node = [&](Index v, const char* indent) {
        os << indent << (v + 1);
        if (is_sink[static_cast<std::size_t>(v)]) os << " [shape=doublecircle, class=\"sink\"]";
        os << ";\n";
    };
    std::vector<bool> placed(static_cast<std::size_t>(g.n), false);
    std::size_t cluster = 0;
    for (std::size_t c : d.terminal_indices()) {
        ++cluster;
        os << "  subgraph cluster_tscc_" << cluster << " {\n    label=\"TSCC " << cluster
           << "\";\n    class=\"tscc\";\n";
        for (Index v : d.components[c]) {
            node(v, "    ");
            placed[static_cast<std::size_t>(v)] = true;
        }
        os << "  }\n";
    }
    for (Index v = 0; v < g.n; ++v)
        if (!placed[static_cast<std::size_t>(v)]) node(v, "  ");

    auto in_singular = [&](Index a, Index b) {
        for (const auto& [k, l] : sinks.singular_2sinks)
            if ((a == k && b == l) || (a == l && b == k)) return true;
        return false;
    };
    for (Index j = 0; j < g.n; ++j) {
        for (Index i = 0; i < g.n; ++i) {
            if (i == j || !g.has_edge(j, i)) continue;
            os << "  " << (j + 1) << " -> " << (i + 1) << " [label=\""
               << detail::format_weight(g.weight(i, j)) << "\"";
            if (in_singular(i, j)) os << ", style=dashed, class=\"singular-2-sink\"";
            os << "];\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace gksl
