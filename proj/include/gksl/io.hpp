// JSON spec files and result serialization (nlohmann::json)
//
// Complex numbers are [re, im] pairs (a bare number is accepted as a real value).
// Matrices are row-major arrays of rows. Indices in files are 1-based.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gksl/basis.hpp"
#include "gksl/digraph.hpp"
#include "gksl/generator.hpp"
#include "gksl/kernel.hpp"

namespace gksl::io {

using nlohmann::json;

/// Parse failure carrying the JSON path of the offending field.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(where) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

inline cd parse_complex(const json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ParseError(where, "expected a complex number [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline CMatrix parse_matrix(const json& j, Index rows, Index cols, const std::string& where) {
    if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
        throw ParseError(where, "expected an array of " + std::to_string(rows) + " rows");
    }
    CMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        const std::string rw = where + "[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
            throw ParseError(rw, "expected a row of " + std::to_string(cols) + " entries");
        }
        for (Index c = 0; c < cols; ++c) {
            m(r, c) = parse_complex(row[static_cast<std::size_t>(c)],
                                    rw + "[" + std::to_string(c) + "]");
        }
    }
    return m;
}

// + 0.0 folds -0.0 into 0.0 so output does not depend on the sign of zero
inline json complex_json(cd z) { return json::array({z.real() + 0.0, z.imag() + 0.0}); }

inline json matrix_json(const CMatrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json real_vector_json(const RVector& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

inline json one_based(const std::vector<Index>& vs) {
    json out = json::array();
    for (Index v : vs) out.push_back(v + 1);
    return out;
}

inline void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                           const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            throw ParseError(where + "." + it.key(), "unknown field");
        }
    }
}

inline const json& require_field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ParseError(where + "." + key, "missing required field");
    return obj.at(key);
}

/// Parses a generator spec. Gell-Mann input is converted to the standard basis.
inline GeneratorSpec parse_spec(const json& j) {
    const std::string root = "$";
    if (!j.is_object()) throw ParseError(root, "spec must be a JSON object");
    reject_unknown(j, {"N", "H", "gamma", "basis", "name"}, root);

    const json& jn = require_field(j, "N", root);
    if (!jn.is_number_integer() || jn.get<long long>() < 1) {
        throw ParseError("$.N", "expected a positive integer");
    }
    const Index n = jn.get<Index>();
    if (j.contains("name") && !j["name"].is_string()) throw ParseError("$.name", "expected a string");

    BasisKind kind = BasisKind::standard;
    if (j.contains("basis")) {
        const json& b = j["basis"];
        if (b == "standard") {
            kind = BasisKind::standard;
        } else if (b == "gellmann") {
            kind = BasisKind::gellmann;
        } else {
            throw ParseError("$.basis", "expected \"standard\" or \"gellmann\"");
        }
    }
    const CMatrix h = parse_matrix(require_field(j, "H", root), n, n, "$.H");

    const json& g = require_field(j, "gamma", root);
    if (!g.is_object()) throw ParseError("$.gamma", "expected an object");
    const json& fmt = require_field(g, "format", "$.gamma");
    const Index dim = kind == BasisKind::standard ? n * n : n * n - 1;
    const Index diag_dim = kind == BasisKind::standard ? n : n - 1;
    CMatrix coeff = CMatrix::Zero(dim, dim);

    if (fmt == "dense") {
        reject_unknown(g, {"format", "matrix"}, "$.gamma");
        coeff = parse_matrix(require_field(g, "matrix", "$.gamma"), dim, dim, "$.gamma.matrix");
    } else if (fmt == "blocks") {
        reject_unknown(g, {"format", "pairs", "diag"}, "$.gamma");
        const BasisOrdering order =
            kind == BasisKind::standard ? BasisOrdering::standard(n) : BasisOrdering::gellmann(n);
        if (g.contains("pairs")) {
            const json& pairs = g["pairs"];
            if (!pairs.is_array()) throw ParseError("$.gamma.pairs", "expected an array");
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                const std::string w = "$.gamma.pairs[" + std::to_string(p) + "]";
                const json& e = pairs[p];
                if (!e.is_object()) throw ParseError(w, "expected an object");
                reject_unknown(e, {"i", "j", "block"}, w);
                const json& ji = require_field(e, "i", w);
                const json& jj = require_field(e, "j", w);
                if (!ji.is_number_integer() || !jj.is_number_integer()) {
                    throw ParseError(w, "i and j must be integers");
                }
                const Index i = ji.get<Index>() - 1;
                const Index jx = jj.get<Index>() - 1;
                if (i < 0 || jx >= n || !(i < jx)) {
                    throw ParseError(w, "pair indices must satisfy 1 <= i < j <= N");
                }
                const CMatrix blk = parse_matrix(require_field(e, "block", w), 2, 2, w + ".block");
                const Index a = order.position(i, jx);
                const Index b = order.position(jx, i);
                coeff(a, a) += blk(0, 0);
                coeff(a, b) += blk(0, 1);
                coeff(b, a) += blk(1, 0);
                coeff(b, b) += blk(1, 1);
            }
        }
        if (g.contains("diag") && diag_dim > 0) {
            const CMatrix d = parse_matrix(g["diag"], diag_dim, diag_dim, "$.gamma.diag");
            const Index off = n * (n - 1);
            coeff.block(off, off, diag_dim, diag_dim) += d;
        }
    } else {
        throw ParseError("$.gamma.format", "expected \"dense\" or \"blocks\"");
    }

    if (kind == BasisKind::gellmann) return to_standard(GellMannSpec{n, h, coeff});
    return GeneratorSpec{n, h, coeff};
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path, std::string("malformed JSON: ") + e.what());
    }
}

/// Dense standard-basis spec file.
inline json spec_json(const GeneratorSpec& spec) {
    json j;
    j["N"] = spec.n;
    j["basis"] = "standard";
    j["H"] = matrix_json(spec.hamiltonian);
    j["gamma"] = {{"format", "dense"}, {"matrix", matrix_json(spec.gamma)}};
    return j;
}

/// 64-bit FNV-1a of the compact JSON dump.
inline std::string spec_hash(const json& j) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << "fnv1a64:" << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

inline json validation_json(const ValidationReport& r) {
    json j;
    j["verdict"] = r.verdict;
    j["flags"] = {{"hamiltonian_hermitian", r.hamiltonian_hermitian},
                  {"psd_on_traceless", r.psd_on_traceless},
                  {"trace_condition", r.trace_condition}};
    j["min_traceless_eigenvalue"] = r.min_traceless_eigenvalue;
    j["traceless_hermiticity_defect"] = r.traceless_hermiticity_defect;
    j["max_trace_defect"] = r.max_trace_defect;
    if (r.psd_witness) j["psd_witness"] = matrix_json(*r.psd_witness);
    if (r.trace_witness) j["trace_witness"] = matrix_json(*r.trace_witness);
    return j;
}

inline json kernel_json(const KernelBasis& kb) {
    json j;
    j["method"] = kb.method;
    j["dimension"] = kb.dimension();
    json elems = json::array();
    for (std::size_t e = 0; e < kb.basis.size(); ++e) {
        const KernelTag& t = kb.tags[e];
        json el;
        el["tag"] = to_string(t.kind);
        if (t.k >= 0) el["pair"] = {t.k + 1, t.l + 1};
        if (!t.component.empty()) el["component"] = one_based(t.component);
        el["matrix"] = matrix_json(kb.basis[e]);
        elems.push_back(std::move(el));
    }
    j["basis"] = std::move(elems);
    return j;
}

inline json eigenpair_json(const EigenPair& p) {
    return {{"branch", p.branch > 0 ? "+" : "-"}, {"mu", complex_json(p.mu)},
            {"matrix", matrix_json(p.a)}};
}

inline json digraph_json(const InducedDigraph& g, const SCCDecomposition& d, const SinkReport& s) {
    json j;
    j["vertices"] = g.n;
    json edges = json::array();
    for (Index from = 0; from < g.n; ++from)
        for (Index to = 0; to < g.n; ++to)
            if (from != to && g.has_edge(from, to))
                edges.push_back({{"from", from + 1}, {"to", to + 1}, {"weight", g.weight(to, from)}});
    j["edges"] = std::move(edges);
    json sccs = json::array();
    json tsccs = json::array();
    for (std::size_t c = 0; c < d.components.size(); ++c) {
        sccs.push_back(one_based(d.components[c]));
        if (d.terminal[c]) tsccs.push_back(one_based(d.components[c]));
    }
    j["sccs"] = std::move(sccs);
    j["tsccs"] = std::move(tsccs);
    j["sinks"] = one_based(s.sinks);
    json s2 = json::array();
    for (const auto& [k, l] : s.singular_2sinks) s2.push_back({k + 1, l + 1});
    j["singular_2sinks"] = std::move(s2);
    json stat = json::array();
    for (const StationaryVector& sv : tscc_stationary_vectors(g)) {
        stat.push_back({{"component", one_based(sv.vertices)},
                        {"rooted_weights", real_vector_json(sv.unnormalized)},
                        {"rho", real_vector_json(sv.rho)}});
    }
    j["stationary_vectors"] = std::move(stat);
    json und = json::array();
    for (const auto& c : undirected_components(g)) und.push_back(one_based(c));
    j["undirected_components"] = std::move(und);
    return j;
}

namespace detail {

inline bool is_flat(const json& j) {
    if (!j.is_array()) return false;
    for (const json& e : j) {
        if (e.is_array()) {
            for (const json& x : e)
                if (x.is_structured()) return false;
        } else if (e.is_object()) {
            return false;
        }
    }
    return true;
}

inline void pretty(const json& j, std::ostream& os, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
    if (j.is_object() && !j.empty()) {
        os << "{\n";
        std::size_t i = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++i) {
            os << inner << json(it.key()).dump() << ": ";
            pretty(it.value(), os, indent + 2);
            os << (i + 1 < j.size() ? ",\n" : "\n");
        }
        os << pad << "}";
    } else if (j.is_array() && !j.empty() && !is_flat(j)) {
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            os << inner;
            pretty(j[i], os, indent + 2);
            os << (i + 1 < j.size() ? ",\n" : "\n");
        }
        os << pad << "]";
    } else {
        os << j.dump();
    }
}

}  // namespace detail

/// Indented JSON with scalar arrays and matrix rows kept on one line.
inline std::string pretty(const json& j) {
    std::ostringstream os;
    detail::pretty(j, os, 0);
    os << "\n";
    return os.str();
}

}  // namespace gksl::io
