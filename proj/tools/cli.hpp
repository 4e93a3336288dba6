// The gksl command-line driver, kept in a header so tests can call run() in-process

#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gksl/digraph.hpp"
#include "gksl/generator.hpp"
#include "gksl/io.hpp"
#include "gksl/kernel.hpp"

namespace gksl::cli {

using io::json;

enum ExitCode : int { kOk = 0, kInvalid = 1, kFallback = 2 };

/// Environment variable that overrides the default tolerance.
inline constexpr const char* kTolEnv = "GKSL_TOL";

struct Options {
    std::string command;
    std::string input;
    std::string batch;
    std::string out;
    std::string pair;
    std::string state;
    std::vector<double> times{0.5, 1.0, 5.0};
    double tol{kDefaultTol};
    bool strict{false};
};

struct Outcome {
    int code{kOk};
    json result;
    std::string dot;  // digraph only
};

inline double default_tolerance() {
    if (const char* env = std::getenv(kTolEnv)) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && *end == '\0' && v > 0.0) return v;
    }
    return kDefaultTol;
}

inline std::pair<Index, Index> parse_pair(const std::string& s, Index n) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw io::ParseError("--pair", "expected k,l");
    Index k = 0;
    Index l = 0;
    try {
        k = std::stol(s.substr(0, comma)) - 1;
        l = std::stol(s.substr(comma + 1)) - 1;
    } catch (const std::exception&) {
        throw io::ParseError("--pair", "expected two integers k,l");
    }
    if (k < 0 || l >= n || !(k < l)) throw io::ParseError("--pair", "need 1 <= k < l <= N");
    return {k, l};
}

inline CMatrix parse_state_file(const std::string& path, Index n) {
    const json j = io::read_json_file(path);
    if (!j.is_object()) throw io::ParseError(path + ":$", "state file must be an object");
    io::reject_unknown(j, {"rho"}, path + ":$");
    return io::parse_matrix(io::require_field(j, "rho", path + ":$"), n, n, path + ":$.rho");
}

inline Outcome run_command(const Options& opt, const std::string& input) {
    Outcome oc;
    json& r = oc.result;
    r["command"] = opt.command;
    r["input"] = input;
    r["tolerance"] = opt.tol;
    json warnings = json::array();

    GeneratorSpec spec;
    try {
        const json raw = io::read_json_file(input);
        r["spec_hash"] = io::spec_hash(raw);
        spec = io::parse_spec(raw);
    } catch (const io::ParseError& e) {
        r["error"] = e.what();
        oc.code = kInvalid;
        return oc;
    }

    const double tol = opt.tol;
    const ValidationReport vr = validate(spec, tol);
    try {
        if (opt.command == "validate") {
            r["validation"] = io::validation_json(vr);
            r["identity_preserving"] = identity_preserving(spec, tol);
            if (!vr.verdict) oc.code = kInvalid;
        } else if (!vr.verdict) {
            r["validation"] = io::validation_json(vr);
            r["error"] = "invalid generator: " + describe_failure(vr);
            oc.code = kInvalid;
        } else if (opt.command == "canonicalize") {
            r["spec"] = io::spec_json(canonicalize(spec, tol));
        } else if (opt.command == "digraph") {
            const InducedDigraph g = induced_digraph(spec, tol);
            const SCCDecomposition d = scc_decompose(g);
            const SinkReport s = sinks_and_singular_2sinks(spec, tol);
            r["digraph"] = io::digraph_json(g, d, s);
            oc.dot = to_dot(g, d, s);
        } else if (opt.command == "kernel") {
            KernelBasis kb;
            try {
                kb = full_kernel(spec, tol);
            } catch (const PreconditionError& e) {
                kb = brute_force_kernel(spec, tol);
                r["fallback_reason"] = e.what();
                if (opt.strict) oc.code = kFallback;
            }
            for (const auto& w : kb.warnings) warnings.push_back(w);
            r["kernel"] = io::kernel_json(kb);
        } else if (opt.command == "oracle") {
            r["kernel"] = io::kernel_json(brute_force_kernel(spec, tol));
        } else if (opt.command == "eigen") {
            const auto [k, l] = parse_pair(opt.pair, spec.n);
            const auto [plus, minus] = block_eigenpairs(spec, k, l, tol);
            r["pair"] = {k + 1, l + 1};
            r["eigenpairs"] = {io::eigenpair_json(plus), io::eigenpair_json(minus)};
        } else if (opt.command == "check-state") {
            if (opt.state.empty()) throw io::ParseError("--state", "a state file is required");
            const CMatrix rho = parse_state_file(opt.state, spec.n);
            const InvarianceReport ir = verify_invariant(spec, rho, opt.times, tol);
            r["times"] = opt.times;
            r["invariant"] = ir.invariant;
            r["is_state"] = ir.is_state;
            r["generator_residual"] = ir.generator_residual;
            r["evolution_residuals"] = ir.evolution_residuals;
            if (!ir.is_state) warnings.push_back("input matrix is not a state");
        } else if (opt.command == "crosscheck") {
            const KernelBasis oracle = brute_force_kernel(spec, tol);
            r["oracle"] = io::kernel_json(oracle);
            try {
                const KernelBasis closed = full_kernel(spec, tol);
                for (const auto& w : closed.warnings) warnings.push_back(w);
                const RVector ang = principal_angles(closed.basis, oracle.basis);
                r["closed_form"] = io::kernel_json(closed);
                r["principal_angles"] = io::real_vector_json(ang);
                r["agree"] = closed.dimension() == oracle.dimension() &&
                             (ang.size() == 0 || ang.maxCoeff() <= 1e-7);
            } catch (const PreconditionError& e) {
                r["closed_form"] = nullptr;
                r["fallback_reason"] = e.what();
                if (opt.strict) oc.code = kFallback;
            }
        }
    } catch (const io::ParseError& e) {
        r["error"] = e.what();
        oc.code = kInvalid;
    } catch (const std::invalid_argument& e) {
        r["error"] = e.what();
        oc.code = kInvalid;
    } catch (const std::out_of_range& e) {
        r["error"] = e.what();
        oc.code = kInvalid;
    }
    r["diagnostics"] = {{"tolerance", tol}, {"warnings", warnings}};
    return oc;
}

inline bool write_text(const std::string& path, const std::string& text, std::ostream& err) {
    std::ofstream f(path);
    if (!f) {
        err << "gksl: cannot write " << path << "\n";
        return false;
    }
    f << text;
    return true;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opt;
    opt.tol = default_tolerance();

    CLI::App app{"Analyse GKSL generators: validity, canonical form, induced digraph, invariant states"};
    app.name("gksl");
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.add_option("--tol", opt.tol, "numerical tolerance (default 1e-9, or $GKSL_TOL)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--strict", opt.strict, "exit 2 when the kernel falls back to the oracle");
    app.add_option("--batch", opt.batch, "process every *.json spec in a directory")
        ->check(CLI::ExistingDirectory);
    app.add_option("--out", opt.out, "output file (DOT for digraph, spec for canonicalize)");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"validate", "check the GKSL validity conditions"},
        {"canonicalize", "emit the canonical spec (traceless H, Gamma >= 0, Gamma(I) = 0)"},
        {"digraph", "induced digraph summary; DOT to --out"},
        {"kernel", "invariant-state basis (closed form, oracle fallback)"},
        {"eigen", "eigenpairs of one off-diagonal pair block"},
        {"check-state", "check that a state is invariant"},
        {"oracle", "invariant-state basis from the superoperator SVD"},
        {"crosscheck", "compare closed-form and oracle kernels"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->add_option("spec", opt.input, "spec file (JSON)");
        if (name == "eigen") sub->add_option("--pair", opt.pair, "pair k,l (1-based, k < l)")->required();
        if (name == "check-state") {
            sub->add_option("--state", opt.state, "state file {\"rho\": matrix}")->required();
            sub->add_option("--times", opt.times, "comma separated times")->delimiter(',');
        }
        subs.push_back(sub);
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "gksl: " << e.what() << "\n";
        return kInvalid;
    }
    for (CLI::App* sub : subs)
        if (sub->parsed()) opt.command = sub->get_name();

    if (opt.batch.empty()) {
        if (opt.input.empty()) {
            err << "gksl: a spec file is required (or --batch dir)\n";
            return kInvalid;
        }
        Outcome oc = run_command(opt, opt.input);
        if (opt.command == "digraph" && oc.code == kOk) {
            if (!opt.out.empty()) {
                if (!write_text(opt.out, oc.dot, err)) return kInvalid;
                oc.result["dot_file"] = opt.out;
            } else {
                oc.result["dot"] = oc.dot;
            }
        }
        if (opt.command == "canonicalize" && oc.code == kOk && !opt.out.empty()) {
            if (!write_text(opt.out, io::pretty(oc.result["spec"]), err)) return kInvalid;
        }
        if (oc.result.contains("error")) err << "gksl: " << oc.result["error"].get<std::string>() << "\n";
        out << io::pretty(oc.result);
        return oc.code;
    }

    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(opt.batch))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    json results = json::array();
    int worst = kOk;
    for (const auto& f : files) {
        Outcome oc = run_command(opt, f.string());
        if (opt.command == "digraph" && oc.code == kOk) {
            if (!opt.out.empty()) {
                std::filesystem::create_directories(opt.out);
                const auto dot = std::filesystem::path(opt.out) / (f.stem().string() + ".dot");
                if (write_text(dot.string(), oc.dot, err)) oc.result["dot_file"] = dot.string();
            } else {
                oc.result["dot"] = oc.dot;
            }
        }
        worst = std::max(worst, oc.code);
        results.push_back({{"file", f.string()}, {"exit_code", oc.code}, {"result", oc.result}});
    }
    out << io::pretty(json{{"command", opt.command}, {"batch", opt.batch}, {"results", results}});
    return worst;
}

}  // namespace gksl::cli
