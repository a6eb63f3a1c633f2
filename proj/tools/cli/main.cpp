// luequiv: local unitary equivalence of bipartite density matrices.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "luequiv/error.hpp"
#include "luequiv/io.hpp"

namespace {

using namespace luequiv;
using io::Json;

constexpr const char* kExitCodes = R"(Exit status:
  0   success; compare: Equivalent; certify: residual within eps-cert
  1   compare: NotEquivalent; certify: residual above eps-cert
  2   compare: Inconclusive
  3   ParseError (unreadable file, malformed JSON, schema violation)
  4   NotHermitian            5   NotUnitTrace          6   NotPositiveSemidefinite
  7   NonFinite               8   DimensionMismatch     9   NotUnitary
  10  BudgetExceeded          11  IndexOutOfRange       12  PatternMismatch
  13  InvalidProfile          14  ConvergenceFailure    15  GramSingular
  16  NotInSpan               17  NoIntertwiner         18  NoNonsingularElement
  64  usage error
  70  internal error)";

struct Globals {
    bool json = false;
    std::uint64_t seed = 0x5eed;
    int tau_cap = 0;
    std::optional<double> eps_inv, eps_cert, eps_deg;

    Tolerances tolerances() const {
        Tolerances t;
        t.seed = seed;
        t.tau_cap = tau_cap;
        if (eps_inv) t.inv = *eps_inv;
        if (eps_cert) t.cert = *eps_cert;
        if (eps_deg) t.deg = *eps_deg;
        return t;
    }
};

struct LoadedState {
    std::string path;
    std::string digest;
    io::StateFile file;
    DensityMatrix rho;
};

LoadedState load(const std::string& path, const Tolerances& tol) {
    const std::string text = io::read_text(path);
    io::StateFile file = io::parse_state(text);
    DensityMatrix rho = validate_density(file.matrix, file.local_dim, tol);
    return {path, io::sha256_hex(text), std::move(file), std::move(rho)};
}

std::string format_complex(Complex z) {
    char buf[64];
    if (z.imag() == 0.0) std::snprintf(buf, sizeof buf, "%.12g", z.real());
    else std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
    return buf;
}

int outcome_status(Outcome o) {
    switch (o) {
        case Outcome::Equivalent: return 0;
        case Outcome::NotEquivalent: return 1;
        case Outcome::Inconclusive: return 2;
    }
    return io::kExitInternal;
}

int cmd_validate(const Globals& g, const std::string& path) {
    const Tolerances tol = g.tolerances();
    try {
        const LoadedState s = load(path, tol);
        const auto spec = spectral_decompose(s.rho, tol);
        if (g.json) {
            std::cout << Json{{"valid", true}, {"local_dim", s.file.local_dim}, {"rank", spec.rank()}}.dump(1) << "\n";
        } else {
            std::cout << path << ": valid, N=" << s.file.local_dim << " rank " << spec.rank() << "\n";
        }
        return 0;
    } catch (const Error& e) {
        if (g.json) {
            std::cout << Json{{"valid", false}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump(1)
                      << "\n";
        } else {
            std::cout << path << ": invalid, " << to_string(e.code()) << ": " << e.what() << "\n";
        }
        return io::exit_code(e.code());
    }
}

int cmd_fingerprint(const Globals& g, const std::string& path, const std::string& out) {
    const Tolerances tol = g.tolerances();
    const LoadedState s = load(path, tol);
    const InvariantSignature sig = fingerprint(s.rho, tol, tol.tau_cap);
    Json j = io::signature_to_json(sig);
    j["tolerances"] = io::tolerances_to_json(tol);
    const std::string text = j.dump(1) + "\n";
    if (!out.empty()) io::write_text(out, text);
    if (g.json) {
        std::cout << text;
    } else {
        std::cout << "rank " << sig.rank << ", " << sig.blocks.size() << " blocks, word cap " << sig.word_length_cap
                  << ", block cap " << sig.block_length_cap << "\n";
        for (std::size_t s = 0; s < sig.power_traces.size(); ++s)
            std::cout << "J^" << s + 1 << " = " << format_complex(sig.power_traces[s]) << "\n";
        for (const auto& [w, v] : sig.balanced_words) std::cout << w.to_string() << " = " << format_complex(v) << "\n";
        for (const auto& [k, v] : sig.block_invariants) std::cout << k << " = " << format_complex(v) << "\n";
    }
    return 0;
}

int cmd_compare(const Globals& g, const std::string& a, const std::string& b, const std::string& out) {
    const Tolerances tol = g.tolerances();
    const LoadedState sa = load(a, tol), sb = load(b, tol);
    io::VerdictReport report{decide(sa.rho, sb.rho, tol), tol, std::string(io::tool_version()),
                             {io::InputDigest{sa.path, sa.digest}, io::InputDigest{sb.path, sb.digest}}};
    const std::string text = io::report_to_json(report).dump(1) + "\n";
    if (!out.empty()) io::write_text(out, text);
    const auto& v = report.verdict;
    if (g.json) {
        std::cout << text;
    } else {
        std::cout << to_string(v.outcome) << " (" << v.reason << ")\n";
        if (v.witness)
            std::cout << "witness " << v.witness->invariant << ": " << format_complex(v.witness->first) << " vs "
                      << format_complex(v.witness->second) << "\n";
        if (v.certificate) std::cout << "certificate residual " << v.certificate->residual << "\n";
    }
    return outcome_status(v.outcome);
}

int cmd_orbit(const Globals& g, const std::string& path, const std::string& out) {
    const Tolerances tol = g.tolerances();
    const LoadedState s = load(path, tol);
    const Index n = s.file.local_dim;
    const ComplexMatrix u1 = testkit::haar_unitary(n, g.seed);
    const ComplexMatrix u2 = testkit::haar_unitary(n, g.seed + 1);
    const DensityMatrix rho2 = apply_local_unitary(s.rho, u1, u2, tol);
    io::StateFile file;
    file.local_dim = n;
    file.matrix = rho2.matrix();
    file.label = "orbit of " + s.file.label.value_or(path);
    file.generator = Json{{"seed", g.seed}, {"u1", io::matrix_to_json(u1)}, {"u2", io::matrix_to_json(u2)}};
    const std::string text = io::serialize_state(file);
    io::write_text(out, text);
    if (g.json) std::cout << Json{{"out", out}, {"sha256", io::sha256_hex(text)}, {"seed", g.seed}}.dump(1) << "\n";
    else std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_oracle(const Globals& g, const std::string& a, const std::string& b, int restarts, int iters) {
    const Tolerances tol = g.tolerances();
    const LoadedState sa = load(a, tol), sb = load(b, tol);
    if (sa.file.local_dim != sb.file.local_dim)
        throw Error(ErrorCode::DimensionMismatch, "inputs have different local dimensions");
    if (sa.file.local_dim > 3) std::cerr << "warning: the oracle is meant for N <= 3\n";
    testkit::OracleOptions options;
    options.restarts = restarts;
    options.iters = iters;
    options.seed = g.seed;
    const auto result = testkit::brute_force_oracle(sa.rho, sb.rho, options);
    if (g.json) {
        std::cout << io::oracle_to_json(result, options).dump(1) << "\n";
    } else {
        std::cout << (result.converged ? "converged" : "not converged") << ", best distance " << result.best_distance
                  << " after " << result.restarts_used << " restarts\n";
    }
    return 0;
}

int cmd_certify(const Globals& g, const std::string& a, const std::string& b, const std::string& report_path) {
    const io::VerdictReport report = io::report_from_json([&] {
        try {
            return Json::parse(io::read_text(report_path));
        } catch (const Json::parse_error& e) {
            throw Error(ErrorCode::ParseError, e.what());
        }
    }());
    Tolerances tol = report.tolerances;
    if (g.eps_cert) tol.cert = *g.eps_cert;
    const LoadedState sa = load(a, tol), sb = load(b, tol);
    if (!report.verdict.certificate) throw Error(ErrorCode::ParseError, "report carries no certificate");
    if (sa.digest != report.inputs[0].sha256 || sb.digest != report.inputs[1].sha256)
        std::cerr << "warning: input digests differ from the report\n";
    const auto& c = *report.verdict.certificate;
    const double residual = certify(sa.rho, sb.rho, c.u, c.w, tol);
    const bool ok = residual <= tol.cert;
    if (g.json) std::cout << Json{{"residual", residual}, {"eps_cert", tol.cert}, {"certified", ok}}.dump(1) << "\n";
    else std::cout << "residual " << residual << (ok ? " (certified)" : " (rejected)") << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local unitary equivalence of bipartite density matrices", "luequiv"};
    app.footer(kExitCodes);
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(io::tool_version()));

    Globals g;
    app.add_flag("--json", g.json, "Machine-readable JSON output");
    app.add_option("--seed", g.seed, "Seed for every randomized step")->capture_default_str();
    app.add_option("--tau-cap", g.tau_cap, "Maximum word and pattern length (0 = automatic)")->check(CLI::NonNegativeNumber);
    app.add_option("--eps-inv", g.eps_inv, "Invariant comparison tolerance")->check(CLI::PositiveNumber);
    app.add_option("--eps-cert", g.eps_cert, "Certificate residual tolerance")->check(CLI::PositiveNumber);
    app.add_option("--eps-deg", g.eps_deg, "Relative eigenvalue gap treated as degenerate")->check(CLI::PositiveNumber);

    std::string path_a, path_b, out, report;
    int restarts = 20, iters = 2000;

    auto* validate = app.add_subcommand("validate", "Check that a state file holds a density matrix");
    validate->add_option("state", path_a, "State file")->required();

    auto* fp = app.add_subcommand("fingerprint", "Print the invariant signature of a state");
    fp->add_option("state", path_a, "State file")->required();
    fp->add_option("--out", out, "Also write the JSON signature here");

    auto* compare = app.add_subcommand("compare", "Decide whether two states are local unitary equivalent");
    compare->add_option("first", path_a, "State file")->required();
    compare->add_option("second", path_b, "State file")->required();
    compare->add_option("--out", out, "Write the JSON verdict report here");

    auto* orbit = app.add_subcommand("orbit", "Apply seeded Haar-random local unitaries to a state");
    orbit->add_option("state", path_a, "State file")->required();
    orbit->add_option("--out", out, "Output state file")->required();

    auto* oracle = app.add_subcommand("oracle", "Search U(N) x U(N) numerically for a map between two states");
    oracle->add_option("first", path_a, "State file")->required();
    oracle->add_option("second", path_b, "State file")->required();
    oracle->add_option("--restarts", restarts, "Random restarts")->capture_default_str()->check(CLI::PositiveNumber);
    oracle->add_option("--iters", iters, "Iterations per restart")->capture_default_str()->check(CLI::PositiveNumber);

    auto* cert = app.add_subcommand("certify", "Re-check the certificate of a compare report");
    cert->add_option("first", path_a, "State file")->required();
    cert->add_option("second", path_b, "State file")->required();
    cert->add_option("report", report, "Report written by compare --out")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int status = app.exit(e);
        return status == 0 ? 0 : io::kExitUsage;
    }

    try {
        if (*validate) return cmd_validate(g, path_a);
        if (*fp) return cmd_fingerprint(g, path_a, out);
        if (*compare) return cmd_compare(g, path_a, path_b, out);
        if (*orbit) return cmd_orbit(g, path_a, out);
        if (*oracle) return cmd_oracle(g, path_a, path_b, restarts, iters);
        if (*cert) return cmd_certify(g, path_a, path_b, report);
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return io::exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io::kExitInternal;
    }
    return io::kExitUsage;
}
