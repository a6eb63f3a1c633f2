#include "luequiv/io.hpp"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "luequiv/error.hpp"

namespace luequiv::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

double number(const Json& j, const char* what) {
    if (!j.is_number()) parse_error(std::string(what) + " must be a number");
    return j.get<double>();
}

Outcome outcome_from_string(const std::string& s) {
    for (Outcome o : {Outcome::Equivalent, Outcome::NotEquivalent, Outcome::Inconclusive})
        if (to_string(o) == s) return o;
    parse_error("unknown outcome \"" + s + "\"");
}

}  // namespace

std::string_view tool_version() { return LUEQUIV_VERSION; }

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) parse_error("complex entries are [re, im] pairs");
    return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

Json matrix_to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) parse_error("matrix must be a non-empty array of rows");
    const auto rows = static_cast<Index>(j.size());
    if (!j[0].is_array()) parse_error("matrix rows must be arrays");
    const auto cols = static_cast<Index>(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) parse_error("matrix rows differ in length");
        for (Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
    }
    return m;
}

StateFile parse_state(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        parse_error(e.what());
    }
    StateFile s;
    const Json& version = require(j, "schema_version");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
        parse_error("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    const Json& dim = require(j, "local_dim");
    if (!dim.is_number_integer() || dim.get<long long>() < 1) parse_error("local_dim must be a positive integer");
    s.local_dim = dim.get<Index>();
    s.matrix = matrix_from_json(require(j, "matrix"));
    const Index expected = s.local_dim * s.local_dim;
    if (s.matrix.rows() != expected || s.matrix.cols() != expected)
        parse_error("matrix must be " + std::to_string(expected) + "x" + std::to_string(expected) + " for local_dim " +
                    std::to_string(s.local_dim));
    if (j.contains("label")) {
        if (!j["label"].is_string()) parse_error("label must be a string");
        s.label = j["label"].get<std::string>();
    }
    if (j.contains("generator")) s.generator = j["generator"];
    return s;
}

std::string serialize_state(const StateFile& state) {
    Json j;
    j["schema_version"] = state.schema_version;
    j["local_dim"] = state.local_dim;
    j["matrix"] = matrix_to_json(state.matrix);
    if (state.label) j["label"] = *state.label;
    if (state.generator) j["generator"] = *state.generator;
    return j.dump(1) + "\n";
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) parse_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) parse_error("cannot write " + path.string());
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::ConvergenceFailure, "SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

Json tolerances_to_json(const Tolerances& t) {
    return Json{{"herm", t.herm},       {"trace", t.trace},
                {"psd", t.psd},         {"recon", t.recon},
                {"rank", t.rank},       {"deg", t.deg},
                {"inv", t.inv},         {"cert", t.cert},
                {"twine", t.twine},     {"det", t.det},
                {"indep", t.indep},     {"span", t.span},
                {"null", t.null},       {"unitary", t.unitary},
                {"word_budget", t.word_budget}, {"tau_cap", t.tau_cap},
                {"nonsingular_draws", t.nonsingular_draws}, {"seed", t.seed}};
}

Tolerances tolerances_from_json(const Json& j) {
    Tolerances t;
    auto real = [&](const char* key, double& field) { field = number(require(j, key), key); };
    real("herm", t.herm);
    real("trace", t.trace);
    real("psd", t.psd);
    real("recon", t.recon);
    real("rank", t.rank);
    real("deg", t.deg);
    real("inv", t.inv);
    real("cert", t.cert);
    real("twine", t.twine);
    real("det", t.det);
    real("indep", t.indep);
    real("span", t.span);
    real("null", t.null);
    real("unitary", t.unitary);
    try {
        t.word_budget = require(j, "word_budget").get<std::size_t>();
        t.tau_cap = require(j, "tau_cap").get<int>();
        t.nonsingular_draws = require(j, "nonsingular_draws").get<int>();
        t.seed = require(j, "seed").get<std::uint64_t>();
    } catch (const Json::exception& e) {
        parse_error(e.what());
    }
    return t;
}

Json report_to_json(const VerdictReport& r) {
    const auto& v = r.verdict;
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["tool"] = "luequiv";
    j["tool_version"] = r.tool_version;
    j["outcome"] = std::string(to_string(v.outcome));
    j["reason"] = v.reason;
    j["word_length_cap"] = v.word_length_cap;
    j["block_length_cap"] = v.block_length_cap;
    if (v.witness) {
        j["witness"] = {{"invariant", v.witness->invariant},
                        {"first", complex_to_json(v.witness->first)},
                        {"second", complex_to_json(v.witness->second)}};
    }
    if (v.certificate) {
        j["certificate"] = {{"u", matrix_to_json(v.certificate->u)},
                            {"w", matrix_to_json(v.certificate->w)},
                            {"residual", v.certificate->residual}};
    }
    j["tolerances"] = tolerances_to_json(r.tolerances);
    j["inputs"] = Json::array();
    for (const auto& in : r.inputs) j["inputs"].push_back({{"path", in.path}, {"sha256", in.sha256}});
    return j;
}

VerdictReport report_from_json(const Json& j) {
    VerdictReport r;
    try {
        if (require(j, "schema_version").get<int>() != kSchemaVersion) parse_error("unsupported schema_version");
        r.tool_version = require(j, "tool_version").get<std::string>();
        r.verdict.outcome = outcome_from_string(require(j, "outcome").get<std::string>());
        r.verdict.reason = require(j, "reason").get<std::string>();
        r.verdict.word_length_cap = require(j, "word_length_cap").get<int>();
        r.verdict.block_length_cap = require(j, "block_length_cap").get<int>();
        if (j.contains("witness")) {
            const Json& w = j["witness"];
            r.verdict.witness = Witness{require(w, "invariant").get<std::string>(),
                                        complex_from_json(require(w, "first")),
                                        complex_from_json(require(w, "second"))};
        }
        if (j.contains("certificate")) {
            const Json& c = j["certificate"];
            r.verdict.certificate = Certificate{matrix_from_json(require(c, "u")), matrix_from_json(require(c, "w")),
                                                number(require(c, "residual"), "residual")};
        }
        r.tolerances = tolerances_from_json(require(j, "tolerances"));
        const Json& inputs = require(j, "inputs");
        if (!inputs.is_array() || inputs.size() != 2) parse_error("inputs must list two files");
        for (std::size_t k = 0; k < 2; ++k)
            r.inputs[k] = {require(inputs[k], "path").get<std::string>(), require(inputs[k], "sha256").get<std::string>()};
    } catch (const Json::exception& e) {
        parse_error(e.what());
    }
    if (r.verdict.certificate.has_value() != (r.verdict.outcome == Outcome::Equivalent))
        parse_error("certificate must be present exactly when the outcome is Equivalent");
    return r;
}

Json signature_to_json(const InvariantSignature& sig) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["local_dim"] = sig.dim_local;
    j["rank"] = sig.rank;
    j["eigenvalues"] = std::vector<double>(sig.eigenvalues.data(), sig.eigenvalues.data() + sig.eigenvalues.size());
    Json blocks = Json::array();
    for (const auto& b : sig.blocks) {
        Json members = Json::array();
        for (int i : b) members.push_back(i + 1);
        blocks.push_back(std::move(members));
    }
    j["blocks"] = std::move(blocks);
    j["power_traces"] = sig.power_traces;
    j["word_length_cap"] = sig.word_length_cap;
    j["block_length_cap"] = sig.block_length_cap;
    // Arrays of [key, value] keep the canonical order of the signature.
    Json words = Json::array();
    for (const auto& [w, value] : sig.balanced_words) words.push_back({w.to_string(), complex_to_json(value)});
    j["balanced_words"] = std::move(words);
    Json blocks_inv = Json::array();
    for (const auto& [key, value] : sig.block_invariants) blocks_inv.push_back({key, complex_to_json(value)});
    j["block_invariants"] = std::move(blocks_inv);
    return j;
}

Json oracle_to_json(const testkit::OracleResult& result, const testkit::OracleOptions& options) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["best_distance"] = result.best_distance;
    j["converged"] = result.converged;
    j["restarts_used"] = result.restarts_used;
    j["u1"] = matrix_to_json(result.best_pair.first);
    j["u2"] = matrix_to_json(result.best_pair.second);
    j["options"] = {{"restarts", options.restarts},
                    {"iters", options.iters},
                    {"seed", options.seed},
                    {"eps_oracle", options.eps_oracle}};
    return j;
}

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return 3;
        case ErrorCode::NotHermitian: return 4;
        case ErrorCode::NotUnitTrace: return 5;
        case ErrorCode::NotPositiveSemidefinite: return 6;
        case ErrorCode::NonFinite: return 7;
        case ErrorCode::DimensionMismatch: return 8;
        case ErrorCode::NotUnitary: return 9;
        case ErrorCode::BudgetExceeded: return 10;
        case ErrorCode::IndexOutOfRange: return 11;
        case ErrorCode::PatternMismatch: return 12;
        case ErrorCode::InvalidProfile: return 13;
        case ErrorCode::ConvergenceFailure: return 14;
        case ErrorCode::GramSingular: return 15;
        case ErrorCode::NotInSpan: return 16;
        case ErrorCode::NoIntertwiner: return 17;
        case ErrorCode::NoNonsingularElement: return 18;
    }
    return kExitInternal;
}

}  // namespace luequiv::io
