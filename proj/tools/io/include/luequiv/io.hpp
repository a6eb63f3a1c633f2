#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "luequiv/decider.hpp"
#include "luequiv/error.hpp"
#include "luequiv/invariants.hpp"
#include "luequiv/testkit.hpp"

namespace luequiv::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

std::string_view tool_version();

/// On-disk density matrix.  `matrix` is row-major N^2 x N^2 with entries
/// written as [re, im].
struct StateFile {
    int schema_version = kSchemaVersion;
    Index local_dim = 0;
    ComplexMatrix matrix;
    std::optional<std::string> label;
    /// Present on files written by `orbit`: the seed and (U1, U2) used.
    std::optional<Json> generator;
};

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

/// Throws Error(ParseError) on malformed text or schema violations.
StateFile parse_state(std::string_view text);
std::string serialize_state(const StateFile& state);

/// Whole file as bytes.  Throws Error(ParseError) when it cannot be read.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);

Json tolerances_to_json(const Tolerances& tol);
Tolerances tolerances_from_json(const Json& j);

struct InputDigest {
    std::string path;
    std::string sha256;
    bool operator==(const InputDigest&) const = default;
};

struct VerdictReport {
    EquivalenceVerdict verdict;
    Tolerances tolerances;
    std::string tool_version;
    std::array<InputDigest, 2> inputs;
};

Json report_to_json(const VerdictReport& report);
VerdictReport report_from_json(const Json& j);

Json signature_to_json(const InvariantSignature& sig);
Json oracle_to_json(const testkit::OracleResult& result, const testkit::OracleOptions& options);

/// Process exit status for a library error; verdicts use 0, 1 and 2.
int exit_code(ErrorCode code);
inline constexpr int kExitUsage = 64;
inline constexpr int kExitInternal = 70;

}  // namespace luequiv::io
