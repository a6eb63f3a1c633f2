#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "luequiv/error.hpp"
#include "luequiv/io.hpp"
#include "luequiv/testkit.hpp"

using namespace luequiv;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(LUEQUIV_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t k = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, k);
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("luequiv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write_state(const std::string& name, const ComplexMatrix& m, Index n) {
        io::StateFile f;
        f.local_dim = n;
        f.matrix = m;
        f.label = name;
        const auto path = dir_ / (name + ".json");
        io::write_text(path, io::serialize_state(f));
        return path.string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

ComplexMatrix diag(std::initializer_list<double> values) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(values.size()), static_cast<Index>(values.size()));
    Index i = 0;
    for (double v : values) m(i, i) = v, ++i;
    return m;
}

ComplexMatrix bell() {
    ComplexVector v = ComplexVector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return v * v.adjoint();
}

Complex lookup(const io::Json& pairs, const std::string& key) {
    for (const auto& p : pairs)
        if (p[0] == key) return io::complex_from_json(p[1]);
    ADD_FAILURE() << "missing " << key;
    return {};
}

}  // namespace

TEST_F(Cli, ValidateAcceptsMaximallyMixed) {
    EXPECT_EQ(run("validate " + write_state("mixed", ComplexMatrix::Identity(4, 4) / 4.0, 2)).status, 0);
}

TEST_F(Cli, ValidateReportsTrace) {
    auto r = run("validate " + write_state("trace2", diag({1, 1, 0, 0}), 2));
    EXPECT_EQ(r.status, io::exit_code(ErrorCode::NotUnitTrace));
    EXPECT_NE(r.out.find("NotUnitTrace"), std::string::npos);
    EXPECT_NE(r.out.find("trace = 2"), std::string::npos);
}

TEST_F(Cli, ValidateTruncatedJson) {
    const std::string p = write_state("mixed", ComplexMatrix::Identity(4, 4) / 4.0, 2);
    std::string text = io::read_text(p);
    io::write_text(p, text.substr(0, text.size() / 2));
    EXPECT_EQ(run("validate " + p).status, io::exit_code(ErrorCode::ParseError));
}

TEST_F(Cli, ValidateMissingFile) {
    EXPECT_EQ(run("validate " + path("nope.json")).status, io::exit_code(ErrorCode::ParseError));
}

TEST_F(Cli, FingerprintBell) {
    auto r = run("--json fingerprint " + write_state("bell", bell(), 2));
    ASSERT_EQ(r.status, 0);
    const auto j = io::Json::parse(r.out);
    for (double v : j["power_traces"].get<std::vector<double>>()) EXPECT_NEAR(v, 1.0, 1e-12);
    EXPECT_NEAR(std::abs(lookup(j["balanced_words"], "L:(1,1)(1,1)") - 0.5), 0.0, 1e-12);
}

TEST_F(Cli, FingerprintDegenerateDiagonal) {
    auto r = run("--json fingerprint " + write_state("d", diag({0.5, 0.5, 0, 0}), 2));
    ASSERT_EQ(r.status, 0);
    const auto j = io::Json::parse(r.out);
    EXPECT_NEAR(std::abs(lookup(j["block_invariants"], "B{1,2}:L:[1,2]") - 2.0), 0.0, 1e-12);
}

TEST_F(Cli, FingerprintIsByteIdentical) {
    const std::string p = write_state("r", testkit::random_density(3, 5, std::nullopt, 4).matrix(), 3);
    auto a = run("--json fingerprint " + p), b = run("--json fingerprint " + p);
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST_F(Cli, FingerprintExplicitCapTooLarge) {
    const std::string p = write_state("r", testkit::random_density(3, 9, std::nullopt, 4).matrix(), 3);
    EXPECT_EQ(run("--tau-cap 9 fingerprint " + p).status, io::exit_code(ErrorCode::BudgetExceeded));
}

TEST_F(Cli, CompareDiagonalPair) {
    const std::string a = write_state("a", diag({0.5, 0.5, 0, 0}), 2);
    const std::string b = write_state("b", diag({0.5, 0, 0.5, 0}), 2);
    auto r = run("--json compare " + a + " " + b);
    ASSERT_EQ(r.status, 1);
    const auto report = io::report_from_json(io::Json::parse(r.out));
    ASSERT_TRUE(report.verdict.witness);
    EXPECT_EQ(report.verdict.witness->invariant, "B{1,2}:L:[1,2]");
    EXPECT_NEAR(std::abs(report.verdict.witness->first - 2.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(report.verdict.witness->second - 4.0), 0.0, 1e-12);
    EXPECT_FALSE(report.verdict.certificate);
}

TEST_F(Cli, OrbitCompareCertifyRoundTrip) {
    const std::string a = write_state("a", testkit::random_density(2, 4, std::nullopt, 7).matrix(), 2);
    ASSERT_EQ(run("--seed 99 orbit " + a + " --out " + path("b.json")).status, 0);
    auto r = run("compare " + a + " " + path("b.json") + " --out " + path("report.json"));
    ASSERT_EQ(r.status, 0) << r.out;
    auto c = run("--json certify " + a + " " + path("b.json") + " " + path("report.json"));
    ASSERT_EQ(c.status, 0);
    EXPECT_LE(io::Json::parse(c.out)["residual"].get<double>(), 1e-8);
    // Swapped inputs do not satisfy the certificate.
    EXPECT_EQ(run("certify " + path("b.json") + " " + a + " " + path("report.json")).status, 1);
}

TEST_F(Cli, CompareSelf) {
    const std::string a = write_state("a", testkit::random_density(3, 3, std::nullopt, 2).matrix(), 3);
    EXPECT_EQ(run("compare " + a + " " + a).status, 0);
}

TEST_F(Cli, CompareDimensionMismatch) {
    const std::string a = write_state("a", testkit::random_density(2, 3, std::nullopt, 2).matrix(), 2);
    const std::string b = write_state("b", testkit::random_density(3, 3, std::nullopt, 2).matrix(), 3);
    EXPECT_EQ(run("compare " + a + " " + b).status, io::exit_code(ErrorCode::DimensionMismatch));
}

TEST_F(Cli, OrbitIsDeterministicAndPreservesSpectrum) {
    const auto rho = testkit::random_density(3, 6, std::nullopt, 8);
    const std::string a = write_state("a", rho.matrix(), 3);
    ASSERT_EQ(run("--seed 5 orbit " + a + " --out " + path("x.json")).status, 0);
    ASSERT_EQ(run("--seed 5 orbit " + a + " --out " + path("y.json")).status, 0);
    EXPECT_EQ(io::read_text(path("x.json")), io::read_text(path("y.json")));
    const auto out = io::parse_state(io::read_text(path("x.json")));
    ASSERT_TRUE(out.generator);
    EXPECT_EQ((*out.generator)["seed"].get<std::uint64_t>(), 5u);
    const auto j1 = power_traces(rho);
    const auto j2 = power_traces(validate_density(out.matrix, 3));
    for (std::size_t s = 0; s < j1.size(); ++s) EXPECT_NEAR(j1[s], j2[s], 1e-9);
    // The recorded unitaries reproduce the output.
    const ComplexMatrix u1 = io::matrix_from_json((*out.generator)["u1"]);
    const ComplexMatrix u2 = io::matrix_from_json((*out.generator)["u2"]);
    EXPECT_LE((apply_local_unitary(rho, u1, u2).matrix() - out.matrix).norm(), 1e-14);
}

TEST_F(Cli, OracleRuns) {
    const std::string a = write_state("a", diag({0.5, 0.5, 0, 0}), 2);
    const std::string b = write_state("b", diag({0.5, 0, 0.5, 0}), 2);
    auto r = run("--json oracle " + a + " " + b + " --restarts 10");
    ASSERT_EQ(r.status, 0);
    EXPECT_FALSE(io::Json::parse(r.out)["converged"].get<bool>());

    auto self = run("--json oracle " + a + " " + a);
    EXPECT_TRUE(io::Json::parse(self.out)["converged"].get<bool>());
    EXPECT_LE(io::Json::parse(self.out)["best_distance"].get<double>(), 1e-10);

    ASSERT_EQ(run("orbit " + a + " --out " + path("c.json")).status, 0);
    auto orbit = run("--json oracle " + a + " " + path("c.json"));
    EXPECT_TRUE(io::Json::parse(orbit.out)["converged"].get<bool>());
}

TEST_F(Cli, HelpDocumentsExitCodes) {
    auto r = run("--help");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("Exit status"), std::string::npos);
    EXPECT_NE(r.out.find("NotUnitTrace"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run("").status, io::kExitUsage);
    EXPECT_EQ(run("compare onlyone.json").status, io::kExitUsage);
    EXPECT_EQ(run("frobnicate").status, io::kExitUsage);
}

TEST(Report, RoundTripIsLossless) {
    auto rho = testkit::random_density(2, 4, std::nullopt, 3);
    auto rho2 = apply_local_unitary(rho, testkit::haar_unitary(2, 1), testkit::haar_unitary(2, 2));
    Tolerances tol;
    tol.inv = 3.7e-9;
    tol.seed = 12345678901234ULL;
    io::VerdictReport r{decide(rho, rho2, tol), tol, "0.1.0", {io::InputDigest{"a", "00"}, io::InputDigest{"b", "ff"}}};
    const auto j = io::report_to_json(r);
    const auto back = io::report_from_json(io::Json::parse(j.dump()));
    EXPECT_EQ(io::report_to_json(back).dump(), j.dump());
    ASSERT_TRUE(back.verdict.certificate);
    EXPECT_TRUE(back.verdict.certificate->u == r.verdict.certificate->u);
    EXPECT_TRUE(back.verdict.certificate->w == r.verdict.certificate->w);
    EXPECT_EQ(back.verdict.certificate->residual, r.verdict.certificate->residual);
    EXPECT_EQ(back.tolerances.inv, tol.inv);
    EXPECT_EQ(back.tolerances.seed, tol.seed);
    EXPECT_EQ(back.inputs, r.inputs);
}

TEST(Report, CertificateRequiredForEquivalent) {
    io::VerdictReport r;
    r.verdict.outcome = Outcome::Equivalent;
    r.tool_version = "x";
    auto j = io::report_to_json(r);
    EXPECT_THROW(io::report_from_json(j), Error);
}

TEST(StateFile, RoundTripIsLossless) {
    io::StateFile f;
    f.local_dim = 3;
    f.matrix = testkit::random_density(3, 7, std::nullopt, 1).matrix();
    f.label = "x";
    auto back = io::parse_state(io::serialize_state(f));
    EXPECT_TRUE(back.matrix == f.matrix);
    EXPECT_EQ(back.label, f.label);
}

TEST(StateFile, SchemaViolations) {
    EXPECT_THROW(io::parse_state(R"({"schema_version":2,"local_dim":1,"matrix":[[[1,0]]]})"), Error);
    EXPECT_THROW(io::parse_state(R"({"schema_version":1,"local_dim":2,"matrix":[[[1,0]]]})"), Error);
    EXPECT_THROW(io::parse_state(R"({"schema_version":1,"local_dim":1,"matrix":[[[1]]]})"), Error);
    EXPECT_NO_THROW(io::parse_state(R"({"schema_version":1,"local_dim":1,"matrix":[[[1,0]]]})"));
}

TEST(Digest, KnownVector) {
    EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
