// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "luequiv/decider.hpp"
#include "luequiv/error.hpp"
#include "luequiv/testkit.hpp"

#ifdef LUEQUIV_CLI_PATH
#include <sys/wait.h>

#include "luequiv/io.hpp"
#endif

using namespace luequiv;

namespace {

using Clock = std::chrono::steady_clock;

struct Result {
    bool pass = true;
    std::string detail;
};

ComplexMatrix diag(std::initializer_list<double> values) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(values.size()), static_cast<Index>(values.size()));
    Index i = 0;
    for (double v : values) m(i, i) = v, ++i;
    return m;
}

int random_rank(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n * n));
}

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

bool same_value(Complex a, Complex b, double eps) { return invariants_agree(a, b, eps); }

Result criterion1() {
    Result r;
    auto a = validate_density(diag({0.5, 0.5, 0, 0}), 2);
    auto b = validate_density(diag({0.5, 0, 0.5, 0}), 2);
    const std::vector<int> block{0, 1}, identity{0, 1};
    const Complex va = block_invariant(spectral_decompose(a), block, identity, Side::Left);
    const Complex vb = block_invariant(spectral_decompose(b), block, identity, Side::Left);
    r.pass = std::abs(va - 2.0) <= 1e-12 && std::abs(vb - 4.0) <= 1e-12;

    std::string invariant;
    Complex first, second;
    bool not_equivalent = false;
#ifdef LUEQUIV_CLI_PATH
    const auto dir = std::filesystem::temp_directory_path() / "luequiv_acceptance";
    std::filesystem::create_directories(dir);
    for (auto [name, rho] : {std::pair{"a.json", &a}, std::pair{"b.json", &b}}) {
        io::StateFile f;
        f.local_dim = 2;
        f.matrix = rho->matrix();
        io::write_text(dir / name, io::serialize_state(f));
    }
    const std::string cmd = std::string(LUEQUIV_CLI_PATH) + " --json compare " + (dir / "a.json").string() + " " +
                            (dir / "b.json").string();
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t k = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, k);
    const int raw = pclose(pipe);
    std::filesystem::remove_all(dir);
    const int status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    const auto report = io::report_from_json(io::Json::parse(out));
    not_equivalent = status == 1 && report.verdict.outcome == Outcome::NotEquivalent;
    if (report.verdict.witness) {
        invariant = report.verdict.witness->invariant;
        first = report.verdict.witness->first;
        second = report.verdict.witness->second;
    }
    const char* via = "cli compare";
#else
    const auto v = decide(a, b);
    not_equivalent = v.outcome == Outcome::NotEquivalent;
    if (v.witness) invariant = v.witness->invariant, first = v.witness->first, second = v.witness->second;
    const char* via = "decide";
#endif
    r.pass = r.pass && not_equivalent && invariant == "B{1,2}:L:[1,2]" && std::abs(first - 2.0) <= 1e-12 &&
             std::abs(second - 4.0) <= 1e-12;
    r.detail = fmt("invariant %.15g vs %.15g; %s: %s witness %s = %.15g vs %.15g", va.real(), vb.real(), via,
                   not_equivalent ? "NotEquivalent" : "not NotEquivalent", invariant.c_str(), first.real(),
                   second.real());
    return r;
}

Result criterion2() {
    Result r;
    int checked = 0;
    std::size_t entries = 0;
    std::string first_failure;
    for (Index n : {2, 3}) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto rho = testkit::random_density(n, random_rank(n, seed), std::nullopt, seed);
            const auto image = apply_local_unitary(rho, testkit::haar_unitary(n, 10'000 + 2 * seed),
                                                   testkit::haar_unitary(n, 10'001 + 2 * seed));
            const auto a = fingerprint(rho), b = fingerprint(image);
            bool ok = a.power_traces.size() == b.power_traces.size() &&
                      a.balanced_words.size() == b.balanced_words.size() &&
                      a.block_invariants.size() == b.block_invariants.size();
            for (std::size_t k = 0; ok && k < a.power_traces.size(); ++k)
                ok = same_value(a.power_traces[k], b.power_traces[k], 1e-8);
            for (std::size_t k = 0; ok && k < a.balanced_words.size(); ++k)
                ok = a.balanced_words[k].first == b.balanced_words[k].first &&
                     same_value(a.balanced_words[k].second, b.balanced_words[k].second, 1e-8);
            for (std::size_t k = 0; ok && k < a.block_invariants.size(); ++k)
                ok = a.block_invariants[k].first == b.block_invariants[k].first &&
                     same_value(a.block_invariants[k].second, b.block_invariants[k].second, 1e-8);
            entries += a.power_traces.size() + a.balanced_words.size() + a.block_invariants.size();
            if (!ok && first_failure.empty()) first_failure = fmt(" first failure N=%d seed=%d", int(n), int(seed));
            r.pass = r.pass && ok;
            ++checked;
        }
    }
    r.detail = fmt("%d triples, %zu signature entries compared", checked, entries) + first_failure;
    return r;
}

Result criterion3() {
    Result r;
    int equivalent = 0, inconclusive = 0, not_equivalent = 0;
    double worst = 0.0;
    for (Index n : {2, 3}) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto rho = testkit::random_density(n, random_rank(n, 20'000 + seed), std::nullopt, 20'000 + seed);
            if (!spectral_decompose(rho).nondegenerate()) {
                r.pass = false;
                r.detail = "generated spectrum unexpectedly degenerate; ";
            }
            const auto image = apply_local_unitary(rho, testkit::haar_unitary(n, 30'000 + 2 * seed),
                                                   testkit::haar_unitary(n, 30'001 + 2 * seed));
            const auto v = decide(rho, image);
            if (v.outcome == Outcome::Equivalent) {
                const double residual = certify(rho, image, v.certificate->u, v.certificate->w);
                worst = std::max(worst, residual);
                if (residual <= 1e-8) ++equivalent;
                else r.pass = false;
            } else if (v.outcome == Outcome::Inconclusive) {
                ++inconclusive;
            } else {
                ++not_equivalent;
            }
        }
    }
    r.pass = r.pass && equivalent == 200 && inconclusive == 0 && not_equivalent == 0;
    r.detail += fmt("%d/200 Equivalent, %d Inconclusive, %d NotEquivalent, worst independent residual %.2e", equivalent,
                    inconclusive, not_equivalent, worst);
    return r;
}

Result criterion4() {
    Result r;
    int contradictions = 0, excluded = 0, agree = 0;
    int independent_witnessed = 0, independent_equivalent = 0, orbit_equivalent = 0;
    for (std::uint64_t k = 0; k < 50; ++k) {
        const bool orbit_pair = k < 25;
        const std::uint64_t seed = 40'000 + k;
        const auto rho = testkit::random_density(2, random_rank(2, seed), std::nullopt, seed);
        DensityMatrix other = rho;
        if (orbit_pair) {
            other = apply_local_unitary(rho, testkit::haar_unitary(2, seed + 100), testkit::haar_unitary(2, seed + 200));
        } else if (k < 38) {
            other = testkit::random_density(2, random_rank(2, seed + 300), std::nullopt, seed + 300);
        } else {
            // Same spectrum, independent Haar eigenvectors.
            const auto spec = spectral_decompose(rho);
            const ComplexMatrix u = testkit::haar_unitary(4, seed + 400);
            ComplexMatrix m = ComplexMatrix::Zero(4, 4);
            for (int i = 0; i < spec.rank(); ++i) m += spec.eigenvalues(i) * u.col(i) * u.col(i).adjoint();
            other = validate_density(0.5 * (m + m.adjoint()), 2);
        }
        const auto v = decide(rho, other);
        testkit::OracleOptions options;
        options.seed = seed;
        const auto oracle = testkit::brute_force_oracle(rho, other, options);
        if (v.outcome == Outcome::Inconclusive) {
            ++excluded;
        } else if ((v.outcome == Outcome::Equivalent) == oracle.converged) {
            ++agree;
        } else {
            ++contradictions;
        }
        if (orbit_pair && v.outcome == Outcome::Equivalent) ++orbit_equivalent;
        if (!orbit_pair && v.outcome == Outcome::NotEquivalent && v.witness && !v.witness->invariant.empty())
            ++independent_witnessed;
        if (!orbit_pair && v.outcome == Outcome::Equivalent) ++independent_equivalent;
    }
    r.pass = contradictions == 0 && independent_witnessed >= 23 && independent_equivalent == 0;
    r.detail = fmt("%d agree, %d contradictions, %d Inconclusive excluded; orbit pairs Equivalent %d/25; independent "
                   "pairs NotEquivalent with witness %d/25, falsely Equivalent %d",
                   agree, contradictions, excluded, orbit_equivalent, independent_witnessed, independent_equivalent);
    return r;
}

Result criterion5() {
    Result r;
    double smallest_det = 1e300, worst_inverse = 0.0;
    int algebras = 0;
    for (Index n : {2, 3}) {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const std::uint64_t s = 50'000 + 1000 * static_cast<std::uint64_t>(n) + seed;
            const auto spec = spectral_decompose(testkit::random_density(n, random_rank(n, s), std::nullopt, s));
            for (Side side : {Side::Left, Side::Right}) {
                try {
                    const auto b = build_algebra(spec, side);
                    smallest_det = std::min(smallest_det, gram_det(b));
                    const double res = (b.gram * b.gram_inverse - ComplexMatrix::Identity(b.dim(), b.dim())).norm();
                    worst_inverse = std::max(worst_inverse, res);
                } catch (const Error& e) {
                    r.pass = false;
                    r.detail = fmt("N=%d seed=%d: %s; ", int(n), int(seed), e.what());
                }
                ++algebras;
            }
        }
    }
    r.pass = r.pass && smallest_det > 1e-10 && worst_inverse <= 1e-8;
    r.detail += fmt("%d algebras over 400 states, min |det Omega| %.3e, max ||Omega Omega^-1 - I||_F %.2e", algebras,
                    smallest_det, worst_inverse);
    return r;
}

Result criterion6() {
    Result r;
    double worst = 0.0;
    int compared = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::uint64_t s = 60'000 + seed;
        const auto rho = testkit::random_density(2, random_rank(2, s), std::nullopt, s);
        const auto image =
            apply_local_unitary(rho, testkit::haar_unitary(2, s + 100), testkit::haar_unitary(2, s + 200));
        const auto s1 = spectral_decompose(rho);
        if (!s1.nondegenerate()) r.pass = false;
        const auto s2 = align_gauge(s1, spectral_decompose(image));
        for (Side side : {Side::Left, Side::Right}) {
            const auto b1 = build_algebra(s1, side);
            const auto b2 = realize_algebra(s2, b1);
            if (b1.dim() != b2.dim()) {
                r.pass = false;
                continue;
            }
            for (int k = 0; k < b1.dim(); ++k) {
                const ComplexMatrix diff =
                    b1.structure[static_cast<std::size_t>(k)] - b2.structure[static_cast<std::size_t>(k)];
                worst = std::max(worst, diff.cwiseAbs().maxCoeff());
            }
            ++compared;
        }
    }
    r.pass = r.pass && worst <= 1e-8;
    r.detail = fmt("%d algebra pairs (left and right) over 50 states, max |c - c'| %.2e", compared, worst);
    return r;
}

Result criterion7() {
    Result r;
    double worst_block = 0.0, weakest_word_change = 1e300;
    const std::vector<std::vector<int>> profiles{{2}, {2, 1}, {2, 1, 1}};
    const Tolerances tol;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::uint64_t s = 70'000 + seed;
        const auto& profile = profiles[seed % profiles.size()];
        int rank = 0;
        for (int m : profile) rank += m;
        const auto rho = testkit::random_density(2, rank, profile, s);
        const auto spec = spectral_decompose(rho);
        std::vector<int> block;
        for (const auto& b : spec.blocks)
            if (b.size() == 2) block = b;
        if (block.empty()) {
            r.pass = false;
            continue;
        }
        const auto remixed = testkit::remix_block(spec, block, testkit::haar_unitary(2, s + 1));
        const auto caps = affordable_caps(spec, 0, tol.word_budget);
        const auto a = fingerprint(rho, spec, tol, caps.first, caps.second);
        const auto b = fingerprint(rho, remixed, tol, caps.first, caps.second);
        if (a.block_invariants.empty() || a.block_invariants.size() != b.block_invariants.size()) r.pass = false;
        for (std::size_t k = 0; k < std::min(a.block_invariants.size(), b.block_invariants.size()); ++k)
            worst_block = std::max(worst_block, std::abs(a.block_invariants[k].second - b.block_invariants[k].second));

        // Unbalanced words of length 2 and 3 over the block.
        double largest = 0.0;
        for (Side side : {Side::Left, Side::Right}) {
            for (int len = 2; len <= 3; ++len) {
                const int letters = 4;
                int total = 1;
                for (int k = 0; k < len; ++k) total *= letters;
                for (int code = 0; code < total; ++code) {
                    Word w;
                    w.side = side;
                    for (int k = 0, c = code; k < len; ++k, c /= letters)
                        w.letters.push_back({block[static_cast<std::size_t>(c % letters / 2)],
                                             block[static_cast<std::size_t>(c % 2)]});
                    if (w.balanced()) continue;
                    largest = std::max(largest, std::abs(word_trace(spec, w) - word_trace(remixed, w)));
                }
            }
        }
        weakest_word_change = std::min(weakest_word_change, largest);
    }
    r.pass = r.pass && worst_block < 1e-8 && weakest_word_change > 1e-3;
    r.detail = fmt("50 states, max block-invariant change %.2e; smallest per-state max unbalanced-word change %.3f",
                   worst_block, weakest_word_change);
    return r;
}

Result criterion8() {
    Result r;
    double worst = 0.0;
    const auto j = power_traces(validate_density(ComplexMatrix::Identity(4, 4) / 4.0, 2));
    for (std::size_t s = 0; s < j.size(); ++s) worst = std::max(worst, std::abs(j[s] - std::pow(4.0, -double(s))));
    double worst_pure = 0.0;
    for (Index n : {2, 3, 4})
        for (std::uint64_t seed = 0; seed < 20; ++seed)
            for (double v : power_traces(testkit::random_density(n, 1, std::nullopt, 80'000 + seed)))
                worst_pure = std::max(worst_pure, std::abs(v - 1.0));
    r.pass = j.size() == 4 && worst <= 1e-12 && worst_pure <= 1e-12;
    r.detail = fmt("maximally mixed max |J^s - 4^(1-s)| %.1e; 60 rank-1 states max |J^s - 1| %.1e", worst, worst_pure);
    return r;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;
        std::function<Result()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "diagonal counterexample 2 vs 4", 1.0, criterion1},
        {2, "orbit invariance of fingerprints", 60.0, criterion2},
        {3, "nondegenerate orbit pairs certified", 300.0, criterion3},
        {4, "oracle agreement on N=2 corpus", 600.0, criterion4},
        {5, "Gram nonsingularity", 0.0, criterion5},
        {6, "structure-constant covariance", 0.0, criterion6},
        {7, "block remix invariance", 0.0, criterion7},
        {8, "trivial spectra power traces", 0.0, criterion8},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = Clock::now();
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (c.limit_seconds > 0.0 && seconds > c.limit_seconds) {
            r.pass = false;
            r.detail += fmt("; over time limit %.0f s", c.limit_seconds);
        }
        if (!r.pass) ++failed;
        std::printf("criterion %d %s: %s (%.2f s) %s\n", c.id, r.pass ? "PASS" : "FAIL", c.name, seconds,
                    r.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
