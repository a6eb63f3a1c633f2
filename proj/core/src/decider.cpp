#include "luequiv/decider.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "luequiv/error.hpp"

namespace luequiv {

std::string_view to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Equivalent: return "Equivalent";
        case Outcome::NotEquivalent: return "NotEquivalent";
        case Outcome::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

namespace {

Complex bilinear_trace(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a.array() * b.transpose().array()).sum();
}

std::vector<int> singleton_indices(const SpectralDecomposition& spec) {
    std::vector<int> out;
    for (const auto& b : spec.blocks) {
        if (b.size() == 1) out.push_back(b.front());
    }
    return out;
}

/// Phase-neutral operators used as the tail of phase-charged probe words:
/// A_k A_k^dag for nondegenerate k, block sums, and their pairwise products.
std::vector<ComplexMatrix> neutral_tails(const SpectralDecomposition& spec, Side side) {
    std::vector<ComplexMatrix> base;
    for (const auto& b : spec.blocks) {
        ComplexMatrix s = ComplexMatrix::Zero(spec.dim_local, spec.dim_local);
        for (int i : b) {
            const auto& a = spec.coeff[static_cast<std::size_t>(i)];
            s += side == Side::Left ? ComplexMatrix(a * a.adjoint()) : ComplexMatrix(a.adjoint() * a);
        }
        base.push_back(std::move(s));
    }
    std::vector<ComplexMatrix> out = base;
    for (const auto& x : base) {
        for (const auto& y : base) out.push_back(x * y);
    }
    return out;
}

}  // namespace

SpectralDecomposition align_gauge(const SpectralDecomposition& reference, const SpectralDecomposition& other) {
    SpectralDecomposition out = other;
    if (reference.rank() != other.rank() || reference.blocks != other.blocks ||
        reference.dim_local != other.dim_local) {
        return out;
    }
    const std::vector<int> singles = singleton_indices(reference);
    const std::size_t s = singles.size();
    if (s < 2) return out;

    const auto tails_ref_l = neutral_tails(reference, Side::Left);
    const auto tails_ref_r = neutral_tails(reference, Side::Right);
    const auto tails_oth_l = neutral_tails(other, Side::Left);
    const auto tails_oth_r = neutral_tails(other, Side::Right);

    // probe[i][j] = (reference value, other value) of the strongest word with
    // charge +1 on eigenvector i and -1 on eigenvector j.
    std::vector<std::vector<std::pair<Complex, Complex>>> probe(s, std::vector<std::pair<Complex, Complex>>(s));
    for (std::size_t a = 0; a < s; ++a) {
        for (std::size_t b = 0; b < s; ++b) {
            if (a == b) continue;
            const auto i = static_cast<std::size_t>(singles[a]);
            const auto j = static_cast<std::size_t>(singles[b]);
            const ComplexMatrix ref_l = reference.coeff[i] * reference.coeff[j].adjoint();
            const ComplexMatrix oth_l = other.coeff[i] * other.coeff[j].adjoint();
            const ComplexMatrix ref_r = reference.coeff[j].adjoint() * reference.coeff[i];
            const ComplexMatrix oth_r = other.coeff[j].adjoint() * other.coeff[i];
            std::pair<Complex, Complex> best{};
            for (std::size_t t = 0; t < tails_ref_l.size(); ++t) {
                const Complex vl = bilinear_trace(ref_l, tails_ref_l[t]);
                if (std::abs(vl) > std::abs(best.first)) best = {vl, bilinear_trace(oth_l, tails_oth_l[t])};
                const Complex vr = bilinear_trace(ref_r, tails_ref_r[t]);
                if (std::abs(vr) > std::abs(best.first)) best = {vr, bilinear_trace(oth_r, tails_oth_r[t])};
            }
            probe[a][b] = best;
        }
    }

    // Maximum spanning forest over the probe strengths.
    constexpr double kWeakProbe = 1e-8;
    std::vector<bool> fixed(s, false);
    std::vector<double> theta(s, 0.0);
    std::size_t remaining = s;
    while (remaining > 0) {
        std::size_t root = 0;
        while (fixed[root]) ++root;
        fixed[root] = true;
        --remaining;
        while (remaining > 0) {
            double best = kWeakProbe;
            std::size_t from = s;
            std::size_t to = s;
            for (std::size_t b = 0; b < s; ++b) {
                if (!fixed[b]) continue;
                for (std::size_t a = 0; a < s; ++a) {
                    if (fixed[a]) continue;
                    const double strength = std::abs(probe[a][b].first);
                    if (strength > best) {
                        best = strength;
                        from = b;
                        to = a;
                    }
                }
            }
            if (to == s) break;
            const auto& [ref_value, other_value] = probe[to][from];
            theta[to] = std::arg(other_value / ref_value) + theta[from];
            fixed[to] = true;
            --remaining;
        }
    }
    for (std::size_t a = 0; a < s; ++a) {
        out.coeff[static_cast<std::size_t>(singles[a])] *= std::polar(1.0, -theta[a]);
    }
    return out;
}

Intertwiner find_intertwiner(const AlgebraBasis& reference, const AlgebraBasis& other, const Tolerances& tol,
                             std::uint64_t seed) {
    if (reference.dim() != other.dim() || reference.dim_local != other.dim_local || reference.side != other.side) {
        throw Error(ErrorCode::DimensionMismatch, "intertwined algebras must share side, size and word list");
    }
    const Index n = reference.dim_local;
    std::vector<LinearConstraint> constraints;
    constraints.reserve(static_cast<std::size_t>(reference.dim()));
    for (int k = 0; k < reference.dim(); ++k) {
        constraints.push_back({reference.elements[static_cast<std::size_t>(k)], other.elements[static_cast<std::size_t>(k)]});
    }
    const std::vector<ComplexMatrix> null = lstsq_nullspace(constraints, n, tol.null);
    if (null.empty()) throw Error(ErrorCode::NoIntertwiner, "the intertwining equations have no solution");

    auto residual_of = [&](const ComplexMatrix& t) {
        double worst = 0.0;
        for (const auto& c : constraints) worst = std::max(worst, (c.left * t - t * c.right).norm());
        return worst;
    };

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int draws = null.size() == 1 ? 1 : std::max(1, tol.nonsingular_draws);
    for (int d = 0; d < draws; ++d) {
        ComplexMatrix t = ComplexMatrix::Zero(n, n);
        if (null.size() == 1) {
            t = null.front();
        } else {
            for (const auto& v : null) {
                const double re = normal(rng);
                const double im = normal(rng);
                t += Complex{re, im} * v;
            }
        }
        t /= t.norm();
        const RealVector s = svd(t).singulars;
        const double smallest = s(s.size() - 1);
        if (smallest > tol.det) {
            const double residual = residual_of(t);
            if (residual > tol.twine) {
                throw Error(ErrorCode::NoIntertwiner, "best solution leaves residual " + std::to_string(residual));
            }
            return Intertwiner{t, residual, smallest};
        }
    }
    throw Error(ErrorCode::NoNonsingularElement, "no invertible element among " + std::to_string(draws) +
                                                     " combinations of a " + std::to_string(null.size()) +
                                                     "-dimensional solution space");
}

std::pair<ComplexMatrix, ComplexMatrix> extract_unitaries(const Intertwiner& left, const Intertwiner& right) {
    return {polar_decompose(left.t).unitary_part, polar_decompose(right.t).unitary_part};
}

double certify(const DensityMatrix& rho, const DensityMatrix& rho2, const ComplexMatrix& u, const ComplexMatrix& w,
               const Tolerances& tol) {
    const Index n = rho.dim_local();
    if (rho2.dim_local() != n || u.rows() != n || u.cols() != n || w.rows() != n || w.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "certify: operands disagree on the local dimension");
    }
    if (!is_unitary(u, tol.unitary)) throw Error(ErrorCode::NotUnitary, "u is not unitary");
    if (!is_unitary(w, tol.unitary)) throw Error(ErrorCode::NotUnitary, "w is not unitary");
    const ComplexMatrix local = kron(u.adjoint(), w.transpose());
    return (rho2.matrix() - local * rho.matrix() * local.adjoint()).norm();
}

ComplexMatrix procrustes_right(const SpectralDecomposition& spec, const SpectralDecomposition& other,
                               const ComplexMatrix& u, std::span<const int> indices) {
    ComplexMatrix m = ComplexMatrix::Zero(spec.dim_local, spec.dim_local);
    for (int i : indices) {
        const auto k = static_cast<std::size_t>(i);
        m += other.coeff[k].adjoint() * u.adjoint() * spec.coeff[k];
    }
    return polar_decompose(m).unitary_part.adjoint();
}

namespace {

/// Alternating refinement of (u, w) together with a block-diagonal unitary
/// remix R: minimizes sum_i ||A'_i - sum_j R_ij u^dag A_j w||^2.
std::pair<ComplexMatrix, ComplexMatrix> refine_with_remix(const SpectralDecomposition& spec,
                                                          const SpectralDecomposition& other, ComplexMatrix u,
                                                          ComplexMatrix w, int iterations) {
    const Index n = spec.dim_local;
    const int rank = spec.rank();
    std::vector<ComplexMatrix> mixed(static_cast<std::size_t>(rank));
    for (int it = 0; it < iterations; ++it) {
        // remix: C_i = sum_j R_ij A_j with R_b = polar(G_b), G_ij = Tr(A'_i (u^dag A_j w)^dag)
        for (const auto& b : spec.blocks) {
            const auto r = static_cast<Index>(b.size());
            ComplexMatrix g(r, r);
            for (Index x = 0; x < r; ++x) {
                for (Index y = 0; y < r; ++y) {
                    const ComplexMatrix moved = u.adjoint() * spec.coeff[static_cast<std::size_t>(b[y])] * w;
                    g(x, y) = trace_inner(other.coeff[static_cast<std::size_t>(b[x])], moved);
                }
            }
            const ComplexMatrix remix = polar_decompose(g).unitary_part;
            for (Index x = 0; x < r; ++x) {
                ComplexMatrix c = ComplexMatrix::Zero(n, n);
                for (Index y = 0; y < r; ++y) c += remix(x, y) * spec.coeff[static_cast<std::size_t>(b[y])];
                mixed[static_cast<std::size_t>(b[x])] = std::move(c);
            }
        }
        ComplexMatrix nmat = ComplexMatrix::Zero(n, n);
        for (int i = 0; i < rank; ++i) {
            nmat += mixed[static_cast<std::size_t>(i)].adjoint() * u * other.coeff[static_cast<std::size_t>(i)];
        }
        w = polar_decompose(nmat).unitary_part;
        ComplexMatrix kmat = ComplexMatrix::Zero(n, n);
        for (int i = 0; i < rank; ++i) {
            kmat += other.coeff[static_cast<std::size_t>(i)] * w.adjoint() * mixed[static_cast<std::size_t>(i)].adjoint();
        }
        u = polar_decompose(kmat).unitary_part.adjoint();
    }
    return {u, w};
}

struct Attempt {
    std::optional<Certificate> best;

    void offer(const DensityMatrix& rho, const DensityMatrix& rho2, const ComplexMatrix& u, const ComplexMatrix& w,
               const Tolerances& tol) {
        const double r = certify(rho, rho2, u, w, tol);
        if (!best || r < best->residual) best = Certificate{u, w, r};
    }
    bool good(double eps) const { return best && best->residual <= eps; }
};

void attempt_certificate(const DensityMatrix& rho, const DensityMatrix& rho2, const SpectralDecomposition& s1,
                         const SpectralDecomposition& s2, const Tolerances& tol, Attempt& attempt) {
    const SpectralDecomposition aligned = align_gauge(s1, s2);
    const auto generators = block_generators(s1);
    const AlgebraBasis left = build_algebra(s1, Side::Left, generators, tol);
    const AlgebraBasis left2 = realize_algebra(aligned, left, tol);
    const AlgebraBasis right = build_algebra(s1, Side::Right, generators, tol);
    const AlgebraBasis right2 = realize_algebra(aligned, right, tol);
    const Intertwiner tl = find_intertwiner(left, left2, tol, tol.seed);
    const Intertwiner tr = find_intertwiner(right, right2, tol, tol.seed + 1);
    const auto [u, w] = extract_unitaries(tl, tr);
    attempt.offer(rho, rho2, u, w, tol);
    if (attempt.good(tol.cert)) return;

    // The intertwiners fix u and w only up to the commutants of the two
    // algebras; re-solve one side against the other.
    const std::vector<int> singles = singleton_indices(s1);
    if (!singles.empty()) {
        attempt.offer(rho, rho2, u, procrustes_right(s1, aligned, u, singles), tol);
        if (attempt.good(tol.cert)) return;
    }
    const auto [ru, rw] = refine_with_remix(s1, aligned, u, w, 200);
    attempt.offer(rho, rho2, ru, rw, tol);
}

}  // namespace

EquivalenceVerdict decide(const DensityMatrix& rho, const DensityMatrix& rho2, const Tolerances& tol) {
    const Index n = rho.dim_local();
    if (rho2.dim_local() != n) {
        throw Error(ErrorCode::DimensionMismatch, "local dimensions " + std::to_string(n) + " and " +
                                                      std::to_string(rho2.dim_local()) + " differ");
    }
    EquivalenceVerdict verdict;
    const SpectralDecomposition s1 = spectral_decompose(rho, tol);
    const SpectralDecomposition s2 = spectral_decompose(rho2, tol);

    // Power traces alone first: they are cheap and fix the spectrum.
    const std::vector<double> j1 = power_traces(rho);
    const std::vector<double> j2 = power_traces(rho2);
    for (std::size_t s = 0; s < j1.size(); ++s) {
        if (!invariants_agree(j1[s], j2[s], tol.inv)) {
            verdict.outcome = Outcome::NotEquivalent;
            verdict.reason = "invariant-mismatch";
            verdict.witness = Witness{"J^" + std::to_string(s + 1), j1[s], j2[s]};
            return verdict;
        }
    }

    int word_cap = tol.tau_cap;
    int block_cap = tol.tau_cap;
    if (tol.tau_cap <= 0) std::tie(word_cap, block_cap) = affordable_caps(s1, 0, tol.word_budget);
    verdict.word_length_cap = word_cap;
    verdict.block_length_cap = block_cap;
    const InvariantSignature sig1 = fingerprint(rho, s1, tol, word_cap, block_cap);
    const InvariantSignature sig2 = fingerprint(rho2, s2, tol, word_cap, block_cap);
    const SignatureComparison cmp = compare_signatures(sig1, sig2, tol.inv);
    if (cmp.kind == SignatureComparison::Kind::ValueMismatch) {
        verdict.outcome = Outcome::NotEquivalent;
        verdict.reason = "invariant-mismatch";
        verdict.witness = Witness{cmp.invariant, cmp.first, cmp.second};
        return verdict;
    }
    if (cmp.kind == SignatureComparison::Kind::StructureMismatch) {
        verdict.outcome = Outcome::Inconclusive;
        verdict.reason = "structure-mismatch";
        return verdict;
    }

    Attempt attempt;
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    attempt.offer(rho, rho2, id, id, tol);

    Tolerances relaxed = tol;
    relaxed.indep *= 100.0;
    relaxed.null *= 100.0;
    relaxed.twine *= 100.0;
    Tolerances tightened = tol;
    tightened.indep /= 100.0;
    tightened.null /= 100.0;
    for (const Tolerances* variant : std::array<const Tolerances*, 3>{&tol, &relaxed, &tightened}) {
        if (attempt.good(tol.cert)) break;
        try {
            attempt_certificate(rho, rho2, s1, s2, *variant, attempt);
        } catch (const Error&) {
            // A failed construction under one tolerance set is retried under the next.
        }
    }
    if (attempt.good(tol.cert)) {
        verdict.outcome = Outcome::Equivalent;
        verdict.reason = "certified";
        verdict.certificate = attempt.best;
        return verdict;
    }
    verdict.outcome = Outcome::Inconclusive;
    verdict.reason = s1.nondegenerate() ? "numerical" : "degenerate-no-certificate";
    return verdict;
}

}  // namespace luequiv
