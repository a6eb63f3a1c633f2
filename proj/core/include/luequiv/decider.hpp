#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "luequiv/algebra.hpp"
#include "luequiv/config.hpp"
#include "luequiv/invariants.hpp"
#include "luequiv/linalg.hpp"
#include "luequiv/states.hpp"

namespace luequiv {

enum class Outcome { Equivalent, NotEquivalent, Inconclusive };

std::string_view to_string(Outcome outcome);

/// rho2 = (u^dag (x) w^T) rho (u (x) conj(w)), i.e. the local unitaries mapping
/// rho onto rho2 are u^dag and w^T.
struct Certificate {
    ComplexMatrix u;
    ComplexMatrix w;
    double residual = 0.0;
};

/// A named invariant whose values on the two inputs differ.
struct Witness {
    std::string invariant;
    Complex first{};
    Complex second{};
};

struct EquivalenceVerdict {
    Outcome outcome = Outcome::Inconclusive;
    std::optional<Certificate> certificate;
    std::optional<Witness> witness;
    /// Machine-readable: "certified", "invariant-mismatch",
    /// "degenerate-no-certificate", "numerical", "structure-mismatch".
    std::string reason;
    int word_length_cap = 0;
    int block_length_cap = 0;
};

struct Intertwiner {
    ComplexMatrix t;
    double residual = 0.0;          // max_k ||rho_k T - T rho'_k||_F with ||T||_F = 1
    double smallest_singular = 0.0;
};

/// Solves rho_k T = T rho'_k for all basis elements and searches the solution
/// space with seeded random combinations for an invertible T.  Throws
/// NoIntertwiner (no solution, or residual above tol.twine) or
/// NoNonsingularElement.
Intertwiner find_intertwiner(const AlgebraBasis& reference, const AlgebraBasis& other, const Tolerances& tol,
                             std::uint64_t seed);

/// u and w are the unitary polar factors of the left and right intertwiners.
std::pair<ComplexMatrix, ComplexMatrix> extract_unitaries(const Intertwiner& left, const Intertwiner& right);

/// ||rho2 - (u^dag (x) w^T) rho (u (x) conj(w))||_F
double certify(const DensityMatrix& rho, const DensityMatrix& rho2, const ComplexMatrix& u, const ComplexMatrix& w,
               const Tolerances& tol = {});

/// Rephases the nondegenerate eigenvectors of `other` so that phase-charged
/// word traces match `reference`.  Eigenvectors are only defined up to a phase;
/// the returned decomposition describes the same state.
SpectralDecomposition align_gauge(const SpectralDecomposition& reference, const SpectralDecomposition& other);

/// Unitary w minimizing sum_i ||A_i - u A'_i w^dag||_F^2 over the given indices.
ComplexMatrix procrustes_right(const SpectralDecomposition& spec, const SpectralDecomposition& other,
                               const ComplexMatrix& u, std::span<const int> indices);

EquivalenceVerdict decide(const DensityMatrix& rho, const DensityMatrix& rho2, const Tolerances& tol = {});

}  // namespace luequiv
