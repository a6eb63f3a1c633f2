#pragma once

#include <string>
#include <vector>

#include "luequiv/config.hpp"
#include "luequiv/invariants.hpp"
#include "luequiv/linalg.hpp"
#include "luequiv/states.hpp"

namespace luequiv {

/// A generator of the word algebra: the sum over `terms` of A_i A_j^dag (left)
/// or A_i^dag A_j (right).  Plain generators have a single term; degenerate
/// blocks contribute their remix-invariant sum over (i, i).
struct Generator {
    std::vector<Letter> terms;

    std::string label() const;
    ComplexMatrix evaluate(const SpectralDecomposition& spec, Side side) const;
};

/// All pairs (i, j) in lexicographic order.
std::vector<Generator> pair_generators(int rank);

/// Pairs among nondegenerate eigenvectors plus one summed generator per
/// degenerate block; every generator is insensitive to remixing inside a block.
std::vector<Generator> block_generators(const SpectralDecomposition& spec);

/// How basis element k was produced: raw = element[parent] * generator (or the
/// generator alone when parent < 0), then
/// element[k] = (raw - sum_b projection[b] element[b]) / norm.
struct BasisStep {
    int parent = -1;
    int generator = 0;
    std::vector<Complex> projection;
    double norm = 1.0;
};

struct AlgebraBasis {
    Side side = Side::Left;
    Index dim_local = 0;
    std::vector<Generator> generators;
    std::vector<BasisStep> steps;
    std::vector<ComplexMatrix> elements;  // orthonormal under Tr(X Y^dag)
    ComplexMatrix gram;                   // Tr(rho_i rho_j), bilinear
    ComplexMatrix gram_inverse;
    std::vector<ComplexMatrix> duals;     // Tr(rho_i rho*_j) = delta_ij
    std::vector<ComplexMatrix> structure; // structure[k](i, j) = Tr(rho_i rho_j rho*_k)

    int dim() const noexcept { return static_cast<int>(elements.size()); }

    /// Generator sequence that admitted element k.
    std::vector<int> word(int k) const;
    std::string word_text(int k) const;
};

/// Breadth-first closure of the generators under right multiplication.  A
/// candidate is admitted when its component orthogonal to the current span
/// exceeds tol.indep relative to its own norm (and tol.indep absolutely).
/// Throws GramSingular when |det(gram)| < tol.det.
AlgebraBasis build_algebra(const SpectralDecomposition& spec, Side side, const Tolerances& tol = {});
AlgebraBasis build_algebra(const SpectralDecomposition& spec, Side side, std::vector<Generator> generators,
                           const Tolerances& tol = {});

/// Replays the recipe of `reference` on another decomposition: the primed
/// elements are built from the same words with the same coefficients.
AlgebraBasis realize_algebra(const SpectralDecomposition& other, const AlgebraBasis& reference,
                             const Tolerances& tol = {});

double gram_det(const AlgebraBasis& basis);

/// Coefficients c with X = sum_k c_k rho_k, c_k = Tr(X rho*_k).  Throws
/// NotInSpan when the residual exceeds eps_span * max(1, ||X||_F).
ComplexVector express_in_basis(const AlgebraBasis& basis, const ComplexMatrix& x, double eps_span);

}  // namespace luequiv
