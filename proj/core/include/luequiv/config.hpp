#pragma once

#include <cstddef>
#include <cstdint>

namespace luequiv {

/// Numerical thresholds shared by every stage of the pipeline.  One record is
/// threaded through all calls so a verdict can be reproduced from the values
/// it reports.
struct Tolerances {
    double herm = 1e-10;    ///< relative Hermiticity defect accepted on input
    double trace = 1e-10;   ///< |Tr(rho) - 1|
    double psd = 1e-10;     ///< most negative eigenvalue accepted
    double recon = 1e-10;   ///< relative reconstruction error of factorizations
    double rank = 1e-10;    ///< absolute eigenvalue cutoff for the support
    double deg = 1e-8;      ///< relative eigenvalue gap treated as degenerate
    double inv = 1e-8;      ///< invariant comparison
    double cert = 1e-8;     ///< certificate residual (Frobenius)
    double twine = 1e-8;    ///< intertwiner residual
    double det = 1e-12;     ///< Gram determinant / smallest singular value floor
    double indep = 1e-8;    ///< relative orthogonal residual for admitting a product
    double span = 1e-8;     ///< membership test for express_in_basis
    double null = 1e-9;     ///< relative singular value cutoff for null spaces
    double unitary = 1e-10; ///< accepted ||U^dag U - I||_F

    /// Hard cap on word evaluations performed by one fingerprint.
    std::size_t word_budget = 1'000'000;
    /// 0 selects min(N^2, 6), shrunk to fit word_budget.
    int tau_cap = 0;
    /// Random combinations tried when searching a null space for an invertible element.
    int nonsingular_draws = 64;
    std::uint64_t seed = 0x5eedULL;
};

}  // namespace luequiv
