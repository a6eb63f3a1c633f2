#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "luequiv/config.hpp"
#include "luequiv/linalg.hpp"
#include "luequiv/states.hpp"

namespace luequiv::testkit {

/// Haar-distributed N x N unitary: QR of a complex Ginibre matrix with the
/// diagonal of R made real positive.
ComplexMatrix haar_unitary(Index n, std::uint64_t seed);

/// Random density matrix of the given rank.  Eigenvalues come from a flat
/// Dirichlet draw, averaged within the groups of `multiplicities` (which must
/// sum to `rank`); eigenvectors are the leading columns of a Haar unitary.
/// Throws InvalidProfile.
DensityMatrix random_density(Index n, int rank, std::optional<std::vector<int>> multiplicities,
                             std::uint64_t seed);

/// exp(iH) for Hermitian H, via the eigendecomposition of H.
ComplexMatrix unitary_exp(const ComplexMatrix& hermitian);

/// Mixes the eigenvectors of one block: A_i <- sum_j mix(i, j) A_j.
SpectralDecomposition remix_block(const SpectralDecomposition& spec, std::span<const int> block,
                                  const ComplexMatrix& mix);

struct OracleResult {
    double best_distance = 0.0;
    std::pair<ComplexMatrix, ComplexMatrix> best_pair;
    int restarts_used = 0;
    bool converged = false;
};

struct OracleOptions {
    int restarts = 20;
    int iters = 2000;
    std::uint64_t seed = 1;
    double eps_oracle = 1e-6;
};

/// Direct numerical attack on the definition of LU equivalence: minimizes
/// ||rho2 - (U1 (x) U2) rho (U1 (x) U2)^dag||_F over U(N) x U(N) with a
/// Levenberg-Marquardt search on Hermitian generators (finite-difference
/// Jacobian, re-centred at every accepted step).  The first restart starts at
/// the identity, later ones at Haar-random points.  Failure to converge is
/// evidence of inequivalence, not proof.
OracleResult brute_force_oracle(const DensityMatrix& rho, const DensityMatrix& rho2, const OracleOptions& options = {});

}  // namespace luequiv::testkit
