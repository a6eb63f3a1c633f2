#pragma once

#include <vector>

#include "luequiv/config.hpp"
#include "luequiv/linalg.hpp"

namespace luequiv {

/// A validated density matrix on C^N (x) C^N.  Only `validate_density` and the
/// transformations in this header construct one, so holding a DensityMatrix
/// means the Hermitian / unit-trace / PSD checks have passed.
class DensityMatrix {
public:
    Index dim_local() const noexcept { return dim_local_; }
    const ComplexMatrix& matrix() const noexcept { return matrix_; }

private:
    DensityMatrix(ComplexMatrix m, Index n) : matrix_(std::move(m)), dim_local_(n) {}

    ComplexMatrix matrix_;
    Index dim_local_;

    friend DensityMatrix validate_density(const ComplexMatrix&, Index, const Tolerances&);
};

/// rho = sum_i lambda_i |v_i><v_i| with |v_i> = sum_kl (A_i)_kl |kl>.
struct SpectralDecomposition {
    Index dim_local = 0;
    RealVector eigenvalues;                  // descending, all > tol.rank
    std::vector<ComplexMatrix> coeff;        // A_1..A_n, each N x N
    std::vector<std::vector<int>> blocks;    // maximal degeneracy blocks, 0-based, ascending

    int rank() const noexcept { return static_cast<int>(coeff.size()); }
    bool nondegenerate() const noexcept { return blocks.size() == coeff.size(); }
    /// Index of the block containing eigenvector i.
    int block_of(int i) const;
};

DensityMatrix validate_density(const ComplexMatrix& m, Index n, const Tolerances& tol = {});

SpectralDecomposition spectral_decompose(const DensityMatrix& rho, const Tolerances& tol = {});

/// (U1 (x) U2) rho (U1 (x) U2)^dag
DensityMatrix apply_local_unitary(const DensityMatrix& rho, const ComplexMatrix& u1, const ComplexMatrix& u2,
                                  const Tolerances& tol = {});

/// vec with the first factor as slow index: v[k*N + l] = A(k, l).
ComplexVector coeff_to_vector(const ComplexMatrix& a);
ComplexMatrix vector_to_coeff(const ComplexVector& v, Index n);

/// Groups descending eigenvalues into blocks by chaining consecutive gaps
/// |l_i - l_{i+1}| <= eps_deg * max(l_1, 1/N^2).
std::vector<std::vector<int>> degeneracy_blocks(const RealVector& eigenvalues, Index n, double eps_deg);

}  // namespace luequiv
