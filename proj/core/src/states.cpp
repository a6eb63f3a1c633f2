#include "luequiv/states.hpp"

#include <algorithm>
#include <string>

#include "luequiv/error.hpp"

namespace luequiv {

int SpectralDecomposition::block_of(int i) const {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (std::find(blocks[b].begin(), blocks[b].end(), i) != blocks[b].end()) return static_cast<int>(b);
    }
    throw Error(ErrorCode::IndexOutOfRange, "eigenvector index " + std::to_string(i) + " is not in any block");
}

DensityMatrix validate_density(const ComplexMatrix& m, Index n, const Tolerances& tol) {
    if (n < 1 || m.rows() != n * n || m.cols() != n * n) {
        throw Error(ErrorCode::DimensionMismatch, "expected a " + std::to_string(n * n) + "x" +
                                                      std::to_string(n * n) + " matrix for local dimension " +
                                                      std::to_string(n) + ", got " + std::to_string(m.rows()) +
                                                      "x" + std::to_string(m.cols()));
    }
    if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
    const double defect = (m - m.adjoint()).norm();
    if (defect > tol.herm * std::max(1.0, m.norm())) {
        throw Error(ErrorCode::NotHermitian, "||M - M^dag||_F = " + std::to_string(defect));
    }
    const Complex tr = m.trace();
    if (std::abs(tr - Complex{1.0, 0.0}) > tol.trace) {
        throw Error(ErrorCode::NotUnitTrace,
                    "trace = " + std::to_string(tr.real()) + (tr.imag() != 0.0 ? " + " + std::to_string(tr.imag()) + "i" : ""));
    }
    const HermitianEig eig = hermitian_eigendecompose(m, tol.herm);
    const double smallest = eig.eigenvalues(eig.eigenvalues.size() - 1);
    if (smallest < -tol.psd) {
        throw Error(ErrorCode::NotPositiveSemidefinite, "smallest eigenvalue = " + std::to_string(smallest));
    }
    return DensityMatrix(m, n);
}

std::vector<std::vector<int>> degeneracy_blocks(const RealVector& eigenvalues, Index n, double eps_deg) {
    std::vector<std::vector<int>> blocks;
    if (eigenvalues.size() == 0) return blocks;
    const double scale = std::max(eigenvalues(0), 1.0 / static_cast<double>(n * n));
    blocks.push_back({0});
    for (Index i = 1; i < eigenvalues.size(); ++i) {
        if (std::abs(eigenvalues(i - 1) - eigenvalues(i)) <= eps_deg * scale) {
            blocks.back().push_back(static_cast<int>(i));
        } else {
            blocks.push_back({static_cast<int>(i)});
        }
    }
    return blocks;
}

SpectralDecomposition spectral_decompose(const DensityMatrix& rho, const Tolerances& tol) {
    const Index n = rho.dim_local();
    const HermitianEig eig = hermitian_eigendecompose(rho.matrix(), tol.herm);
    Index rank = 0;
    while (rank < eig.eigenvalues.size() && eig.eigenvalues(rank) > tol.rank) ++rank;

    SpectralDecomposition out;
    out.dim_local = n;
    out.eigenvalues = eig.eigenvalues.head(rank);
    out.coeff.reserve(static_cast<std::size_t>(rank));
    for (Index i = 0; i < rank; ++i) {
        out.coeff.push_back(vector_to_coeff(eig.eigenvectors.col(i), n));
    }
    out.blocks = degeneracy_blocks(out.eigenvalues, n, tol.deg);
    return out;
}

DensityMatrix apply_local_unitary(const DensityMatrix& rho, const ComplexMatrix& u1, const ComplexMatrix& u2,
                                  const Tolerances& tol) {
    const Index n = rho.dim_local();
    if (u1.rows() != n || u1.cols() != n || u2.rows() != n || u2.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "local unitaries must be " + std::to_string(n) + "x" +
                                                      std::to_string(n));
    }
    if (!is_unitary(u1, tol.unitary)) throw Error(ErrorCode::NotUnitary, "U1 is not unitary");
    if (!is_unitary(u2, tol.unitary)) throw Error(ErrorCode::NotUnitary, "U2 is not unitary");
    const ComplexMatrix u = kron(u1, u2);
    return validate_density(u * rho.matrix() * u.adjoint(), n, tol);
}

ComplexVector coeff_to_vector(const ComplexMatrix& a) {
    const Index n = a.rows();
    ComplexVector v(n * a.cols());
    for (Index k = 0; k < n; ++k) {
        for (Index l = 0; l < a.cols(); ++l) v(k * a.cols() + l) = a(k, l);
    }
    return v;
}

ComplexMatrix vector_to_coeff(const ComplexVector& v, Index n) {
    if (v.size() != n * n) {
        throw Error(ErrorCode::DimensionMismatch, "state vector length " + std::to_string(v.size()) +
                                                      " is not " + std::to_string(n * n));
    }
    ComplexMatrix a(n, n);
    for (Index k = 0; k < n; ++k) {
        for (Index l = 0; l < n; ++l) a(k, l) = v(k * n + l);
    }
    return a;
}

}  // namespace luequiv
