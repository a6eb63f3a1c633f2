#include "luequiv/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "luequiv/error.hpp"

namespace luequiv {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + ": expected a nonempty square matrix, got " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

}  // namespace

bool all_finite(const ComplexMatrix& m) {
    return m.allFinite();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

bool is_unitary(const ComplexMatrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).norm() <= tol;
}

HermitianEig hermitian_eigendecompose(const ComplexMatrix& m, double herm_tol) {
    require_square(m, "hermitian_eigendecompose");
    if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
    if (!is_hermitian(m, herm_tol)) {
        throw Error(ErrorCode::NotHermitian, "||M - M^dag||_F = " + std::to_string((m - m.adjoint()).norm()));
    }
    // The solver reads the lower triangle only; hand it the Hermitian part so
    // the result does not depend on which triangle carries the rounding noise.
    const ComplexMatrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure, "self-adjoint eigensolver did not converge");
    }
    const Index n = m.rows();
    // Eigen sorts ascending; a stable sort on the negated values gives
    // descending order with ties in first-occurrence order.
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    const RealVector& values = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values(a) > values(b); });

    HermitianEig out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = values(order[static_cast<std::size_t>(k)]);
        out.eigenvectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

SvdResult svd(const ComplexMatrix& m) {
    if (m.size() == 0) throw Error(ErrorCode::DimensionMismatch, "svd of an empty matrix");
    if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
    Eigen::JacobiSVD<ComplexMatrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure, "Jacobi SVD did not converge");
    }
    return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

PolarResult polar_decompose(const ComplexMatrix& m) {
    require_square(m, "polar_decompose");
    const SvdResult s = svd(m);
    PolarResult out;
    out.unitary_part = s.left * s.right.adjoint();
    out.positive_part = s.right * s.singulars.cast<Complex>().asDiagonal() * s.right.adjoint();
    return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, Subsystem which, Index n) {
    if (n < 1 || m.rows() != n * n || m.cols() != n * n) {
        throw Error(ErrorCode::DimensionMismatch, "partial_trace: matrix is " + std::to_string(m.rows()) + "x" +
                                                      std::to_string(m.cols()) + ", expected " +
                                                      std::to_string(n * n) + " square");
    }
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Index a = 0; a < n; ++a) {
        for (Index b = 0; b < n; ++b) {
            Complex acc{0.0, 0.0};
            for (Index k = 0; k < n; ++k) {
                // Kept index (a, b); summed index k.
                acc += which == Subsystem::Second ? m(a * n + k, b * n + k) : m(k * n + a, k * n + b);
            }
            out(a, b) = acc;
        }
    }
    return out;
}

Complex trace_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "trace_inner: operands must be square and of equal size");
    }
    // Tr(a b^dag) = sum_ij a_ij conj(b_ij)
    return (a.array() * b.array().conjugate()).sum();
}

std::vector<ComplexMatrix> lstsq_nullspace(std::span<const LinearConstraint> constraints, Index dim,
                                           double eps_null) {
    const Index unknowns = dim * dim;
    std::vector<ComplexMatrix> basis;
    if (constraints.empty()) {
        for (Index j = 0; j < dim; ++j) {
            for (Index i = 0; i < dim; ++i) {
                ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
                e(i, j) = 1.0;
                basis.push_back(std::move(e));
            }
        }
        return basis;
    }
    // Column-major vec: vec(L X) = (I (x) L) vec X, vec(X R) = (R^T (x) I) vec X.
    const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
    ComplexMatrix system(static_cast<Index>(constraints.size()) * unknowns, unknowns);
    Index row = 0;
    for (const auto& c : constraints) {
        if (c.left.rows() != dim || c.left.cols() != dim || c.right.rows() != dim || c.right.cols() != dim) {
            throw Error(ErrorCode::DimensionMismatch, "lstsq_nullspace: constraint operand has wrong size");
        }
        system.middleRows(row, unknowns) = kron(id, c.left) - kron(c.right.transpose(), id);
        row += unknowns;
    }
    Eigen::JacobiSVD<ComplexMatrix> solver(system, Eigen::ComputeFullV);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure, "null-space SVD did not converge");
    }
    const RealVector& s = solver.singularValues();
    const double cutoff = eps_null * (s.size() > 0 ? s(0) : 0.0);
    for (Index k = 0; k < unknowns; ++k) {
        const bool null = k >= s.size() || s(k) <= cutoff;
        if (!null) continue;
        basis.push_back(solver.matrixV().col(k).reshaped(dim, dim));
    }
    return basis;
}

}  // namespace luequiv
