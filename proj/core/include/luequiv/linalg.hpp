#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace luequiv {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

struct HermitianEig {
    RealVector eigenvalues;      // descending
    ComplexMatrix eigenvectors;  // columns, unitary
};

struct SvdResult {
    ComplexMatrix left;
    RealVector singulars;  // descending, nonnegative
    ComplexMatrix right;
};

struct PolarResult {
    ComplexMatrix unitary_part;
    ComplexMatrix positive_part;
};

enum class Subsystem { First, Second };

/// Homogeneous constraint `left * X - X * right = 0` on a square unknown X.
struct LinearConstraint {
    ComplexMatrix left;
    ComplexMatrix right;
};

bool all_finite(const ComplexMatrix& m);

/// ||M - M^dag||_F <= tol * max(1, ||M||_F)
bool is_hermitian(const ComplexMatrix& m, double tol);

/// ||U^dag U - I||_F <= tol
bool is_unitary(const ComplexMatrix& u, double tol);

/// Eigenvalues in descending order; ties keep the solver's first-occurrence order.
/// Throws NotHermitian or ConvergenceFailure.
HermitianEig hermitian_eigendecompose(const ComplexMatrix& m, double herm_tol = 1e-10);

/// Thin-free SVD: `left` and `right` are square unitaries, `singulars` has
/// min(rows, cols) entries.
SvdResult svd(const ComplexMatrix& m);

/// M = U P with U = left * right^dag and P = right * diag(s) * right^dag.
PolarResult polar_decompose(const ComplexMatrix& m);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Traces out `which` factor of an operator on C^n (x) C^n.  The first factor
/// is the slow index of the product basis.
ComplexMatrix partial_trace(const ComplexMatrix& m, Subsystem which, Index n);

/// Tr(a b^dag)
Complex trace_inner(const ComplexMatrix& a, const ComplexMatrix& b);

/// Orthonormal basis (under Tr(X Y^dag)) of the approximate solution space of
/// the constraints.  A right singular vector of the stacked system counts as
/// a solution when its singular value is at most eps_null times the largest.
std::vector<ComplexMatrix> lstsq_nullspace(std::span<const LinearConstraint> constraints, Index dim,
                                           double eps_null);

}  // namespace luequiv
