#include "luequiv/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "luequiv/error.hpp"

namespace luequiv::testkit {

namespace {

ComplexMatrix ginibre(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex{re, im} / std::sqrt(2.0);
        }
    }
    return g;
}

ComplexMatrix haar_from(Index n, std::mt19937_64& rng) {
    const ComplexMatrix g = ginibre(n, n, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix& r = qr.matrixQR();
    for (Index k = 0; k < n; ++k) {
        const double mag = std::abs(r(k, k));
        if (mag > 0.0) q.col(k) *= r(k, k) / mag;
    }
    return q;
}

}  // namespace

ComplexMatrix haar_unitary(Index n, std::uint64_t seed) {
    if (n < 1) throw Error(ErrorCode::DimensionMismatch, "haar_unitary needs n >= 1");
    std::mt19937_64 rng(seed);
    return haar_from(n, rng);
}

DensityMatrix random_density(Index n, int rank, std::optional<std::vector<int>> multiplicities,
                             std::uint64_t seed) {
    const Index dim = n * n;
    if (n < 1 || rank < 1 || rank > dim) {
        throw Error(ErrorCode::InvalidProfile, "rank " + std::to_string(rank) + " outside 1.." + std::to_string(dim));
    }
    std::vector<int> groups = multiplicities.value_or(std::vector<int>(static_cast<std::size_t>(rank), 1));
    if (std::any_of(groups.begin(), groups.end(), [](int m) { return m < 1; }) ||
        std::accumulate(groups.begin(), groups.end(), 0) != rank) {
        throw Error(ErrorCode::InvalidProfile, "multiplicities must be positive and sum to the rank");
    }
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> exponential(1.0);
    std::vector<double> weights(static_cast<std::size_t>(rank));
    for (auto& x : weights) x = exponential(rng);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (auto& x : weights) x /= total;
    std::size_t at = 0;
    for (int m : groups) {
        const auto first = weights.begin() + static_cast<std::ptrdiff_t>(at);
        const auto last = first + m;
        const double mean = std::accumulate(first, last, 0.0) / m;
        std::fill(first, last, mean);
        at += static_cast<std::size_t>(m);
    }
    const ComplexMatrix v = haar_from(dim, rng).leftCols(rank);
    RealVector lambda(rank);
    for (int i = 0; i < rank; ++i) lambda(i) = weights[static_cast<std::size_t>(i)];
    const ComplexMatrix rho = v * lambda.cast<Complex>().asDiagonal() * v.adjoint();
    return validate_density(rho, n);
}

ComplexMatrix unitary_exp(const ComplexMatrix& hermitian) {
    const HermitianEig eig = hermitian_eigendecompose(hermitian, 1e-8);
    ComplexVector phases(eig.eigenvalues.size());
    for (Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, eig.eigenvalues(k));
    return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

SpectralDecomposition remix_block(const SpectralDecomposition& spec, std::span<const int> block,
                                  const ComplexMatrix& mix) {
    const auto r = static_cast<Index>(block.size());
    if (mix.rows() != r || mix.cols() != r) throw Error(ErrorCode::DimensionMismatch, "mix must match the block size");
    SpectralDecomposition out = spec;
    for (Index x = 0; x < r; ++x) {
        ComplexMatrix c = ComplexMatrix::Zero(spec.dim_local, spec.dim_local);
        for (Index y = 0; y < r; ++y) c += mix(x, y) * spec.coeff[static_cast<std::size_t>(block[static_cast<std::size_t>(y)])];
        out.coeff[static_cast<std::size_t>(block[static_cast<std::size_t>(x)])] = std::move(c);
    }
    return out;
}

namespace {

/// Hermitian matrix from n^2 real parameters: diagonal, then (re, im) of the
/// strict upper triangle.
ComplexMatrix hermitian_from(const double* p, Index n) {
    ComplexMatrix h = ComplexMatrix::Zero(n, n);
    Index at = 0;
    for (Index i = 0; i < n; ++i) h(i, i) = p[at++];
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            h(i, j) = Complex{p[at], p[at + 1]};
            h(j, i) = std::conj(h(i, j));
            at += 2;
        }
    }
    return h;
}

class OrbitResidual {
public:
    OrbitResidual(const ComplexMatrix& rho, const ComplexMatrix& target, Index n) : rho_(rho), target_(target), n_(n) {}

    Index params() const { return 2 * n_ * n_; }
    Index outputs() const { return 2 * target_.size(); }

    Eigen::VectorXd operator()(const ComplexMatrix& u1, const ComplexMatrix& u2, const Eigen::VectorXd& p) const {
        const ComplexMatrix v1 = u1 * unitary_exp(hermitian_from(p.data(), n_));
        const ComplexMatrix v2 = u2 * unitary_exp(hermitian_from(p.data() + n_ * n_, n_));
        const ComplexMatrix u = kron(v1, v2);
        const ComplexMatrix diff = target_ - u * rho_ * u.adjoint();
        Eigen::VectorXd r(outputs());
        for (Index k = 0; k < diff.size(); ++k) {
            r(2 * k) = diff(k).real();
            r(2 * k + 1) = diff(k).imag();
        }
        return r;
    }

private:
    const ComplexMatrix& rho_;
    const ComplexMatrix& target_;
    Index n_;
};

struct LocalResult {
    ComplexMatrix u1;
    ComplexMatrix u2;
    double distance;
};

LocalResult levenberg_marquardt(const OrbitResidual& f, ComplexMatrix u1, ComplexMatrix u2, int iters, double eps,
                                Index n) {
    const Index p = f.params();
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd r = f(u1, u2, zero);
    double cost = r.squaredNorm();
    double mu = 1e-3;
    constexpr double h = 1e-7;
    for (int it = 0; it < iters && std::sqrt(cost) > eps * 1e-3; ++it) {
        Eigen::MatrixXd jac(f.outputs(), p);
        Eigen::VectorXd step = zero;
        for (Index k = 0; k < p; ++k) {
            step(k) = h;
            const Eigen::VectorXd plus = f(u1, u2, step);
            step(k) = -h;
            const Eigen::VectorXd minus = f(u1, u2, step);
            step(k) = 0.0;
            jac.col(k) = (plus - minus) / (2.0 * h);
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;
        bool improved = false;
        for (int tries = 0; tries < 20 && !improved; ++tries) {
            Eigen::MatrixXd lhs = jtj;
            lhs.diagonal().array() += mu * (1.0 + jtj.diagonal().array());
            const Eigen::VectorXd delta = lhs.ldlt().solve(-jtr);
            const Eigen::VectorXd trial = f(u1, u2, delta);
            const double trial_cost = trial.squaredNorm();
            if (trial_cost < cost) {
                u1 = u1 * unitary_exp(hermitian_from(delta.data(), n));
                u2 = u2 * unitary_exp(hermitian_from(delta.data() + n * n, n));
                r = f(u1, u2, zero);
                cost = r.squaredNorm();
                mu = std::max(mu / 3.0, 1e-12);
                improved = true;
            } else {
                mu *= 4.0;
            }
        }
        if (!improved) break;
    }
    return {u1, u2, std::sqrt(cost)};
}

}  // namespace

OracleResult brute_force_oracle(const DensityMatrix& rho, const DensityMatrix& rho2, const OracleOptions& options) {
    const Index n = rho.dim_local();
    if (rho2.dim_local() != n) throw Error(ErrorCode::DimensionMismatch, "oracle inputs differ in local dimension");
    const OrbitResidual f(rho.matrix(), rho2.matrix(), n);
    std::mt19937_64 rng(options.seed);
    OracleResult out;
    out.best_distance = std::numeric_limits<double>::infinity();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
        ComplexMatrix u1 = id;
        ComplexMatrix u2 = id;
        if (restart > 0) {
            u1 = haar_from(n, rng);
            u2 = haar_from(n, rng);
        }
        const LocalResult local = levenberg_marquardt(f, u1, u2, options.iters, options.eps_oracle, n);
        ++out.restarts_used;
        if (local.distance < out.best_distance) {
            out.best_distance = local.distance;
            out.best_pair = {local.u1, local.u2};
        }
        if (out.best_distance <= options.eps_oracle * 1e-3) break;
    }
    out.converged = out.best_distance <= options.eps_oracle;
    return out;
}

}  // namespace luequiv::testkit
