#include "luequiv/algebra.hpp"

#include <deque>
#include <sstream>

#include "luequiv/error.hpp"

namespace luequiv {

namespace {

Complex bilinear_trace(const ComplexMatrix& a, const ComplexMatrix& b) {
    // Tr(a b)
    return (a.array() * b.transpose().array()).sum();
}

void finish(AlgebraBasis& basis, const Tolerances& tol) {
    const int m = basis.dim();
    basis.gram.resize(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) basis.gram(i, j) = bilinear_trace(basis.elements[i], basis.elements[j]);
    }
    const Eigen::FullPivLU<ComplexMatrix> lu(basis.gram);
    const double det = std::abs(lu.determinant());
    if (!(det >= tol.det)) {
        throw Error(ErrorCode::GramSingular, "|det Omega| = " + std::to_string(det) + " below " +
                                                 std::to_string(tol.det));
    }
    basis.gram_inverse = lu.inverse();
    basis.duals.assign(static_cast<std::size_t>(m), ComplexMatrix::Zero(basis.dim_local, basis.dim_local));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) basis.duals[i] += basis.gram_inverse(i, j) * basis.elements[j];
    }
    basis.structure.assign(static_cast<std::size_t>(m), ComplexMatrix::Zero(m, m));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const ComplexMatrix product = basis.elements[i] * basis.elements[j];
            for (int k = 0; k < m; ++k) basis.structure[k](i, j) = bilinear_trace(product, basis.duals[k]);
        }
    }
}

}  // namespace

std::string Generator::label() const {
    std::ostringstream os;
    if (terms.size() > 1) os << "S";
    for (const auto& t : terms) os << '(' << t.first + 1 << ',' << t.second + 1 << ')';
    return os.str();
}

ComplexMatrix Generator::evaluate(const SpectralDecomposition& spec, Side side) const {
    ComplexMatrix out = ComplexMatrix::Zero(spec.dim_local, spec.dim_local);
    for (const auto& t : terms) {
        if (t.first >= spec.rank() || t.second >= spec.rank() || t.first < 0 || t.second < 0) {
            throw Error(ErrorCode::IndexOutOfRange, "generator " + label() + " exceeds rank " +
                                                        std::to_string(spec.rank()));
        }
        const auto& a = spec.coeff[static_cast<std::size_t>(t.first)];
        const auto& b = spec.coeff[static_cast<std::size_t>(t.second)];
        out += side == Side::Left ? ComplexMatrix(a * b.adjoint()) : ComplexMatrix(a.adjoint() * b);
    }
    return out;
}

std::vector<Generator> pair_generators(int rank) {
    std::vector<Generator> out;
    for (int i = 0; i < rank; ++i) {
        for (int j = 0; j < rank; ++j) out.push_back(Generator{{Letter{i, j}}});
    }
    return out;
}

std::vector<Generator> block_generators(const SpectralDecomposition& spec) {
    std::vector<int> singles;
    for (const auto& b : spec.blocks) {
        if (b.size() == 1) singles.push_back(b.front());
    }
    std::vector<Generator> out;
    for (int i : singles) {
        for (int j : singles) out.push_back(Generator{{Letter{i, j}}});
    }
    for (const auto& b : spec.blocks) {
        if (b.size() < 2) continue;
        Generator g;
        for (int i : b) g.terms.push_back(Letter{i, i});
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<int> AlgebraBasis::word(int k) const {
    std::vector<int> out;
    for (int at = k; at >= 0; at = steps[static_cast<std::size_t>(at)].parent) {
        out.push_back(steps[static_cast<std::size_t>(at)].generator);
    }
    return {out.rbegin(), out.rend()};
}

std::string AlgebraBasis::word_text(int k) const {
    std::string out(1, side_tag(side));
    out += ':';
    for (int g : word(k)) out += generators[static_cast<std::size_t>(g)].label();
    return out;
}

AlgebraBasis build_algebra(const SpectralDecomposition& spec, Side side, const Tolerances& tol) {
    return build_algebra(spec, side, pair_generators(spec.rank()), tol);
}

AlgebraBasis build_algebra(const SpectralDecomposition& spec, Side side, std::vector<Generator> generators,
                           const Tolerances& tol) {
    if (spec.rank() < 1) throw Error(ErrorCode::DimensionMismatch, "algebra of a rank-0 decomposition");
    const Index n = spec.dim_local;
    const auto max_dim = static_cast<std::size_t>(n * n);

    AlgebraBasis basis;
    basis.side = side;
    basis.dim_local = n;
    basis.generators = std::move(generators);
    std::vector<ComplexMatrix> gens;
    gens.reserve(basis.generators.size());
    for (const auto& g : basis.generators) gens.push_back(g.evaluate(spec, side));

    std::size_t candidates = 0;
    auto try_admit = [&](int parent, int generator, const ComplexMatrix& raw) {
        if (++candidates > tol.word_budget) {
            throw Error(ErrorCode::BudgetExceeded, "algebra closure exceeded " + std::to_string(tol.word_budget) +
                                                       " candidate products");
        }
        const double raw_norm = raw.norm();
        if (raw_norm <= tol.indep) return;
        // Two Gram-Schmidt sweeps; the recorded projection is their sum.
        std::vector<Complex> projection(basis.elements.size(), Complex{});
        ComplexMatrix residual = raw;
        for (int sweep = 0; sweep < 2; ++sweep) {
            for (std::size_t b = 0; b < basis.elements.size(); ++b) {
                const Complex c = trace_inner(residual, basis.elements[b]);
                projection[b] += c;
                residual -= c * basis.elements[b];
            }
        }
        const double norm = residual.norm();
        if (norm <= tol.indep * raw_norm) return;
        basis.steps.push_back(BasisStep{parent, generator, std::move(projection), norm});
        basis.elements.push_back(residual / norm);
    };

    for (std::size_t g = 0; g < gens.size() && basis.elements.size() < max_dim; ++g) {
        try_admit(-1, static_cast<int>(g), gens[g]);
    }
    for (std::size_t parent = 0; parent < basis.elements.size() && basis.elements.size() < max_dim; ++parent) {
        for (std::size_t g = 0; g < gens.size() && basis.elements.size() < max_dim; ++g) {
            const ComplexMatrix raw = basis.elements[parent] * gens[g];
            try_admit(static_cast<int>(parent), static_cast<int>(g), raw);
        }
    }
    if (basis.elements.empty()) {
        throw Error(ErrorCode::GramSingular, "every generator vanishes");
    }
    finish(basis, tol);
    return basis;
}

AlgebraBasis realize_algebra(const SpectralDecomposition& other, const AlgebraBasis& reference,
                             const Tolerances& tol) {
    if (other.dim_local != reference.dim_local) {
        throw Error(ErrorCode::DimensionMismatch, "local dimensions differ");
    }
    AlgebraBasis basis;
    basis.side = reference.side;
    basis.dim_local = reference.dim_local;
    basis.generators = reference.generators;
    basis.steps = reference.steps;
    std::vector<ComplexMatrix> gens;
    for (const auto& g : basis.generators) gens.push_back(g.evaluate(other, basis.side));
    for (const auto& step : basis.steps) {
        const auto g = static_cast<std::size_t>(step.generator);
        ComplexMatrix raw = step.parent < 0 ? gens[g] : ComplexMatrix(basis.elements[static_cast<std::size_t>(step.parent)] * gens[g]);
        for (std::size_t b = 0; b < step.projection.size(); ++b) raw -= step.projection[b] * basis.elements[b];
        basis.elements.push_back(raw / step.norm);
    }
    finish(basis, tol);
    return basis;
}

double gram_det(const AlgebraBasis& basis) {
    return std::abs(Eigen::FullPivLU<ComplexMatrix>(basis.gram).determinant());
}

ComplexVector express_in_basis(const AlgebraBasis& basis, const ComplexMatrix& x, double eps_span) {
    if (x.rows() != basis.dim_local || x.cols() != basis.dim_local) {
        throw Error(ErrorCode::DimensionMismatch, "express_in_basis: operand has wrong size");
    }
    const int m = basis.dim();
    ComplexVector c(m);
    ComplexMatrix rebuilt = ComplexMatrix::Zero(x.rows(), x.cols());
    for (int k = 0; k < m; ++k) {
        c(k) = bilinear_trace(x, basis.duals[static_cast<std::size_t>(k)]);
        rebuilt += c(k) * basis.elements[static_cast<std::size_t>(k)];
    }
    const double residual = (x - rebuilt).norm();
    if (residual > eps_span * std::max(1.0, x.norm())) {
        throw Error(ErrorCode::NotInSpan, "residual " + std::to_string(residual) + " outside the algebra");
    }
    return c;
}

}  // namespace luequiv
