#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "luequiv/config.hpp"
#include "luequiv/linalg.hpp"
#include "luequiv/states.hpp"

namespace luequiv {

/// Left words multiply factors A_i A_j^dag, right words A_i^dag A_j.
enum class Side { Left, Right };

char side_tag(Side side);

/// One factor of a word, 0-based eigenvector indices.
struct Letter {
    int first = 0;
    int second = 0;

    auto operator<=>(const Letter&) const = default;
};

struct Word {
    Side side = Side::Left;
    std::vector<Letter> letters;

    std::size_t length() const noexcept { return letters.size(); }

    /// Each index occurs equally often in first and second positions.  Such
    /// words are insensitive to the phase of every eigenvector.
    bool balanced() const;

    /// Lexicographically smallest cyclic rotation.
    Word canonical() const;

    /// Text form with 1-based indices, e.g. "L:(1,1)(2,2)".
    std::string to_string() const;
    static Word parse(std::string_view text);

    bool operator==(const Word&) const = default;
};

/// Precomputed pair products for repeated word evaluation on one side.
class WordEvaluator {
public:
    WordEvaluator(const SpectralDecomposition& spec, Side side);

    const ComplexMatrix& factor(int i, int j) const { return factors_[static_cast<std::size_t>(i * rank_ + j)]; }
    int rank() const noexcept { return rank_; }

    /// Trace of the ordered product of factor(letter.first, letter.second).
    Complex trace(std::span<const Letter> letters) const;

    /// Traces of many words; consecutive words sharing a prefix reuse its
    /// product, so lexicographically sorted input is cheapest.
    std::vector<Complex> traces(std::span<const Word> words) const;

private:
    int rank_ = 0;
    std::vector<ComplexMatrix> factors_;
};

/// J^s = Tr(rho^s) for s = 1..N^2, from the spectrum of rho (eigenvalues
/// below zero are clamped).
std::vector<double> power_traces(const DensityMatrix& rho);
std::vector<double> power_traces(const RealVector& eigenvalues, int count);

/// Throws IndexOutOfRange when a letter refers past spec.rank().
Complex word_trace(const SpectralDecomposition& spec, const Word& word);

/// Number of balanced letter sequences of the given length over n indices
/// (before cyclic deduplication); this is the enumeration cost.
double count_balanced_sequences(int n, int length);

/// All balanced canonical words of length 1..max_len over n indices, ordered
/// by length then lexicographically.  Throws BudgetExceeded when more than
/// `budget` candidate sequences would have to be examined.
std::vector<Word> enumerate_balanced_words(int n, int max_len, std::size_t budget = 1'000'000,
                                           Side side = Side::Left);

/// Permutations of {0..length-1} up to conjugation by cyclic shifts (which
/// corresponds to rotating the word inside the trace), smallest representative
/// of each class, lexicographic order.
std::vector<std::vector<int>> enumerate_patterns(int length);

/// Degeneracy-block invariant
///
///     sum_{f : slots -> block} Tr( prod_k X(f(k), f(pattern(k) + 1 mod len)) )
///
/// with X(a, b) = A_a A_b^dag (left) or A_a^dag A_b (right).  The identity
/// pattern chains each dagger factor to the next slot, giving
/// sum Tr(A_i A_j^dag A_j A_i^dag) at length 2.  Every sum of this kind is
/// unchanged when the eigenvectors of the block are remixed by a unitary.
Complex block_invariant(const SpectralDecomposition& spec, std::span<const int> block,
                        std::span<const int> pattern, Side side);

/// "B{1,2}:L:[1,2]" with 1-based block members and pattern images.
std::string block_key(std::span<const int> block, Side side, std::span<const int> pattern);

struct InvariantSignature {
    Index dim_local = 0;
    int rank = 0;
    RealVector eigenvalues;
    std::vector<std::vector<int>> blocks;
    std::vector<double> power_traces;
    int word_length_cap = 0;
    int block_length_cap = 0;
    /// Balanced left words over the nondegenerate eigenvectors, canonical order.
    std::vector<std::pair<Word, Complex>> balanced_words;
    /// Block invariants for every non-singleton block, both sides.
    std::vector<std::pair<std::string, Complex>> block_invariants;
};

/// Largest caps (word length, block pattern length) not above `tau_cap` whose
/// combined enumeration fits `budget`.  tau_cap <= 0 means min(N^2, 6).
std::pair<int, int> affordable_caps(const SpectralDecomposition& spec, int tau_cap, std::size_t budget);

/// tau_cap <= 0 selects min(N^2, 6) shrunk to the word budget; an explicit
/// tau_cap is honoured exactly or BudgetExceeded is thrown.
InvariantSignature fingerprint(const DensityMatrix& rho, const Tolerances& tol = {}, int tau_cap = 0);
InvariantSignature fingerprint(const DensityMatrix& rho, const SpectralDecomposition& spec, const Tolerances& tol,
                               int word_cap, int block_cap);

/// |a - b| <= eps * max(1, |a|, |b|)
bool invariants_agree(Complex a, Complex b, double eps);

struct SignatureComparison {
    enum class Kind { Match, ValueMismatch, StructureMismatch };
    Kind kind = Kind::Match;
    std::string invariant;
    Complex first{};
    Complex second{};
};

/// First disagreement in canonical order: power traces, then balanced words,
/// then block invariants.
SignatureComparison compare_signatures(const InvariantSignature& a, const InvariantSignature& b, double eps_inv);

}  // namespace luequiv
