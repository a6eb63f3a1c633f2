#include "luequiv/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "luequiv/error.hpp"

namespace luequiv {

char side_tag(Side side) {
    return side == Side::Left ? 'L' : 'R';
}

bool Word::balanced() const {
    std::map<int, int> net;
    for (const auto& l : letters) {
        ++net[l.first];
        --net[l.second];
    }
    return std::all_of(net.begin(), net.end(), [](const auto& kv) { return kv.second == 0; });
}

namespace {

template <typename T>
bool rotation_is_smaller(const std::vector<T>& seq, std::size_t shift) {
    const std::size_t n = seq.size();
    for (std::size_t k = 0; k < n; ++k) {
        const T& a = seq[(k + shift) % n];
        const T& b = seq[k];
        if (a < b) return true;
        if (b < a) return false;
    }
    return false;
}

template <typename T>
bool is_min_rotation(const std::vector<T>& seq) {
    for (std::size_t s = 1; s < seq.size(); ++s) {
        if (rotation_is_smaller(seq, s)) return false;
    }
    return true;
}

[[noreturn]] void parse_fail(std::string_view text, const char* why) {
    throw Error(ErrorCode::ParseError, "bad word '" + std::string(text) + "': " + why);
}

}  // namespace

Word Word::canonical() const {
    Word best = *this;
    for (std::size_t s = 1; s < letters.size(); ++s) {
        if (rotation_is_smaller(letters, s)) {
            std::vector<Letter> rotated(letters.size());
            for (std::size_t k = 0; k < letters.size(); ++k) rotated[k] = letters[(k + s) % letters.size()];
            if (rotated < best.letters) best.letters = std::move(rotated);
        }
    }
    return best;
}

std::string Word::to_string() const {
    std::ostringstream os;
    os << side_tag(side) << ':';
    for (const auto& l : letters) os << '(' << l.first + 1 << ',' << l.second + 1 << ')';
    return os.str();
}

Word Word::parse(std::string_view text) {
    if (text.size() < 2 || text[1] != ':' || (text[0] != 'L' && text[0] != 'R')) {
        parse_fail(text, "expected 'L:' or 'R:' prefix");
    }
    Word w;
    w.side = text[0] == 'L' ? Side::Left : Side::Right;
    std::size_t pos = 2;
    auto read_int = [&](char terminator) {
        std::size_t end = text.find(terminator, pos);
        if (end == std::string_view::npos || end == pos) parse_fail(text, "truncated letter");
        int value = 0;
        for (std::size_t k = pos; k < end; ++k) {
            if (text[k] < '0' || text[k] > '9') parse_fail(text, "non-digit index");
            value = value * 10 + (text[k] - '0');
        }
        if (value < 1) parse_fail(text, "indices are 1-based");
        pos = end + 1;
        return value - 1;
    };
    while (pos < text.size()) {
        if (text[pos] != '(') parse_fail(text, "expected '('");
        ++pos;
        Letter l;
        l.first = read_int(',');
        l.second = read_int(')');
        w.letters.push_back(l);
    }
    if (w.letters.empty()) parse_fail(text, "empty word");
    return w;
}

WordEvaluator::WordEvaluator(const SpectralDecomposition& spec, Side side) : rank_(spec.rank()) {
    factors_.reserve(static_cast<std::size_t>(rank_ * rank_));
    for (int i = 0; i < rank_; ++i) {
        for (int j = 0; j < rank_; ++j) {
            const auto& a = spec.coeff[static_cast<std::size_t>(i)];
            const auto& b = spec.coeff[static_cast<std::size_t>(j)];
            factors_.push_back(side == Side::Left ? ComplexMatrix(a * b.adjoint()) : ComplexMatrix(a.adjoint() * b));
        }
    }
}

Complex WordEvaluator::trace(std::span<const Letter> letters) const {
    if (letters.empty()) throw Error(ErrorCode::PatternMismatch, "empty word");
    for (const auto& l : letters) {
        if (l.first < 0 || l.second < 0 || l.first >= rank_ || l.second >= rank_) {
            throw Error(ErrorCode::IndexOutOfRange, "word index (" + std::to_string(l.first + 1) + "," +
                                                        std::to_string(l.second + 1) + ") exceeds rank " +
                                                        std::to_string(rank_));
        }
    }
    if (letters.size() == 1) return factor(letters[0].first, letters[0].second).trace();
    ComplexMatrix acc = factor(letters[0].first, letters[0].second);
    for (std::size_t k = 1; k + 1 < letters.size(); ++k) acc = acc * factor(letters[k].first, letters[k].second);
    // Tr(acc * last) without forming the final product.
    const ComplexMatrix& last = factor(letters.back().first, letters.back().second);
    return (acc.array() * last.transpose().array()).sum();
}

std::vector<Complex> WordEvaluator::traces(std::span<const Word> words) const {
    std::vector<Complex> out;
    out.reserve(words.size());
    std::vector<ComplexMatrix> prefix;
    const Word* previous = nullptr;
    for (const Word& w : words) {
        const auto& letters = w.letters;
        for (const auto& l : letters) {
            if (l.first < 0 || l.second < 0 || l.first >= rank_ || l.second >= rank_) {
                throw Error(ErrorCode::IndexOutOfRange, "word " + w.to_string() + " exceeds rank " + std::to_string(rank_));
            }
        }
        if (letters.empty()) throw Error(ErrorCode::PatternMismatch, "empty word");
        if (letters.size() == 1) {
            out.push_back(factor(letters[0].first, letters[0].second).trace());
            previous = &w;
            continue;
        }
        // prefix[k] holds the product of letters 0..k
        std::size_t shared = 0;
        if (previous != nullptr) {
            const auto& prev = previous->letters;
            const std::size_t limit = std::min({prev.size(), letters.size(), prefix.size() + 1}) - 1;
            while (shared < limit && prev[shared] == letters[shared]) ++shared;
        }
        if (prefix.size() < letters.size() - 1) prefix.resize(letters.size() - 1);
        for (std::size_t k = shared; k + 1 < letters.size(); ++k) {
            const ComplexMatrix& f = factor(letters[k].first, letters[k].second);
            if (k == 0) {
                prefix[0] = f;
            } else {
                prefix[k].noalias() = prefix[k - 1] * f;
            }
        }
        const ComplexMatrix& last = factor(letters.back().first, letters.back().second);
        out.push_back((prefix[letters.size() - 2].array() * last.transpose().array()).sum());
        previous = &w;
    }
    return out;
}

std::vector<double> power_traces(const RealVector& eigenvalues, int count) {
    std::vector<double> out(static_cast<std::size_t>(count), 0.0);
    for (Index i = 0; i < eigenvalues.size(); ++i) {
        const double lambda = std::max(eigenvalues(i), 0.0);
        double p = lambda;
        for (int s = 0; s < count; ++s) {
            out[static_cast<std::size_t>(s)] += p;
            p *= lambda;
        }
    }
    return out;
}

std::vector<double> power_traces(const DensityMatrix& rho) {
    const HermitianEig eig = hermitian_eigendecompose(rho.matrix(), 1.0);
    const Index n = rho.dim_local();
    return power_traces(eig.eigenvalues, static_cast<int>(n * n));
}

Complex word_trace(const SpectralDecomposition& spec, const Word& word) {
    for (const auto& l : word.letters) {
        if (l.first < 0 || l.second < 0 || l.first >= spec.rank() || l.second >= spec.rank()) {
            throw Error(ErrorCode::IndexOutOfRange, "word " + word.to_string() + " exceeds rank " +
                                                        std::to_string(spec.rank()));
        }
    }
    if (word.letters.empty()) throw Error(ErrorCode::PatternMismatch, "empty word");
    ComplexMatrix acc = ComplexMatrix::Identity(spec.dim_local, spec.dim_local);
    for (const auto& l : word.letters) {
        const auto& a = spec.coeff[static_cast<std::size_t>(l.first)];
        const auto& b = spec.coeff[static_cast<std::size_t>(l.second)];
        acc = word.side == Side::Left ? ComplexMatrix(acc * a * b.adjoint()) : ComplexMatrix(acc * a.adjoint() * b);
    }
    return acc.trace();
}

double count_balanced_sequences(int n, int length) {
    if (n <= 0 || length <= 0) return 0.0;
    // (len!)^2 [x^len] (sum_m x^m / (m!)^2)^n
    std::vector<double> series(static_cast<std::size_t>(length + 1));
    double fact = 1.0;
    for (int m = 0; m <= length; ++m) {
        if (m > 0) fact *= m;
        series[static_cast<std::size_t>(m)] = 1.0 / (fact * fact);
    }
    std::vector<double> poly(static_cast<std::size_t>(length + 1), 0.0);
    poly[0] = 1.0;
    for (int k = 0; k < n; ++k) {
        std::vector<double> next(poly.size(), 0.0);
        for (int a = 0; a <= length; ++a) {
            for (int b = 0; a + b <= length; ++b) {
                next[static_cast<std::size_t>(a + b)] += poly[static_cast<std::size_t>(a)] * series[static_cast<std::size_t>(b)];
            }
        }
        poly = std::move(next);
    }
    return std::round(poly[static_cast<std::size_t>(length)] * fact * fact);
}

std::vector<Word> enumerate_balanced_words(int n, int max_len, std::size_t budget, Side side) {
    std::vector<Word> out;
    if (n < 1 || max_len < 1) return out;
    double cost = 0.0;
    for (int len = 1; len <= max_len; ++len) cost += count_balanced_sequences(n, len);
    if (cost > static_cast<double>(budget)) {
        throw Error(ErrorCode::BudgetExceeded, "balanced words over " + std::to_string(n) + " indices up to length " +
                                                   std::to_string(max_len) + " need " +
                                                   std::to_string(static_cast<long long>(cost)) +
                                                   " candidates, budget " + std::to_string(budget));
    }
    for (int len = 1; len <= max_len; ++len) {
        const auto L = static_cast<std::size_t>(len);
        std::vector<Word> level;
        std::vector<int> left(L, 0);
        std::vector<Letter> letters(L);
        while (true) {
            std::vector<int> right = left;
            std::sort(right.begin(), right.end());
            do {
                for (std::size_t k = 0; k < L; ++k) letters[k] = Letter{left[k], right[k]};
                if (is_min_rotation(letters)) level.push_back(Word{side, letters});
            } while (std::next_permutation(right.begin(), right.end()));
            // odometer over the first indices
            std::size_t pos = L;
            while (pos > 0 && left[pos - 1] == n - 1) {
                left[pos - 1] = 0;
                --pos;
            }
            if (pos == 0) break;
            ++left[pos - 1];
        }
        std::sort(level.begin(), level.end(), [](const Word& a, const Word& b) { return a.letters < b.letters; });
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

namespace {

std::vector<std::vector<int>> compute_patterns(int length) {
    std::vector<std::vector<int>> out;
    if (length < 1) return out;
    const auto L = static_cast<std::size_t>(length);
    std::vector<int> perm(L);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> conj(L);
    do {
        bool minimal = true;
        for (int s = 1; s < length && minimal; ++s) {
            // rotating the word by s conjugates the pattern by the shift
            for (int k = 0; k < length; ++k) {
                conj[static_cast<std::size_t>(k)] = ((perm[static_cast<std::size_t>((k + s) % length)] - s) % length + length) % length;
            }
            if (conj < perm) minimal = false;
        }
        if (minimal) out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

const std::vector<std::vector<int>>& cached_patterns(int length) {
    static std::mutex mutex;
    static std::map<int, std::vector<std::vector<int>>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(length);
    if (it == cache.end()) it = cache.emplace(length, compute_patterns(length)).first;
    return it->second;
}

void check_pattern(std::span<const int> pattern) {
    std::vector<int> sorted(pattern.begin(), pattern.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (sorted[k] != static_cast<int>(k)) {
            throw Error(ErrorCode::PatternMismatch, "pattern is not a permutation of 1.." + std::to_string(sorted.size()));
        }
    }
    if (pattern.empty()) throw Error(ErrorCode::PatternMismatch, "empty pattern");
}

Complex block_invariant_with(const WordEvaluator& eval, std::span<const int> block, std::span<const int> pattern) {
    const std::size_t len = pattern.size();
    const std::size_t r = block.size();
    std::vector<std::size_t> digits(len, 0);
    std::vector<Letter> letters(len);
    Complex sum{0.0, 0.0};
    while (true) {
        for (std::size_t k = 0; k < len; ++k) {
            const std::size_t partner = (static_cast<std::size_t>(pattern[k]) + 1) % len;
            letters[k] = Letter{block[digits[k]], block[digits[partner]]};
        }
        sum += eval.trace(letters);
        std::size_t pos = len;
        while (pos > 0 && digits[pos - 1] == r - 1) {
            digits[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
        ++digits[pos - 1];
    }
    return sum;
}

double block_cost(const SpectralDecomposition& spec, int cap) {
    double cost = 0.0;
    for (const auto& b : spec.blocks) {
        if (b.size() < 2) continue;
        for (int len = 1; len <= cap; ++len) {
            cost += 2.0 * std::pow(static_cast<double>(b.size()), len) *
                    static_cast<double>(cached_patterns(len).size());
        }
    }
    return cost;
}

std::vector<int> singleton_indices(const SpectralDecomposition& spec) {
    std::vector<int> out;
    for (const auto& b : spec.blocks) {
        if (b.size() == 1) out.push_back(b.front());
    }
    return out;
}

double word_cost(int singles, int cap) {
    double cost = 0.0;
    for (int len = 1; len <= cap; ++len) cost += count_balanced_sequences(singles, len);
    return cost;
}

}  // namespace

std::vector<std::vector<int>> enumerate_patterns(int length) {
    return cached_patterns(length);
}

Complex block_invariant(const SpectralDecomposition& spec, std::span<const int> block, std::span<const int> pattern,
                        Side side) {
    check_pattern(pattern);
    if (block.empty()) throw Error(ErrorCode::PatternMismatch, "empty block");
    for (int i : block) {
        if (i < 0 || i >= spec.rank()) {
            throw Error(ErrorCode::IndexOutOfRange, "block index " + std::to_string(i + 1) + " exceeds rank " +
                                                        std::to_string(spec.rank()));
        }
    }
    return block_invariant_with(WordEvaluator(spec, side), block, pattern);
}

std::string block_key(std::span<const int> block, Side side, std::span<const int> pattern) {
    std::ostringstream os;
    os << "B{";
    for (std::size_t k = 0; k < block.size(); ++k) os << (k ? "," : "") << block[k] + 1;
    os << "}:" << side_tag(side) << ":[";
    for (std::size_t k = 0; k < pattern.size(); ++k) os << (k ? "," : "") << pattern[k] + 1;
    os << ']';
    return os.str();
}

std::pair<int, int> affordable_caps(const SpectralDecomposition& spec, int tau_cap, std::size_t budget) {
    const int singles = static_cast<int>(singleton_indices(spec).size());
    const double total = static_cast<double>(budget);
    if (tau_cap <= 0) tau_cap = static_cast<int>(std::min<Index>(spec.dim_local * spec.dim_local, 6));
    int word_cap = 0;
    while (word_cap < tau_cap && word_cost(singles, word_cap + 1) <= total) ++word_cap;
    const double remaining = total - word_cost(singles, word_cap);
    int block_cap = 0;
    while (block_cap < tau_cap && block_cost(spec, block_cap + 1) <= remaining) ++block_cap;
    return {word_cap, block_cap};
}

InvariantSignature fingerprint(const DensityMatrix& rho, const SpectralDecomposition& spec, const Tolerances& tol,
                               int word_cap, int block_cap) {
    const int singles_count = static_cast<int>(singleton_indices(spec).size());
    const double cost = word_cost(singles_count, word_cap) + block_cost(spec, block_cap);
    if (cost > static_cast<double>(tol.word_budget)) {
        throw Error(ErrorCode::BudgetExceeded, "fingerprint needs " + std::to_string(static_cast<long long>(cost)) +
                                                   " word evaluations, budget " + std::to_string(tol.word_budget));
    }
    InvariantSignature sig;
    sig.dim_local = spec.dim_local;
    sig.rank = spec.rank();
    sig.eigenvalues = spec.eigenvalues;
    sig.blocks = spec.blocks;
    sig.power_traces = power_traces(rho);
    sig.word_length_cap = word_cap;
    sig.block_length_cap = block_cap;

    const WordEvaluator left(spec, Side::Left);
    const std::vector<int> singles = singleton_indices(spec);
    if (!singles.empty() && word_cap > 0) {
        std::vector<Word> words = enumerate_balanced_words(singles_count, word_cap, tol.word_budget);
        for (Word& w : words) {
            for (auto& l : w.letters) {
                l.first = singles[static_cast<std::size_t>(l.first)];
                l.second = singles[static_cast<std::size_t>(l.second)];
            }
        }
        const std::vector<Complex> values = left.traces(words);
        sig.balanced_words.reserve(words.size());
        for (std::size_t k = 0; k < words.size(); ++k) sig.balanced_words.emplace_back(std::move(words[k]), values[k]);
    }
    if (block_cap > 0 && !spec.nondegenerate()) {
        const WordEvaluator right(spec, Side::Right);
        for (const auto& b : spec.blocks) {
            if (b.size() < 2) continue;
            for (const Side side : {Side::Left, Side::Right}) {
                const WordEvaluator& eval = side == Side::Left ? left : right;
                for (int len = 1; len <= block_cap; ++len) {
                    for (const auto& p : cached_patterns(len)) {
                        sig.block_invariants.emplace_back(block_key(b, side, p), block_invariant_with(eval, b, p));
                    }
                }
            }
        }
    }
    return sig;
}

InvariantSignature fingerprint(const DensityMatrix& rho, const Tolerances& tol, int tau_cap) {
    const SpectralDecomposition spec = spectral_decompose(rho, tol);
    if (tau_cap > 0) return fingerprint(rho, spec, tol, tau_cap, tau_cap);
    const auto [word_cap, block_cap] = affordable_caps(spec, 0, tol.word_budget);
    return fingerprint(rho, spec, tol, word_cap, block_cap);
}

bool invariants_agree(Complex a, Complex b, double eps) {
    return std::abs(a - b) <= eps * std::max({1.0, std::abs(a), std::abs(b)});
}

namespace {

std::string key_text(const Word& w) { return w.to_string(); }
std::string key_text(const std::string& s) { return s; }

}  // namespace

SignatureComparison compare_signatures(const InvariantSignature& a, const InvariantSignature& b, double eps_inv) {
    using Kind = SignatureComparison::Kind;
    if (a.power_traces.size() != b.power_traces.size()) {
        return {Kind::StructureMismatch, "local_dim", Complex(static_cast<double>(a.dim_local)),
                Complex(static_cast<double>(b.dim_local))};
    }
    for (std::size_t s = 0; s < a.power_traces.size(); ++s) {
        if (!invariants_agree(a.power_traces[s], b.power_traces[s], eps_inv)) {
            return {Kind::ValueMismatch, "J^" + std::to_string(s + 1), a.power_traces[s], b.power_traces[s]};
        }
    }
    if (a.rank != b.rank) {
        return {Kind::StructureMismatch, "rank", Complex(a.rank), Complex(b.rank)};
    }
    if (a.blocks != b.blocks) {
        return {Kind::StructureMismatch, "blocks", Complex(static_cast<double>(a.blocks.size())),
                Complex(static_cast<double>(b.blocks.size()))};
    }
    auto compare_lists = [&](const auto& x, const auto& y, const char* what) -> SignatureComparison {
        const std::size_t common = std::min(x.size(), y.size());
        for (std::size_t k = 0; k < common; ++k) {
            if (!(x[k].first == y[k].first)) return {Kind::StructureMismatch, what, {}, {}};
            if (!invariants_agree(x[k].second, y[k].second, eps_inv)) {
                return {Kind::ValueMismatch, key_text(x[k].first), x[k].second, y[k].second};
            }
        }
        return {};
    };
    if (auto r = compare_lists(a.balanced_words, b.balanced_words, "balanced_words"); r.kind != Kind::Match) return r;
    if (auto r = compare_lists(a.block_invariants, b.block_invariants, "block_invariants"); r.kind != Kind::Match) return r;
    return {};
}

}  // namespace luequiv
