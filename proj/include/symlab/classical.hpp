#pragma once
// Classical scrambling of bit-flip symmetric distributions: covariant random
// permutations on 2ξ-bit patches, fixed-point inputs padded with uniform
// ancilla bits, patchwise distinctness and distinguishing-advantage estimates.

#include <cstdint>
#include <string>
#include <vector>

#include "symlab/common.hpp"

namespace symlab {

using Word = std::uint64_t;

inline Word flip_word(Word x, int w) { return w >= 64 ? ~x : x ^ ((Word(1) << w) - 1); }

/// Bijection on w-bit words with P(x̄) = P(x)‾, x̄ the all-bits flip.
class SymmetricPermutation {
 public:
  SymmetricPermutation() = default;

  /// Uniform over covariant permutations: a random bijection of the 2^{w−1}
  /// flip orbits (representatives have top bit 0) and a random flip per orbit.
  static SymmetricPermutation sample(int w, Rng& rng);
  /// Keyed Feistel network on the (w−1)-bit orbit representative plus a keyed
  /// flip bit; covariant by construction, usable up to w = 32.
  static SymmetricPermutation keyed(int w, std::uint64_t key);
  static SymmetricPermutation identity(int w);
  /// Explicit table, validated for bijectivity and covariance.
  static SymmetricPermutation from_table(int w, std::vector<Word> table);

  int width() const { return w_; }
  bool is_table() const { return !table_.empty(); }
  const std::vector<Word>& table() const { return table_; }
  Word operator()(Word x) const;
  Word inverse(Word y) const;
  /// Exhaustive P(x̄) = P(x)‾ check over all inputs (w ≤ 24).
  bool covariant() const;

 private:
  int w_ = 0;
  std::vector<Word> table_, inv_;
  std::uint64_t key_ = 0;
  Word feistel(Word r, bool inverse) const;
};

enum class FixedPointKind { TrivialUniform, Z2Ssb };
FixedPointKind parse_fixed_point_kind(const std::string& s);  // "trivial_uniform" | "z2_ssb"
std::string to_string(FixedPointKind k);

/// Probabilities over n-bit strings, bit 0 most significant (n ≤ 24).
std::vector<double> fixed_point_distribution(FixedPointKind kind, int n);

/// Single-layer scrambling: m = n/ξ patches, each a covariant permutation of the
/// 2ξ-bit word (system bits high, ancilla bits low).
class ScrambledDistribution {
 public:
  /// Random covariant tables (2ξ ≤ 24) or, with `keyed`, Feistel permutations.
  ScrambledDistribution(FixedPointKind kind, int n, int xi, Rng& rng, bool keyed = false);
  ScrambledDistribution(FixedPointKind kind, int n, int xi, std::vector<SymmetricPermutation> perms);

  FixedPointKind kind() const { return kind_; }
  int n() const { return n_; }
  int xi() const { return xi_; }
  int patches() const { return m_; }
  const SymmetricPermutation& perm(int alpha) const { return perms_.at(alpha); }

  /// One 2n-bit sample as m patch words.
  std::vector<Word> sample(Rng& rng) const;
  /// Exact output distribution over the concatenated patch words (2n ≤ 20).
  std::vector<double> output_distribution() const;
  /// Marginal of the output on the ancilla (low) bits of every patch (n ≤ 10).
  std::vector<double> ancilla_marginal() const;

 private:
  FixedPointKind kind_;
  int n_, xi_, m_;
  std::vector<SymmetricPermutation> perms_;
};

/// f′(y) = (−1)^{bit i of P_α^{−1}(y)} as a ±1 truth table over 2ξ-bit words;
/// bit 0 is the most significant system bit of the patch.
std::vector<int> scrambled_order_parameter(const ScrambledDistribution& d, int alpha, int bit);

/// E[f′_i(patch α)·f′_j(patch β)] by enumeration of the output distribution.
double scrambled_correlator(const ScrambledDistribution& d, int alpha, int i, int beta, int j);

/// Two patch words are symmetry-equal if equal or complementary.
bool symmetry_equal(Word a, Word b, int w);

struct DefectEstimate {
  double defect = 0;   // fraction of batches failing patchwise symmetric distinctness
  double sigma = 0;    // binomial standard error
  double bound = 0;    // m k (k−1) / 2^ξ
  long batches = 0;
};

/// Samples N k-batches of the unscrambled input (covariant permutations preserve
/// symmetric distinctness, so the defect is permutation independent).
DefectEstimate patchwise_distinct_defect(FixedPointKind kind, int k, int xi, int m, long N, Rng& rng);

/// Signed pattern of a k-tuple of words: class of first symmetry-equal index and
/// whether the word is that representative or its complement.
std::vector<int> signed_pattern(const std::vector<Word>& words, int w);

struct Advantage {
  double advantage = 0;   // total-variation distance of the k-batch outputs
  double sigma = 0;       // split-half noise scale; 0 in exact mode
  double bound = 0;       // 4 m k (k−1) / 2^ξ
  bool vacuous = false;   // bound ≥ 1
  std::string mode;       // "exact" or "sampling"
  long draws = 0;
};

/// Distance between the permutation-averaged k-batch output distributions of two
/// scrambled fixed points. Averaged over covariant permutations the output depends
/// on the input only through the per-patch signed patterns, so the distance equals
/// the distance between pattern distributions. Exact mode enumerates (n ≤ 6, ξ ≤ 3,
/// k ≤ 3); sampling mode histograms N batches per kind.
Advantage distinguishability_experiment(FixedPointKind a, FixedPointKind b, int k, int xi, int n, long N,
                                        Rng& rng, bool exact);

/// Pearson χ² over the 224² ordered output pairs at n = 4, ξ = 2, k = 2 for
/// patchwise distinct inputs, with fresh random covariant permutations per draw.
struct UniformityTest {
  double chi2 = 0;
  long cells = 0;
  long draws = 0;
  double z = 0;  // (χ² − df)/√(2 df)
  bool pass = false;  // z < 3.09
};
UniformityTest conditional_uniformity_test(FixedPointKind kind, long N, Rng& rng);

}  // namespace symlab
