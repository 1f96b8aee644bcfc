#pragma once
// Weingarten calculus and the label algebra behind exact moment computations.
//
// A moment operator is stored in label form
//     Φ(Z) = Σ_{x,y} N(x,y) · tr̂(O_y† Z) · O_x,       tr̂ = tr / D^k,
// where x and y range over parametrised subgroups of the per-region label groups
// (see LabelSpace). The Choi operator of Φ is D^{-k} Σ N(x,y) O_x ⊗ conj(O_y).
// With the normalised trace the approximate twirl has N = δ and the exact twirl
// has N = Γ̂⁺, the pseudo-inverse of the normalised Gram matrix.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "symlab/common.hpp"
#include "symlab/groups.hpp"
#include "symlab/wreath.hpp"

namespace symlab {

// ---------------------------------------------------------------- Weingarten

struct WeingartenTable {
  int k = 0;
  long D = 0;
  std::vector<std::vector<int>> cycle_types;  // one per conjugacy class
  std::vector<double> values;                 // Wg per class
  std::vector<std::string> exact;             // rational strings ("" in float mode)
  bool exact_mode = false;
  double value(const Perm& s) const;
};

/// Inverts the S_k Gram matrix D^{#cyc(σ⁻¹τ)} in the class algebra.
/// Exact rational arithmetic when D^k < 2^63. Requires 1 ≤ k ≤ D and k ≤ 7.
WeingartenTable weingarten_table(int k, long D);

/// tr(O_a† O_b) for two labels on a regular region of dimension D_r
/// (product over cycles of D_r·δ[cycle product = e]).
double cycle_trace(const WreathGroup& W, int a, int b, double D_r);

/// Dense fallback: tr(σ⁻¹ R_g⁻¹ R_h τ) for arbitrary per-copy matrices.
cplx cycle_trace_dense(const std::vector<Mat>& A, const Perm& sa, const std::vector<Mat>& B,
                       const Perm& sb);

// ---------------------------------------------------------------- label spaces

/// A subgroup of W^R parametrised by independent blocks: region r carries
/// twist_r(f_{block(r)}) where twist_r is an automorphism of W (or the identity).
struct LabelSpace {
  int nblocks = 1;
  std::vector<int> region_block;
  std::vector<int> region_twist;  // -1 = identity, else index into LabelLayout::twists
};

/// Where the k copies of each label region live in the physical tensor product.
struct SlotMap {
  int copies = 1;
  std::vector<int> phys_dims;                      // per physical region (one copy)
  std::vector<std::vector<std::pair<int, int>>> slots;  // [label region][slot] -> (copy, phys region)
  std::vector<std::vector<std::vector<int>>> rep_maps;  // [phys region][g] -> digit permutation
};

struct LabelLayout {
  std::shared_ptr<const WreathGroup> W;
  std::vector<double> region_dim;  // D_r per label region
  std::vector<std::vector<int>> twists;
  LabelSpace X, Y;
  /// Invariance group C ⊂ X ∩ Y as (X index, Y index) pairs; identity first.
  std::vector<std::pair<long, long>> invariance;
  /// Optional physical embedding for dense oracles.
  std::shared_ptr<SlotMap> slots;

  long size_x() const;
  long size_y() const;
  long encode(const LabelSpace& s, const std::vector<int>& blocks) const;
  std::vector<int> decode(const LabelSpace& s, long idx) const;
  /// Per-region labels of an element.
  std::vector<int> regions_of(const LabelSpace& s, long idx) const;
  /// Π_r tr̂_r(O_r).
  double normalized_trace(const LabelSpace& s, long idx) const;
};

/// Choi coefficients N over X × Y (real for regular representations).
struct ChoiCoefficients {
  std::shared_ptr<const LabelLayout> layout;
  RMat N;
  bool bound_warning = false;  // approximate twirl outside its guarantee regime
};

/// Digit permutation of R_g on `sites` regular sites (with ancilla), site 0 most significant.
std::vector<std::vector<int>> regular_digit_maps(const FiniteGroup& G, int ancilla_dim, int sites);

/// Builds a single-region layout with X = Y = W and invariance group W.
std::shared_ptr<LabelLayout> single_block_layout(const FiniteGroup& G, int k, int n_sites,
                                                 int ancilla_dim = 1);

/// Normalised Gram matrix Γ̂(w,w') = Π_r tr̂_r(O_w⁻¹ O_w') over the diagonal labels.
RMat diagonal_gram(const WreathGroup& W, const std::vector<double>& region_dims);

/// Moore-Penrose pseudo-inverse of a symmetric matrix (eigenvalue cutoff rel 1e-12).
RMat symmetric_pinv(const RMat& A);

ChoiCoefficients exact_symmetric_haar_choi(const SectorDecomposition& decomp, int k,
                                           int ancilla_dim = 1);
ChoiCoefficients approx_symmetric_haar_choi(const FiniteGroup& G, int n, int k,
                                            int ancilla_dim = 1);

/// Self-composition Φ∘Φ in coefficient space.
ChoiCoefficients compose_with_self(const ChoiCoefficients& c);

// ---------------------------------------------------------------- relative error

/// The corner algebra P·span{O(x,y)}·P, P the projector onto C-invariants.
/// Basis elements are indexed by double cosets of X × Y under (x,y) ↦ (wxw', wyw').
class CornerAlgebra {
 public:
  explicit CornerAlgebra(std::shared_ptr<const LabelLayout> layout, long max_cosets = 4096);
  long num_cosets() const { return ncos_; }
  /// Coset coefficient vector r_c = Σ_{(x,y)∈c} N(x,y).
  RVec reduce(const RMat& N) const;
  /// Left-multiplication matrix of Σ r_c e_c in the coset basis.
  RMat left_matrix(const RVec& r) const;
  const RMat& gram() const { return gram_; }
  const RVec& traces() const { return trace_; }

 private:
  std::shared_ptr<const LabelLayout> L_;
  long nx_, ny_, ncos_ = 0;
  std::vector<int> coset_;  // pair (x,y) -> coset id
  std::vector<std::pair<long, long>> rep_;
  std::vector<std::vector<int>> xblocks_, yblocks_;  // block digits of representatives
  RMat gram_;
  RVec trace_;
};

struct RelativeErrorResult {
  double epsilon = 0;
  double min_ratio = 1, max_ratio = 1;  // extreme generalized eigenvalues
  double leakage = 0;
  long cosets = 0;
};

/// Smallest ε with (1−ε)Φ_H ⪯ Φ_E ⪯ (1+ε)Φ_H in the completely positive order.
RelativeErrorResult relative_error(const ChoiCoefficients& E, const ChoiCoefficients& H,
                                   const CornerAlgebra* corner = nullptr);

// ---------------------------------------------------------------- dense oracles

/// Dense k-copy operator O_x for an element of X or Y (needs layout.slots).
Mat dense_label_operator(const LabelLayout& L, const LabelSpace& s, long idx);
/// Φ(A) computed densely from coefficients.
Mat apply_channel_dense(const ChoiCoefficients& c, const Mat& A);
/// Choi operator D^{-k} Σ N(x,y) O_x ⊗ conj(O_y).
Mat choi_dense(const ChoiCoefficients& c);
/// Relative error between two dense Choi operators (support of H).
double relative_error_dense(const Mat& JE, const Mat& JH);

struct MonteCarloResult {
  Mat mean;
  RMat stderr_entry;      // per-entry standard error
  double frobenius_sigma; // sqrt(Σ var / N)
  long draws = 0;
};

using UnitarySampler = std::function<Mat(Rng&)>;

/// E[U^{⊗k} A U^{†⊗k}] by sampling; A is applied through its SVD factors.
MonteCarloResult monte_carlo_twirl(const UnitarySampler& sampler, const Mat& A, int k, long N,
                                   Rng& rng);
/// E[|vec U^{⊗k}⟩⟨vec U^{⊗k}|], the unnormalised Choi operator.
MonteCarloResult monte_carlo_choi(const UnitarySampler& sampler, int k, long N, Rng& rng);

/// Applies U to every copy of a k-copy vector.
Vec apply_tensor_power(const Mat& U, const Vec& v, int k);

/// JSON dump: {"labels_x": n, "labels_y": m, "coeffs": [[x, y, re, im], ...]}.
std::string choi_to_json(const ChoiCoefficients& c, double cutoff = 0.0);

}  // namespace symlab
