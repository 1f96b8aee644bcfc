#pragma once
// The label group G ≀ S_k of operators R_g·P(σ) on k copies of a region.
//
// Element (g, σ) denotes O = (R_{g_0} ⊗ … ⊗ R_{g_{k-1}})·P(σ), where P(σ) moves the
// content of copy j to copy σ(j). Then
//   (g,σ)(h,τ) = (g·(h∘σ⁻¹), στ),   (g,σ)⁻¹ = (g⁻¹∘σ, σ⁻¹).

#include <memory>
#include <vector>

#include "symlab/groups.hpp"
#include "symlab/perm.hpp"

namespace symlab {

class WreathGroup {
 public:
  WreathGroup(const FiniteGroup& G, int k);

  int size() const { return size_; }
  int k() const { return k_; }
  const FiniteGroup& base() const { return G_; }
  const SymmetricGroup& sym() const { return *S_; }

  int make(const std::vector<int>& g, const Perm& s) const;
  std::vector<int> gvec(int w) const;
  int perm_index(int w) const { return w / gpow_; }
  const Perm& perm(int w) const { return S_->elem(perm_index(w)); }

  int mul(int a, int b) const {
    return table_.empty() ? mul_slow(a, b) : table_[static_cast<size_t>(a) * size_ + b];
  }
  int inv(int a) const { return inv_[a]; }
  int identity() const { return 0; }

  /// Number of cycles of σ and whether every cycle product of g equals e.
  int cycles(int w) const { return cyc_[w]; }
  bool cycle_products_trivial(int w) const { return valid_[w] != 0; }

  /// tr(O_w)/D_r^k for a region of dimension D_r carrying a regular representation.
  double normalized_character(int w, double D_r) const;

  /// Table of the automorphism (g,σ) ↦ (g∘T⁻¹, TσT⁻¹), i.e. conjugation by P(T).
  std::vector<int> conjugation_by(const Perm& T) const;

  /// Dense O_w on k copies of a region; `region_rep[g]` is R_g on one copy.
  Mat dense(int w, const std::vector<Mat>& region_rep) const;

 private:
  FiniteGroup G_;
  int k_, q_, gpow_, size_;
  std::shared_ptr<SymmetricGroup> S_;
  std::vector<int> table_, inv_, cyc_;
  std::vector<char> valid_;
  int mul_slow(int a, int b) const;
};

}  // namespace symlab
