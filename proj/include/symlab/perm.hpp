#pragma once
// Permutations of K symbols stored as image arrays: σ(i) = p[i].
// Composition (στ)(i) = σ(τ(i)).

#include <cstdint>
#include <vector>

namespace symlab {

using Perm = std::vector<int>;

Perm perm_identity(int K);
Perm perm_compose(const Perm& a, const Perm& b);
Perm perm_inverse(const Perm& a);
int perm_cycles(const Perm& a);
/// Cayley distance |σ| = K − #cycles.
inline int perm_distance(const Perm& a) { return static_cast<int>(a.size()) - perm_cycles(a); }
/// Cycle type as a descending partition.
std::vector<int> perm_cycle_type(const Perm& a);
/// All permutations in lexicographic order (identity first).
std::vector<Perm> all_perms(int K);
/// Lexicographic rank, consistent with all_perms.
long perm_rank(const Perm& a);

/// S_K with a dense multiplication table (K ≤ 7).
class SymmetricGroup {
 public:
  explicit SymmetricGroup(int K);
  int K() const { return K_; }
  int size() const { return static_cast<int>(elems_.size()); }
  const Perm& elem(int i) const { return elems_[i]; }
  int mul(int a, int b) const { return static_cast<int>(table_[static_cast<size_t>(a) * size() + b]); }
  int inv(int a) const { return inv_[a]; }
  int cycles(int a) const { return cyc_[a]; }
  int index(const Perm& p) const { return static_cast<int>(perm_rank(p)); }

 private:
  int K_;
  std::vector<Perm> elems_;
  std::vector<std::uint16_t> table_;
  std::vector<int> inv_, cyc_;
};

/// Translation by one patch within each copy: K = m·k slots, slot (i, j) = j·m + i
/// (patch i, copy j) is sent to ((i+1) mod m, j).
Perm translation_perm(int m, int k);

}  // namespace symlab
