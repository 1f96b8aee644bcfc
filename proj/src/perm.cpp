#include "symlab/perm.hpp"

#include <algorithm>
#include <stdexcept>

#include "symlab/common.hpp"

namespace symlab {

Perm perm_identity(int K) {
  Perm p(K);
  for (int i = 0; i < K; ++i) p[i] = i;
  return p;
}

Perm perm_compose(const Perm& a, const Perm& b) {
  Perm c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[b[i]];
  return c;
}

Perm perm_inverse(const Perm& a) {
  Perm c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[a[i]] = static_cast<int>(i);
  return c;
}

int perm_cycles(const Perm& a) {
  std::vector<char> seen(a.size(), 0);
  int c = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (seen[i]) continue;
    ++c;
    for (size_t j = i; !seen[j]; j = a[j]) seen[j] = 1;
  }
  return c;
}

std::vector<int> perm_cycle_type(const Perm& a) {
  std::vector<char> seen(a.size(), 0);
  std::vector<int> t;
  for (size_t i = 0; i < a.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (size_t j = i; !seen[j]; j = a[j]) { seen[j] = 1; ++len; }
    t.push_back(len);
  }
  std::sort(t.rbegin(), t.rend());
  return t;
}

std::vector<Perm> all_perms(int K) {
  std::vector<Perm> out;
  Perm p = perm_identity(K);
  do out.push_back(p); while (std::next_permutation(p.begin(), p.end()));
  return out;
}

long perm_rank(const Perm& a) {
  const int K = static_cast<int>(a.size());
  long r = 0;
  for (int i = 0; i < K; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < K; ++j)
      if (a[j] < a[i]) ++smaller;
    r = r * (K - i) + smaller;
  }
  return r;
}

SymmetricGroup::SymmetricGroup(int K) : K_(K) {
  if (K < 1 || K > 7) throw CapacityError("SymmetricGroup supports 1 <= K <= 7");
  elems_ = all_perms(K);
  const size_t n = elems_.size();
  table_.resize(n * n);
  for (size_t a = 0; a < n; ++a)
    for (size_t b = 0; b < n; ++b)
      table_[a * n + b] = static_cast<std::uint16_t>(perm_rank(perm_compose(elems_[a], elems_[b])));
  inv_.resize(n);
  cyc_.resize(n);
  for (size_t a = 0; a < n; ++a) {
    inv_[a] = static_cast<int>(perm_rank(perm_inverse(elems_[a])));
    cyc_[a] = perm_cycles(elems_[a]);
  }
}

Perm translation_perm(int m, int k) {
  Perm p(m * k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < m; ++i) p[j * m + i] = j * m + (i + 1) % m;
  return p;
}

}  // namespace symlab
