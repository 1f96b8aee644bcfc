#include "symlab/wreath.hpp"

#include <cmath>

#include "symlab/tensor_core.hpp"

namespace symlab {

WreathGroup::WreathGroup(const FiniteGroup& G, int k) : G_(G), k_(k), q_(G.order()) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  S_ = std::make_shared<SymmetricGroup>(k);
  long gp = 1;
  for (int i = 0; i < k; ++i) gp *= q_;
  long total = gp * S_->size();
  if (total > 200000) throw CapacityError("wreath group too large");
  gpow_ = static_cast<int>(gp);
  size_ = static_cast<int>(total);
  inv_.resize(size_);
  cyc_.resize(size_);
  valid_.resize(size_);
  for (int w = 0; w < size_; ++w) {
    auto g = gvec(w);
    const Perm& s = perm(w);
    Perm si = perm_inverse(s);
    std::vector<int> gi(k);
    for (int m = 0; m < k; ++m) gi[m] = G_.inv(g[s[m]]);
    inv_[w] = make(gi, si);
    // Cycle products g_m·g_{σ⁻¹m}·g_{σ⁻²m}⋯ .
    std::vector<char> seen(k, 0);
    int c = 0;
    bool ok = true;
    for (int m = 0; m < k; ++m) {
      if (seen[m]) continue;
      ++c;
      int prod = G_.identity();
      for (int j = m; !seen[j]; j = si[j]) {
        seen[j] = 1;
        prod = G_.mul(prod, g[j]);
      }
      if (prod != G_.identity()) ok = false;
    }
    cyc_[w] = c;
    valid_[w] = ok ? 1 : 0;
  }
  if (static_cast<long>(size_) * size_ <= 30'000'000L) {
    table_.resize(static_cast<size_t>(size_) * size_);
    for (int a = 0; a < size_; ++a)
      for (int b = 0; b < size_; ++b) table_[static_cast<size_t>(a) * size_ + b] = mul_slow(a, b);
  }
}

int WreathGroup::make(const std::vector<int>& g, const Perm& s) const {
  int code = 0;
  for (int m = 0; m < k_; ++m) code = code * q_ + g[m];
  return S_->index(s) * gpow_ + code;
}

std::vector<int> WreathGroup::gvec(int w) const {
  std::vector<int> g(k_);
  int code = w % gpow_;
  for (int m = k_ - 1; m >= 0; --m) { g[m] = code % q_; code /= q_; }
  return g;
}

int WreathGroup::mul_slow(int a, int b) const {
  auto g = gvec(a), h = gvec(b);
  const Perm& s = perm(a);
  Perm si = perm_inverse(s);
  std::vector<int> out(k_);
  for (int m = 0; m < k_; ++m) out[m] = G_.mul(g[m], h[si[m]]);
  return S_->mul(perm_index(a), perm_index(b)) * gpow_ + [&] {
    int code = 0;
    for (int m = 0; m < k_; ++m) code = code * q_ + out[m];
    return code;
  }();
}

double WreathGroup::normalized_character(int w, double D_r) const {
  if (!valid_[w]) return 0.0;
  return std::pow(D_r, cyc_[w] - k_);
}

std::vector<int> WreathGroup::conjugation_by(const Perm& T) const {
  if (static_cast<int>(T.size()) != k_) throw std::invalid_argument("T has wrong size");
  Perm Ti = perm_inverse(T);
  std::vector<int> out(size_);
  for (int w = 0; w < size_; ++w) {
    auto g = gvec(w);
    std::vector<int> h(k_);
    for (int m = 0; m < k_; ++m) h[m] = g[Ti[m]];
    out[w] = make(h, perm_compose(perm_compose(T, perm(w)), Ti));
  }
  return out;
}

Mat WreathGroup::dense(int w, const std::vector<Mat>& region_rep) const {
  auto g = gvec(w);
  std::vector<Mat> f;
  for (int m = 0; m < k_; ++m) f.push_back(region_rep.at(g[m]));
  return kron_all(f) * copy_permutation(perm(w), static_cast<int>(region_rep.at(0).rows()));
}

}  // namespace symlab
