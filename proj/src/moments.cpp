#include "symlab/moments.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>
#include "json.hpp"

#include "symlab/parallel.hpp"
#include "symlab/tensor_core.hpp"

namespace symlab {

namespace mp = boost::multiprecision;

// ---------------------------------------------------------------- Weingarten

double WeingartenTable::value(const Perm& s) const {
  auto t = perm_cycle_type(s);
  for (size_t c = 0; c < cycle_types.size(); ++c)
    if (cycle_types[c] == t) return values[c];
  throw std::invalid_argument("permutation size does not match table");
}

WeingartenTable weingarten_table(int k, long D) {
  if (k < 1 || k > 7) throw CapacityError("weingarten_table supports 1 <= k <= 7");
  if (k > D) throw std::invalid_argument("k > D: Weingarten inverse undefined in this regime");
  auto perms = all_perms(k);
  std::map<std::vector<int>, int> cls;
  std::vector<int> cls_of(perms.size());
  std::vector<Perm> rep;
  WeingartenTable t;
  t.k = k;
  t.D = D;
  for (size_t i = 0; i < perms.size(); ++i) {
    auto ct = perm_cycle_type(perms[i]);
    auto it = cls.find(ct);
    if (it == cls.end()) {
      it = cls.emplace(ct, static_cast<int>(rep.size())).first;
      rep.push_back(perms[i]);
      t.cycle_types.push_back(ct);
    }
    cls_of[i] = it->second;
  }
  const int nc = static_cast<int>(rep.size());
  // M(c,a) = Σ_{u∈a} D^{#cyc(u⁻¹ρ_c)}; count exponents first.
  std::vector<std::vector<std::vector<long>>> cnt(nc, std::vector<std::vector<long>>(nc, std::vector<long>(k + 1, 0)));
  for (int c = 0; c < nc; ++c)
    for (size_t u = 0; u < perms.size(); ++u)
      cnt[c][cls_of[u]][perm_cycles(perm_compose(perm_inverse(perms[u]), rep[c]))]++;
  const int id_cls = cls_of[0];
  long double dk = std::pow(static_cast<long double>(D), k);
  t.exact_mode = dk < 9.2e18L;
  if (t.exact_mode) {
    using Q = mp::cpp_rational;
    std::vector<std::vector<Q>> A(nc, std::vector<Q>(nc + 1, Q(0)));
    for (int c = 0; c < nc; ++c) {
      for (int a = 0; a < nc; ++a) {
        mp::cpp_int s = 0, p = 1;
        for (int e = 0; e <= k; ++e) {
          s += p * cnt[c][a][e];
          p *= D;
        }
        A[c][a] = Q(s);
      }
      A[c][nc] = Q(c == id_cls ? 1 : 0);
    }
    for (int col = 0; col < nc; ++col) {
      int piv = col;
      while (piv < nc && A[piv][col] == 0) ++piv;
      if (piv == nc) throw std::runtime_error("singular class Gram matrix");
      std::swap(A[piv], A[col]);
      for (int r = 0; r < nc; ++r) {
        if (r == col || A[r][col] == 0) continue;
        Q f = A[r][col] / A[col][col];
        for (int j = col; j <= nc; ++j) A[r][j] -= f * A[col][j];
      }
    }
    for (int c = 0; c < nc; ++c) {
      Q v = A[c][nc] / A[c][c];
      t.values.push_back(static_cast<double>(v));
      t.exact.push_back(v.str());
    }
  } else {
    RMat M(nc, nc);
    RVec b = RVec::Zero(nc);
    for (int c = 0; c < nc; ++c) {
      for (int a = 0; a < nc; ++a) {
        double s = 0;
        for (int e = 0; e <= k; ++e) s += cnt[c][a][e] * std::pow(double(D), e);
        M(c, a) = s;
      }
    }
    b(id_cls) = 1;
    RVec x = M.fullPivLu().solve(b);
    for (int c = 0; c < nc; ++c) {
      t.values.push_back(x(c));
      t.exact.emplace_back();
    }
  }
  return t;
}

double cycle_trace(const WreathGroup& W, int a, int b, double D_r) {
  return std::pow(D_r, W.k()) * W.normalized_character(W.mul(W.inv(a), b), D_r);
}

cplx cycle_trace_dense(const std::vector<Mat>& A, const Perm& sa, const std::vector<Mat>& B,
                       const Perm& sb) {
  if (A.size() != sa.size() || B.size() != sb.size() || A.size() != B.size())
    throw std::invalid_argument("layout mismatch in cycle_trace_dense");
  const int d = static_cast<int>(A[0].rows());
  Mat opA = kron_all(A) * copy_permutation(sa, d);
  Mat opB = kron_all(B) * copy_permutation(sb, d);
  return (opA.adjoint() * opB).trace();
}

// ---------------------------------------------------------------- layouts

long LabelLayout::size_x() const {
  long s = 1;
  for (int b = 0; b < X.nblocks; ++b) s *= W->size();
  return s;
}
long LabelLayout::size_y() const {
  long s = 1;
  for (int b = 0; b < Y.nblocks; ++b) s *= W->size();
  return s;
}

long LabelLayout::encode(const LabelSpace& s, const std::vector<int>& blocks) const {
  long idx = 0;
  for (int b = 0; b < s.nblocks; ++b) idx = idx * W->size() + blocks[b];
  return idx;
}

std::vector<int> LabelLayout::decode(const LabelSpace& s, long idx) const {
  std::vector<int> blocks(s.nblocks);
  for (int b = s.nblocks - 1; b >= 0; --b) {
    blocks[b] = static_cast<int>(idx % W->size());
    idx /= W->size();
  }
  return blocks;
}

std::vector<int> LabelLayout::regions_of(const LabelSpace& s, long idx) const {
  auto blocks = decode(s, idx);
  std::vector<int> out(region_dim.size());
  for (size_t r = 0; r < region_dim.size(); ++r) {
    int w = blocks[s.region_block[r]];
    out[r] = s.region_twist[r] < 0 ? w : twists[s.region_twist[r]][w];
  }
  return out;
}

double LabelLayout::normalized_trace(const LabelSpace& s, long idx) const {
  auto lab = regions_of(s, idx);
  double t = 1;
  for (size_t r = 0; r < lab.size() && t != 0; ++r) t *= W->normalized_character(lab[r], region_dim[r]);
  return t;
}

std::vector<std::vector<int>> regular_digit_maps(const FiniteGroup& G, int ancilla, int sites) {
  const int q = G.order(), sd = q * ancilla;
  long D = 1;
  for (int i = 0; i < sites; ++i) D *= sd;
  std::vector<std::vector<int>> maps(q, std::vector<int>(D));
  for (int g = 0; g < q; ++g)
    for (long x = 0; x < D; ++x) {
      long r = x, y = 0, mulp = 1;
      for (int i = 0; i < sites; ++i) {
        int digit = static_cast<int>(r % sd);
        r /= sd;
        int h = digit / ancilla, a = digit % ancilla;
        y += (G.mul(g, h) * ancilla + a) * mulp;
        mulp *= sd;
      }
      maps[g][x] = static_cast<int>(y);
    }
  return maps;
}

std::shared_ptr<LabelLayout> single_block_layout(const FiniteGroup& G, int k, int n_sites,
                                                 int ancilla_dim) {
  auto L = std::make_shared<LabelLayout>();
  L->W = std::make_shared<WreathGroup>(G, k);
  double D = std::pow(double(G.order() * ancilla_dim), n_sites);
  L->region_dim = {D};
  L->X = LabelSpace{1, {0}, {-1}};
  L->Y = L->X;
  for (int w = 0; w < L->W->size(); ++w) L->invariance.emplace_back(w, w);
  if (D <= kDenseBudget) {
    auto sm = std::make_shared<SlotMap>();
    sm->copies = k;
    sm->phys_dims = {static_cast<int>(D)};
    sm->slots.resize(1);
    for (int j = 0; j < k; ++j) sm->slots[0].emplace_back(j, 0);
    sm->rep_maps = {regular_digit_maps(G, ancilla_dim, n_sites)};
    L->slots = sm;
  }
  return L;
}

RMat diagonal_gram(const WreathGroup& W, const std::vector<double>& region_dims) {
  const int n = W.size();
  RVec chi(n);
  for (int w = 0; w < n; ++w) {
    double t = 1;
    for (double d : region_dims) t *= W.normalized_character(w, d);
    chi(w) = t;
  }
  RMat G(n, n);
  for (int a = 0; a < n; ++a) {
    int ai = W.inv(a);
    for (int b = 0; b < n; ++b) G(a, b) = chi(W.mul(ai, b));
  }
  return G;
}

RMat symmetric_pinv(const RMat& A) {
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (A + A.transpose()));
  const RVec& ev = es.eigenvalues();
  double mx = ev.cwiseAbs().maxCoeff();
  RVec inv = RVec::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > 1e-12 * mx) inv(i) = 1.0 / ev(i);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

ChoiCoefficients exact_symmetric_haar_choi(const SectorDecomposition& decomp, int k,
                                           int ancilla_dim) {
  for (const auto& s : decomp.sectors)
    if (k > s.multiplicity)
      throw std::invalid_argument("sector " + std::to_string(s.label) + " has multiplicity " +
                                  std::to_string(s.multiplicity) + " < k = " + std::to_string(k));
  ChoiCoefficients c;
  c.layout = single_block_layout(decomp.group, k, decomp.n_sites, ancilla_dim);
  c.N = symmetric_pinv(diagonal_gram(*c.layout->W, c.layout->region_dim));
  return c;
}

ChoiCoefficients approx_symmetric_haar_choi(const FiniteGroup& G, int n, int k, int ancilla_dim) {
  ChoiCoefficients c;
  c.layout = single_block_layout(G, k, n, ancilla_dim);
  c.N = RMat::Identity(c.layout->W->size(), c.layout->W->size());
  c.bound_warning = double(k) * k > c.layout->region_dim[0] / G.order();
  return c;
}

ChoiCoefficients compose_with_self(const ChoiCoefficients& c) {
  const LabelLayout& L = *c.layout;
  const long nx = L.size_x(), ny = L.size_y();
  std::vector<std::vector<int>> xl(nx), yl(ny);
  for (long x = 0; x < nx; ++x) xl[x] = L.regions_of(L.X, x);
  for (long y = 0; y < ny; ++y) yl[y] = L.regions_of(L.Y, y);
  const WreathGroup& W = *L.W;
  RMat C(ny, nx);
  for (long y = 0; y < ny; ++y)
    for (long x = 0; x < nx; ++x) {
      double t = 1;
      for (size_t r = 0; r < L.region_dim.size() && t != 0; ++r)
        t *= W.normalized_character(W.mul(W.inv(yl[y][r]), xl[x][r]), L.region_dim[r]);
      C(y, x) = t;
    }
  ChoiCoefficients out;
  out.layout = c.layout;
  out.N = c.N * C * c.N;
  return out;
}

// ---------------------------------------------------------------- corner algebra

CornerAlgebra::CornerAlgebra(std::shared_ptr<const LabelLayout> layout, long max_cosets)
    : L_(std::move(layout)) {
  const LabelLayout& L = *L_;
  const WreathGroup& W = *L.W;
  nx_ = L.size_x();
  ny_ = L.size_y();
  if (static_cast<double>(nx_) * ny_ > 4e7) throw CapacityError("label pair space exceeds budget");
  const long nc = static_cast<long>(L.invariance.size());
  std::vector<std::vector<int>> cx(nc), cy(nc);
  for (long c = 0; c < nc; ++c) {
    cx[c] = L.decode(L.X, L.invariance[c].first);
    cy[c] = L.decode(L.Y, L.invariance[c].second);
  }
  auto table = [&](const LabelSpace& s, long n, bool left) {
    std::vector<std::vector<long>> t(nc, std::vector<long>(n));
    for (long c = 0; c < nc; ++c) {
      const auto& wb = (&s == &L.X) ? cx[c] : cy[c];
      for (long i = 0; i < n; ++i) {
        auto b = L.decode(s, i);
        for (int j = 0; j < s.nblocks; ++j) b[j] = left ? W.mul(wb[j], b[j]) : W.mul(b[j], wb[j]);
        t[c][i] = L.encode(s, b);
      }
    }
    return t;
  };
  auto lx = table(L.X, nx_, true), rx = table(L.X, nx_, false);
  auto ly = table(L.Y, ny_, true), ry = table(L.Y, ny_, false);
  coset_.assign(static_cast<size_t>(nx_ * ny_), -1);
  std::vector<long> stack;
  for (long p = 0; p < nx_ * ny_; ++p) {
    if (coset_[p] >= 0) continue;
    if (ncos_ >= max_cosets) throw CapacityError("corner algebra exceeds " + std::to_string(max_cosets) + " cosets");
    const int id = static_cast<int>(ncos_++);
    rep_.emplace_back(p / ny_, p % ny_);
    coset_[p] = id;
    stack.push_back(p);
    while (!stack.empty()) {
      long q = stack.back();
      stack.pop_back();
      long x = q / ny_, y = q % ny_;
      for (long c = 0; c < nc; ++c) {
        long a = lx[c][x] * ny_ + ly[c][y];
        if (coset_[a] < 0) { coset_[a] = id; stack.push_back(a); }
        long b = rx[c][x] * ny_ + ry[c][y];
        if (coset_[b] < 0) { coset_[b] = id; stack.push_back(b); }
      }
    }
  }
  for (const auto& [x, y] : rep_) {
    xblocks_.push_back(L.decode(L.X, x));
    yblocks_.push_back(L.decode(L.Y, y));
  }
  std::vector<double> chx(nx_), chy(ny_);
  for (long x = 0; x < nx_; ++x) chx[x] = L.normalized_trace(L.X, x);
  for (long y = 0; y < ny_; ++y) chy[y] = L.normalized_trace(L.Y, y);
  trace_ = RVec::Zero(ncos_);
  for (long d = 0; d < ncos_; ++d) {
    double s = 0;
    for (long c = 0; c < nc; ++c) s += chx[lx[c][rep_[d].first]] * chy[ly[c][rep_[d].second]];
    trace_(d) = s / nc;
  }
  gram_ = RMat::Zero(ncos_, ncos_);
  const int bx = L.X.nblocks, by = L.Y.nblocks;
  std::vector<int> ux(bx), uy(by);
  for (long a = 0; a < ncos_; ++a) {
    for (long c = 0; c < nc; ++c) {
      for (int j = 0; j < bx; ++j) ux[j] = W.mul(W.inv(xblocks_[a][j]), cx[c][j]);
      for (int j = 0; j < by; ++j) uy[j] = W.mul(W.inv(yblocks_[a][j]), cy[c][j]);
      for (long b = a; b < ncos_; ++b) {
        long xi = 0, yi = 0;
        for (int j = 0; j < bx; ++j) xi = xi * W.size() + W.mul(ux[j], xblocks_[b][j]);
        for (int j = 0; j < by; ++j) yi = yi * W.size() + W.mul(uy[j], yblocks_[b][j]);
        gram_(a, b) += trace_(coset_[xi * ny_ + yi]);
      }
    }
  }
  for (long a = 0; a < ncos_; ++a)
    for (long b = a; b < ncos_; ++b) {
      gram_(a, b) /= nc;
      gram_(b, a) = gram_(a, b);
    }
}

RVec CornerAlgebra::reduce(const RMat& N) const {
  if (N.rows() != nx_ || N.cols() != ny_) throw std::invalid_argument("coefficient shape mismatch");
  RVec r = RVec::Zero(ncos_);
  for (long x = 0; x < nx_; ++x)
    for (long y = 0; y < ny_; ++y)
      if (N(x, y) != 0) r(coset_[x * ny_ + y]) += N(x, y);
  return r;
}

RMat CornerAlgebra::left_matrix(const RVec& r) const {
  const LabelLayout& L = *L_;
  const WreathGroup& W = *L.W;
  const long nc = static_cast<long>(L.invariance.size());
  const int bx = L.X.nblocks, by = L.Y.nblocks;
  std::vector<std::vector<int>> cx(nc), cy(nc);
  for (long c = 0; c < nc; ++c) {
    cx[c] = L.decode(L.X, L.invariance[c].first);
    cy[c] = L.decode(L.Y, L.invariance[c].second);
  }
  RMat M = RMat::Zero(ncos_, ncos_);
  std::vector<int> ux(bx), uy(by);
  for (long a = 0; a < ncos_; ++a) {
    if (r(a) == 0) continue;
    const double wgt = r(a) / nc;
    for (long c = 0; c < nc; ++c) {
      for (int j = 0; j < bx; ++j) ux[j] = W.mul(xblocks_[a][j], cx[c][j]);
      for (int j = 0; j < by; ++j) uy[j] = W.mul(yblocks_[a][j], cy[c][j]);
      for (long b = 0; b < ncos_; ++b) {
        long xi = 0, yi = 0;
        for (int j = 0; j < bx; ++j) xi = xi * W.size() + W.mul(ux[j], xblocks_[b][j]);
        for (int j = 0; j < by; ++j) yi = yi * W.size() + W.mul(uy[j], yblocks_[b][j]);
        M(coset_[xi * ny_ + yi], b) += wgt;
      }
    }
  }
  return M;
}

RelativeErrorResult relative_error(const ChoiCoefficients& E, const ChoiCoefficients& H,
                                   const CornerAlgebra* corner) {
  if (E.layout != H.layout) throw std::invalid_argument("Choi coefficients use different layouts");
  std::unique_ptr<CornerAlgebra> own;
  if (!corner) {
    own = std::make_unique<CornerAlgebra>(E.layout);
    corner = own.get();
  }
  RelativeErrorResult res;
  res.cosets = corner->num_cosets();
  const RMat& G = corner->gram();
  Eigen::SelfAdjointEigenSolver<RMat> eg(G);
  const RVec& gv = eg.eigenvalues();
  const double gmax = gv.cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < gv.size(); ++i)
    if (gv(i) > 1e-12 * gmax) keep.push_back(static_cast<int>(i));
  RMat T(G.rows(), keep.size());
  for (size_t j = 0; j < keep.size(); ++j)
    T.col(j) = eg.eigenvectors().col(keep[j]) / std::sqrt(gv(keep[j]));
  auto tilde = [&](const ChoiCoefficients& c) {
    RMat Lm = corner->left_matrix(corner->reduce(c.N));
    RMat t = T.transpose() * G * Lm * T;
    return RMat(0.5 * (t + t.transpose()));
  };
  RMat Ht = tilde(H), Et = tilde(E);
  Eigen::SelfAdjointEigenSolver<RMat> eh(Ht);
  const RVec& hv = eh.eigenvalues();
  const double hmax = hv.cwiseAbs().maxCoeff();
  std::vector<int> rk;
  for (Eigen::Index i = 0; i < hv.size(); ++i) {
    if (hv(i) < -1e-9 * hmax) throw std::runtime_error("reference moment is not positive semidefinite");
    if (hv(i) > 1e-10 * hmax) rk.push_back(static_cast<int>(i));
  }
  RMat Q(Ht.rows(), rk.size());
  RVec hs(rk.size());
  for (size_t j = 0; j < rk.size(); ++j) {
    Q.col(j) = eh.eigenvectors().col(rk[j]);
    hs(j) = 1.0 / std::sqrt(hv(rk[j]));
  }
  RMat proj = Q * Q.transpose();
  RMat inside = proj * Et * proj;
  double en = Et.norm();
  res.leakage = en > 0 ? (Et - inside).norm() / en : 0.0;
  if (res.leakage > 1e-8) throw SupportLeakageError("ensemble moment leaks outside the reference support");
  RMat M = hs.asDiagonal() * (Q.transpose() * Et * Q) * hs.asDiagonal();
  Eigen::SelfAdjointEigenSolver<RMat> em(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  res.min_ratio = em.eigenvalues().minCoeff();
  res.max_ratio = em.eigenvalues().maxCoeff();
  res.epsilon = std::max(std::abs(res.min_ratio - 1), std::abs(res.max_ratio - 1));
  return res;
}

// ---------------------------------------------------------------- dense oracles

namespace {

std::vector<long> label_image(const LabelLayout& L, const LabelSpace& s, long idx) {
  if (!L.slots) throw CapacityError("layout has no dense embedding");
  const SlotMap& sm = *L.slots;
  const int R = static_cast<int>(sm.phys_dims.size());
  long Dtot = 1;
  for (int c = 0; c < sm.copies; ++c)
    for (int r = 0; r < R; ++r) Dtot *= sm.phys_dims[r];
  if (Dtot > kDenseBudget) throw CapacityError("dense k-copy dimension exceeds budget");
  auto lab = L.regions_of(s, idx);
  std::vector<long> img(Dtot);
  std::vector<int> d(sm.copies * R), e(sm.copies * R);
  for (long i = 0; i < Dtot; ++i) {
    long t = i;
    for (int p = sm.copies * R - 1; p >= 0; --p) {
      d[p] = static_cast<int>(t % sm.phys_dims[p % R]);
      t /= sm.phys_dims[p % R];
    }
    for (size_t lr = 0; lr < sm.slots.size(); ++lr) {
      auto g = L.W->gvec(lab[lr]);
      const Perm& sg = L.W->perm(lab[lr]);
      for (size_t slot = 0; slot < sm.slots[lr].size(); ++slot) {
        auto [c, r] = sm.slots[lr][slot];
        auto [c2, r2] = sm.slots[lr][sg[slot]];
        e[c2 * R + r2] = sm.rep_maps[r2][g[sg[slot]]][d[c * R + r]];
      }
    }
    long y = 0;
    for (int p = 0; p < sm.copies * R; ++p) y = y * sm.phys_dims[p % R] + e[p];
    img[i] = y;
  }
  return img;
}

}  // namespace

Mat dense_label_operator(const LabelLayout& L, const LabelSpace& s, long idx) {
  auto img = label_image(L, s, idx);
  Mat O = Mat::Zero(img.size(), img.size());
  for (size_t i = 0; i < img.size(); ++i) O(img[i], i) = 1;
  return O;
}

Mat apply_channel_dense(const ChoiCoefficients& c, const Mat& A) {
  const LabelLayout& L = *c.layout;
  const long nx = L.size_x(), ny = L.size_y();
  std::vector<cplx> ty(ny);
  long Dt = 0;
  for (long y = 0; y < ny; ++y) {
    auto img = label_image(L, L.Y, y);
    Dt = static_cast<long>(img.size());
    if (A.rows() != Dt) throw std::invalid_argument("operator dimension mismatch");
    cplx t = 0;
    for (long i = 0; i < Dt; ++i) t += A(img[i], i);
    ty[y] = t / double(Dt);
  }
  Mat out = Mat::Zero(Dt, Dt);
  for (long x = 0; x < nx; ++x) {
    cplx a = 0;
    for (long y = 0; y < ny; ++y) a += c.N(x, y) * ty[y];
    if (a == cplx(0)) continue;
    auto img = label_image(L, L.X, x);
    for (long i = 0; i < Dt; ++i) out(img[i], i) += a;
  }
  return out;
}

Mat choi_dense(const ChoiCoefficients& c) {
  const LabelLayout& L = *c.layout;
  const long nx = L.size_x(), ny = L.size_y();
  std::vector<std::vector<long>> ix(nx), iy(ny);
  for (long x = 0; x < nx; ++x) ix[x] = label_image(L, L.X, x);
  for (long y = 0; y < ny; ++y) iy[y] = label_image(L, L.Y, y);
  const long Dt = static_cast<long>(ix[0].size());
  if (Dt * Dt > kDenseBudget) throw CapacityError("Choi dimension exceeds dense budget");
  Mat J = Mat::Zero(Dt * Dt, Dt * Dt);
  for (long x = 0; x < nx; ++x)
    for (long y = 0; y < ny; ++y) {
      double v = c.N(x, y) / double(Dt);
      if (v == 0) continue;
      for (long i = 0; i < Dt; ++i)
        for (long j = 0; j < Dt; ++j) J(ix[x][i] * Dt + iy[y][j], i * Dt + j) += v;
    }
  return J;
}

double relative_error_dense(const Mat& JE, const Mat& JH) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (JH + JH.adjoint()));
  const RVec& ev = es.eigenvalues();
  double mx = ev.cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > 1e-10 * mx) keep.push_back(static_cast<int>(i));
  Mat V(JH.rows(), keep.size());
  RVec s(keep.size());
  for (size_t j = 0; j < keep.size(); ++j) {
    V.col(j) = es.eigenvectors().col(keep[j]);
    s(j) = 1 / std::sqrt(ev(keep[j]));
  }
  Mat P = V * V.adjoint();
  Mat E = 0.5 * (JE + JE.adjoint());
  double leak = (E - P * E * P).norm() / std::max(E.norm(), 1e-300);
  if (leak > 1e-8) throw SupportLeakageError("dense moment leaks outside the reference support");
  Mat M = s.asDiagonal() * (V.adjoint() * E * V) * s.asDiagonal();
  RVec mv = hermitian_eigenvalues(M);
  return std::max(std::abs(mv.minCoeff() - 1), std::abs(mv.maxCoeff() - 1));
}

Vec apply_tensor_power(const Mat& U, const Vec& v, int k) {
  const long d = U.rows();
  long total = 1;
  for (int i = 0; i < k; ++i) total *= d;
  if (v.size() != total) throw std::invalid_argument("vector size mismatch");
  Vec cur = v;
  long left = 1, right = total / d;
  for (int j = 0; j < k; ++j) {
    Vec nxt(total);
    for (long l = 0; l < left; ++l) {
      // Block for fixed left index: d × right matrix (row-major over (a, r)).
      Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> B(
          cur.data() + l * d * right, d, right);
      Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> O(
          nxt.data() + l * d * right, d, right);
      O.noalias() = U * B;
    }
    cur.swap(nxt);
    left *= d;
    right /= d;
  }
  return cur;
}

namespace {

constexpr int kChunks = 16;

struct Accum {
  Mat sum;
  RMat sumsq;
};

MonteCarloResult finish(std::vector<Accum>& acc, long N) {
  MonteCarloResult r;
  Mat sum = acc[0].sum;
  RMat sq = acc[0].sumsq;
  for (size_t c = 1; c < acc.size(); ++c) {
    sum += acc[c].sum;
    sq += acc[c].sumsq;
  }
  r.draws = N;
  r.mean = sum / double(N);
  RMat var = (sq / double(N) - r.mean.cwiseAbs2()).cwiseMax(0.0);
  r.stderr_entry = (var / double(N)).cwiseSqrt();
  r.frobenius_sigma = std::sqrt(var.sum() / double(N));
  return r;
}

}  // namespace

MonteCarloResult monte_carlo_twirl(const UnitarySampler& sampler, const Mat& A, int k, long N,
                                   Rng& rng) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  const std::uint64_t master = rng();
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  std::vector<int> terms;
  const RVec& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-14 * std::max(1.0, sv(0))) terms.push_back(static_cast<int>(i));
  const long Dk = A.rows();
  std::vector<Accum> acc(kChunks);
  parallel_chunks(kChunks, [&](int chunk) {
    Rng r = stream_rng(master, chunk);
    Accum a{Mat::Zero(Dk, Dk), RMat::Zero(Dk, Dk)};
    Mat left(Dk, terms.size()), right(Dk, terms.size());
    for (long t = chunk; t < N; t += kChunks) {
      Mat U = sampler(r);
      for (size_t j = 0; j < terms.size(); ++j) {
        left.col(j) = sv(terms[j]) * apply_tensor_power(U, svd.matrixU().col(terms[j]), k);
        right.col(j) = apply_tensor_power(U, svd.matrixV().col(terms[j]), k);
      }
      Mat X = left * right.adjoint();
      a.sum += X;
      a.sumsq += X.cwiseAbs2();
    }
    acc[chunk] = std::move(a);
  });
  return finish(acc, N);
}

MonteCarloResult monte_carlo_choi(const UnitarySampler& sampler, int k, long N, Rng& rng) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  const std::uint64_t master = rng();
  Rng probe = stream_rng(master, 999);
  const long d = sampler(probe).rows();
  long Dk = 1;
  for (int i = 0; i < k; ++i) Dk *= d;
  if (Dk * Dk > kDenseBudget) throw CapacityError("Choi dimension exceeds dense budget");
  std::vector<Accum> acc(kChunks);
  parallel_chunks(kChunks, [&](int chunk) {
    Rng r = stream_rng(master, chunk);
    Accum a{Mat::Zero(Dk * Dk, Dk * Dk), RMat::Zero(Dk * Dk, Dk * Dk)};
    for (long t = chunk; t < N; t += kChunks) {
      Mat U = sampler(r);
      Mat Uk = U;
      for (int i = 1; i < k; ++i) Uk = kron(Uk, U);
      Vec v(Dk * Dk);
      for (long i = 0; i < Dk; ++i)
        for (long j = 0; j < Dk; ++j) v(i * Dk + j) = Uk(i, j);
      Mat X = v * v.adjoint();
      a.sum += X;
      a.sumsq += X.cwiseAbs2();
    }
    acc[chunk] = std::move(a);
  });
  return finish(acc, N);
}

std::string choi_to_json(const ChoiCoefficients& c, double cutoff) {
  nlohmann::json j;
  j["labels_x"] = c.layout->size_x();
  j["labels_y"] = c.layout->size_y();
  j["k"] = c.layout->W->k();
  j["group"] = c.layout->W->base().name();
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index x = 0; x < c.N.rows(); ++x)
    for (Eigen::Index y = 0; y < c.N.cols(); ++y)
      if (std::abs(c.N(x, y)) > cutoff) arr.push_back({x, y, c.N(x, y), 0.0});
  j["coeffs"] = arr;
  return j.dump();
}

}  // namespace symlab
