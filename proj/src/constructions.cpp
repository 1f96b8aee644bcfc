#include "symlab/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "symlab/parallel.hpp"
#include "symlab/stabilizer.hpp"
#include "symlab/tensor_core.hpp"

namespace symlab {

// ---------------------------------------------------------------- charge ladder

namespace {

void require_abelian(const FiniteGroup& G) {
  if (!G.abelian()) throw UnsupportedError("charge ladder requires an Abelian group");
}

std::vector<int> digits(long idx, int q, int n) {
  std::vector<int> d(n);
  for (int i = n - 1; i >= 0; --i) {
    d[i] = static_cast<int>(idx % q);
    idx /= q;
  }
  return d;
}

long index_of(const std::vector<int>& d, int q) {
  long idx = 0;
  for (int v : d) idx = idx * q + v;
  return idx;
}

}  // namespace

ChargeLadder build_charge_ladder(const FiniteGroup& G, int n) {
  require_abelian(G);
  if (n < 1) throw std::invalid_argument("ladder needs at least one site");
  ChargeLadder L;
  L.group = G;
  L.n_sites = n;
  for (int i = 0; i + 1 < n; ++i) L.gates.emplace_back(i, i + 1);
  return L;
}

std::vector<int> ChargeLadder::apply(const std::vector<int>& x) const {
  if (static_cast<int>(x.size()) != n_sites) throw std::invalid_argument("label length mismatch");
  std::vector<int> y = x;
  for (int v : y)
    if (v < 0 || v >= group.order()) throw std::invalid_argument("charge label out of range");
  for (auto [c, t] : gates) y[t] = group.mul(y[t], y[c]);
  return y;
}

Mat ChargeLadder::matrix() const {
  const int q = group.order();
  const long D = checked_pow(q, n_sites, kDenseBudget);
  Mat W = Mat::Zero(D, D);
  for (long i = 0; i < D; ++i) W(index_of(apply(digits(i, q, n_sites)), q), i) = 1.0;
  return W;
}

Mat charge_basis(const FiniteGroup& G) {
  require_abelian(G);
  const int q = G.order();
  Mat F(q, q);
  for (int x = 0; x < q; ++x)
    for (int h = 0; h < q; ++h) F(h, x) = std::conj(G.abelian_character(x, h)) / std::sqrt(double(q));
  return F;
}

Mat ChargeLadder::full_map() const {
  Mat Fn = kron_all(std::vector<Mat>(n_sites, charge_basis(group)));
  return Fn * matrix() * Fn.adjoint();
}

Mat assemble_sector_random_unitary(const FiniteGroup& G, int n, Rng& rng) {
  require_abelian(G);
  const int q = G.order();
  const long D = checked_pow(q, n, kDenseBudget);
  ChargeLadder L = build_charge_ladder(G, n);
  Mat T = L.matrix() * kron_all(std::vector<Mat>(n, charge_basis(G))).adjoint();
  // Ladder labels put the total charge on the last (least significant) site.
  const long M = D / q;
  Mat block = Mat::Zero(D, D);
  for (int lam = 0; lam < q; ++lam) {
    Mat U = haar_unitary(static_cast<int>(M), rng);
    for (long a = 0; a < M; ++a)
      for (long b = 0; b < M; ++b) block(a * q + lam, b * q + lam) = U(a, b);
  }
  return T.adjoint() * block * T;
}

// ---------------------------------------------------------------- controlled ensembles

namespace {

bool power_of_two(long v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_exact(long v) {
  int r = 0;
  while ((1L << r) < v) ++r;
  return r;
}

void validate(const ControlledEnsembleSpec& s) {
  if (s.variant == ControlledVariant::Pfc) {
    if (s.D < 2) throw std::invalid_argument("pfc needs D >= 2");
  } else if (s.D_left < 2 || s.D_right < 2) {
    throw std::invalid_argument("lrfc needs D_L, D_R >= 2");
  }
  if (s.design == TwoDesignSource::Clifford && !power_of_two(s.system_dim()))
    throw std::invalid_argument("Clifford 2-design needs a power-of-two dimension");
}

// Keyed toy function: three rounds of SplitMix mixing.
std::uint64_t keyed(std::uint64_t key, std::uint64_t tag, std::uint64_t x) {
  std::uint64_t h = splitmix64(key ^ splitmix64(tag));
  for (int r = 0; r < 3; ++r) h = splitmix64(h ^ (x + 0x9E37ULL * r));
  return h;
}

std::vector<long> table_function(long domain, long range, FunctionSource src, std::uint64_t key,
                                 std::uint64_t tag, Rng& rng) {
  std::vector<long> f(domain);
  std::uniform_int_distribution<long> u(0, range - 1);
  for (long x = 0; x < domain; ++x)
    f[x] = src == FunctionSource::Table ? u(rng) : static_cast<long>(keyed(key, tag, x) % range);
  return f;
}

std::vector<long> random_permutation(long D, FunctionSource src, std::uint64_t key, Rng& rng) {
  std::vector<long> p(D);
  std::iota(p.begin(), p.end(), 0L);
  if (src == FunctionSource::Table) {
    std::shuffle(p.begin(), p.end(), rng);
  } else {
    std::vector<std::uint64_t> h(D);
    for (long x = 0; x < D; ++x) h[x] = keyed(key, 0x5045524DULL, x);
    std::stable_sort(p.begin(), p.end(), [&](long a, long b) { return h[a] < h[b]; });
  }
  return p;
}

const cplx kIPow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};

// Permutation π and sign source of U = π·diag(s)·C, with s(x) = (−1)^{f(S_L x)} for lrfc.
std::vector<long> composite_permutation(const ControlledEnsembleSpec& spec, const ControlledParts& p) {
  const long D = spec.system_dim();
  std::vector<long> pi(D);
  if (spec.variant == ControlledVariant::Pfc) return p.P;
  const long DL = spec.D_left, DR = spec.D_right;
  for (long x = 0; x < D; ++x) {
    long xl = x / DR, xr = x % DR;
    xl = (xl + p.fL[xr]) % DL;
    xr = (xr + p.fR[xl]) % DR;
    pi[x] = xl * DR + xr;
  }
  return pi;
}

}  // namespace

bool uses_clifford_design(const ControlledEnsembleSpec& spec) {
  if (spec.design == TwoDesignSource::Haar) return false;
  return power_of_two(spec.system_dim());
}

ControlledParts sample_controlled_parts(const ControlledEnsembleSpec& spec, Rng& rng) {
  validate(spec);
  const long D = spec.system_dim();
  if (2 * D > kDenseBudget) throw CapacityError("controlled unitary exceeds dense budget");
  const std::uint64_t key = spec.functions == FunctionSource::KeyedToy ? rng() : 0;
  ControlledParts p;
  auto f = table_function(D, 2, spec.functions, key, 0x46, rng);
  p.f.assign(f.begin(), f.end());
  if (spec.variant == ControlledVariant::Pfc) {
    p.P = random_permutation(D, spec.functions, key, rng);
  } else {
    p.fL = table_function(spec.D_right, spec.D_left, spec.functions, key, 0x4C, rng);
    p.fR = table_function(spec.D_left, spec.D_right, spec.functions, key, 0x52, rng);
  }
  if (uses_clifford_design(spec)) {
    Clifford c = sample_clifford(log2_exact(D), rng);
    std::uniform_int_distribution<int> ph(0, 3);
    p.C = kIPow[ph(rng)] * c.matrix();
  } else {
    p.C = haar_unitary(static_cast<int>(D), rng);
  }
  return p;
}

Mat assemble_controlled(const ControlledEnsembleSpec& spec, const ControlledParts& parts) {
  validate(spec);
  const long D = spec.system_dim();
  if (2 * D > kDenseBudget) throw CapacityError("controlled unitary exceeds dense budget");
  if (static_cast<long>(parts.f.size()) != D || parts.C.rows() != D || parts.C.cols() != D)
    throw std::invalid_argument("controlled parts do not match the system dimension");
  Mat U = Mat::Zero(D, D);
  if (spec.variant == ControlledVariant::Pfc) {
    // P·F·C
    for (long x = 0; x < D; ++x) U.row(parts.P[x]) = (parts.f[x] ? -1.0 : 1.0) * parts.C.row(x);
  } else {
    // S_R·F·S_L·C
    const long DL = spec.D_left, DR = spec.D_right;
    for (long x = 0; x < D; ++x) {
      long xl = x / DR, xr = x % DR;
      long y = ((xl + parts.fL[xr]) % DL) * DR + xr;
      double s = parts.f[y] ? -1.0 : 1.0;
      long yl = y / DR, yr = y % DR;
      long z = yl * DR + (yr + parts.fR[yl]) % DR;
      U.row(z) = s * parts.C.row(x);
    }
  }
  Mat out = Mat::Zero(2 * D, 2 * D);
  out.topLeftCorner(D, D).setIdentity();
  out.bottomRightCorner(D, D) = U;
  return out;
}

Mat build_controlled_unitary(const ControlledEnsembleSpec& spec, Rng& rng) {
  return assemble_controlled(spec, sample_controlled_parts(spec, rng));
}

double controlled_bound(const ControlledEnsembleSpec& spec, int k) {
  const double k2 = double(k) * k;
  if (spec.variant == ControlledVariant::Pfc) return 10 * k2 / double(spec.D);
  return 4 * k2 / double(spec.D_left) + 2 * k2 / double(spec.D_right);
}

namespace {

// Accumulators for one half (even or odd draws) of the estimate.
struct HalfStats {
  long draws = 0;
  RVec p;    // k = 1: Σ |(C|0⟩)_{π⁻¹y}|²
  Mat dd;    // k = 2: Σ d d†, d = diag(U Uᵀ)
  RMat q;    // k = 2: Σ |(U Uᵀ)_{xy}|²
  void init(long D, int k) {
    if (k == 1) p = RVec::Zero(D);
    else {
      dd = Mat::Zero(D, D);
      q = RMat::Zero(D, D);
    }
  }
  void add(const HalfStats& o) {
    draws += o.draws;
    if (p.size()) p += o.p;
    if (dd.size()) {
      dd += o.dd;
      q += o.q;
    }
  }
};

// Dense K = C·Cᵀ up to a global phase, which the statistics do not see.
Mat symmetric_square(const ControlledEnsembleSpec& spec, Rng& rng, bool clifford, long D) {
  if (clifford) {
    Clifford c = sample_clifford(log2_exact(D), rng);
    return c.after(c.conj().inverse()).matrix();
  }
  Mat C = haar_unitary(static_cast<int>(D), rng);
  (void)spec;
  return C * C.transpose();
}

Vec first_column(Rng& rng, bool clifford, long D) {
  if (clifford) return sample_clifford(log2_exact(D), rng).zero_state();
  return haar_unitary(static_cast<int>(D), rng).col(0);
}

void draw_into(const ControlledEnsembleSpec& spec, int k, Rng& rng, bool clifford, HalfStats& h) {
  const long D = spec.system_dim();
  ControlledParts perm_parts;
  // The phase function f and the random phase of C are averaged exactly; only π and C are sampled.
  if (spec.variant == ControlledVariant::Pfc) {
    perm_parts.P = random_permutation(D, spec.functions, spec.functions == FunctionSource::KeyedToy ? rng() : 0, rng);
  } else {
    const std::uint64_t key = spec.functions == FunctionSource::KeyedToy ? rng() : 0;
    perm_parts.fL = table_function(spec.D_right, spec.D_left, spec.functions, key, 0x4C, rng);
    perm_parts.fR = table_function(spec.D_left, spec.D_right, spec.functions, key, 0x52, rng);
  }
  const std::vector<long> pi = composite_permutation(spec, perm_parts);
  h.draws += 1;
  if (k == 1) {
    Vec c0 = first_column(rng, clifford, D);
    for (long u = 0; u < D; ++u) h.p(pi[u]) += std::norm(c0(u));
    return;
  }
  Mat K = symmetric_square(spec, rng, clifford, D);
  Vec d(D);
  for (long u = 0; u < D; ++u) d(pi[u]) = K(u, u);
  h.dd.noalias() += d * d.adjoint();
  for (long v = 0; v < D; ++v) {
    const long pv = pi[v];
    for (long u = 0; u < D; ++u) h.q(pi[u], pv) += std::norm(K(u, v));
  }
}

}  // namespace

ControlledDistance controlled_trace_distance_experiment(const ControlledEnsembleSpec& spec, int k, long N,
                                                        Rng& rng) {
  validate(spec);
  if (k != 1 && k != 2) throw UnsupportedError("controlled experiment supports k = 1 or 2 parallel queries");
  if (N < 2) throw std::invalid_argument("need at least two draws");
  const long D = spec.system_dim();
  // Density dimension of the k-query output (control and system per query).
  const double rho_dim = std::pow(2.0 * D, k);
  if (rho_dim > 4096.0 * 4096.0) throw CapacityError("output density exceeds budget");
  const bool clifford = uses_clifford_design(spec);

  constexpr int kChunks = 16;
  const std::uint64_t master = rng();
  std::vector<HalfStats> even(kChunks), odd(kChunks);
  parallel_chunks(kChunks, [&](int c) {
    Rng r = stream_rng(master, c);
    even[c].init(D, k);
    odd[c].init(D, k);
    const long lo = N * c / kChunks, hi = N * (c + 1) / kChunks;
    for (long i = lo; i < hi; ++i) draw_into(spec, k, r, clifford, (i % 2 == 0) ? even[c] : odd[c]);
  });
  HalfStats E, O;
  E.init(D, k);
  O.init(D, k);
  for (int c = 0; c < kChunks; ++c) {
    E.add(even[c]);
    O.add(odd[c]);
  }
  HalfStats All = E;
  All.add(O);

  ControlledDistance out;
  out.draws = N;
  out.bound = controlled_bound(spec, k);
  out.low_draw_warning = N < 1000;

  if (k == 1) {
    // ρ = ½|0,0⟩⟨0,0| ⊕ ½ diag(p); the Haar reference has p = 1/D.
    RVec p = All.p / double(All.draws);
    out.distance = 0.5 * (p.array() - 1.0 / double(D)).abs().sum();
    RVec diff = E.p / double(E.draws) - O.p / double(O.draws);
    out.stderr_ = 0.5 * 0.5 * diff.array().abs().sum();
    return out;
  }

  // ρ (control-1 branch) = (1/2D)E[dd†] on span{|a,a⟩} ⊕ Σ_{x<y} q_xy |sym_xy⟩⟨sym_xy|;
  // the Haar reference is Π_sym / (2 d_sym).
  const double dsym = double(D) * (D + 1) / 2.0;
  const double ref = 1.0 / (2.0 * dsym);
  auto diag_block = [&](const HalfStats& h) { return Mat(h.dd / (2.0 * D * double(h.draws))); };
  auto pair = [&](const HalfStats& h, long x, long y) { return h.q(x, y) / (double(D) * double(h.draws)); };

  Mat B = diag_block(All) - ref * Mat::Identity(D, D);
  double dist = hermitian_trace_norm(B);
  double split = hermitian_trace_norm(diag_block(E) - diag_block(O));
  for (long x = 0; x < D; ++x)
    for (long y = x + 1; y < D; ++y) {
      dist += std::abs(pair(All, x, y) - ref);
      split += std::abs(pair(E, x, y) - pair(O, x, y));
    }
  out.distance = dist;
  out.stderr_ = 0.5 * split;
  return out;
}

}  // namespace symlab
