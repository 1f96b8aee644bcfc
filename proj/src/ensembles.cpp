#include "symlab/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "symlab/constructions.hpp"
#include "symlab/tensor_core.hpp"

namespace symlab {

EnsembleKind parse_ensemble_kind(const std::string& s) {
  static const std::map<std::string, EnsembleKind> m = {
      {"sector_haar", EnsembleKind::SectorHaar}, {"brickwork", EnsembleKind::Brickwork},
      {"ti_brickwork", EnsembleKind::TiBrickwork}, {"composed", EnsembleKind::Composed},
      {"pfc", EnsembleKind::Pfc}, {"lrfc", EnsembleKind::Lrfc}};
  auto it = m.find(s);
  if (it == m.end()) throw std::invalid_argument("unknown ensemble kind: " + s);
  return it->second;
}

std::string to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::SectorHaar: return "sector_haar";
    case EnsembleKind::Brickwork: return "brickwork";
    case EnsembleKind::TiBrickwork: return "ti_brickwork";
    case EnsembleKind::Composed: return "composed";
    case EnsembleKind::Pfc: return "pfc";
    case EnsembleKind::Lrfc: return "lrfc";
  }
  return "?";
}

Mat sample_sector_haar(const SectorDecomposition& dec, Rng& rng) {
  Mat blk = Mat::Zero(dec.total_dim, dec.total_dim);
  for (const auto& s : dec.sectors) {
    Mat U = haar_unitary(static_cast<int>(s.multiplicity), rng);
    const long w = s.multiplicity * s.irrep_dim;
    blk.block(s.offset, s.offset, w, w) = kron(U, Mat::Identity(s.irrep_dim, s.irrep_dim));
  }
  return dec.basis_change * blk * dec.basis_change.adjoint();
}

void apply_on_sites(const Mat& op, const std::vector<int>& site_dims, const std::vector<int>& sites, Mat& M) {
  const int n = static_cast<int>(site_dims.size());
  long D = 1;
  for (int d : site_dims) D *= d;
  long dop = 1;
  std::vector<bool> hit(n, false);
  for (int s : sites) {
    if (s < 0 || s >= n || hit[s]) throw std::out_of_range("bad site list");
    hit[s] = true;
    dop *= site_dims[s];
  }
  if (op.rows() != dop || op.cols() != dop || M.rows() != D)
    throw std::invalid_argument("operator does not match sites");
  std::vector<long> stride(n);
  long acc = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride[i] = acc;
    acc *= site_dims[i];
  }
  // Offsets of the target digits, and bases over the remaining digits.
  std::vector<long> off(dop, 0);
  for (long t = 0; t < dop; ++t) {
    long r = t;
    for (int j = static_cast<int>(sites.size()) - 1; j >= 0; --j) {
      off[t] += (r % site_dims[sites[j]]) * stride[sites[j]];
      r /= site_dims[sites[j]];
    }
  }
  std::vector<long> bases;
  bases.reserve(D / dop);
  for (long i = 0; i < D; ++i) {
    bool zero = true;
    for (int s : sites)
      if ((i / stride[s]) % site_dims[s] != 0) { zero = false; break; }
    if (zero) bases.push_back(i);
  }
  Mat B(dop, M.cols());
  for (long b : bases) {
    for (long t = 0; t < dop; ++t) B.row(t) = M.row(b + off[t]);
    Mat O = op * B;
    for (long t = 0; t < dop; ++t) M.row(b + off[t]) = O.row(t);
  }
}

Mat embed_operator(const Mat& op, const std::vector<int>& site_dims, const std::vector<int>& sites) {
  const int n = static_cast<int>(site_dims.size());
  long D = 1;
  for (int d : site_dims) D *= d;
  long dop = 1;
  for (int s : sites) {
    if (s < 0 || s >= n) throw std::out_of_range("site index out of range");
    dop *= site_dims[s];
  }
  if (op.rows() != dop || op.cols() != dop) throw std::invalid_argument("operator does not match sites");
  if (D > kDenseBudget) throw CapacityError("embedded dimension exceeds dense budget");
  std::vector<long> stride(n);
  long acc = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride[i] = acc;
    acc *= site_dims[i];
  }
  Mat out = Mat::Zero(D, D);
  std::vector<int> dig(n);
  for (long in = 0; in < D; ++in) {
    long t = in;
    for (int i = 0; i < n; ++i) {
      dig[i] = static_cast<int>(t / stride[i]);
      t %= stride[i];
    }
    long sub_in = 0, base = in;
    for (int s : sites) {
      sub_in = sub_in * site_dims[s] + dig[s];
      base -= dig[s] * stride[s];
    }
    for (long so = 0; so < dop; ++so) {
      const cplx v = op(so, sub_in);
      if (v == cplx(0)) continue;
      long r = so, outi = base;
      for (int j = static_cast<int>(sites.size()) - 1; j >= 0; --j) {
        outi += (r % site_dims[sites[j]]) * stride[sites[j]];
        r /= site_dims[sites[j]];
      }
      out(outi, in) = v;
    }
  }
  return out;
}

// ---------------------------------------------------------------- geometry

TwoLayerGeometry brickwork_geometry(int n_sites, int xi, bool periodic) {
  if (n_sites < 1 || xi < 1) throw std::invalid_argument("n and xi must be positive");
  TwoLayerGeometry g;
  const int R = (n_sites + xi - 1) / xi;
  for (int r = 0; r < R; ++r) g.region_sites.push_back(std::min(xi, n_sites - r * xi));
  if (periodic && (R % 2 != 0 || n_sites % xi != 0)) periodic = false;
  g.kind = periodic ? "brickwork_periodic" : "brickwork_open";
  if (R == 1) return g;
  for (int r = 0; r + 1 < R; r += 2) g.early.emplace_back(r, r + 1);
  for (int r = 1; r + 1 < R; r += 2) g.late.emplace_back(r, r + 1);
  if (periodic) g.late.emplace_back(R - 1, 0);
  return g;
}

// ---------------------------------------------------------------- sampling

namespace {
std::vector<int> sites_of(const TwoLayerGeometry& g, std::pair<int, int> patch) {
  std::vector<int> first(g.region_sites.size() + 1, 0);
  for (size_t r = 0; r < g.region_sites.size(); ++r) first[r + 1] = first[r] + g.region_sites[r];
  std::vector<int> s;
  for (int r : {patch.first, patch.second})
    for (int i = 0; i < g.region_sites[r]; ++i) s.push_back(first[r] + i);
  return s;
}
}  // namespace

EnsembleSampler::EnsembleSampler(const EnsembleSpec& spec) : spec_(spec) {
  const int sd = spec.group.order() * spec.ancilla_dim;
  auto rep = regular_representation(spec.group, spec.ancilla_dim);
  switch (spec.kind) {
    case EnsembleKind::SectorHaar: {
      dim_ = checked_pow(sd, spec.n_sites, kDenseBudget);
      full_ = std::make_shared<SectorDecomposition>(sector_decomposition(rep, spec.n_sites));
      break;
    }
    case EnsembleKind::Brickwork:
    case EnsembleKind::TiBrickwork: {
      dim_ = checked_pow(sd, spec.n_sites, kDenseBudget);
      site_dims_.assign(spec.n_sites, sd);
      bool periodic = spec.kind == EnsembleKind::TiBrickwork ? true : spec.periodic;
      if (spec.kind == EnsembleKind::TiBrickwork && spec.n_sites % (2 * spec.xi) != 0)
        throw std::invalid_argument("translation-invariant brickwork needs 2ξ | n");
      auto geo = brickwork_geometry(spec.n_sites, spec.xi, periodic);
      if (geo.region_sites.size() == 1) {
        full_ = std::make_shared<SectorDecomposition>(sector_decomposition(rep, spec.n_sites));
        break;
      }
      std::map<int, int> by_size;
      auto dec_for = [&](int nsites) {
        auto it = by_size.find(nsites);
        if (it != by_size.end()) return it->second;
        patch_decs_.push_back(std::make_shared<SectorDecomposition>(sector_decomposition(rep, nsites)));
        by_size[nsites] = static_cast<int>(patch_decs_.size()) - 1;
        return by_size[nsites];
      };
      for (auto p : geo.early) {
        early_.push_back(sites_of(geo, p));
        early_dec_.push_back(dec_for(static_cast<int>(early_.back().size())));
      }
      for (auto p : geo.late) {
        late_.push_back(sites_of(geo, p));
        late_dec_.push_back(dec_for(static_cast<int>(late_.back().size())));
      }
      break;
    }
    case EnsembleKind::Composed: {
      if (spec.parts.empty()) throw std::invalid_argument("composed ensemble needs parts");
      for (const auto& p : spec.parts) parts_.emplace_back(p);
      dim_ = parts_[0].dim();
      for (const auto& p : parts_)
        if (p.dim() != dim_) throw std::invalid_argument("composed parts differ in dimension");
      break;
    }
    case EnsembleKind::Pfc:
    case EnsembleKind::Lrfc: {
      dim_ = 2 * (spec.kind == EnsembleKind::Pfc ? spec.D : spec.D_left * spec.D_right);
      if (dim_ > kDenseBudget) throw CapacityError("controlled unitary exceeds dense budget");
      break;
    }
  }
}

Mat EnsembleSampler::sample(Rng& rng) const {
  switch (spec_.kind) {
    case EnsembleKind::SectorHaar:
      return sample_sector_haar(*full_, rng);
    case EnsembleKind::Brickwork:
    case EnsembleKind::TiBrickwork: {
      if (full_) return sample_sector_haar(*full_, rng);
      const bool shared = spec_.kind == EnsembleKind::TiBrickwork;
      Mat U = Mat::Identity(dim_, dim_);
      Mat first, second;
      if (shared) {
        first = sample_sector_haar(*patch_decs_[early_dec_[0]], rng);
        second = sample_sector_haar(*patch_decs_[late_dec_[0]], rng);
      }
      for (size_t i = 0; i < early_.size(); ++i) {
        Mat u = shared ? first : sample_sector_haar(*patch_decs_[early_dec_[i]], rng);
        apply_on_sites(u, site_dims_, early_[i], U);
      }
      for (size_t i = 0; i < late_.size(); ++i) {
        Mat u = shared ? second : sample_sector_haar(*patch_decs_[late_dec_[i]], rng);
        apply_on_sites(u, site_dims_, late_[i], U);
      }
      return U;
    }
    case EnsembleKind::Composed: {
      Mat U = Mat::Identity(dim_, dim_);
      for (const auto& p : parts_) U = p.sample(rng) * U;
      return U;
    }
    case EnsembleKind::Pfc:
    case EnsembleKind::Lrfc: {
      ControlledEnsembleSpec cs;
      cs.variant = spec_.kind == EnsembleKind::Pfc ? ControlledVariant::Pfc : ControlledVariant::Lrfc;
      cs.D = spec_.D;
      cs.D_left = spec_.D_left;
      cs.D_right = spec_.D_right;
      return build_controlled_unitary(cs, rng);
    }
  }
  throw std::logic_error("unreachable");
}

Mat sample_unitary(const EnsembleSpec& spec, Rng& rng) { return EnsembleSampler(spec).sample(rng); }

// ---------------------------------------------------------------- two-layer moments

namespace {

RMat rkron(const RMat& a, const RMat& b) {
  RMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

long ipow(long b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

std::vector<int> digits(long idx, int count, long base) {
  std::vector<int> d(count);
  for (int i = count - 1; i >= 0; --i) {
    d[i] = static_cast<int>(idx % base);
    idx /= base;
  }
  return d;
}

}  // namespace

BrickworkMoment two_layer_moment(const FiniteGroup& G, int ancilla_dim, const TwoLayerGeometry& geo,
                                 int k) {
  const int R = static_cast<int>(geo.region_sites.size());
  const double sd = G.order() * ancilla_dim;
  auto L = std::make_shared<LabelLayout>();
  L->W = std::make_shared<WreathGroup>(G, k);
  const WreathGroup& W = *L->W;
  const long nW = W.size();
  for (int r = 0; r < R; ++r) L->region_dim.push_back(std::pow(sd, geo.region_sites[r]));

  // Weingarten regime: every patch and the whole system need multiplicities ≥ k.
  auto check_regime = [&](double dim, const std::string& what) {
    for (const auto& ir : G.irreps())
      if (ir.dim * dim / G.order() < k)
        throw std::invalid_argument(what + " is below the Weingarten regime for k = " + std::to_string(k));
  };
  double Dtot = 1;
  for (double d : L->region_dim) Dtot *= d;
  check_regime(Dtot, "system");

  std::vector<int> early_of(R, -1), late_of(R, -1);
  for (size_t e = 0; e < geo.early.size(); ++e) {
    early_of[geo.early[e].first] = static_cast<int>(e);
    early_of[geo.early[e].second] = static_cast<int>(e);
  }
  for (size_t l = 0; l < geo.late.size(); ++l) {
    late_of[geo.late[l].first] = static_cast<int>(l);
    late_of[geo.late[l].second] = static_cast<int>(l);
  }
  const int ne = static_cast<int>(geo.early.size()), nl = static_cast<int>(geo.late.size());
  if (R > 1)
    for (int r = 0; r < R; ++r)
      if (early_of[r] < 0 && late_of[r] < 0) throw std::invalid_argument("region not covered by any patch");

  BrickworkMoment out;
  out.geometry = geo;
  if (R == 1) {
    L->X = LabelSpace{1, {0}, {-1}};
    L->Y = L->X;
  } else {
    // Exposed patches: early patches touching late-free regions, late patches touching early-free regions.
    std::vector<int> ex, lx;
    for (int e = 0; e < ne; ++e)
      if (late_of[geo.early[e].first] < 0 || late_of[geo.early[e].second] < 0) ex.push_back(e);
    for (int l = 0; l < nl; ++l)
      if (early_of[geo.late[l].first] < 0 || early_of[geo.late[l].second] < 0) lx.push_back(l);
    L->X.nblocks = nl + static_cast<int>(ex.size());
    L->Y.nblocks = ne + static_cast<int>(lx.size());
    L->X.region_block.assign(R, -1);
    L->Y.region_block.assign(R, -1);
    L->X.region_twist.assign(R, -1);
    L->Y.region_twist.assign(R, -1);
    for (int r = 0; r < R; ++r) {
      if (late_of[r] >= 0) L->X.region_block[r] = late_of[r];
      else L->X.region_block[r] = nl + static_cast<int>(std::find(ex.begin(), ex.end(), early_of[r]) - ex.begin());
      if (early_of[r] >= 0) L->Y.region_block[r] = early_of[r];
      else L->Y.region_block[r] = ne + static_cast<int>(std::find(lx.begin(), lx.end(), late_of[r]) - lx.begin());
    }
    auto patch_N = [&](std::pair<int, int> p, const std::string& what) {
      double dp = L->region_dim[p.first] * L->region_dim[p.second];
      check_regime(dp, what);
      return symmetric_pinv(diagonal_gram(W, {L->region_dim[p.first], L->region_dim[p.second]}));
    };
    RMat NL = RMat::Ones(1, 1), NE = RMat::Ones(1, 1);
    for (int l = 0; l < nl; ++l) NL = rkron(NL, patch_N(geo.late[l], "late patch"));
    for (int e = 0; e < ne; ++e) NE = rkron(NE, patch_N(geo.early[e], "early patch"));
    const long SL = ipow(nW, nl), SE = ipow(nW, ne);
    if (static_cast<double>(SL) * SE > 4e7) throw CapacityError("two-layer label space exceeds budget");
    // Coupling over regions covered by both layers.
    std::vector<std::vector<double>> chi(R, std::vector<double>(nW));
    for (int r = 0; r < R; ++r)
      for (int w = 0; w < nW; ++w) chi[r][w] = W.normalized_character(w, L->region_dim[r]);
    RMat C(SL, SE);
    for (long p = 0; p < SL; ++p) {
      auto pd = digits(p, nl, nW);
      for (long j = 0; j < SE; ++j) {
        auto jd = digits(j, ne, nW);
        double v = 1;
        for (int r = 0; r < R && v != 0; ++r)
          if (late_of[r] >= 0 && early_of[r] >= 0)
            v *= chi[r][W.mul(W.inv(pd[late_of[r]]), jd[early_of[r]])];
        C(p, j) = v;
      }
    }
    const long nx = L->size_x(), ny = L->size_y();
    const long SEX = ipow(nW, static_cast<int>(ex.size())), SLX = ipow(nW, static_cast<int>(lx.size()));
    RMat N = RMat::Zero(nx, ny);
    for (long pe = 0; pe < SLX; ++pe) {
      auto ped = digits(pe, static_cast<int>(lx.size()), nW);
      std::vector<long> P;
      for (long p = 0; p < SL; ++p) {
        auto pd = digits(p, nl, nW);
        bool ok = true;
        for (size_t t = 0; t < lx.size() && ok; ++t) ok = pd[lx[t]] == ped[t];
        if (ok) P.push_back(p);
      }
      RMat left(SL, P.size());
      for (size_t c = 0; c < P.size(); ++c) left.col(c) = NL.col(P[c]);
      for (long je = 0; je < SEX; ++je) {
        auto jed = digits(je, static_cast<int>(ex.size()), nW);
        std::vector<long> J;
        for (long j = 0; j < SE; ++j) {
          auto jd = digits(j, ne, nW);
          bool ok = true;
          for (size_t t = 0; t < ex.size() && ok; ++t) ok = jd[ex[t]] == jed[t];
          if (ok) J.push_back(j);
        }
        RMat mid(P.size(), J.size()), right(J.size(), SE);
        for (size_t a = 0; a < P.size(); ++a)
          for (size_t b = 0; b < J.size(); ++b) mid(a, b) = C(P[a], J[b]);
        for (size_t b = 0; b < J.size(); ++b) right.row(b) = NE.row(J[b]);
        RMat blk = left * mid * right;
        for (long q = 0; q < SL; ++q)
          for (long i = 0; i < SE; ++i) N(q * SEX + je, i * SLX + pe) = blk(q, i);
      }
    }
    out.E.N = std::move(N);
  }
  for (long w = 0; w < nW; ++w) {
    long x = L->encode(L->X, std::vector<int>(L->X.nblocks, static_cast<int>(w)));
    long y = L->encode(L->Y, std::vector<int>(L->Y.nblocks, static_cast<int>(w)));
    L->invariance.emplace_back(x, y);
  }
  // Dense embedding when a single copy fits the budget.
  if (Dtot <= kDenseBudget) {
    auto sm = std::make_shared<SlotMap>();
    sm->copies = k;
    sm->slots.resize(R);
    for (int r = 0; r < R; ++r) {
      sm->phys_dims.push_back(static_cast<int>(L->region_dim[r]));
      sm->rep_maps.push_back(regular_digit_maps(G, ancilla_dim, geo.region_sites[r]));
      for (int j = 0; j < k; ++j) sm->slots[r].emplace_back(j, r);
    }
    L->slots = sm;
  }
  RMat NH = symmetric_pinv(diagonal_gram(W, L->region_dim));
  out.H.N = RMat::Zero(L->size_x(), L->size_y());
  for (long a = 0; a < nW; ++a)
    for (long b = 0; b < nW; ++b) out.H.N(L->invariance[a].first, L->invariance[b].second) = NH(a, b);
  if (R == 1) out.E.N = out.H.N;
  out.E.layout = L;
  out.H.layout = L;
  return out;
}

BrickworkMoment brickwork_choi_exact(const EnsembleSpec& spec, int k) {
  if (spec.kind != EnsembleKind::Brickwork && spec.kind != EnsembleKind::SectorHaar)
    throw std::invalid_argument("brickwork_choi_exact expects a brickwork or sector_haar spec");
  int xi = spec.kind == EnsembleKind::SectorHaar ? spec.n_sites : spec.xi;
  return two_layer_moment(spec.group, spec.ancilla_dim, brickwork_geometry(spec.n_sites, xi, spec.periodic), k);
}

// ---------------------------------------------------------------- bounds

GluingBound gluing_bound(double eps_ab, double eps_bc, int k, int G, double D_ab, double D_bc,
                         double D_b, double D_abc) {
  if (D_ab <= 0 || D_bc <= 0 || D_b <= 0 || D_abc <= 0) throw std::invalid_argument("dimensions must be positive");
  GluingBound b;
  const double kk = double(k) * k * G;
  const double f_ab = 1 - kk / (2 * D_ab), f_bc = 1 - kk / (2 * D_bc);
  if (f_ab <= 0 || f_bc <= 0 || double(k) * k > D_b / G) {
    b.vacuous = true;
    b.epsilon = std::numeric_limits<double>::infinity();
    return b;
  }
  double one = (1 + eps_ab) * (1 + eps_bc) / (f_ab * f_bc) * std::exp(double(k) * (k - 1) * G / (2 * D_b)) *
               (1 + kk / D_abc);
  b.epsilon = one - 1;
  return b;
}

std::vector<GluingStep> gluing_steps(const FiniteGroup& G, int ancilla_dim, int n_sites, int xi,
                                     bool periodic, int k) {
  auto full = brickwork_geometry(n_sites, xi, periodic);
  const int R = static_cast<int>(full.region_sites.size());
  std::vector<GluingStep> steps;
  if (R < 3) return steps;
  const double sd = G.order() * ancilla_dim;
  auto dim = [&](int r) { return std::pow(sd, full.region_sites[r]); };
  double eps_prev = 0;  // regions 0..1 form one exact patch
  for (int s = 1; s + 1 < R; ++s) {
    TwoLayerGeometry sub;
    sub.region_sites.assign(full.region_sites.begin(), full.region_sites.begin() + s + 2);
    for (int r = 0; r + 1 <= s + 1; r += 2) sub.early.emplace_back(r, r + 1);
    for (int r = 1; r + 1 <= s + 1; r += 2) sub.late.emplace_back(r, r + 1);
    auto mom = two_layer_moment(G, ancilla_dim, sub, k);
    GluingStep st;
    st.step = s;
    st.label = "0-" + std::to_string(s + 1);
    st.epsilon = relative_error(mom.E, mom.H).epsilon;
    double Dab = 1, Dabc = 1;
    for (int r = 0; r <= s; ++r) Dab *= dim(r);
    Dabc = Dab * dim(s + 1);
    st.bound = gluing_bound(eps_prev, 0.0, k, G.order(), Dab, dim(s) * dim(s + 1), dim(s), Dabc);
    st.ok = st.bound.vacuous || st.epsilon <= st.bound.epsilon + 1e-9;
    steps.push_back(st);
    eps_prev = st.epsilon;
  }
  if (full.kind == "brickwork_periodic" && R > 2) {
    auto mom = two_layer_moment(G, ancilla_dim, full, k);
    GluingStep st;
    st.step = R - 1;
    st.label = "closure";
    st.epsilon = relative_error(mom.E, mom.H).epsilon;
    double D = 1;
    for (int r = 0; r < R; ++r) D *= dim(r);
    const double Db = dim(R - 1) * dim(0);
    st.bound = gluing_bound(eps_prev, 0.0, k, G.order(), D, Db, Db, D);
    st.ok = st.bound.vacuous || st.epsilon <= st.bound.epsilon + 1e-9;
    steps.push_back(st);
  }
  return steps;
}

Threshold two_layer_threshold(int n, int k, int G, double eps) {
  if (!(eps > 0 && eps <= 1)) throw std::invalid_argument("eps must lie in (0, 1]");
  Threshold t;
  const double arg = double(n) * k * k * G / eps;
  t.log2_value = std::log2(arg);
  t.logG_value = G > 1 ? std::log(arg) / std::log(double(G)) : std::numeric_limits<double>::infinity();
  auto ceil0 = [](double v) {
    double c = std::ceil(v - 1e-12);
    return c < 0 ? 0 : static_cast<int>(c);
  };
  t.xi_log2 = ceil0(t.log2_value);
  t.xi_logG = std::isfinite(t.logG_value) ? ceil0(t.logG_value) : std::numeric_limits<int>::max();
  return t;
}

SquareCheck compose_and_square_check(const ChoiCoefficients& E, const ChoiCoefficients& H,
                                     const CornerAlgebra* corner) {
  std::unique_ptr<CornerAlgebra> own;
  if (!corner) {
    own = std::make_unique<CornerAlgebra>(E.layout);
    corner = own.get();
  }
  SquareCheck sc;
  sc.epsilon = relative_error(E, H, corner).epsilon;
  sc.epsilon_squared = relative_error(compose_with_self(E), H, corner).epsilon;
  sc.applicable = sc.epsilon <= 1.0 / 3.0;
  sc.pass = !sc.applicable || sc.epsilon_squared <= 2 * sc.epsilon * sc.epsilon + 1e-9;
  return sc;
}

// ---------------------------------------------------------------- translation invariance

TiMoment ti_choi_exact(int m, int xi, int k, const FiniteGroup& G, bool exact_patches, int ancilla_dim) {
  if (m < 1 || k < 1 || xi < 1) throw std::invalid_argument("m, k, xi must be positive");
  const int K = m * k;
  if (K > 7) throw CapacityError("K = mk exceeds the permutation budget of 7");
  TiMoment t;
  t.m = m;
  t.k = k;
  t.K = K;
  t.exact_patches = exact_patches;
  t.half_dim = std::pow(double(G.order() * ancilla_dim), xi);
  auto L = std::make_shared<LabelLayout>();
  L->W = std::make_shared<WreathGroup>(G, K);
  const WreathGroup& W = *L->W;
  const int nW = W.size();
  if (static_cast<double>(nW) * nW > 4e7) throw CapacityError("TI label space exceeds budget");
  L->region_dim = {t.half_dim, t.half_dim};  // e, o halves; per-slot dimension
  L->twists = {W.conjugation_by(translation_perm(m, k))};
  L->X = LabelSpace{1, {0, 0}, {0, -1}};
  L->Y = LabelSpace{1, {0, 0}, {-1, -1}};
  for (int w = 0; w < nW; ++w)
    if (L->twists[0][w] == w) L->invariance.emplace_back(w, w);
  t.commutant_size = static_cast<long>(L->invariance.size());
  const double Dp = t.half_dim * t.half_dim;
  if (exact_patches)
    for (const auto& ir : G.irreps())
      if (ir.dim * Dp / G.order() < K)
        throw std::invalid_argument("patch multiplicity below K = mk; exact patch twirl undefined");
  RMat Nt = exact_patches ? symmetric_pinv(diagonal_gram(W, {Dp})) : RMat::Identity(nW, nW);
  RMat C(nW, nW);
  const auto& tw = L->twists[0];
  for (int p = 0; p < nW; ++p)
    for (int j = 0; j < nW; ++j)
      C(p, j) = W.normalized_character(W.mul(W.inv(tw[p]), j), t.half_dim) *
                W.normalized_character(W.mul(W.inv(p), j), t.half_dim);
  if (std::pow(Dp, m) <= kDenseBudget) {
    auto sm = std::make_shared<SlotMap>();
    sm->copies = k;
    sm->slots.resize(2);
    auto maps = regular_digit_maps(G, ancilla_dim, xi);
    for (int r = 0; r < 2 * m; ++r) {
      sm->phys_dims.push_back(static_cast<int>(t.half_dim));
      sm->rep_maps.push_back(maps);
    }
    for (int s = 0; s < K; ++s) {
      const int i = s % m, j = s / m;
      sm->slots[0].emplace_back(j, 2 * i);
      sm->slots[1].emplace_back(j, 2 * i + 1);
    }
    L->slots = sm;
  }
  t.E.layout = L;
  t.E.N = Nt * C * Nt;
  t.A.layout = L;
  t.A.N = RMat::Zero(nW, nW);
  for (const auto& [x, y] : L->invariance) t.A.N(x, y) = 1;
  return t;
}

TiError ti_relative_error(const TiMoment& ti, int n, int xi, double eps_target) {
  TiError e;
  auto r = relative_error(ti.E, ti.A);
  e.epsilon_prime = r.epsilon;
  e.epsilon = 3 * r.epsilon;
  e.commutant_size = ti.commutant_size;
  double nk_kfact = std::pow(double(n), ti.k);
  for (int i = 2; i <= ti.k; ++i) nk_kfact *= i;
  e.epsilon_count_normalised = e.epsilon * double(ti.commutant_size) / nk_kfact;
  e.threshold_xi = std::log2(32.0 * std::pow(double(n), 6) * std::pow(double(ti.k), 6) / eps_target);
  e.threshold_vacuous = double(xi) < e.threshold_xi;
  return e;
}

double perm_sum_lhs(const Perm& tau, double D) {
  const int K = static_cast<int>(tau.size());
  double s = 0;
  for (const auto& d : all_perms(K))
    s += std::pow(D, -perm_distance(d)) * std::pow(D, -perm_distance(perm_compose(perm_inverse(d), tau)));
  return s;
}

PermBoundReport perm_sum_bruteforce(int K, std::vector<double> D_values) {
  if (K < 1 || K > 7) throw CapacityError("K must lie in 1..7");
  PermBoundReport rep;
  rep.K = K;
  if (D_values.empty()) D_values = {double(K) * K, 2.0 * K * K, 4.0 * K * K};
  SymmetricGroup S(K);
  const int nS = S.size();
  // Bound 1 depends on τ only through its class; the sum over Δ uses the table.
  std::vector<int> dist(nS);
  for (int a = 0; a < nS; ++a) dist[a] = K - S.cycles(a);
  std::set<std::vector<int>> seen;
  for (double D : D_values) {
    for (int t = 0; t < nS; ++t) {
      auto ct = perm_cycle_type(S.elem(t));
      ct.push_back(static_cast<int>(D));
      if (!seen.insert(ct).second) continue;
      double lhs = 0;
      for (int d = 0; d < nS; ++d) lhs += std::pow(D, -dist[d] - dist[S.mul(S.inv(d), t)]);
      double bound = 8 * std::pow(double(K) * K / (2 * D), dist[t]);
      ++rep.bound1_checks;
      rep.bound1_max_ratio = std::max(rep.bound1_max_ratio, lhs / bound);
      if (lhs > bound * (1 + 1e-12)) {
        ++rep.bound1_violations;
        rep.lines.push_back("bound1 violation K=" + std::to_string(K) + " D=" + std::to_string(D) +
                            " |tau|=" + std::to_string(dist[t]));
      }
      if (t == 0 && D == D_values.front()) rep.identity_lhs = lhs;
    }
  }
  // Bound 2 for each factorisation K = m·k.
  for (int m = 1; m <= K; ++m) {
    if (K % m) continue;
    const int k = K / m;
    Perm T = translation_perm(m, k);
    int Ti = S.index(T), Tinv = S.inv(Ti);
    std::vector<long> count(K + 1, 0);
    for (int s = 0; s < nS; ++s) count[dist[S.mul(S.mul(S.inv(s), Tinv), S.mul(s, Ti))]]++;
    double base = std::pow(double(m), k);
    for (int i = 2; i <= k; ++i) base *= i;
    for (int r = 0; r <= K; ++r) {
      if (count[r] == 0) continue;
      ++rep.bound2_checks;
      double bound = base * std::pow(double(K), 4 * r);
      if (r == 0 && static_cast<double>(count[0]) != base) {
        ++rep.bound2_violations;
        rep.lines.push_back("bound2 r=0 count mismatch m=" + std::to_string(m) + " k=" + std::to_string(k));
      }
      if (count[r] > bound) {
        ++rep.bound2_violations;
        rep.lines.push_back("bound2 violation m=" + std::to_string(m) + " r=" + std::to_string(r));
      }
    }
  }
  return rep;
}

}  // namespace symlab
