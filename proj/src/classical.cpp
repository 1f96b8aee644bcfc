#include "symlab/classical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

namespace symlab {

namespace {

Word low_mask(int w) { return w >= 64 ? ~Word(0) : (Word(1) << w) - 1; }

bool top_bit(Word x, int w) { return (x >> (w - 1)) & 1U; }

constexpr int kFeistelRounds = 6;

}  // namespace

// ---------------------------------------------------------------- permutations

SymmetricPermutation SymmetricPermutation::sample(int w, Rng& rng) {
  if (w < 1 || w > 24) throw CapacityError("explicit covariant tables need 1 <= w <= 24");
  SymmetricPermutation p;
  p.w_ = w;
  const Word half = Word(1) << (w - 1);
  std::vector<Word> orbit(half);
  std::iota(orbit.begin(), orbit.end(), Word(0));
  std::shuffle(orbit.begin(), orbit.end(), rng);
  p.table_.assign(std::size_t(2) * half, 0);
  std::uniform_int_distribution<int> coin(0, 1);
  for (Word r = 0; r < half; ++r) {
    Word y = coin(rng) ? flip_word(orbit[r], w) : orbit[r];
    p.table_[r] = y;
    p.table_[flip_word(r, w)] = flip_word(y, w);
  }
  p.inv_.assign(p.table_.size(), 0);
  for (Word x = 0; x < p.table_.size(); ++x) p.inv_[p.table_[x]] = x;
  return p;
}

SymmetricPermutation SymmetricPermutation::keyed(int w, std::uint64_t key) {
  if (w < 1 || w > 32) throw CapacityError("keyed covariant permutations need 1 <= w <= 32");
  SymmetricPermutation p;
  p.w_ = w;
  p.key_ = key;
  return p;
}

SymmetricPermutation SymmetricPermutation::identity(int w) {
  if (w < 1 || w > 24) throw CapacityError("explicit covariant tables need 1 <= w <= 24");
  std::vector<Word> t(std::size_t(1) << w);
  std::iota(t.begin(), t.end(), Word(0));
  return from_table(w, std::move(t));
}

SymmetricPermutation SymmetricPermutation::from_table(int w, std::vector<Word> table) {
  if (w < 1 || w > 24) throw CapacityError("explicit covariant tables need 1 <= w <= 24");
  if (table.size() != (std::size_t(1) << w)) throw std::invalid_argument("table size must be 2^w");
  SymmetricPermutation p;
  p.w_ = w;
  p.table_ = std::move(table);
  p.inv_.assign(p.table_.size(), ~Word(0));
  for (Word x = 0; x < p.table_.size(); ++x) {
    const Word y = p.table_[x];
    if (y >= p.table_.size() || p.inv_[y] != ~Word(0)) throw std::invalid_argument("table is not a bijection");
    p.inv_[y] = x;
  }
  if (!p.covariant()) throw std::invalid_argument("table is not flip covariant");
  return p;
}

// Unbalanced Feistel on the r = w−1 low bits; each round XORs one half with a
// keyed function of the other, so every round is an involution.
Word SymmetricPermutation::feistel(Word r, bool inverse) const {
  const int bits = w_ - 1;
  if (bits == 0) return r;
  const int lb = (bits + 1) / 2, rb = bits - lb;
  Word L = r >> rb, R = r & low_mask(rb);
  auto F = [&](int round, Word v) { return splitmix64(key_ ^ splitmix64(Word(round) * 0x9E37ULL + v)); };
  for (int s = 0; s < kFeistelRounds; ++s) {
    const int round = inverse ? kFeistelRounds - 1 - s : s;
    if (round % 2 == 0) L ^= F(round, R) & low_mask(lb);
    else if (rb > 0) R ^= F(round, L) & low_mask(rb);
  }
  return (L << rb) | R;
}

Word SymmetricPermutation::operator()(Word x) const {
  if (is_table()) return table_.at(x);
  const bool t = top_bit(x, w_);
  const Word rep = t ? flip_word(x, w_) : x;
  const Word y0 = feistel(rep, false);
  const bool b = splitmix64(key_ ^ 0xF11BULL ^ (rep << 1)) & 1U;
  return (b != t) ? flip_word(y0, w_) : y0;
}

Word SymmetricPermutation::inverse(Word y) const {
  if (is_table()) return inv_.at(y);
  const bool t2 = top_bit(y, w_);
  const Word y0 = t2 ? flip_word(y, w_) : y;
  const Word rep = feistel(y0, true);
  const bool b = splitmix64(key_ ^ 0xF11BULL ^ (rep << 1)) & 1U;
  return (b != t2) ? flip_word(rep, w_) : rep;
}

bool SymmetricPermutation::covariant() const {
  if (w_ > 24) throw CapacityError("exhaustive covariance check needs w <= 24");
  const Word size = Word(1) << w_;
  for (Word x = 0; x < size; ++x)
    if ((*this)(flip_word(x, w_)) != flip_word((*this)(x), w_)) return false;
  return true;
}

// ---------------------------------------------------------------- fixed points

FixedPointKind parse_fixed_point_kind(const std::string& s) {
  if (s == "trivial_uniform" || s == "trivial") return FixedPointKind::TrivialUniform;
  if (s == "z2_ssb" || s == "ssb") return FixedPointKind::Z2Ssb;
  throw std::invalid_argument("unknown fixed point kind: " + s);
}

std::string to_string(FixedPointKind k) { return k == FixedPointKind::TrivialUniform ? "trivial_uniform" : "z2_ssb"; }

std::vector<double> fixed_point_distribution(FixedPointKind kind, int n) {
  if (n < 1 || n > 24) throw CapacityError("explicit distributions need 1 <= n <= 24");
  const std::size_t size = std::size_t(1) << n;
  if (kind == FixedPointKind::TrivialUniform) return std::vector<double>(size, 1.0 / double(size));
  std::vector<double> p(size, 0.0);
  p.front() = 0.5;
  p.back() = 0.5;
  return p;
}

// ---------------------------------------------------------------- scrambling

ScrambledDistribution::ScrambledDistribution(FixedPointKind kind, int n, int xi, Rng& rng, bool keyed)
    : kind_(kind), n_(n), xi_(xi) {
  if (xi < 1 || n < 1 || n % xi) throw std::invalid_argument("xi must divide n");
  if (2 * xi > (keyed ? 32 : 24)) throw CapacityError("patch width exceeds the permutation budget");
  m_ = n / xi;
  for (int a = 0; a < m_; ++a)
    perms_.push_back(keyed ? SymmetricPermutation::keyed(2 * xi, rng()) : SymmetricPermutation::sample(2 * xi, rng));
}

ScrambledDistribution::ScrambledDistribution(FixedPointKind kind, int n, int xi,
                                             std::vector<SymmetricPermutation> perms)
    : kind_(kind), n_(n), xi_(xi), perms_(std::move(perms)) {
  if (xi < 1 || n < 1 || n % xi) throw std::invalid_argument("xi must divide n");
  m_ = n / xi;
  if (static_cast<int>(perms_.size()) != m_) throw std::invalid_argument("need one permutation per patch");
  for (const auto& p : perms_)
    if (p.width() != 2 * xi) throw std::invalid_argument("permutation width must be 2 xi");
}

std::vector<Word> ScrambledDistribution::sample(Rng& rng) const {
  std::vector<Word> out(m_);
  const Word xm = low_mask(xi_);
  const Word s = rng() & 1U;
  for (int a = 0; a < m_; ++a) {
    Word sys = kind_ == FixedPointKind::Z2Ssb ? (s ? xm : 0) : (rng() & xm);
    Word anc = rng() & xm;
    out[a] = perms_[a]((sys << xi_) | anc);
  }
  return out;
}

std::vector<double> ScrambledDistribution::output_distribution() const {
  if (2 * n_ > 20) throw CapacityError("exact output distribution needs 2n <= 20");
  const int w = 2 * xi_;
  const std::size_t size = std::size_t(1) << (2 * n_);
  std::vector<double> p(size, 0.0);
  auto push = [&](std::size_t input, double weight) {
    std::size_t out = 0;
    for (int a = 0; a < m_; ++a) {
      const Word word = (input >> (w * (m_ - 1 - a))) & low_mask(w);
      out = (out << w) | perms_[a](word);
    }
    p[out] += weight;
  };
  if (kind_ == FixedPointKind::TrivialUniform) {
    for (std::size_t x = 0; x < size; ++x) push(x, 1.0 / double(size));
  } else {
    const std::size_t nanc = std::size_t(1) << n_;
    const Word xm = low_mask(xi_);
    for (int s = 0; s < 2; ++s)
      for (std::size_t anc = 0; anc < nanc; ++anc) {
        std::size_t input = 0;
        for (int a = 0; a < m_; ++a) {
          const Word aw = (anc >> (xi_ * (m_ - 1 - a))) & xm;
          input = (input << w) | (((s ? xm : 0) << xi_) | aw);
        }
        push(input, 0.5 / double(nanc));
      }
  }
  return p;
}

std::vector<double> ScrambledDistribution::ancilla_marginal() const {
  auto p = output_distribution();
  const int w = 2 * xi_;
  std::vector<double> q(std::size_t(1) << n_, 0.0);
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (p[y] == 0) continue;
    std::size_t a = 0;
    for (int al = 0; al < m_; ++al) {
      const Word word = (y >> (w * (m_ - 1 - al))) & low_mask(w);
      a = (a << xi_) | (word & low_mask(xi_));
    }
    q[a] += p[y];
  }
  return q;
}

std::vector<int> scrambled_order_parameter(const ScrambledDistribution& d, int alpha, int bit) {
  const int w = 2 * d.xi();
  if (alpha < 0 || alpha >= d.patches() || bit < 0 || bit >= w) throw std::out_of_range("patch or bit index");
  if (w > 24) throw CapacityError("truth tables need 2 xi <= 24");
  const auto& P = d.perm(alpha);
  std::vector<int> f(std::size_t(1) << w);
  for (Word y = 0; y < f.size(); ++y) f[y] = ((P.inverse(y) >> (w - 1 - bit)) & 1U) ? -1 : 1;
  return f;
}

double scrambled_correlator(const ScrambledDistribution& d, int alpha, int i, int beta, int j) {
  auto fa = scrambled_order_parameter(d, alpha, i);
  auto fb = scrambled_order_parameter(d, beta, j);
  auto p = d.output_distribution();
  const int w = 2 * d.xi(), m = d.patches();
  double s = 0;
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (p[y] == 0) continue;
    const Word ya = (y >> (w * (m - 1 - alpha))) & low_mask(w);
    const Word yb = (y >> (w * (m - 1 - beta))) & low_mask(w);
    s += p[y] * fa[ya] * fb[yb];
  }
  return s;
}

// ---------------------------------------------------------------- distinctness

bool symmetry_equal(Word a, Word b, int w) { return a == b || a == flip_word(b, w); }

std::vector<int> signed_pattern(const std::vector<Word>& words, int w) {
  std::vector<int> pat(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::size_t c = i;
    for (std::size_t j = 0; j < i; ++j)
      if (symmetry_equal(words[i], words[j], w)) {
        c = static_cast<std::size_t>(pat[j] / 2);
        break;
      }
    pat[i] = static_cast<int>(2 * c + (words[i] != words[c] ? 1 : 0));
  }
  return pat;
}

namespace {

// Unscrambled k-batch of patch words; covariant permutations preserve every
// signed pattern, so statistics of patterns need no permutation.
void sample_batch(FixedPointKind kind, int k, int xi, int m, Rng& rng, std::vector<std::vector<Word>>& words) {
  const Word xm = low_mask(xi);
  words.assign(m, std::vector<Word>(k));
  for (int j = 0; j < k; ++j) {
    const Word s = rng() & 1U;
    for (int a = 0; a < m; ++a) {
      Word sys = kind == FixedPointKind::Z2Ssb ? (s ? xm : 0) : (rng() & xm);
      words[a][j] = (sys << xi) | (rng() & xm);
    }
  }
}

bool patchwise_distinct(const std::vector<std::vector<Word>>& words, int w) {
  for (const auto& patch : words)
    for (std::size_t i = 0; i < patch.size(); ++i)
      for (std::size_t j = i + 1; j < patch.size(); ++j)
        if (symmetry_equal(patch[i], patch[j], w)) return false;
  return true;
}

}  // namespace

DefectEstimate patchwise_distinct_defect(FixedPointKind kind, int k, int xi, int m, long N, Rng& rng) {
  if (k < 1 || xi < 1 || m < 1 || N < 1) throw std::invalid_argument("k, xi, m, N must be positive");
  if (2 * xi > 62) throw CapacityError("patch words limited to 62 bits");
  DefectEstimate d;
  d.batches = N;
  d.bound = double(m) * k * (k - 1) / std::ldexp(1.0, xi);
  long fails = 0;
  std::vector<std::vector<Word>> words;
  for (long t = 0; t < N; ++t) {
    sample_batch(kind, k, xi, m, rng, words);
    if (!patchwise_distinct(words, 2 * xi)) ++fails;
  }
  d.defect = double(fails) / double(N);
  d.sigma = std::sqrt(d.defect * (1 - d.defect) / double(N));
  return d;
}

// ---------------------------------------------------------------- distinguishability

namespace {

using PatternDist = std::map<std::vector<int>, double>;

// Per-patch pattern distribution for fixed system bits s (SSB) or uniform words.
PatternDist patch_patterns(FixedPointKind kind, int k, int xi, const std::vector<int>& s) {
  const int w = 2 * xi;
  const int free_bits = kind == FixedPointKind::Z2Ssb ? xi : w;
  const std::size_t combos = std::size_t(1) << (free_bits * k);
  const Word xm = low_mask(xi);
  PatternDist out;
  std::vector<Word> words(k);
  const double weight = 1.0 / double(combos);
  for (std::size_t c = 0; c < combos; ++c) {
    for (int j = 0; j < k; ++j) {
      const Word v = (c >> (free_bits * j)) & low_mask(free_bits);
      words[j] = kind == FixedPointKind::Z2Ssb ? (((s[j] ? xm : 0) << xi) | v) : v;
    }
    out[signed_pattern(words, w)] += weight;
  }
  return out;
}

// Joint distribution of the m per-patch patterns, as a map keyed by the concatenation.
PatternDist joint_patterns(FixedPointKind kind, int k, int xi, int m) {
  std::vector<std::pair<double, std::vector<PatternDist>>> mixture;
  if (kind == FixedPointKind::Z2Ssb) {
    for (int mask = 0; mask < (1 << k); ++mask) {
      std::vector<int> s(k);
      for (int j = 0; j < k; ++j) s[j] = (mask >> j) & 1;
      mixture.push_back({std::ldexp(1.0, -k), std::vector<PatternDist>(m, patch_patterns(kind, k, xi, s))});
    }
  } else {
    mixture.push_back({1.0, std::vector<PatternDist>(m, patch_patterns(kind, k, xi, {}))});
  }
  PatternDist joint;
  for (const auto& [wt, per] : mixture) {
    PatternDist cur{{{}, wt}};
    for (int a = 0; a < m; ++a) {
      PatternDist nxt;
      for (const auto& [key, p] : cur)
        for (const auto& [pat, q] : per[a]) {
          auto kk = key;
          kk.insert(kk.end(), pat.begin(), pat.end());
          nxt[kk] += p * q;
        }
      if (nxt.size() > 2000000) throw CapacityError("pattern table exceeds exact budget");
      cur.swap(nxt);
    }
    for (const auto& [key, p] : cur) joint[key] += p;
  }
  return joint;
}

double tv(const PatternDist& a, const PatternDist& b) {
  double s = 0;
  for (const auto& [key, p] : a) {
    auto it = b.find(key);
    s += std::abs(p - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [key, q] : b)
    if (!a.count(key)) s += q;
  return 0.5 * s;
}

}  // namespace

Advantage distinguishability_experiment(FixedPointKind a, FixedPointKind b, int k, int xi, int n, long N,
                                        Rng& rng, bool exact) {
  if (k < 1 || xi < 1 || n < 1 || n % xi) throw std::invalid_argument("need k, xi >= 1 and xi | n");
  const int m = n / xi;
  Advantage adv;
  adv.bound = 4.0 * m * k * (k - 1) / std::ldexp(1.0, xi);
  adv.vacuous = adv.bound >= 1.0;
  if (exact) {
    if (n > 6 || xi > 3 || k > 3) throw CapacityError("exact mode needs n <= 6, xi <= 3, k <= 3");
    adv.mode = "exact";
    adv.advantage = a == b ? 0.0 : tv(joint_patterns(a, k, xi, m), joint_patterns(b, k, xi, m));
    return adv;
  }
  if (N < 2) throw std::invalid_argument("sampling mode needs N >= 2");
  if (2 * xi > 62) throw CapacityError("patch words limited to 62 bits");
  adv.mode = "sampling";
  adv.draws = N;
  std::vector<std::vector<Word>> words;
  auto histogram = [&](FixedPointKind kind, std::uint64_t stream) {
    Rng r = stream_rng(stream, 0);
    std::array<std::map<std::vector<int>, long>, 2> half;
    for (long t = 0; t < N; ++t) {
      sample_batch(kind, k, xi, m, r, words);
      std::vector<int> key;
      for (const auto& patch : words) {
        auto p = signed_pattern(patch, 2 * xi);
        key.insert(key.end(), p.begin(), p.end());
      }
      half[t % 2][key]++;
    }
    return half;
  };
  const std::uint64_t sa = rng(), sb = rng();
  auto ha = histogram(a, sa), hb = histogram(b, sb);
  auto normalise = [](const std::map<std::vector<int>, long>& c, double total) {
    PatternDist d;
    for (const auto& [key, v] : c) d[key] = double(v) / total;
    return d;
  };
  auto merge = [&](const std::array<std::map<std::vector<int>, long>, 2>& h) {
    std::map<std::vector<int>, long> all = h[0];
    for (const auto& [key, v] : h[1]) all[key] += v;
    return normalise(all, double(N));
  };
  adv.advantage = tv(merge(ha), merge(hb));
  const double n0 = double((N + 1) / 2), n1 = double(N / 2);
  const double da = tv(normalise(ha[0], n0), normalise(ha[1], n1));
  const double db = tv(normalise(hb[0], n0), normalise(hb[1], n1));
  adv.sigma = 0.5 * std::hypot(da, db);
  return adv;
}

// ---------------------------------------------------------------- uniformity

UniformityTest conditional_uniformity_test(FixedPointKind kind, long N, Rng& rng) {
  constexpr int xi = 2, m = 2, k = 2, w = 4;
  constexpr long per_patch = 16 * 14;
  UniformityTest u;
  u.cells = per_patch * per_patch;
  u.draws = N;
  std::vector<long> counts(u.cells, 0);
  std::vector<std::vector<Word>> words;
  for (long t = 0; t < N; ++t) {
    do sample_batch(kind, k, xi, m, rng, words);
    while (!patchwise_distinct(words, w));
    long cell = 0;
    for (int a = 0; a < m; ++a) {
      auto P = SymmetricPermutation::sample(w, rng);
      const Word y1 = P(words[a][0]), y2 = P(words[a][1]);
      // Rank of y2 among the 14 words outside {y1, ȳ1}.
      const Word lo = std::min(y1, flip_word(y1, w)), hi = std::max(y1, flip_word(y1, w));
      const long r2 = static_cast<long>(y2) - (y2 > lo ? 1 : 0) - (y2 > hi ? 1 : 0);
      cell = cell * per_patch + static_cast<long>(y1) * 14 + r2;
    }
    counts[cell]++;
  }
  const double expect = double(N) / double(u.cells);
  for (long c : counts) u.chi2 += (double(c) - expect) * (double(c) - expect) / expect;
  const double df = double(u.cells - 1);
  u.z = (u.chi2 - df) / std::sqrt(2 * df);
  u.pass = u.z < 3.09;
  return u;
}

}  // namespace symlab
