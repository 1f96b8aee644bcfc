#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "symlab/classical.hpp"

using namespace symlab;

namespace {

// Every covariant permutation of w-bit words, by filtering all permutations.
std::vector<SymmetricPermutation> all_covariant(int w) {
  std::vector<Word> t(std::size_t(1) << w);
  std::iota(t.begin(), t.end(), Word(0));
  std::vector<SymmetricPermutation> out;
  do {
    bool ok = true;
    for (Word x = 0; x < t.size() && ok; ++x) ok = t[flip_word(x, w)] == flip_word(t[x], w);
    if (ok) out.push_back(SymmetricPermutation::from_table(w, t));
  } while (std::next_permutation(t.begin(), t.end()));
  return out;
}

// Brute-force TV between permutation-averaged k-batch output distributions.
double brute_force_tv(FixedPointKind a, FixedPointKind b, int n, int xi, int k) {
  const int m = n / xi;
  auto perms = all_covariant(2 * xi);
  const std::size_t single = std::size_t(1) << (2 * n);
  std::size_t outcomes = 1;
  for (int j = 0; j < k; ++j) outcomes *= single;
  std::vector<double> pa(outcomes, 0.0), pb(outcomes, 0.0);
  std::vector<int> idx(m, 0);
  long combos = 0;
  while (true) {
    std::vector<SymmetricPermutation> choice;
    for (int al = 0; al < m; ++al) choice.push_back(perms[idx[al]]);
    for (auto [kind, acc] : {std::pair{a, &pa}, std::pair{b, &pb}}) {
      auto p = ScrambledDistribution(kind, n, xi, choice).output_distribution();
      for (std::size_t o = 0; o < outcomes; ++o) {
        double v = 1;
        std::size_t t = o;
        for (int j = 0; j < k; ++j) {
          v *= p[t % single];
          t /= single;
        }
        (*acc)[o] += v;
      }
    }
    ++combos;
    int al = 0;
    while (al < m && ++idx[al] == static_cast<int>(perms.size())) idx[al++] = 0;
    if (al == m) break;
  }
  double s = 0;
  for (std::size_t o = 0; o < outcomes; ++o) s += std::abs(pa[o] - pb[o]);
  return 0.5 * s / double(combos);
}

}  // namespace

TEST_CASE("covariant permutations") {
  Rng rng(1);
  // w = 1: identity or flip, each about half the time.
  int ident = 0;
  for (int t = 0; t < 10000; ++t) ident += SymmetricPermutation::sample(1, rng)(0) == 0;
  CHECK(std::abs(ident - 5000) < 250);

  for (int w = 1; w <= 10; ++w) {
    auto P = SymmetricPermutation::sample(w, rng);
    CHECK(P.covariant());
    std::vector<Word> seen(P.table());
    std::sort(seen.begin(), seen.end());
    for (Word x = 0; x < seen.size(); ++x) CHECK(seen[x] == x);
    for (Word x = 0; x < seen.size(); ++x) CHECK(P.inverse(P(x)) == x);
    // The flip has no fixed points, so there are 2^{w−1} orbits.
    long orbits = 0;
    for (Word x = 0; x < seen.size(); ++x) orbits += x < flip_word(x, w);
    CHECK(orbits == (1L << (w - 1)));
  }

  // Uniform over the 8 covariant permutations of two bits.
  auto all2 = all_covariant(2);
  REQUIRE(all2.size() == 8);
  std::map<std::vector<Word>, long> hist;
  const long N = 16000;
  for (long t = 0; t < N; ++t) hist[SymmetricPermutation::sample(2, rng).table()]++;
  CHECK(hist.size() == 8);
  double chi2 = 0;
  for (const auto& [tab, c] : hist) chi2 += (c - N / 8.0) * (c - N / 8.0) / (N / 8.0);
  CHECK(chi2 < 24.3);  // χ²₇ at 0.001

  for (int w : {1, 2, 5, 8, 12}) {
    auto K = SymmetricPermutation::keyed(w, 0xABCDEFULL + w);
    CHECK(K.covariant());
    std::vector<char> hit(std::size_t(1) << w, 0);
    bool bij = true;
    for (Word x = 0; x < hit.size(); ++x) {
      Word y = K(x);
      bij = bij && !hit[y] && K.inverse(y) == x;
      hit[y] = 1;
    }
    CHECK(bij);
  }
  auto wide = SymmetricPermutation::keyed(32, 99);
  for (Word x : {Word(0), Word(12345), Word(0xFFFFFFFFULL), Word(0x80000001ULL)}) {
    CHECK(wide.inverse(wide(x)) == x);
    CHECK(wide(flip_word(x, 32)) == flip_word(wide(x), 32));
  }
  CHECK_THROWS_AS(SymmetricPermutation::sample(25, rng), CapacityError);
  CHECK_THROWS(SymmetricPermutation::from_table(2, {0, 1, 3, 2}));
}

TEST_CASE("fixed point distributions") {
  auto s = fixed_point_distribution(FixedPointKind::Z2Ssb, 3);
  CHECK(s[0] == 0.5);
  CHECK(s[7] == 0.5);
  CHECK(std::accumulate(s.begin(), s.end(), 0.0) == doctest::Approx(1.0));
  for (int x = 0; x < 8; ++x) CHECK(s[x] == s[7 - x]);
  auto u = fixed_point_distribution(FixedPointKind::TrivialUniform, 4);
  for (double v : u) CHECK(v == doctest::Approx(1.0 / 16));
  CHECK(parse_fixed_point_kind("z2_ssb") == FixedPointKind::Z2Ssb);
  CHECK_THROWS(parse_fixed_point_kind("ising"));
}

TEST_CASE("scrambled distributions") {
  Rng rng(2);
  const int n = 4, xi = 2;
  std::vector<SymmetricPermutation> id(2, SymmetricPermutation::identity(4));
  // Identity permutations: p0 on system bits times uniform ancilla.
  auto p = ScrambledDistribution(FixedPointKind::Z2Ssb, n, xi, id).output_distribution();
  for (std::size_t y = 0; y < p.size(); ++y) {
    const int sys = static_cast<int>(((y >> 6) & 3) << 2 | ((y >> 2) & 3));
    const double want = (sys == 0 || sys == 15) ? 0.5 / 16 : 0.0;
    CHECK(p[y] == doctest::Approx(want));
  }
  for (int trial = 0; trial < 5; ++trial) {
    ScrambledDistribution ssb(FixedPointKind::Z2Ssb, n, xi, rng);
    for (int i = 0; i < xi; ++i)
      for (int j = 0; j < xi; ++j) {
        CHECK(scrambled_correlator(ssb, 0, i, 1, j) == doctest::Approx(1.0));
        CHECK(scrambled_correlator(ssb, 0, i + xi, 1, j) == doctest::Approx(0.0).epsilon(1e-12));
      }
    ScrambledDistribution triv(FixedPointKind::TrivialUniform, n, xi, rng);
    CHECK(scrambled_correlator(triv, 0, 0, 1, 1) == doctest::Approx(0.0).epsilon(1e-12));
    for (double v : triv.output_distribution()) CHECK(v == doctest::Approx(1.0 / 256));
    for (double v : triv.ancilla_marginal()) CHECK(v == doctest::Approx(1.0 / 16));
  }
  // Identity scrambling leaves f′ equal to the bare single-bit parity.
  ScrambledDistribution plain(FixedPointKind::Z2Ssb, n, xi, id);
  auto f = scrambled_order_parameter(plain, 1, 0);
  for (Word y = 0; y < 16; ++y) CHECK(f[y] == (((y >> 3) & 1) ? -1 : 1));
  for (double v : plain.ancilla_marginal()) CHECK(v == doctest::Approx(1.0 / 16));

  // A fixed covariant permutation can move system bits into ancilla positions:
  // swapping the halves makes the SSB ancilla marginal non-uniform.
  std::vector<Word> swap(16);
  for (Word x = 0; x < 16; ++x) swap[x] = ((x & 3) << 2) | (x >> 2);
  std::vector<SymmetricPermutation> sw(2, SymmetricPermutation::from_table(4, swap));
  auto q = ScrambledDistribution(FixedPointKind::Z2Ssb, n, xi, sw).ancilla_marginal();
  CHECK(q[0] == doctest::Approx(0.5));
  CHECK(q[15] == doctest::Approx(0.5));
  // Averaged over random covariant permutations it is uniform.
  std::vector<double> avg(16, 0.0);
  const int draws = 4000;
  for (int t = 0; t < draws; ++t) {
    auto m = ScrambledDistribution(FixedPointKind::Z2Ssb, n, xi, rng).ancilla_marginal();
    for (int a = 0; a < 16; ++a) avg[a] += m[a] / draws;
  }
  for (double v : avg) CHECK(std::abs(v - 1.0 / 16) < 0.01);

  // Sampler agrees with the exact distribution.
  ScrambledDistribution d(FixedPointKind::Z2Ssb, n, xi, rng);
  auto exact = d.output_distribution();
  std::vector<double> emp(256, 0.0);
  const long N = 200000;
  for (long t = 0; t < N; ++t) {
    auto wds = d.sample(rng);
    emp[(wds[0] << 4) | wds[1]] += 1.0 / N;
  }
  for (int y = 0; y < 256; ++y) CHECK(std::abs(emp[y] - exact[y]) < 5 * std::sqrt(exact[y] / N) + 1e-12);
  CHECK_THROWS(ScrambledDistribution(FixedPointKind::Z2Ssb, 5, 2, rng));
}

TEST_CASE("signed patterns") {
  CHECK(signed_pattern({1, 2, 3}, 4) == std::vector<int>{0, 2, 4});
  CHECK(signed_pattern({1, 14, 1}, 4) == std::vector<int>{0, 1, 0});
  CHECK(signed_pattern({5, 3, 10, 12}, 4) == std::vector<int>{0, 2, 1, 3});
  CHECK(symmetry_equal(0b0101, 0b1010, 4));
  CHECK_FALSE(symmetry_equal(0b0101, 0b1011, 4));
}

TEST_CASE("patchwise distinctness defect") {
  Rng rng(3);
  CHECK(patchwise_distinct_defect(FixedPointKind::Z2Ssb, 1, 4, 2, 1000, rng).defect == 0.0);
  CHECK(patchwise_distinct_defect(FixedPointKind::Z2Ssb, 10, 12, 2, 10, rng).bound ==
        doctest::Approx(180.0 / 4096));
  double prev = 1.0;
  for (int xi : {8, 10, 12}) {
    auto d = patchwise_distinct_defect(FixedPointKind::Z2Ssb, 10, xi, 2, 20000, rng);
    INFO("xi=" << xi << " defect=" << d.defect << " bound=" << d.bound);
    CHECK(d.defect <= d.bound + 3 * d.sigma);
    CHECK(d.defect < prev);
    prev = d.defect;
  }
}

TEST_CASE("distinguishability: pattern sufficiency against brute force") {
  Rng rng(4);
  struct Case {
    int n, xi, k;
  };
  for (auto c : {Case{2, 1, 2}, Case{3, 1, 2}, Case{2, 1, 3}}) {
    auto ex = distinguishability_experiment(FixedPointKind::Z2Ssb, FixedPointKind::TrivialUniform, c.k, c.xi, c.n,
                                            0, rng, true);
    const double bf = brute_force_tv(FixedPointKind::Z2Ssb, FixedPointKind::TrivialUniform, c.n, c.xi, c.k);
    INFO("n=" << c.n << " k=" << c.k);
    CHECK(ex.advantage == doctest::Approx(bf).epsilon(1e-10));
    CHECK(ex.advantage > 0);
  }
  auto same = distinguishability_experiment(FixedPointKind::Z2Ssb, FixedPointKind::Z2Ssb, 2, 2, 4, 0, rng, true);
  CHECK(same.advantage == 0.0);
  auto ex = distinguishability_experiment(FixedPointKind::Z2Ssb, FixedPointKind::TrivialUniform, 2, 2, 4, 0, rng, true);
  CHECK(ex.bound == doctest::Approx(4.0));
  CHECK(ex.vacuous);
  CHECK(std::isfinite(ex.advantage));
  auto sm = distinguishability_experiment(FixedPointKind::Z2Ssb, FixedPointKind::TrivialUniform, 2, 2, 4, 100000, rng,
                                          false);
  CHECK(std::abs(sm.advantage - ex.advantage) < 5 * sm.sigma + 0.005);
  // Exact advantage shrinks with ξ at fixed n.
  auto e1 = distinguishability_experiment(FixedPointKind::Z2Ssb, FixedPointKind::TrivialUniform, 2, 1, 6, 0, rng, true);
  auto e3 = distinguishability_experiment(FixedPointKind::Z2Ssb, FixedPointKind::TrivialUniform, 2, 3, 6, 0, rng, true);
  CHECK(e3.advantage < e1.advantage);
  CHECK_THROWS_AS(distinguishability_experiment(FixedPointKind::Z2Ssb, FixedPointKind::TrivialUniform, 4, 2, 4, 0,
                                                rng, true),
                  CapacityError);
}

TEST_CASE("sampled advantage at wide patches") {
  Rng rng(5);
  auto s = distinguishability_experiment(FixedPointKind::Z2Ssb, FixedPointKind::TrivialUniform, 10, 12, 24, 20000,
                                         rng, false);
  CHECK(s.bound == doctest::Approx(4 * 2 * 90 / 4096.0));
  CHECK_FALSE(s.vacuous);
  CHECK(s.advantage <= s.bound + 3 * s.sigma);
}

TEST_CASE("conditional uniformity on the symmetric distinct subspace") {
  Rng rng(6);
  auto u = conditional_uniformity_test(FixedPointKind::Z2Ssb, 300000, rng);
  INFO("chi2=" << u.chi2 << " z=" << u.z);
  CHECK(u.cells == 224 * 224);
  CHECK(u.pass);
}
