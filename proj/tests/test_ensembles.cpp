#include <cmath>

#include "doctest.h"
#include "symlab/ensembles.hpp"
#include "symlab/perm.hpp"
#include "symlab/tensor_core.hpp"

using namespace symlab;

namespace {

// Random rank-two Hermitian test operator: generic enough to expose any
// discrepancy of a linear map, cheap to push through sampled unitaries.
Mat random_hermitian(long dim, Rng& rng) {
  std::normal_distribution<double> g;
  Vec a(dim), b(dim);
  for (long i = 0; i < dim; ++i) {
    a(i) = cplx(g(rng), g(rng));
    b(i) = cplx(g(rng), g(rng));
  }
  return a * a.adjoint() - 0.5 * b * b.adjoint();
}

EnsembleSpec brickwork(const std::string& group, int n, int xi, bool periodic, int anc = 1) {
  EnsembleSpec s;
  s.kind = EnsembleKind::Brickwork;
  s.group = build_group(group);
  s.n_sites = n;
  s.xi = xi;
  s.periodic = periodic;
  s.ancilla_dim = anc;
  return s;
}

// ‖MC mean − exact‖_F against the Monte Carlo Frobenius error.
double mc_gap_sigmas(const EnsembleSpec& spec, const ChoiCoefficients& E, int k, long N, std::uint64_t seed) {
  EnsembleSampler smp(spec);
  Rng rng(seed);
  const long d = static_cast<long>(std::pow(double(smp.dim()), k));
  Mat A = random_hermitian(d, rng);
  auto mc = monte_carlo_twirl([&](Rng& r) { return smp.sample(r); }, A, k, N, rng);
  Mat ex = apply_channel_dense(E, A);
  return (mc.mean - ex).norm() / mc.frobenius_sigma;
}

}  // namespace

TEST_CASE("sampled unitaries commute with the symmetry") {
  Rng rng(11);
  auto z2 = build_group("Z2");
  auto rep = regular_representation(z2);
  EnsembleSpec sh;
  sh.group = z2;
  sh.n_sites = 2;
  Mat U = sample_unitary(sh, rng);
  CHECK((U.adjoint() * U - Mat::Identity(4, 4)).norm() < 1e-10);
  CHECK(is_symmetric(U, rep, 2, 1e-9));
  // X⊗X charge sectors are computational parity after a Hadamard on each site.
  Mat H = Mat::Ones(2, 2);
  H(1, 1) = -1;
  H /= std::sqrt(2.0);
  Mat HH = kron(H, H);
  Mat Up = HH * U * HH;
  double off = 0;
  for (int a : {0, 3})
    for (int b : {1, 2}) off += std::norm(Up(a, b)) + std::norm(Up(b, a));
  CHECK(off < 1e-10);

  for (auto spec : {brickwork("Z2", 4, 1, true), brickwork("Z3", 3, 1, false), brickwork("Z2", 6, 1, true)}) {
    Mat V = sample_unitary(spec, rng);
    CHECK((V.adjoint() * V - Mat::Identity(V.rows(), V.cols())).norm() < 1e-9);
    CHECK(is_symmetric(V, regular_representation(spec.group), spec.n_sites, 1e-9));
  }
  auto ti = brickwork("Z2", 4, 1, true);
  ti.kind = EnsembleKind::TiBrickwork;
  Mat T = sample_unitary(ti, rng);
  CHECK(is_symmetric(T, rep, 4, 1e-9));
  // Translation by two sites (one patch) commutes with the TI circuit.
  Mat shift = copy_permutation({2, 3, 0, 1}, 2);
  CHECK((shift * T * shift.adjoint() - T).norm() < 1e-9);
}

TEST_CASE("in-place site application matches the dense embedding") {
  Rng rng(3);
  std::vector<int> dims = {2, 3, 2, 2};
  for (std::vector<int> sites : {std::vector<int>{1, 3}, {3, 0}, {2}, {0, 1, 2, 3}}) {
    long d = 1;
    for (int s : sites) d *= dims[s];
    Mat op = haar_unitary(static_cast<int>(d), rng);
    Mat M = haar_unitary(24, rng);
    Mat want = embed_operator(op, dims, sites) * M;
    apply_on_sites(op, dims, sites, M);
    CHECK((M - want).norm() < 1e-10);
  }
}

TEST_CASE("brickwork light cone on an open chain") {
  Rng rng(5);
  auto spec = brickwork("Z2", 4, 1, false);
  Mat U = sample_unitary(spec, rng);
  Mat Z = Mat::Zero(2, 2);
  Z(0, 0) = 1;
  Z(1, 1) = -1;
  Mat I2 = Mat::Identity(2, 2);
  Mat op = kron_all({Z, I2, I2, I2});
  SubsystemLayout lay{{2, 2, 2, 2}};
  // An operator is supported on the first s sites iff it equals its normalised
  // partial trace tensored with the identity.
  auto supported_on_prefix = [&](const Mat& h, int s) {
    std::vector<int> keep;
    for (int i = 0; i < s; ++i) keep.push_back(i);
    const long rest = 1L << (4 - s);
    Mat red = partial_trace(h, lay, keep) / double(rest);
    return (kron(red, Mat::Identity(rest, rest)) - h).norm() < 1e-9;
  };
  Mat heis = U.adjoint() * op * U;  // early layer only reaches site 1
  CHECK(supported_on_prefix(heis, 2));
  Mat fwd = U * op * U.adjoint();   // early then late patch: sites 0..2
  CHECK(supported_on_prefix(fwd, 3));
  CHECK_FALSE(supported_on_prefix(fwd, 2));
}

TEST_CASE("single patch brickwork equals the exact symmetric twirl") {
  auto z2 = build_group("Z2");
  for (int k : {1, 2}) {
    auto m = brickwork_choi_exact(brickwork("Z2", 3, 3, false), k);
    auto dec = sector_decomposition(regular_representation(z2), 3);
    auto h = exact_symmetric_haar_choi(dec, k, 1);
    CHECK((choi_dense(m.E) - choi_dense(h)).norm() < 1e-9);
    CHECK(relative_error(m.E, m.H).epsilon < 1e-9);
  }
}

TEST_CASE("brickwork moments match dense Monte Carlo") {
  struct Case {
    EnsembleSpec spec;
    int k;
    long N;
  };
  std::vector<Case> cases = {{brickwork("Z2", 3, 1, false), 1, 4000},
                             {brickwork("Z2", 3, 1, false), 2, 2000},
                             {brickwork("Z2", 4, 1, false), 2, 1500},
                             {brickwork("Z2", 4, 1, true), 2, 1500},
                             {brickwork("Z3", 2, 1, false), 2, 3000}};
  std::uint64_t seed = 100;
  for (auto& c : cases) {
    auto mom = brickwork_choi_exact(c.spec, c.k);
    double s = mc_gap_sigmas(c.spec, mom.E, c.k, c.N, seed++);
    INFO("n=" << c.spec.n_sites << " k=" << c.k << " periodic=" << c.spec.periodic);
    CHECK(s < 5.0);
  }
}

TEST_CASE("brickwork error: finite, below the gluing bound, decreasing in xi") {
  // Characters of the regular representation vanish off the identity, so k = 1 glues exactly.
  auto m = brickwork_choi_exact(brickwork("Z2", 3, 1, false), 1);
  double eps = relative_error(m.E, m.H).epsilon;
  auto b = gluing_bound(0, 0, 1, 2, 4, 4, 2, 8);
  CHECK(eps < 1e-12);
  CHECK_FALSE(b.vacuous);
  CHECK(eps <= b.epsilon + 1e-12);
  // k = 2 with ancillas: nonzero error below a non-vacuous bound.
  for (auto [g, anc] : {std::pair<const char*, int>{"trivial", 8}, {"Z2", 4}}) {
    auto mk = brickwork_choi_exact(brickwork(g, 3, 1, false, anc), 2);
    const int G = build_group(g).order();
    const double d = G * anc;
    double e2 = relative_error(mk.E, mk.H).epsilon;
    auto b2 = gluing_bound(0, 0, 2, G, d * d, d * d, d, d * d * d);
    INFO(g << " eps=" << e2 << " bound=" << b2.epsilon);
    CHECK(e2 > 1e-3);
    CHECK_FALSE(b2.vacuous);
    CHECK(e2 <= b2.epsilon);
  }

  auto z2 = build_group("Z2");
  for (auto& st : gluing_steps(z2, 1, 6, 1, false, 1)) CHECK(st.ok);

  // ξ = 1 at k = 2 for n ≥ 6 needs corner algebras of ~10⁴ cosets and more; skipped.
  for (int n : {4, 6, 8}) {
    for (int k : {1, 2}) {
      double prev = std::numeric_limits<double>::infinity();
      for (int xi = 1; xi <= n / 2; ++xi) {
        if (n % xi || (k == 2 && n >= 6 && xi == 1)) continue;
        auto mm = brickwork_choi_exact(brickwork("Z2", n, xi, true), k);
        double e = relative_error(mm.E, mm.H).epsilon;
        INFO("n=" << n << " k=" << k << " xi=" << xi << " eps=" << e);
        CHECK(e <= prev + 1e-12);
        prev = e;
      }
    }
  }
}

TEST_CASE("gluing bound formula") {
  auto b = gluing_bound(0, 0, 1, 2, 4, 4, 2, 8);
  CHECK(b.epsilon == doctest::Approx(16.0 / 9 * 5.0 / 4 - 1));
  CHECK(b.epsilon == doctest::Approx(1.2222222222));
  CHECK(gluing_bound(0, 0, 2, 2, 4, 16, 16, 64).vacuous);  // k²|G| = 2 D_AB
  // |G| = 1 specialisation.
  auto t = gluing_bound(0.1, 0.2, 1, 1, 8, 8, 4, 32);
  double want = 1.1 * 1.2 / ((1 - 1.0 / 16) * (1 - 1.0 / 16)) * (1 + 1.0 / 32) - 1;
  CHECK(t.epsilon == doctest::Approx(want));
  CHECK_THROWS(gluing_bound(0, 0, 1, 2, 0, 4, 2, 8));
}

TEST_CASE("two-layer threshold") {
  auto t = two_layer_threshold(16, 2, 2, 1.0);
  CHECK(t.log2_value == doctest::Approx(7.0));
  CHECK(t.xi_log2 == 7);
  CHECK(t.xi_logG == 7);
  auto z = two_layer_threshold(4, 1, 2, 1.0);
  CHECK(z.xi_log2 == 3);
  auto one = two_layer_threshold(1, 1, 1, 1.0);
  CHECK(one.xi_log2 == 0);
  CHECK(std::isinf(one.logG_value));
  CHECK_THROWS(two_layer_threshold(4, 1, 2, 0.0));
}

TEST_CASE("squaring a design squares its error") {
  auto m = brickwork_choi_exact(brickwork("Z2", 3, 1, false), 1);
  auto same = compose_and_square_check(m.H, m.H);
  CHECK(same.epsilon < 1e-12);
  CHECK(same.epsilon_squared < 1e-12);
  CHECK(same.pass);
  CHECK(compose_and_square_check(m.E, m.H).pass);
  for (auto spec : {brickwork("trivial", 3, 1, false, 8), brickwork("Z2", 3, 1, false, 8)}) {
    auto mk = brickwork_choi_exact(spec, 2);
    auto sc = compose_and_square_check(mk.E, mk.H);
    INFO("eps=" << sc.epsilon << " eps2=" << sc.epsilon_squared);
    CHECK(sc.applicable);
    CHECK(sc.pass);
    CHECK(sc.epsilon_squared > 0);
  }
  // Scalar perturbation on a one-dimensional support: ε(x) = |x|, ε′ = |(1+x)²−1|.
  auto g1 = build_group("trivial");
  auto h = exact_symmetric_haar_choi(sector_decomposition(regular_representation(g1), 1), 1, 2);
  ChoiCoefficients p = h;
  const double x = 0.1;
  p.N *= 1 + x;
  auto s2 = compose_and_square_check(p, h);
  CHECK(s2.epsilon == doctest::Approx(x));
  CHECK(s2.epsilon_squared == doctest::Approx((1 + x) * (1 + x) - 1));
}

TEST_CASE("self-composition matches the composed ensemble") {
  auto bw = brickwork("Z2", 3, 1, false);
  auto mom = brickwork_choi_exact(bw, 2);
  EnsembleSpec twice;
  twice.kind = EnsembleKind::Composed;
  twice.group = bw.group;
  twice.n_sites = 3;
  twice.parts = {bw, bw};
  CHECK(mc_gap_sigmas(twice, compose_with_self(mom.E), 2, 2000, 77) < 5.0);
}

TEST_CASE("translation-invariant moments") {
  auto triv = build_group("trivial");
  // m = 1: one patch of two half patches is the plain patch twirl.
  auto t1 = ti_choi_exact(1, 1, 1, triv, true, 2);
  auto h1 = exact_symmetric_haar_choi(sector_decomposition(regular_representation(triv), 2), 1, 2);
  CHECK((choi_dense(t1.E) - choi_dense(h1)).norm() < 1e-9);

  EnsembleSpec s;
  s.kind = EnsembleKind::TiBrickwork;
  s.group = triv;
  s.ancilla_dim = 2;
  s.xi = 1;
  for (int m : {2, 3}) {
    s.n_sites = 2 * m;
    auto t = ti_choi_exact(m, 1, 1, triv, true, 2);
    double g = mc_gap_sigmas(s, t.E, 1, 4000, 700 + m);
    INFO("m=" << m);
    CHECK(g < 5.0);
  }
  // Symmetric variant.
  auto z2 = build_group("Z2");
  EnsembleSpec sz = s;
  sz.group = z2;
  sz.ancilla_dim = 1;
  sz.xi = 2;
  sz.n_sites = 8;
  auto tz = ti_choi_exact(2, 2, 1, z2, true, 1);
  CHECK(mc_gap_sigmas(sz, tz.E, 1, 3000, 901) < 5.0);

  auto e = ti_relative_error(ti_choi_exact(2, 1, 1, triv, true, 2), 4, 1);
  CHECK(std::isfinite(e.epsilon));
  CHECK(e.epsilon == doctest::Approx(3 * e.epsilon_prime));
  CHECK(e.threshold_vacuous);
  CHECK(e.threshold_xi == doctest::Approx(std::log2(32.0 * 4096)));
  // δΦ = 0 when the patch twirl is replaced by the approximate twirl itself.
  TiMoment same = ti_choi_exact(2, 1, 1, triv, true, 2);
  same.E = same.A;
  CHECK(ti_relative_error(same, 4, 1).epsilon < 1e-12);
  CHECK_THROWS_AS(ti_choi_exact(4, 1, 2, triv, false, 2), CapacityError);
}

TEST_CASE("permutation sum bounds by enumeration") {
  for (int K = 1; K <= 6; ++K) {
    auto r = perm_sum_bruteforce(K);
    INFO("K=" << K);
    CHECK(r.bound1_violations == 0);
    CHECK(r.bound2_violations == 0);
    CHECK(r.bound1_checks > 0);
    CHECK(r.identity_lhs <= 8.0);
  }
  // K = 2, D = 8, τ = swap: D^{-0}D^{-1} + D^{-1}D^{-0}.
  CHECK(perm_sum_lhs({1, 0}, 8.0) == doctest::Approx(2.0 / 8));
  CHECK(perm_sum_lhs({0, 1}, 8.0) == doctest::Approx(1 + 1.0 / 64));
  // Commuting permutations with the translation: m^k k!.
  Perm T = translation_perm(3, 2);
  long commuting = 0;
  for (const auto& s : all_perms(6))
    if (perm_compose(s, T) == perm_compose(T, s)) ++commuting;
  CHECK(commuting == 9 * 2);
}
