#include "doctest.h"
#include "symlab/moments.hpp"
#include "symlab/tensor_core.hpp"

using namespace symlab;

TEST_CASE("Weingarten inverts the permutation Gram matrix") {
  for (int k = 1; k <= 4; ++k)
    for (long D : {4L, 7L}) {
      auto wt = weingarten_table(k, D);
      CHECK(wt.exact_mode);
      auto ps = all_perms(k);
      for (size_t a = 0; a < ps.size(); ++a)
        for (size_t b = 0; b < ps.size(); ++b) {
          double s = 0;
          for (const auto& t : ps)
            s += std::pow(double(D), perm_cycles(perm_compose(perm_inverse(ps[a]), t))) *
                 wt.value(perm_compose(perm_inverse(t), ps[b]));
          CHECK(s == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10));
        }
    }
  auto w2 = weingarten_table(2, 3);
  CHECK(w2.value({0, 1}) == doctest::Approx(1.0 / 8));
  CHECK(w2.value({1, 0}) == doctest::Approx(-1.0 / 24));
  CHECK(w2.exact[0] == "1/8");
  CHECK_THROWS(weingarten_table(3, 2));
  CHECK_THROWS_AS(weingarten_table(8, 10), CapacityError);
}

TEST_CASE("normalised characters match dense traces") {
  auto g = build_group("Z3");
  WreathGroup W(g, 2);
  auto rep = regular_representation(g);
  for (int w = 0; w < W.size(); ++w) {
    Mat O = W.dense(w, rep.matrices);
    CHECK(O.trace().real() / 9.0 == doctest::Approx(W.normalized_character(w, 3.0)));
    for (int v = 0; v < W.size(); ++v) {
      Mat P = W.dense(v, rep.matrices);
      CHECK((O * P - W.dense(W.mul(w, v), rep.matrices)).norm() < 1e-12);
    }
    CHECK((O.adjoint() - W.dense(W.inv(w), rep.matrices)).norm() < 1e-12);
  }
}

TEST_CASE("dense label operators agree with the wreath embedding") {
  auto g = build_group("Z2");
  auto L = single_block_layout(g, 2, 2);
  auto rep = regular_representation(g);
  std::vector<Mat> region(2);
  for (int h = 0; h < 2; ++h) region[h] = kron(rep.matrices[h], rep.matrices[h]);
  for (long x = 0; x < L->size_x(); ++x)
    CHECK((dense_label_operator(*L, L->X, x) - L->W->dense(static_cast<int>(x), region)).norm() < 1e-12);
}

namespace {
Mat symmetric_haar(const SectorDecomposition& dec, Rng& rng) {
  Mat blk = Mat::Zero(dec.total_dim, dec.total_dim);
  for (const auto& s : dec.sectors) {
    Mat U = haar_unitary(static_cast<int>(s.multiplicity), rng);
    blk.block(s.offset, s.offset, s.multiplicity * s.irrep_dim, s.multiplicity * s.irrep_dim) =
        kron(U, Mat::Identity(s.irrep_dim, s.irrep_dim));
  }
  return dec.basis_change * blk * dec.basis_change.adjoint();
}
}  // namespace

TEST_CASE("exact symmetric Haar twirl is an idempotent fixing commutant") {
  auto g = build_group("Z2");
  auto dec = sector_decomposition(regular_representation(g), 2);
  auto c = exact_symmetric_haar_choi(dec, 2);
  Rng rng(7);
  Mat A = Mat::Random(16, 16);
  Mat PA = apply_channel_dense(c, A);
  CHECK((apply_channel_dense(c, PA) - PA).norm() < 1e-10);
  for (long x = 0; x < c.layout->size_x(); ++x) {
    Mat O = dense_label_operator(*c.layout, c.layout->X, x);
    CHECK((apply_channel_dense(c, O) - O).norm() < 1e-10);
  }
  // Commutes with a symmetric unitary tensor power.
  Mat U = symmetric_haar(dec, rng);
  Mat U2 = kron(U, U);
  CHECK((U2 * PA * U2.adjoint() - PA).norm() < 1e-10);
  // Choi is the average of |vec U⊗U><vec U⊗U|: trace = D^k.
  Mat J = choi_dense(c);
  CHECK(J.trace().real() == doctest::Approx(16.0));
  CHECK(relative_error_dense(J, J) < 1e-10);
}

TEST_CASE("corner relative error matches the dense oracle") {
  for (auto name : {"trivial", "Z2", "Z3"}) {
    auto g = build_group(name);
    int n = g.order() == 1 ? 1 : (g.order() == 3 ? 1 : 2);
    int anc = g.order() == 1 ? 4 : 1;
    for (int k : {1, 2}) {
      auto gap = approx_symmetric_haar_choi(g, n, k, anc);
      auto rep = regular_representation(g, anc);
      auto dec = sector_decomposition(rep, n);
      bool ok = true;
      for (const auto& s : dec.sectors) ok = ok && s.multiplicity >= k;
      if (!ok) continue;
      auto ex = exact_symmetric_haar_choi(dec, k, anc);
      gap.layout = ex.layout;
      auto r = relative_error(gap, ex);
      double d = relative_error_dense(choi_dense(gap), choi_dense(ex));
      CAPTURE(name);
      CAPTURE(k);
      CHECK(r.epsilon == doctest::Approx(d).epsilon(1e-8));
      CHECK(r.leakage < 1e-10);
      auto sq = compose_with_self(gap);
      double d2 = relative_error_dense(choi_dense(sq), choi_dense(ex));
      CHECK(relative_error(sq, ex).epsilon == doctest::Approx(d2).epsilon(1e-8));
    }
  }
}

TEST_CASE("Monte Carlo twirl converges to the exact symmetric twirl") {
  auto g = build_group("Z2");
  auto dec = sector_decomposition(regular_representation(g), 2);
  auto c = exact_symmetric_haar_choi(dec, 2);
  Rng rng(11);
  Mat A = Mat::Random(16, 16);
  auto mc = monte_carlo_twirl([&](Rng& r) { return symmetric_haar(dec, r); }, A, 2, 4000, rng);
  Mat exact = apply_channel_dense(c, A);
  CHECK((mc.mean - exact).norm() < 5 * mc.frobenius_sigma);
  auto mj = monte_carlo_choi([&](Rng& r) { return symmetric_haar(dec, r); }, 2, 2000, rng);
  CHECK((mj.mean - choi_dense(c)).norm() < 5 * mj.frobenius_sigma);
}

TEST_CASE("Monte Carlo is deterministic across thread counts") {
  auto g = build_group("Z2");
  auto dec = sector_decomposition(regular_representation(g), 1);
  Mat A = Mat::Random(4, 4);
  auto run = [&] {
    Rng rng(5);
    return monte_carlo_twirl([&](Rng& r) { return symmetric_haar(dec, r); }, A, 2, 100, rng).mean;
  };
  Mat a = run();
  setenv("SYMLAB_THREADS", "3", 1);
  Mat b = run();
  unsetenv("SYMLAB_THREADS");
  CHECK((a - b).norm() == 0.0);
}
