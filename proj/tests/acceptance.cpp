// Acceptance run: one PASS/FAIL line per criterion with the measured numbers.
// Usage: acceptance [path-to-symlab-cli [criterion ids...]]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "symlab/classical.hpp"
#include "symlab/constructions.hpp"
#include "symlab/ensembles.hpp"
#include "symlab/moments.hpp"
#include "symlab/perm.hpp"
#include "symlab/phaselab.hpp"
#include "symlab/tensor_core.hpp"

using namespace symlab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << why << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

int failures = 0;
std::set<int> selected;  // empty runs every criterion

void run(int id, const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
  if (!selected.empty() && !selected.count(id)) return;
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  char rt[64];
  std::snprintf(rt, sizeof rt, " runtime=%.1fs (budget %.0fs)", secs, budget_s);
  o.detail << rt;
  o.require(secs < budget_s, "runtime budget exceeded");
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ":" << o.detail.str() << std::endl;
}

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Mat random_hermitian(long dim, Rng& rng) {
  std::normal_distribution<double> nd;
  Vec a(dim), b(dim);
  for (long i = 0; i < dim; ++i) {
    a(i) = cplx(nd(rng), nd(rng));
    b(i) = cplx(nd(rng), nd(rng));
  }
  return a * a.adjoint() - 0.5 * b * b.adjoint();
}

// ‖MC − exact‖_F in units of the Monte Carlo Frobenius standard error.
double mc_sigmas(const UnitarySampler& smp, long dim, const ChoiCoefficients& E, int k, long N, std::uint64_t seed) {
  Rng rng(seed);
  const long d = static_cast<long>(std::pow(double(dim), k));
  Mat A = random_hermitian(d, rng);
  auto mc = monte_carlo_twirl(smp, A, k, N, rng);
  return (mc.mean - apply_channel_dense(E, A)).norm() / mc.frobenius_sigma;
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

// ---------------------------------------------------------------- criteria

void weingarten(Outcome& o) {
  double worst = 0;
  int tables = 0;
  for (int k = 1; k <= 4; ++k)
    for (long D = k; D <= 8; ++D) {
      auto wt = weingarten_table(k, D);
      ++tables;
      auto ps = all_perms(k);
      for (const auto& a : ps)
        for (const auto& b : ps) {
          double s = 0;
          for (const auto& t : ps)
            s += std::pow(double(D), perm_cycles(perm_compose(perm_inverse(a), t))) *
                 wt.value(perm_compose(perm_inverse(t), b));
          worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
        }
    }
  int rational_ok = 0;
  for (long D = 2; D <= 8; ++D) {
    auto wt = weingarten_table(2, D);
    std::string id, sw;
    for (std::size_t c = 0; c < wt.cycle_types.size(); ++c)
      (wt.cycle_types[c] == perm_cycle_type({0, 1}) ? id : sw) = wt.exact[c];
    rational_ok += wt.exact_mode && id == "1/" + std::to_string(D * D - 1) &&
                   sw == "-1/" + std::to_string(D * (D * D - 1));
  }
  o.detail << " tables=" << tables << " max|Wg*Gram - I|=" << g(worst) << " k=2 rationals exact " << rational_ok
           << "/7";
  o.require(worst < 1e-9, "Weingarten inverse deviation");
  o.require(rational_ok == 7, "k=2 rational values");
}

void approx_twirl(Outcome& o) {
  int points = 0;
  double worst_ratio = 0;
  for (const char* gname : {"Z2", "Z3", "Z2xZ2"}) {
    auto G = build_group(gname);
    for (int n : {3, 4, 5})
      for (int k : {1, 2}) {
        const double D = std::pow(double(G.order()), n);
        if (double(k * k) > D / G.order()) continue;
        auto dec = sector_decomposition(regular_representation(G), n);
        auto ex = exact_symmetric_haar_choi(dec, k);
        auto ap = approx_symmetric_haar_choi(G, n, k);
        ap.layout = ex.layout;
        const double eps = relative_error(ap, ex).epsilon;
        const double bound = G.order() * double(k * k) / D;
        ++points;
        worst_ratio = std::max(worst_ratio, eps / bound);
        if (!(eps <= bound + 1e-9))
          o.require(false, std::string(gname) + " n=" + std::to_string(n) + " k=" + std::to_string(k) +
                               " eps=" + g(eps) + " > " + g(bound));
      }
  }
  o.detail << " grid points=" << points << " max eps/bound=" << g(worst_ratio);
  o.require(points == 18, "grid incomplete");
}

void oracle_equivalence(Outcome& o) {
  const long N = 100000;
  double worst = 0;
  int points = 0;
  long max_dim = 0;
  auto record = [&](const std::string& label, double s) {
    ++points;
    worst = std::max(worst, s);
    if (!(s < 5.0)) o.require(false, label + " at " + g(s) + " sigma");
  };
  // Global symmetric Haar twirl.
  struct HaarCase {
    const char* group;
    int n, k;
  };
  for (auto c : {HaarCase{"Z2", 3, 1}, HaarCase{"Z2", 3, 2}, HaarCase{"Z2", 2, 2}, HaarCase{"Z3", 2, 1},
                 HaarCase{"Z3", 3, 1}, HaarCase{"Z2xZ2", 2, 1}, HaarCase{"Z2", 6, 1}}) {
    auto dec = sector_decomposition(regular_representation(build_group(c.group)), c.n);
    auto E = exact_symmetric_haar_choi(dec, c.k);
    max_dim = std::max(max_dim, static_cast<long>(std::pow(double(dec.total_dim), c.k)));
    const double s = mc_sigmas([&](Rng& r) { return sample_sector_haar(dec, r); }, dec.total_dim, E, c.k, N,
                               1000 + points);
    record(std::string("haar ") + c.group + " n=" + std::to_string(c.n) + " k=" + std::to_string(c.k), s);
  }
  // Two-layer brickwork.
  struct BwCase {
    const char* group;
    int n, xi;
    bool periodic;
    int anc, k;
  };
  for (auto c : {BwCase{"Z2", 3, 1, false, 1, 1}, BwCase{"Z2", 3, 1, false, 1, 2}, BwCase{"Z2", 4, 1, true, 1, 1},
                 BwCase{"Z3", 3, 1, false, 1, 1}, BwCase{"Z2", 6, 1, true, 1, 1}, BwCase{"Z2", 6, 2, false, 1, 1},
                 BwCase{"trivial", 3, 1, false, 2, 2}}) {
    auto spec = brickwork(c.group, c.n, c.xi, c.periodic, c.anc);
    auto m = brickwork_choi_exact(spec, c.k);
    EnsembleSampler smp(spec);
    max_dim = std::max(max_dim, static_cast<long>(std::pow(double(smp.dim()), c.k)));
    const double s =
        mc_sigmas([&](Rng& r) { return smp.sample(r); }, smp.dim(), m.E, c.k, N, 2000 + points);
    record(std::string("brickwork ") + c.group + " n=" + std::to_string(c.n) + " k=" + std::to_string(c.k), s);
  }
  o.detail << " grid points=" << points << " draws=" << N << " max dense dim=" << max_dim
           << " max deviation=" << g(worst) << " sigma (limit 5)";
  o.require(max_dim <= 64, "grid exceeds dense dimension 64");
}

struct GluingCase {
  const char* group;
  int anc, n, xi;
  bool periodic;
  int k;
};
const std::vector<GluingCase> kGluingGrid = {
    {"Z2", 1, 6, 2, false, 1}, {"Z2", 1, 6, 2, false, 2}, {"Z2", 1, 6, 1, false, 1}, {"Z2", 1, 6, 1, true, 1},
    {"Z2", 1, 8, 2, true, 1},  {"Z2", 1, 8, 2, true, 2},  {"trivial", 8, 3, 1, false, 2},
    {"Z2", 4, 3, 1, false, 2}, {"Z2", 8, 3, 1, false, 2}};

void gluing(Outcome& o) {
  int steps = 0, nonvacuous = 0, nonzero = 0;
  for (const auto& c : kGluingGrid) {
    auto G = build_group(c.group);
    for (const auto& st : gluing_steps(G, c.anc, c.n, c.xi, c.periodic, c.k)) {
      ++steps;
      if (st.bound.vacuous) continue;
      ++nonvacuous;
      nonzero += st.epsilon > 1e-6;
      if (!st.ok)
        o.require(false, std::string(c.group) + " n=" + std::to_string(c.n) + " step " + st.label + " eps=" +
                             g(st.epsilon) + " > " + g(st.bound.epsilon));
    }
  }
  o.detail << " configurations=" << kGluingGrid.size() << " steps=" << steps << " non-vacuous=" << nonvacuous
           << " (nonzero eps: " << nonzero << ")";
  o.require(nonvacuous > 0 && nonzero > 0, "no informative grid point");
}

void squaring(Outcome& o) {
  int moments = 0, applicable = 0;
  double worst = 0;
  for (const auto& c : kGluingGrid) {
    auto m = brickwork_choi_exact(brickwork(c.group, c.n, c.xi, c.periodic, c.anc), c.k);
    auto sq = compose_and_square_check(m.E, m.H);
    ++moments;
    if (!sq.applicable) continue;
    ++applicable;
    worst = std::max(worst, sq.epsilon_squared - 2 * sq.epsilon * sq.epsilon);
    if (!(sq.epsilon_squared <= 2 * sq.epsilon * sq.epsilon + 1e-9))
      o.require(false, std::string(c.group) + " n=" + std::to_string(c.n) + " eps=" + g(sq.epsilon) +
                           " eps(E∘E)=" + g(sq.epsilon_squared));
  }
  o.detail << " moments=" << moments << " with eps<=1/3: " << applicable
           << " max(eps(E∘E) - 2eps^2)=" << g(worst);
  o.require(applicable > 0, "no applicable moment");
}

void ti(Outcome& o) {
  auto triv = build_group("trivial");
  auto t = ti_choi_exact(2, 1, 1, triv, true, 2);
  EnsembleSpec s;
  s.kind = EnsembleKind::TiBrickwork;
  s.group = triv;
  s.ancilla_dim = 2;
  s.xi = 1;
  s.n_sites = 4;
  EnsembleSampler smp(s);
  const double sig = mc_sigmas([&](Rng& r) { return smp.sample(r); }, smp.dim(), t.E, 1, 20000, 3001);
  o.detail << " MC m=2 k=1 D=4/patch deviation=" << g(sig) << " sigma";
  o.require(sig < 5.0, "TI Monte Carlo");
  long v1 = 0, v2 = 0, checks = 0;
  for (int K = 1; K <= 6; ++K) {
    auto r = perm_sum_bruteforce(K);
    v1 += r.bound1_violations;
    v2 += r.bound2_violations;
    checks += r.bound1_checks + r.bound2_checks;
  }
  o.detail << "; permutation bounds K<=6: " << checks << " checks, violations " << v1 << "+" << v2;
  o.require(v1 == 0 && v2 == 0, "permutation bound violation");
  auto e = ti_relative_error(t, 4, 1);
  o.detail << "; eps=" << g(e.epsilon) << " threshold xi>=" << g(e.threshold_xi) << " at xi=1 ("
           << (e.threshold_vacuous ? "vacuous" : "non-vacuous") << ")";
}

void controlled(Outcome& o) {
  ControlledEnsembleSpec p;
  p.D = 32;
  ControlledEnsembleSpec l;
  l.variant = ControlledVariant::Lrfc;
  l.D_left = 16;
  l.D_right = 16;
  const long N = 100000;
  int idx = 0;
  for (const auto& [name, spec] : {std::pair{"PFC D=32", p}, std::pair{"LRFC 16x16", l}})
    for (int k : {1, 2}) {
      Rng rng = stream_rng(4242, idx++);
      auto r = controlled_trace_distance_experiment(spec, k, N, rng);
      o.detail << " " << name << " k=" << k << ": " << g(r.distance) << "±" << g(r.stderr_);
      if (k == 2) {
        o.detail << " (bound " << g(r.bound) << ")";
        o.require(r.distance <= r.bound + 3 * r.stderr_, std::string(name) + " above bound");
      } else {
        o.require(r.distance <= 3 * r.stderr_, std::string(name) + " k=1 not consistent with zero");
      }
    }
}

PhaseScanConfig scan(PhaseKind p, Strategy s, int n, std::vector<int> xis, long draws, bool inflate,
                     std::uint64_t seed) {
  PhaseScanConfig c;
  c.phase = p;
  c.strategy = s;
  c.n = n;
  c.xi_grid = std::move(xis);
  c.draws = draws;
  c.inflate = inflate;
  c.seed = seed;
  return c;
}

void stabilizer(Outcome& o) {
  // Fixed points.
  const double ghz0 = run_phase_scan(scan(PhaseKind::Ghz, Strategy::OrderParameter, 72, {0}, 1, false, 1))[0].value;
  const double cl0 = run_phase_scan(scan(PhaseKind::Cluster, Strategy::StringOrder, 72, {0}, 1, false, 1))[0].value;
  const double tc0 = run_phase_scan(scan(PhaseKind::Toric, Strategy::Tee, 6, {0}, 1, false, 1))[0].value;
  o.detail << " xi=0: GHZ <Z1Zn>=" << ghz0 << " cluster string=" << cl0 << " toric 6x6 TEE=" << tc0;
  o.require(ghz0 == 1 && cl0 == 1 && tc0 == 1, "fixed-point values");

  // Exact preservation with light-cone inflated regions.
  const std::vector<int> xis = {1, 2, 3};
  auto exact_count = [&](const PhaseScanConfig& c, double want, const std::string& label) {
    long ok = 0, total = 0;
    std::map<double, long> hist;
    for (const auto& r : run_phase_scan(c)) {
      ++total;
      ok += r.value == want;
      hist[r.value]++;
    }
    o.detail << "; " << label << " " << ok << "/" << total;
    if (ok != total) {
      std::ostringstream h;
      for (auto [v, cnt] : hist) h << v << ":" << cnt << " ";
      o.detail << " (values " << h.str() << ")";
      o.require(false, label + " not preserved exactly");
    }
  };
  exact_count(scan(PhaseKind::Ghz, Strategy::OrderParameter, 72, xis, 100, true, 11), 1, "GHZ dressed Z1Zn");
  exact_count(scan(PhaseKind::Ghz, Strategy::Mi, 72, xis, 100, true, 12), 1, "GHZ inflated MI");
  exact_count(scan(PhaseKind::Cluster, Strategy::StringOrder, 72, xis, 100, true, 13), 1, "cluster dressed string");
  for (int xi : xis)
    exact_count(scan(PhaseKind::Toric, Strategy::Tee, 24, {xi}, 20, true, 14 + xi), 1,
                "toric 24x24 inflated TEE xi=" + std::to_string(xi));

  // Bare order parameters average to zero.
  double worst = 0;
  for (auto [p, s] : {std::pair{PhaseKind::Ghz, Strategy::OrderParameter},
                      std::pair{PhaseKind::Cluster, Strategy::StringOrder}})
    for (const auto& row : recognition_summary(run_phase_scan(scan(p, s, 72, xis, 1000, false, 21)))) {
      const double z = row.stderr_ > 0 ? std::abs(row.mean) / row.stderr_ : (row.mean == 0 ? 0 : INFINITY);
      worst = std::max(worst, z);
    }
  o.detail << "; bare means max |mean|/stderr=" << g(worst) << " (limit 3)";
  o.require(worst <= 3, "bare order parameter mean not consistent with zero");

  // Entropy cost growth where the cut entropy grows linearly.
  int rises = 0;
  for (auto p : {PhaseKind::Ghz, PhaseKind::Trivial}) {
    auto rows = recognition_summary(run_phase_scan(scan(p, Strategy::Mi, 72, {0, 1, 2, 3}, 100, true, 31)));
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double ds = rows[i + 1].mean_cut_entropy - rows[i].mean_cut_entropy;
      if (ds < 1) continue;
      ++rises;
      if (!(rows[i + 1].cost >= std::exp2(ds) * rows[i].cost * (1 - 1e-9) || rows[i + 1].cost >= 2 * rows[i].cost))
        o.require(false, "entropy cost not geometric");
    }
  }
  o.detail << "; entropy-cost growth steps checked=" << rises;
  o.require(rises > 0, "no linear entropy growth observed");
}

void classical(Outcome& o) {
  Rng rng(777);
  long fails = 0;
  for (long t = 0; t < 100000; ++t) {
    const int w = 2 + 2 * static_cast<int>(t % 4);
    fails += !SymmetricPermutation::sample(w, rng).covariant();
  }
  long keyed_fail = 0;
  for (int t = 0; t < 1000; ++t) {
    auto K = SymmetricPermutation::keyed(32, rng());
    for (int q = 0; q < 100; ++q) {
      const Word x = rng() & 0xFFFFFFFFULL;
      keyed_fail += K(flip_word(x, 32)) != flip_word(K(x), 32) || K.inverse(K(x)) != x;
    }
  }
  o.detail << " covariance failures " << fails << "/100000 tables, " << keyed_fail << " keyed w=32";
  o.require(fails == 0 && keyed_fail == 0, "covariance");

  for (int xi : {8, 10, 12}) {
    auto d = patchwise_distinct_defect(FixedPointKind::Z2Ssb, 10, xi, 2, 100000, rng);
    o.detail << "; defect xi=" << xi << ": " << g(d.defect) << "±" << g(d.sigma) << " (bound " << g(d.bound) << ")";
    o.require(d.defect <= d.bound + 3 * d.sigma, "defect above bound");
  }
  auto u = conditional_uniformity_test(FixedPointKind::Z2Ssb, 500000, rng);
  o.detail << "; chi2 z=" << g(u.z) << " over " << u.cells << " cells";
  o.require(u.pass, "uniformity chi2");
  int nonvac = 0;
  for (int xi : {8, 10, 12}) {
    auto a = distinguishability_experiment(FixedPointKind::Z2Ssb, FixedPointKind::TrivialUniform, 10, xi, 2 * xi,
                                           100000, rng, false);
    o.detail << "; advantage xi=" << xi << ": " << g(a.advantage) << " (bound " << g(a.bound)
             << (a.vacuous ? ", vacuous" : "") << ")";
    if (a.vacuous) continue;
    ++nonvac;
    o.require(a.advantage <= a.bound, "advantage above bound");
  }
  o.require(nonvac > 0, "no non-vacuous point");
}

// File body without '#' header lines, which record the output directory.
std::string body(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::string line, out;
  while (std::getline(is, line))
    if (line.empty() || line[0] != '#') out += line + '\n';
  return out;
}

void determinism(Outcome& o, const std::string& cli) {
  if (cli.empty() || !std::filesystem::exists(cli)) {
    o.require(false, "CLI binary not found");
    return;
  }
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "symlab_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::string> scans = {
      "twirl-verify --group Z2,Z3 --n 3,4 --k 1,2",
      "design-error --group Z2 --n 6 --xi 1,2,3 --k 1",
      "ti-scan --group trivial --anc 2 --n 4 --xi 1 --k 1",
      "cpru --variant pfc --D 8 --k 1,2 --N 500",
      "phase-scan --phase ghz --strategy mi --n 24 --xi 0,1,2 --draws 20 --inflate",
      "classical-scan --xi 4,6 --k 3 --draws 2000",
      "classical-scan --xi 1,2 --n 4 --k 2 --exact"};
  int files = 0, identical = 0;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path d = root / (std::to_string(i) + "_" + std::to_string(rep));
      dirs.push_back(d);
      const std::string cmd = "\"" + cli + "\" " + scans[i] + " --seed 99 --out \"" + d.string() + "\" >/dev/null";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) o.require(false, "exit status " + std::to_string(rc) + " for: " + scans[i]);
    }
    if (!fs::exists(dirs[0])) continue;
    for (const auto& f : fs::directory_iterator(dirs[0])) {
      ++files;
      if (body(f.path()) == body(dirs[1] / f.path().filename())) ++identical;
      else o.require(false, "differs: " + f.path().filename().string() + " for " + scans[i]);
    }
  }
  fs::remove_all(root);
  o.detail << " scans=" << scans.size() << " files compared=" << files << " byte-identical=" << identical;
  o.require(files > 0, "no output files");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  for (int i = 2; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  run(1, "Weingarten correctness", 1, weingarten);
  run(2, "Approximate-twirl bound", 60, approx_twirl);
  run(3, "Oracle equivalence", 300, oracle_equivalence);
  run(4, "Gluing bound", 120, gluing);
  run(5, "Design squaring", 600, squaring);
  run(6, "Translation-invariant formula", 600, ti);
  run(7, "Controlled ensembles", 900, controlled);
  run(8, "Stabilizer diagnostics", 600, stabilizer);
  run(9, "Classical construction", 300, classical);
  run(10, "Determinism", 600, [&](Outcome& o) { determinism(o, cli); });
  const int total = selected.empty() ? 10 : static_cast<int>(selected.size());
  std::cout << "acceptance: " << (total - failures) << "/" << total << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
