// symlab: command-line front end for the symmetric-design experiments.
// Exit codes: 0 ok, 1 bound violation (violations.json written), 2 usage error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "symlab/classical.hpp"
#include "symlab/constructions.hpp"
#include "symlab/ensembles.hpp"
#include "symlab/groups.hpp"
#include "symlab/moments.hpp"
#include "symlab/phaselab.hpp"

#ifndef SYMLAB_VERSION
#define SYMLAB_VERSION "dev"
#endif

using namespace symlab;
using nlohmann::json;

namespace {

constexpr double kSlack = 1e-9;

struct RunConfig {
  std::string group = "Z2";
  std::vector<int> n, xi, k;
  long draws = 0;
  std::uint64_t seed = 1;
  std::string out = ".";
  bool exact = false;
  std::string config;
  // Subcommand specific.
  int anc = 1;
  std::string boundary = "periodic";
  std::string variant = "pfc";
  long D = 32, D_left = 16, D_right = 16;
  std::string kind_a = "z2_ssb", kind_b = "trivial_uniform";
  std::string phase = "ghz", strategy = "order_parameter";
  bool inflate = false;
  double target_stderr = 0.1;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json config_json(const std::string& cmd, const RunConfig& c) {
  return json{{"command", cmd},   {"group", c.group},     {"n", c.n},
              {"xi", c.xi},       {"k", c.k},             {"draws", c.draws},
              {"seed", c.seed},   {"exact", c.exact},     {"anc", c.anc},
              {"boundary", c.boundary}, {"variant", c.variant}, {"D", c.D},
              {"D_left", c.D_left},     {"D_right", c.D_right}, {"kind_a", c.kind_a},
              {"kind_b", c.kind_b},     {"phase", c.phase},     {"strategy", c.strategy},
              {"inflate", c.inflate},   {"target_stderr", c.target_stderr}};
}

/// CSV file with a `#` provenance header followed by a deterministic body.
class CsvOut {
 public:
  CsvOut(const RunConfig& c, const std::string& cmd, const std::string& name) {
    std::filesystem::create_directories(c.out);
    path_ = (std::filesystem::path(c.out) / name).string();
    os_.open(path_);
    if (!os_) throw UsageError("cannot write " + path_);
    os_ << "# symlab " << SYMLAB_VERSION << "\n# command: " << cmd << "\n# config: " << config_json(cmd, c).dump()
        << "\n# seed: " << c.seed << "\n";
  }
  std::ofstream& stream() { return os_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream os_;
};

struct Violations {
  json items = json::array();
  void add(json v) { items.push_back(std::move(v)); }
  int finish(const RunConfig& c, const std::string& cmd) const {
    if (items.empty()) return 0;
    std::ofstream os(std::filesystem::path(c.out) / "violations.json");
    os << json{{"command", cmd}, {"violations", items}}.dump(2) << "\n";
    std::cerr << items.size() << " bound violation(s); see violations.json\n";
    return 1;
  }
};

template <class T>
std::vector<T> or_default(const std::vector<T>& v, std::vector<T> d) {
  return v.empty() ? d : v;
}

FiniteGroup group_of(const RunConfig& c) { return build_group(c.group); }

// ---------------------------------------------------------------- subcommands

int cmd_twirl_verify(const RunConfig& c) {
  const std::string cmd = "twirl-verify";
  CsvOut out(c, cmd, "twirl_verify.csv");
  auto& os = out.stream();
  os << "group,n,k,D,epsilon_measured,epsilon_bound,bound_vacuous,seed\n";
  Violations viol;
  std::stringstream groups(c.group);
  std::string gname;
  while (std::getline(groups, gname, ',')) {
    auto G = build_group(gname);
    for (int n : or_default(c.n, {4}))
      for (int k : or_default(c.k, {2})) {
        const double D = std::pow(double(G.order() * c.anc), n);
        const double bound = G.order() * double(k * k) / D;
        const bool vacuous = double(k * k) > D / G.order();
        double eps = std::nan("");
        try {
          auto dec = sector_decomposition(regular_representation(G, c.anc), n);
          auto ex = exact_symmetric_haar_choi(dec, k, c.anc);
          auto ap = approx_symmetric_haar_choi(G, n, k, c.anc);
          ap.layout = ex.layout;
          eps = relative_error(ap, ex).epsilon;
        } catch (const std::exception& e) {
          if (!vacuous) throw;
        }
        os << gname << ',' << n << ',' << k << ',' << fmt(D) << ',' << fmt(eps) << ',' << fmt(bound) << ','
           << (vacuous ? "true" : "false") << ',' << c.seed << '\n';
        if (!vacuous && !(eps <= bound + kSlack))
          viol.add({{"group", gname}, {"n", n}, {"k", k}, {"epsilon", eps}, {"bound", bound}});
      }
  }
  return viol.finish(c, cmd);
}

int cmd_design_error(const RunConfig& c) {
  const std::string cmd = "design-error";
  if (c.boundary != "periodic" && c.boundary != "open") throw UsageError("boundary must be periodic or open");
  const bool periodic = c.boundary == "periodic";
  auto G = group_of(c);
  CsvOut out(c, cmd, "design_errors.csv");
  CsvOut steps_out(c, cmd, "gluing_steps.csv");
  auto& os = out.stream();
  auto& ss = steps_out.stream();
  os << "kind,group,n,xi,k,epsilon_measured,epsilon_bound,bound_vacuous,seed\n";
  ss << "group,n,xi,k,step,label,epsilon,epsilon_bound,bound_vacuous,ok\n";
  Violations viol;
  for (int n : or_default(c.n, {4}))
    for (int k : or_default(c.k, {1}))
      for (int xi : or_default(c.xi, {1})) {
        if (xi < 1 || n % xi) throw UsageError("xi must divide n");
        auto steps = gluing_steps(G, c.anc, n, xi, periodic, k);
        double eps = 0, bound = 0;
        bool vacuous = false;
        std::string kind;
        if (steps.empty()) {
          // A single patch is the exact symmetric twirl.
          EnsembleSpec s;
          s.kind = EnsembleKind::Brickwork;
          s.group = G;
          s.n_sites = n;
          s.xi = xi;
          s.periodic = periodic;
          s.ancilla_dim = c.anc;
          auto m = brickwork_choi_exact(s, k);
          eps = relative_error(m.E, m.H).epsilon;
          kind = m.geometry.kind;
        } else {
          kind = brickwork_geometry(n, xi, periodic).kind;
          eps = steps.back().epsilon;
          bound = steps.back().bound.epsilon;
          vacuous = steps.back().bound.vacuous;
        }
        for (const auto& st : steps) {
          ss << c.group << ',' << n << ',' << xi << ',' << k << ',' << st.step << ',' << st.label << ','
             << fmt(st.epsilon) << ',' << fmt(st.bound.epsilon) << ',' << (st.bound.vacuous ? "true" : "false")
             << ',' << (st.ok ? "true" : "false") << '\n';
          if (!st.ok)
            viol.add({{"n", n}, {"xi", xi}, {"k", k}, {"step", st.label}, {"epsilon", st.epsilon},
                      {"bound", st.bound.epsilon}});
        }
        os << kind << ',' << c.group << ',' << n << ',' << xi << ',' << k << ',' << fmt(eps) << ',' << fmt(bound)
           << ',' << (vacuous ? "true" : "false") << ',' << c.seed << '\n';
        if (!vacuous && eps > bound + kSlack)
          viol.add({{"n", n}, {"xi", xi}, {"k", k}, {"epsilon", eps}, {"bound", bound}});
      }
  return viol.finish(c, cmd);
}

int cmd_ti_scan(const RunConfig& c) {
  const std::string cmd = "ti-scan";
  auto G = group_of(c);
  CsvOut out(c, cmd, "ti_scan.csv");
  auto& os = out.stream();
  os << "group,n,m,xi,k,epsilon_prime,epsilon,commutant_size,threshold_xi,threshold_vacuous,seed\n";
  for (int n : or_default(c.n, {4}))
    for (int k : or_default(c.k, {1}))
      for (int xi : or_default(c.xi, {1})) {
        if (xi < 1 || n % (2 * xi)) throw UsageError("2 xi must divide n");
        const int m = n / (2 * xi);
        auto ti = ti_choi_exact(m, xi, k, G, true, c.anc);
        auto e = ti_relative_error(ti, n, xi);
        os << c.group << ',' << n << ',' << m << ',' << xi << ',' << k << ',' << fmt(e.epsilon_prime) << ','
           << fmt(e.epsilon) << ',' << e.commutant_size << ',' << fmt(e.threshold_xi) << ','
           << (e.threshold_vacuous ? "true" : "false") << ',' << c.seed << '\n';
      }
  return 0;
}

int cmd_cpru(const RunConfig& c) {
  const std::string cmd = "cpru";
  ControlledEnsembleSpec spec;
  if (c.variant == "pfc") {
    spec.variant = ControlledVariant::Pfc;
    spec.D = c.D;
  } else if (c.variant == "lrfc") {
    spec.variant = ControlledVariant::Lrfc;
    spec.D_left = c.D_left;
    spec.D_right = c.D_right;
  } else {
    throw UsageError("variant must be pfc or lrfc");
  }
  const long N = c.draws > 0 ? c.draws : 1000;
  CsvOut out(c, cmd, "cpru_bounds.csv");
  auto& os = out.stream();
  os << "variant,D,D_left,D_right,k,N,distance,stderr,bound,seed\n";
  Violations viol;
  const auto ks = or_default(c.k, {2});
  for (std::size_t i = 0; i < ks.size(); ++i) {
    Rng rng = stream_rng(c.seed, i);
    auto r = controlled_trace_distance_experiment(spec, ks[i], N, rng);
    os << c.variant << ',' << spec.system_dim() << ',' << spec.D_left << ',' << spec.D_right << ',' << ks[i] << ','
       << N << ',' << fmt(r.distance) << ',' << fmt(r.stderr_) << ',' << fmt(r.bound) << ',' << c.seed << '\n';
    if (r.distance > r.bound + 3 * r.stderr_)
      viol.add({{"k", ks[i]}, {"distance", r.distance}, {"stderr", r.stderr_}, {"bound", r.bound}});
  }
  return viol.finish(c, cmd);
}

int cmd_phase_scan(const RunConfig& c, const PhaseScanConfig& p) {
  const std::string cmd = "phase-scan";
  auto recs = run_phase_scan(p);
  json pj = {{"phase", to_string(p.phase)}, {"n", p.n},           {"xi_grid", p.xi_grid},
             {"draws", p.draws},            {"strategy", to_string(p.strategy)}, {"regions", p.regions},
             {"inflate", p.inflate},        {"seed", p.seed},     {"target_stderr", p.target_stderr}};
  RunConfig hc = c;
  hc.seed = p.seed;
  {
    CsvOut out(hc, cmd, "phase_scan.csv");
    out.stream() << "# phase_scan_config: " << pj.dump() << "\n";
    write_phase_scan_csv(out.stream(), recs);
  }
  CsvOut sum(hc, cmd, "recognition_summary.csv");
  sum.stream() << "# phase_scan_config: " << pj.dump() << "\n";
  write_summary_csv(sum.stream(), recognition_summary(recs, p.target_stderr));
  return 0;
}

int cmd_classical_scan(const RunConfig& c) {
  const std::string cmd = "classical-scan";
  const auto a = parse_fixed_point_kind(c.kind_a), b = parse_fixed_point_kind(c.kind_b);
  const long N = c.draws > 0 ? c.draws : 10000;
  CsvOut out(c, cmd, "classical_scan.csv");
  auto& os = out.stream();
  os << "kind_a,kind_b,n,xi,k,mode,advantage,bound,seed,sigma,vacuous,draws,defect,defect_sigma,defect_bound\n";
  Violations viol;
  long row = 0;
  for (int xi : or_default(c.xi, {8, 10, 12}))
    for (int k : or_default(c.k, {10}))
      for (int n0 : or_default(c.n, {0})) {
        const int n = n0 > 0 ? n0 : 2 * xi;
        if (n % xi) throw UsageError("xi must divide n");
        Rng rng = stream_rng(c.seed, static_cast<std::uint64_t>(row++));
        auto adv = distinguishability_experiment(a, b, k, xi, n, N, rng, c.exact);
        auto def = patchwise_distinct_defect(a, k, xi, n / xi, N, rng);
        os << c.kind_a << ',' << c.kind_b << ',' << n << ',' << xi << ',' << k << ',' << adv.mode << ','
           << fmt(adv.advantage) << ',' << fmt(adv.bound) << ',' << c.seed << ',' << fmt(adv.sigma) << ','
           << (adv.vacuous ? "true" : "false") << ',' << adv.draws << ',' << fmt(def.defect) << ','
           << fmt(def.sigma) << ',' << fmt(def.bound) << '\n';
        if (!adv.vacuous && adv.advantage > adv.bound + 3 * adv.sigma + kSlack)
          viol.add({{"n", n}, {"xi", xi}, {"k", k}, {"advantage", adv.advantage}, {"bound", adv.bound}});
        if (def.defect > def.bound + 3 * def.sigma + kSlack)
          viol.add({{"n", n}, {"xi", xi}, {"k", k}, {"defect", def.defect}, {"bound", def.bound}});
      }
  return viol.finish(c, cmd);
}

// ---------------------------------------------------------------- configuration

void apply_json(const std::string& path, RunConfig& c, const CLI::App& sub) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read config " + path);
  json j = json::parse(is);
  auto set = [&](const char* key, const char* flag, auto& field) {
    if (j.contains(key) && sub.count(flag) == 0) j.at(key).get_to(field);
  };
  set("group", "--group", c.group);
  set("n", "--n", c.n);
  set("xi", "--xi", c.xi);
  set("k", "--k", c.k);
  set("draws", "--draws", c.draws);
  set("seed", "--seed", c.seed);
  set("out", "--out", c.out);
  set("exact", "--exact", c.exact);
  set("anc", "--anc", c.anc);
  set("boundary", "--boundary", c.boundary);
  set("variant", "--variant", c.variant);
  set("D", "--D", c.D);
  set("D_left", "--DL", c.D_left);
  set("D_right", "--DR", c.D_right);
  set("kind_a", "--kind-a", c.kind_a);
  set("kind_b", "--kind-b", c.kind_b);
}

void common_flags(CLI::App* s, RunConfig& c) {
  s->add_option("--group", c.group, "Symmetry group descriptor (Z2, Z3, Z2xZ2, trivial)");
  s->add_option("--n", c.n, "Sites (comma list)")->delimiter(',');
  s->add_option("--xi", c.xi, "Light-cone sizes (comma list)")->delimiter(',');
  s->add_option("--k", c.k, "Moment orders (comma list)")->delimiter(',');
  s->add_option("--draws,--N", c.draws, "Monte Carlo draws");
  s->add_option("--seed", c.seed, "Master seed");
  s->add_option("--out", c.out, "Output directory");
  s->add_flag("--exact", c.exact, "Exact enumeration instead of sampling");
  s->add_option("--config", c.config, "JSON config file; explicit flags take precedence");
  s->add_option("--anc", c.anc, "Ancilla dimension per site");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symlab: symmetric random unitaries and phase-recognition experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SYMLAB_VERSION);
  RunConfig c;

  auto* tv = app.add_subcommand("twirl-verify", "Approximate vs exact symmetric twirl error against |G|k^2/D");
  auto* de = app.add_subcommand("design-error", "Two-layer brickwork relative error and gluing chain");
  auto* ti = app.add_subcommand("ti-scan", "Translation-invariant brickwork error and threshold");
  auto* cp = app.add_subcommand("cpru", "Controlled-ensemble trace distance against the analytic bound");
  auto* ps = app.add_subcommand("phase-scan", "Recognition strategies on scrambled stabilizer fixed points");
  auto* cs = app.add_subcommand("classical-scan", "Classical scrambling: distinguishing advantage and defect");
  for (auto* s : {tv, de, ti, cp, ps, cs}) common_flags(s, c);
  de->add_option("--boundary", c.boundary, "periodic or open");
  cp->add_option("--variant", c.variant, "pfc or lrfc");
  cp->add_option("--D", c.D, "pfc system dimension");
  cp->add_option("--DL", c.D_left, "lrfc left dimension");
  cp->add_option("--DR", c.D_right, "lrfc right dimension");
  cs->add_option("--kind-a", c.kind_a, "First fixed point (z2_ssb or trivial_uniform)");
  cs->add_option("--kind-b", c.kind_b, "Second fixed point");
  ps->add_option("--phase", c.phase, "trivial, ghz, cluster or toric");
  ps->add_option("--strategy", c.strategy, "order_parameter, string_order, mi, cmi or tee");
  ps->add_flag("--inflate", c.inflate, "Grow regions with the light cone");
  ps->add_option("--target-stderr", c.target_stderr, "Target standard error of the shot model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (sub == ps) {
      PhaseScanConfig p;
      if (!c.config.empty()) {
        std::ifstream is(c.config);
        if (!is) throw UsageError("cannot read config " + c.config);
        std::stringstream buf;
        buf << is.rdbuf();
        p = phase_scan_config_from_json(buf.str());
      }
      if (ps->count("--phase")) p.phase = parse_phase_kind(c.phase);
      if (ps->count("--strategy")) p.strategy = parse_strategy(c.strategy);
      if (ps->count("--n")) p.n = c.n.at(0);
      if (ps->count("--xi")) p.xi_grid = c.xi;
      if (ps->count("--draws")) p.draws = c.draws;
      if (ps->count("--seed")) p.seed = c.seed;
      if (ps->count("--inflate")) p.inflate = c.inflate;
      if (ps->count("--target-stderr")) p.target_stderr = c.target_stderr;
      return cmd_phase_scan(c, p);
    }
    if (!c.config.empty()) apply_json(c.config, c, *sub);
    if (sub == tv) return cmd_twirl_verify(c);
    if (sub == de) return cmd_design_error(c);
    if (sub == ti) return cmd_ti_scan(c);
    if (sub == cp) return cmd_cpru(c);
    return cmd_classical_scan(c);
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
