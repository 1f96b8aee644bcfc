#include "symlab/phaselab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "symlab/parallel.hpp"

namespace symlab {

namespace {

using Regions = std::vector<std::vector<int>>;

std::vector<int> range(int a, int b) {
  std::vector<int> r;
  for (int i = a; i < b; ++i) r.push_back(i);
  return r;
}

std::vector<int> join(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Slightly below ceil so that representation error in x does not add a shot.
double safe_ceil(double x) { return std::max(1.0, std::ceil(x * (1 - 1e-12))); }

struct Setup {
  int qubits = 0;
  std::vector<int> order;  // scrambling chain, empty for 0..qubits−1
  Regions regions;
};

int expected_region_count(Strategy s) {
  switch (s) {
    case Strategy::OrderParameter:
    case Strategy::StringOrder:
      return 1;
    case Strategy::Mi:
      return 2;
    default:
      return 3;
  }
}

void validate_regions(const Regions& regions, Strategy s, int qubits) {
  if (static_cast<int>(regions.size()) != expected_region_count(s))
    throw std::invalid_argument("invalid regions: wrong number of regions for " + to_string(s));
  std::set<int> seen;
  for (const auto& r : regions) {
    if (r.empty()) throw std::invalid_argument("invalid regions: empty region");
    for (int q : r) {
      if (q < 0 || q >= qubits) throw std::invalid_argument("invalid regions: qubit out of range");
      if (!seen.insert(q).second) throw std::invalid_argument("invalid regions: overlapping regions");
    }
  }
  if (s == Strategy::StringOrder) {
    const auto& r = regions[0];
    if (r.size() != 2 || r[1] - r[0] < 2 || (r[1] - r[0]) % 2)
      throw std::invalid_argument("invalid regions: string order needs endpoints a < b with b − a even");
  }
}

// Default geometries; inflated regions grow by 2ξ where the region is not a
// light-cone image of a base region.
Setup make_setup(const PhaseScanConfig& cfg, int xi) {
  Setup s;
  const bool lattice = cfg.strategy == Strategy::Tee;
  if (cfg.phase == PhaseKind::Toric && !lattice)
    throw std::invalid_argument("the toric phase is only scanned with the tee strategy");
  if (lattice && cfg.phase != PhaseKind::Toric && cfg.phase != PhaseKind::Trivial)
    throw std::invalid_argument("tee needs a toric or trivial lattice state");
  if (cfg.phase == PhaseKind::Cluster && cfg.n % 2) throw std::invalid_argument("cluster ring needs even n");
  const int n = cfg.n;
  if (lattice) {
    Lattice L{n, n};
    s.qubits = L.qubits();
    s.order = L.snake();
  } else {
    s.qubits = n;
  }
  if (!cfg.regions.empty()) {
    if (cfg.inflate && xi > 0 && (cfg.strategy == Strategy::Cmi || cfg.strategy == Strategy::Tee))
      throw std::invalid_argument("invalid regions: explicit cmi/tee regions cannot be inflated");
    s.regions = cfg.regions;
    validate_regions(s.regions, cfg.strategy, s.qubits);
    return s;
  }
  const int grow = cfg.inflate ? 2 * xi : 0;
  switch (cfg.strategy) {
    case Strategy::OrderParameter:
      s.regions = {{0, n - 1}};
      break;
    case Strategy::StringOrder: {
      const int b = (n / 2) - (n / 2) % 2;
      s.regions = {{0, b}};
      break;
    }
    case Strategy::Mi:
      s.regions = {{0}, {n / 2}};
      break;
    case Strategy::Cmi: {
      const int q = 3 + grow;
      if (3 * q >= n) throw std::invalid_argument("invalid regions: cmi regions do not fit the ring");
      s.regions = {range(0, q), range(q, 2 * q), range(2 * q, 3 * q)};
      break;
    }
    case Strategy::Tee: {
      Lattice L{n, n};
      const int w = 2 + grow;
      if (n < 2 * w + 2 * xi + 2) throw std::invalid_argument("invalid regions: tee disk does not fit the torus");
      const int o = (n - 2 * w) / 2;
      auto box = [&](int x0, int x1, int y0, int y1) {
        std::vector<int> r;
        for (int y = y0; y < y1; ++y)
          for (int x = x0; x < x1; ++x) {
            r.push_back(L.h(x, y));
            r.push_back(L.v(x, y));
          }
        return r;
      };
      s.regions = {box(o, o + w, o, o + w), box(o + w, o + 2 * w, o, o + w), box(o, o + 2 * w, o + w, o + 2 * w)};
      break;
    }
  }
  validate_regions(s.regions, cfg.strategy, s.qubits);
  return s;
}

StabilizerTableau prepare(PhaseKind p, int qubits, int n) {
  switch (p) {
    case PhaseKind::Trivial:
      return prepare_product(qubits);
    case PhaseKind::Ghz:
      return prepare_ghz(n);
    case PhaseKind::Cluster:
      return prepare_cluster(n);
    case PhaseKind::Toric:
      return prepare_toric(Lattice{n, n});
  }
  throw std::logic_error("unreachable");
}

PauliString base_operator(Strategy s, int qubits, const std::vector<int>& r) {
  if (s == Strategy::OrderParameter) return PauliString::on(qubits, r, 'Z');
  // Z_a X_{a+1} X_{a+3} ⋯ X_{b−1} Z_b: a product of cluster stabilizers on one sublattice.
  const int a = r[0], b = r[1];
  PauliString P = PauliString::single(qubits, a, 'Z') * PauliString::single(qubits, b, 'Z');
  for (int i = a + 1; i < b; i += 2) P = P * PauliString::single(qubits, i, 'X');
  return P;
}

std::string grid_id(const PhaseScanConfig& cfg, int xi) {
  return to_string(cfg.phase) + "-" + to_string(cfg.strategy) + "-n" + std::to_string(cfg.n) + "-xi" +
         std::to_string(xi) + (cfg.inflate ? "-inflated" : "-bare");
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

PhaseKind parse_phase_kind(const std::string& s) {
  if (s == "trivial") return PhaseKind::Trivial;
  if (s == "ghz") return PhaseKind::Ghz;
  if (s == "cluster") return PhaseKind::Cluster;
  if (s == "toric") return PhaseKind::Toric;
  throw std::invalid_argument("unknown phase kind: " + s);
}

Strategy parse_strategy(const std::string& s) {
  if (s == "order_parameter") return Strategy::OrderParameter;
  if (s == "string_order") return Strategy::StringOrder;
  if (s == "mi") return Strategy::Mi;
  if (s == "cmi") return Strategy::Cmi;
  if (s == "tee") return Strategy::Tee;
  throw std::invalid_argument("unknown strategy: " + s);
}

std::string to_string(PhaseKind p) {
  static const char* names[] = {"trivial", "ghz", "cluster", "toric"};
  return names[static_cast<int>(p)];
}

std::string to_string(Strategy s) {
  static const char* names[] = {"order_parameter", "string_order", "mi", "cmi", "tee"};
  return names[static_cast<int>(s)];
}

Symmetry strategy_symmetry(Strategy s) {
  switch (s) {
    case Strategy::OrderParameter:
    case Strategy::Mi:
      return Symmetry::Z2X;
    case Strategy::StringOrder:
    case Strategy::Cmi:
      return Symmetry::Z2xZ2EvenOdd;
    case Strategy::Tee:
      return Symmetry::None;
  }
  return Symmetry::None;
}

bool is_entropic(Strategy s) { return s == Strategy::Mi || s == Strategy::Cmi || s == Strategy::Tee; }

PhaseScanConfig phase_scan_config_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  static const std::set<std::string> known = {"phase",  "n",       "xi_grid", "draws",        "strategy",
                                              "regions", "inflate", "seed",    "target_stderr"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw std::invalid_argument("unknown config field: " + key);
  PhaseScanConfig c;
  if (j.contains("phase")) c.phase = parse_phase_kind(j.at("phase").get<std::string>());
  if (j.contains("n")) c.n = j.at("n").get<int>();
  if (j.contains("xi_grid")) c.xi_grid = j.at("xi_grid").get<std::vector<int>>();
  if (j.contains("draws")) c.draws = j.at("draws").get<long>();
  if (j.contains("strategy")) c.strategy = parse_strategy(j.at("strategy").get<std::string>());
  if (j.contains("regions")) c.regions = j.at("regions").get<Regions>();
  if (j.contains("inflate")) c.inflate = j.at("inflate").get<bool>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("target_stderr")) c.target_stderr = j.at("target_stderr").get<double>();
  return c;
}

double entropy_sample_cost(double s2_bits, double target_stderr) {
  if (target_stderr <= 0) throw std::invalid_argument("target_stderr must be positive");
  if (s2_bits < 0) throw std::invalid_argument("entropy must be nonnegative");
  return safe_ceil(std::exp2(s2_bits) / (target_stderr * target_stderr));
}

double operator_sample_cost(double mean, double target_stderr) {
  if (target_stderr <= 0) throw std::invalid_argument("target_stderr must be positive");
  return safe_ceil(1.0 / std::max(mean * mean, target_stderr * target_stderr));
}

std::vector<int> forward_light_cone(const std::vector<PatchGate>& circuit, const std::vector<int>& region) {
  std::set<int> cone(region.begin(), region.end());
  for (const auto& g : circuit)
    if (std::any_of(g.qubits.begin(), g.qubits.end(), [&](int q) { return cone.count(q) > 0; }))
      cone.insert(g.qubits.begin(), g.qubits.end());
  return {cone.begin(), cone.end()};
}

std::string format_region(std::vector<int> region) {
  std::sort(region.begin(), region.end());
  std::string out;
  for (std::size_t i = 0; i < region.size();) {
    std::size_t j = i;
    while (j + 1 < region.size() && region[j + 1] == region[j] + 1) ++j;
    if (!out.empty()) out += '+';
    out += std::to_string(region[i]);
    if (j > i) out += "-" + std::to_string(region[j]);
    i = j + 1;
  }
  return out;
}

std::vector<ExperimentRecord> run_phase_scan(const PhaseScanConfig& cfg) {
  if (cfg.draws < 1) throw std::invalid_argument("draws must be positive");
  if (cfg.xi_grid.empty()) throw std::invalid_argument("empty xi grid");
  if (cfg.target_stderr <= 0) throw std::invalid_argument("target_stderr must be positive");
  std::vector<ExperimentRecord> out;
  const Symmetry sym = strategy_symmetry(cfg.strategy);
  for (std::size_t gi = 0; gi < cfg.xi_grid.size(); ++gi) {
    const int xi = cfg.xi_grid[gi];
    if (xi < 0) throw std::invalid_argument("xi must be nonnegative");
    const Setup setup = make_setup(cfg, xi);
    const std::uint64_t master = splitmix64(cfg.seed + 0x9E37ULL * (gi + 1));
    std::vector<ExperimentRecord> recs(cfg.draws);
    parallel_chunks(static_cast<int>(cfg.draws), [&](int d) {
      Rng rng = stream_rng(master, static_cast<std::uint64_t>(d));
      auto state = prepare(cfg.phase, setup.qubits, cfg.n);
      const auto circuit = brickwork_circuit(setup.qubits, xi, sym, rng, 2, setup.order);
      for (const auto& g : circuit) state.apply(g.c, g.qubits);

      ExperimentRecord r;
      r.experiment_id = grid_id(cfg, xi);
      r.phase = cfg.phase;
      r.strategy = cfg.strategy;
      r.n = cfg.n;
      r.qubits = setup.qubits;
      r.xi = xi;
      r.inflate = cfg.inflate;
      r.draw = d;
      r.draws = cfg.draws;
      r.seed = cfg.seed;
      const auto& R = setup.regions;
      if (!is_entropic(cfg.strategy)) {
        PauliString P = base_operator(cfg.strategy, setup.qubits, R[0]);
        if (cfg.inflate)
          for (const auto& g : circuit) P = conjugate_on(g.c, g.qubits, P);
        r.region = format_region(P.support());
        r.value = state.expectation(P);
        r.cost = operator_sample_cost(r.value, cfg.target_stderr);
      } else {
        int smax = 0;
        auto S = [&](const std::vector<int>& q) {
          const int e = state.entropy(q);
          smax = std::max(smax, e);
          return e;
        };
        if (cfg.strategy == Strategy::Mi) {
          auto A = R[0], B = R[1];
          if (cfg.inflate) {
            A = forward_light_cone(circuit, A);
            B = forward_light_cone(circuit, B);
            for (int q : A)
              if (std::count(B.begin(), B.end(), q))
                throw std::invalid_argument("invalid regions: inflated mi regions overlap");
          }
          r.region = format_region(A) + "|" + format_region(B);
          r.value = S(A) + S(B) - S(join(A, B));
        } else if (cfg.strategy == Strategy::Cmi) {
          const auto &A = R[0], &B = R[1], &C = R[2];
          r.region = format_region(A) + "|" + format_region(B) + "|" + format_region(C);
          r.value = S(join(A, C)) + S(join(B, C)) - S(C) - S(join(join(A, B), C));
        } else {
          const auto &A = R[0], &B = R[1], &C = R[2];
          r.region = format_region(A) + "|" + format_region(B) + "|" + format_region(C);
          r.value = -(S(A) + S(B) + S(C) - S(join(A, B)) - S(join(B, C)) - S(join(A, C)) +
                      S(join(join(A, B), C)));
        }
        r.cut_entropy = smax;
        r.cost = entropy_sample_cost(smax, cfg.target_stderr);
      }
      recs[d] = std::move(r);
    });
    out.insert(out.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
  }
  return out;
}

std::vector<SummaryRow> recognition_summary(const std::vector<ExperimentRecord>& records, double target_stderr) {
  if (records.empty()) throw std::invalid_argument("recognition_summary needs at least one record");
  std::vector<SummaryRow> rows;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<const ExperimentRecord*>> groups;
  for (const auto& r : records) {
    auto [it, fresh] = index.emplace(r.experiment_id, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(&r);
  }
  for (const auto& g : groups) {
    const auto& f = *g.front();
    SummaryRow row;
    row.experiment_id = f.experiment_id;
    row.phase = f.phase;
    row.strategy = f.strategy;
    row.n = f.n;
    row.xi = f.xi;
    row.inflate = f.inflate;
    row.region = f.region;
    row.count = static_cast<long>(g.size());
    double sum = 0, cost = 0, ent = 0;
    for (const auto* r : g) {
      sum += r->value;
      cost += r->cost;
      ent += r->cut_entropy;
    }
    row.mean = sum / row.count;
    if (row.count > 1) {
      double ss = 0;
      for (const auto* r : g) ss += (r->value - row.mean) * (r->value - row.mean);
      row.stderr_ = std::sqrt(ss / (row.count - 1) / row.count);
    }
    if (is_entropic(f.strategy)) {
      row.mean_cut_entropy = ent / row.count;
      row.cost = cost / row.count;
    } else {
      row.cost = operator_sample_cost(row.mean, target_stderr);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_phase_scan_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  os << "experiment_id,phase,strategy,n,qubits,xi,inflate,region,draw,value,cut_entropy,cost,draws,seed\n";
  for (const auto& r : records)
    os << r.experiment_id << ',' << to_string(r.phase) << ',' << to_string(r.strategy) << ',' << r.n << ','
       << r.qubits << ',' << r.xi << ',' << (r.inflate ? 1 : 0) << ',' << r.region << ',' << r.draw << ','
       << fmt(r.value) << ',' << (r.cut_entropy >= 0 ? std::to_string(r.cut_entropy) : "") << ',' << fmt(r.cost)
       << ',' << r.draws << ',' << r.seed << '\n';
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "experiment_id,phase,strategy,n,xi,inflate,region,count,mean,stderr,mean_cut_entropy,cost\n";
  for (const auto& r : rows)
    os << r.experiment_id << ',' << to_string(r.phase) << ',' << to_string(r.strategy) << ',' << r.n << ',' << r.xi
       << ',' << (r.inflate ? 1 : 0) << ',' << r.region << ',' << r.count << ',' << fmt(r.mean) << ','
       << fmt(r.stderr_) << ',' << (r.mean_cut_entropy >= 0 ? fmt(r.mean_cut_entropy) : "") << ',' << fmt(r.cost)
       << '\n';
}

}  // namespace symlab
