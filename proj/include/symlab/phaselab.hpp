#pragma once
// Recognition experiments on scrambled stabilizer fixed points: strategy values
// and modeled sample costs as a function of the light-cone size ξ.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "symlab/stabilizer.hpp"

namespace symlab {

enum class PhaseKind { Trivial, Ghz, Cluster, Toric };
enum class Strategy { OrderParameter, StringOrder, Mi, Cmi, Tee };

PhaseKind parse_phase_kind(const std::string& s);  // trivial | ghz | cluster | toric
Strategy parse_strategy(const std::string& s);     // order_parameter | string_order | mi | cmi | tee
std::string to_string(PhaseKind p);
std::string to_string(Strategy s);
/// Symmetry respected by the scrambling circuit for a strategy.
Symmetry strategy_symmetry(Strategy s);
/// Entropic strategies report cut entropies and use the purity shot model.
bool is_entropic(Strategy s);

struct PhaseScanConfig {
  PhaseKind phase = PhaseKind::Ghz;
  /// Chain length; for the toric code the linear size L of an L×L torus.
  int n = 8;
  std::vector<int> xi_grid = {0};
  long draws = 1;
  Strategy strategy = Strategy::OrderParameter;
  /// Base regions (qubit lists); empty selects the default geometry of the strategy.
  std::vector<std::vector<int>> regions;
  /// Grow regions with the light cone (dressed operators for operator strategies).
  bool inflate = false;
  std::uint64_t seed = 1;
  double target_stderr = 0.1;
};

PhaseScanConfig phase_scan_config_from_json(const std::string& text);

struct ExperimentRecord {
  std::string experiment_id;
  PhaseKind phase = PhaseKind::Ghz;
  Strategy strategy = Strategy::OrderParameter;
  int n = 0;
  int qubits = 0;
  int xi = 0;
  bool inflate = false;
  std::string region;   // measured regions, "a-b+c" ranges joined by '|'
  long draw = 0;
  double value = 0;
  int cut_entropy = -1;  // largest region entropy used; −1 for operator strategies
  double cost = 1;       // modeled shots, ≥ 1
  long draws = 0;        // ensemble size of the grid point
  std::uint64_t seed = 0;
};

/// One record per (ξ, draw) in grid order; deterministic for a fixed seed.
std::vector<ExperimentRecord> run_phase_scan(const PhaseScanConfig& cfg);

/// ceil(2^S / stderr²): SWAP-test purity estimator shots at tr ρ² = 2^{−S}.
double entropy_sample_cost(double s2_bits, double target_stderr);
/// ceil(1 / max(v², stderr²)): shots to resolve a ±1-valued observable with mean v.
double operator_sample_cost(double mean, double target_stderr);

struct SummaryRow {
  std::string experiment_id;
  PhaseKind phase = PhaseKind::Ghz;
  Strategy strategy = Strategy::OrderParameter;
  int n = 0;
  int xi = 0;
  bool inflate = false;
  std::string region;  // region of the first record
  long count = 0;
  double mean = 0;
  double stderr_ = 0;  // sample standard deviation over √count; 0 for one record
  double mean_cut_entropy = -1;
  /// Operator strategies: cost of the ensemble mean. Entropic: mean record cost.
  double cost = 1;
};

/// Aggregates records per experiment id in first-appearance order.
std::vector<SummaryRow> recognition_summary(const std::vector<ExperimentRecord>& records,
                                            double target_stderr = 0.1);

void write_phase_scan_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

/// Sites touched by the forward light cone of `region` under the gate layout.
std::vector<int> forward_light_cone(const std::vector<PatchGate>& circuit, const std::vector<int>& region);

/// Compact "a-b+c" rendering of a sorted qubit list.
std::string format_region(std::vector<int> region);

}  // namespace symlab
