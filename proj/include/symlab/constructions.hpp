#pragma once
// Explicit circuits: the Abelian charge ladder, charge-sector assembly of
// symmetric random unitaries, and controlled PFC / LRFC ensembles.

#include <string>
#include <vector>

#include "symlab/groups.hpp"

namespace symlab {

/// Generalised CNOT ladder |y_i⟩|x_{i+1}⟩ → |y_i⟩|x_{i+1} ⊕ y_i⟩ on charge labels.
struct ChargeLadder {
  FiniteGroup group;
  int n_sites = 0;
  std::vector<std::pair<int, int>> gates;  // (control, target), applied in order

  /// Prefix sums y_i = x_1 ⊕ … ⊕ x_i.
  std::vector<int> apply(const std::vector<int>& x) const;
  /// Permutation matrix on the charge labels (site 0 most significant).
  Mat matrix() const;
  /// Full map F_c^{⊗n}·W·F_c^{†⊗n} in the computational basis; conjugates R_g^{⊗n} to R_g on the last site.
  Mat full_map() const;
};

ChargeLadder build_charge_ladder(const FiniteGroup& G, int n);

/// Per-site charge basis: column x is (1/√|G|) Σ_h conj(χ_x(h)) |h⟩.
Mat charge_basis(const FiniteGroup& G);

/// U = T†·(⊕_λ U_λ ⊗ |λ⟩⟨λ|)·T with T = ladder·charge transform (Abelian groups).
Mat assemble_sector_random_unitary(const FiniteGroup& G, int n, Rng& rng);

enum class ControlledVariant { Pfc, Lrfc };
enum class TwoDesignSource { Auto, Clifford, Haar };
/// Random tables, or a keyed toy function (iterated SplitMix mixing) for wide registers.
enum class FunctionSource { Table, KeyedToy };

struct ControlledEnsembleSpec {
  ControlledVariant variant = ControlledVariant::Pfc;
  long D = 0;                       // pfc system dimension
  long D_left = 0, D_right = 0;     // lrfc factors
  TwoDesignSource design = TwoDesignSource::Auto;
  FunctionSource functions = FunctionSource::Table;
  long system_dim() const { return variant == ControlledVariant::Pfc ? D : D_left * D_right; }
};

/// One controlled draw on control ⊗ system, control qubit most significant.
/// Component overrides let callers pin f ≡ 0, identity permutations, or C = 1.
struct ControlledParts {
  std::vector<int> f;          // phase function, size D
  std::vector<long> P;         // pfc permutation
  std::vector<long> fL, fR;    // lrfc functions: f_L: [D_R]→[D_L], f_R: [D_L]→[D_R]
  Mat C;                       // 2-design element on the system
};

ControlledParts sample_controlled_parts(const ControlledEnsembleSpec& spec, Rng& rng);
Mat assemble_controlled(const ControlledEnsembleSpec& spec, const ControlledParts& parts);
Mat build_controlled_unitary(const ControlledEnsembleSpec& spec, Rng& rng);

struct ControlledDistance {
  double distance = 0;   // ‖ρ − ρ^H‖₁
  double stderr_ = 0;    // split-half noise scale
  double bound = 0;      // 10k²/D or 4k²/D_L + 2k²/D_R
  long draws = 0;
  bool low_draw_warning = false;
};

/// Input: for k = 1, |+⟩|0⟩; for k = 2, the maximally entangled state of the two query registers.
ControlledDistance controlled_trace_distance_experiment(const ControlledEnsembleSpec& spec, int k,
                                                        long N, Rng& rng);

double controlled_bound(const ControlledEnsembleSpec& spec, int k);

/// True when the Clifford group is the selected 2-design and the system dimension is a power of two.
bool uses_clifford_design(const ControlledEnsembleSpec& spec);

}  // namespace symlab
