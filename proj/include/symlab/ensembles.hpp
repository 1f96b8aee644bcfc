#pragma once
// Random-unitary ensembles built from symmetric Haar patches: sector-Haar,
// two-layer brickwork, translation-invariant brickwork and compositions.
// Exact moments use the label algebra of moments.hpp.

#include <memory>
#include <string>
#include <vector>

#include "symlab/groups.hpp"
#include "symlab/moments.hpp"

namespace symlab {

enum class EnsembleKind { SectorHaar, Brickwork, TiBrickwork, Composed, Pfc, Lrfc };

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::SectorHaar;
  FiniteGroup group;
  int n_sites = 1;
  int xi = 1;              // sites per region; a patch spans two regions
  bool periodic = true;
  int ancilla_dim = 1;
  std::vector<EnsembleSpec> parts;  // applied in order for Composed (first element acts first)
  // Controlled variants (constructions module).
  long D = 0, D_left = 0, D_right = 0;
};

EnsembleKind parse_ensemble_kind(const std::string& s);
std::string to_string(EnsembleKind k);

/// Haar unitary per sector multiplicity space, identity on irrep factors.
Mat sample_sector_haar(const SectorDecomposition& dec, Rng& rng);

/// Embeds `op` acting on the listed sites (in the given order) into the full space.
Mat embed_operator(const Mat& op, const std::vector<int>& site_dims, const std::vector<int>& sites);
/// M ← embed_operator(op, site_dims, sites)·M without forming the embedding.
void apply_on_sites(const Mat& op, const std::vector<int>& site_dims, const std::vector<int>& sites, Mat& M);

/// Precomputes sector decompositions so repeated draws are cheap.
class EnsembleSampler {
 public:
  explicit EnsembleSampler(const EnsembleSpec& spec);
  Mat sample(Rng& rng) const;
  long dim() const { return dim_; }

 private:
  EnsembleSpec spec_;
  long dim_ = 1;
  std::vector<int> site_dims_;
  std::vector<std::vector<int>> early_, late_;  // site lists per patch
  std::shared_ptr<SectorDecomposition> full_, patch_;
  std::vector<std::shared_ptr<SectorDecomposition>> patch_decs_;
  std::vector<int> early_dec_, late_dec_;
  std::vector<EnsembleSampler> parts_;
};

Mat sample_unitary(const EnsembleSpec& spec, Rng& rng);

// ---------------------------------------------------------------- brickwork

/// Regions of consecutive sites and two layers of two-region patches.
struct TwoLayerGeometry {
  std::vector<int> region_sites;
  std::vector<std::pair<int, int>> early, late;  // region pairs; early acts first
  std::string kind;
};

/// Brickwork geometry; periodic needs an even region count, else falls back to open.
TwoLayerGeometry brickwork_geometry(int n_sites, int xi, bool periodic);

struct BrickworkMoment {
  ChoiCoefficients E;  // two-layer ensemble
  ChoiCoefficients H;  // global symmetric Haar, same layout
  TwoLayerGeometry geometry;
};

/// Exact two-layer moment: Ñ = Σ Π Ñ_late · Π χ̂ · Π Ñ_early over internal labels.
BrickworkMoment two_layer_moment(const FiniteGroup& G, int ancilla_dim, const TwoLayerGeometry& geo,
                                 int k);
BrickworkMoment brickwork_choi_exact(const EnsembleSpec& spec, int k);

struct GluingBound {
  double epsilon = 0;
  bool vacuous = false;
};

/// 1+ε = (1+ε_AB)(1+ε_BC)/((1−k²|G|/2D_AB)(1−k²|G|/2D_BC))·e^{k(k−1)|G|/2D_B}·(1+k²|G|/D_ABC).
GluingBound gluing_bound(double eps_ab, double eps_bc, int k, int G, double D_ab, double D_bc,
                         double D_b, double D_abc);

struct GluingStep {
  int step = 0;
  std::string label;  // e.g. "0-2" for the system of regions 0..2, "closure" for the ring
  double epsilon = 0;
  GluingBound bound;
  bool ok = true;
};

/// Patch-by-patch gluing chain: each step's exact ε against the gluing bound with the measured
/// previous ε and an exact patch.
std::vector<GluingStep> gluing_steps(const FiniteGroup& G, int ancilla_dim, int n_sites, int xi,
                                     bool periodic, int k);

struct Threshold {
  double log2_value = 0;   // log₂(nk²|G|/ε)
  double logG_value = 0;   // log_|G|(nk²|G|/ε); +inf for |G| = 1
  int xi_log2 = 0, xi_logG = 0;  // minimal integer ξ (clamped at 0)
};
Threshold two_layer_threshold(int n, int k, int G, double eps);

struct SquareCheck {
  double epsilon = 0, epsilon_squared = 0;  // ε of E and of E∘E
  bool applicable = false;                  // ε ≤ 1/3
  bool pass = true;
};
SquareCheck compose_and_square_check(const ChoiCoefficients& E, const ChoiCoefficients& H,
                                     const CornerAlgebra* corner = nullptr);

// ---------------------------------------------------------------- translation invariance

struct TiMoment {
  ChoiCoefficients E;  // two-layer TI ensemble
  ChoiCoefficients A;  // approximate TI twirl: δ over translation-commuting labels
  int m = 1, k = 1, K = 1;
  double half_dim = 1;   // d_h, dimension of a half patch
  long commutant_size = 0;
  bool exact_patches = true;
};

/// m patches of 2ξ sites (n = 2ξm), first layer shared unitary, second layer shared unitary.
TiMoment ti_choi_exact(int m, int xi, int k, const FiniteGroup& G, bool exact_patches = true,
                       int ancilla_dim = 1);

struct TiError {
  double epsilon_prime = 0;   // relative error of E against the approximate TI twirl
  double epsilon = 0;         // 3·ε′, safety factor included
  double epsilon_count_normalised = 0;  // same quantity normalised by n^k k! instead of |C|
  long commutant_size = 0;
  double threshold_xi = 0;    // log₂(32 n⁶ k⁶ / ε_target)
  bool threshold_vacuous = true;
};
TiError ti_relative_error(const TiMoment& ti, int n, int xi, double eps_target = 1.0);

struct PermBoundReport {
  int K = 0;
  // Bound 1: per (D, τ class) the maximum ratio LHS / bound.
  long bound1_checks = 0, bound1_violations = 0;
  double bound1_max_ratio = 0;
  double identity_lhs = 0;  // τ = e at the smallest D examined
  // Bound 2: per (m, k, r) counts vs m^k k! K^{4r}.
  long bound2_checks = 0, bound2_violations = 0;
  std::vector<std::string> lines;
};
/// Enumerates S_K for both permutation bounds; D values default to {K², 2K², 4K²}.
PermBoundReport perm_sum_bruteforce(int K, std::vector<double> D_values = {});
/// Σ_Δ D^{−|Δ|} D^{−|Δ⁻¹τ|} over Δ ∈ S_K.
double perm_sum_lhs(const Perm& tau, double D);

}  // namespace symlab
