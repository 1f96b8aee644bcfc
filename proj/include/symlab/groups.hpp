#pragma once
// Finite groups given by multiplication tables, their regular representations,
// and the sector (isotypic) decomposition of n-site Hilbert spaces.

#include <string>
#include <vector>

#include "symlab/common.hpp"

namespace symlab {

/// Unitary irreducible representation given by explicit matrices.
struct Irrep {
  int dim = 1;
  std::vector<Mat> mats;  // indexed by group element
};

class FiniteGroup {
 public:
  FiniteGroup() = default;
  /// Validates closure, associativity, identity (element 0) and inverses.
  FiniteGroup(std::string name, std::vector<std::vector<int>> table,
              std::vector<int> cyclic_factors = {});

  int order() const { return static_cast<int>(table_.size()); }
  int identity() const { return 0; }
  int mul(int a, int b) const { return table_[a][b]; }
  int inv(int a) const { return inv_[a]; }
  bool abelian() const { return abelian_; }
  const std::string& name() const { return name_; }
  const std::vector<std::vector<int>>& table() const { return table_; }
  /// Cyclic orders p_1..p_l for Abelian groups built as products (empty otherwise).
  const std::vector<int>& cyclic_factors() const { return factors_; }
  const std::vector<Irrep>& irreps() const { return irreps_; }

  /// Character of the Abelian irrep with charge label x evaluated at g.
  cplx abelian_character(int x, int g) const;

 private:
  std::string name_;
  std::vector<std::vector<int>> table_;
  std::vector<int> inv_;
  std::vector<int> factors_;
  bool abelian_ = true;
  std::vector<Irrep> irreps_;
  void build_irreps();
};

/// Parses "trivial", "Zp", "Zp1xZp2x...", "S3".
FiniteGroup build_group(const std::string& descriptor);

struct SiteRepresentation {
  FiniteGroup group;
  int ancilla_dim = 1;
  int site_dim = 1;
  std::vector<Mat> matrices;  // R_g = reg(g) ⊗ 1_{ancilla}
};

/// Left-regular action R_g|h> = |gh>, tensored with an untouched ancilla.
SiteRepresentation regular_representation(const FiniteGroup& g, int ancilla_dim = 1);

struct Sector {
  int label = 0;         // irrep index (charge for Abelian groups)
  int irrep_dim = 1;     // d_λ
  long multiplicity = 0; // D_λ
  long offset = 0;       // first column in basis_change
};

struct SectorDecomposition {
  FiniteGroup group;
  int n_sites = 0;
  long total_dim = 0;
  std::vector<Sector> sectors;
  /// Columns are the block basis, ordered by (λ, multiplicity index, irrep index).
  Mat basis_change;
};

SectorDecomposition sector_decomposition(const SiteRepresentation& rep, int n);

/// Total charge of a computational label (Abelian only).
int charge_of(const std::vector<int>& x, const FiniteGroup& g);

Mat global_symmetry_operator(const SiteRepresentation& rep, int n, int g);

bool is_symmetric(const Mat& U, const SiteRepresentation& rep, int n, double tol);

/// Integer power with overflow guard against a budget.
long checked_pow(long base, int exp, long budget);

}  // namespace symlab
