#pragma once
// GF(2) stabilizer engine: Pauli strings, Clifford image tables, symmetric
// Clifford sampling, fixed-point states and entropy diagnostics.

#include <cstdint>
#include <string>
#include <vector>

#include "symlab/common.hpp"

namespace symlab {

using Bits = std::vector<std::uint64_t>;

inline bool bit_get(const Bits& b, int i) { return (b[i >> 6] >> (i & 63)) & 1ULL; }
inline void bit_set(Bits& b, int i, bool v) {
  if (v) b[i >> 6] |= 1ULL << (i & 63);
  else b[i >> 6] &= ~(1ULL << (i & 63));
}

/// i^phase · X^x Z^z.
struct PauliString {
  int n = 0;
  Bits x, z;
  int phase = 0;  // mod 4

  PauliString() = default;
  explicit PauliString(int n_qubits);
  /// Parses "+XIZY" / "-ZZ" style strings (leading sign optional), qubit 0 first.
  static PauliString parse(const std::string& s);
  static PauliString single(int n, int q, char p);
  /// Hermitian product of the given letter on each listed qubit.
  static PauliString on(int n, const std::vector<int>& qubits, char p);

  bool commutes(const PauliString& o) const;
  bool is_identity_up_to_phase() const;
  std::vector<int> support() const;
  int weight() const { return static_cast<int>(support().size()); }
  std::string str() const;
  bool operator==(const PauliString& o) const { return n == o.n && x == o.x && z == o.z && (phase & 3) == (o.phase & 3); }
};

PauliString operator*(const PauliString& a, const PauliString& b);

/// Clifford stored by the images of X_j (0..n−1) and Z_j (n..2n−1) under C·P·C†.
class Clifford {
 public:
  Clifford() = default;
  explicit Clifford(int n);  // identity
  Clifford(int n, std::vector<PauliString> images);
  int n() const { return n_; }
  const PauliString& image_x(int j) const { return img_[j]; }
  const PauliString& image_z(int j) const { return img_[n_ + j]; }

  PauliString conjugate(const PauliString& P) const;
  /// this applied after `first`: (this ∘ first)(P) = this(first(P)).
  Clifford after(const Clifford& first) const;
  Clifford inverse() const;
  /// Complex conjugate unitary.
  Clifford conj() const;
  bool is_valid() const;  // symplectic relations and Hermitian images

  static Clifford hadamard(int n, int q);
  static Clifford phase_gate(int n, int q);
  static Clifford cnot(int n, int c, int t);
  static Clifford cz(int n, int a, int b);
  static Clifford swap(int n, int a, int b);
  /// |x⟩ ↦ |Ax⟩ for invertible A over GF(2) (rows as bit vectors).
  static Clifford linear(const std::vector<Bits>& A);

  /// Dense unitary up to a global phase (n ≤ 12).
  Mat matrix() const;
  /// C|0…0⟩ up to a global phase.
  Vec zero_state() const;

 private:
  int n_ = 0;
  std::vector<PauliString> img_;
};

/// Uniform Clifford with C·Z_i·C† = Z_i for i in `fixed_z` (sign +), by constrained
/// symplectic row completion.
Clifford sample_clifford_fixing(int n, const std::vector<int>& fixed_z, Rng& rng);
Clifford sample_clifford(int n, Rng& rng);

enum class Symmetry { None, Z2X, Z2xZ2EvenOdd };
Symmetry parse_symmetry(const std::string& s);
std::string to_string(Symmetry s);

/// Patch symmetry generators for a patch whose first qubit sits at global parity `offset_parity`.
std::vector<PauliString> patch_symmetry_generators(int patch_qubits, Symmetry sym, int offset_parity = 0);

/// Uniform over Cliffords stabilising every patch symmetry generator.
Clifford sample_symmetric_clifford(int patch_qubits, Symmetry sym, Rng& rng, int offset_parity = 0);

// ---------------------------------------------------------------- states

class StabilizerTableau {
 public:
  StabilizerTableau() = default;
  /// Builds a state from n independent commuting Hermitian generators.
  StabilizerTableau(int n, std::vector<PauliString> generators);
  int n() const { return n_; }
  const std::vector<PauliString>& stabilizers() const { return stab_; }
  const std::vector<PauliString>& destabilizers() const { return destab_; }
  bool is_valid() const;

  /// Applies a Clifford acting on the listed qubits (in its own qubit order).
  void apply(const Clifford& c, const std::vector<int>& qubits);
  void apply(const Clifford& c);

  /// ±1 if ±P is in the stabiliser group, else 0.
  int expectation(const PauliString& P) const;
  /// von Neumann entropy in bits of a region.
  int entropy(const std::vector<int>& region) const;
  Vec statevector() const;  // n ≤ 14

 private:
  int n_ = 0;
  std::vector<PauliString> stab_, destab_;
};

enum class FixedPoint { Product, Ghz, Cluster, Toric };

struct Lattice {
  int Lx = 0, Ly = 0;
  int qubits() const { return 2 * Lx * Ly; }
  int h(int x, int y) const;  // edge from (x,y) to (x+1,y)
  int v(int x, int y) const;  // edge from (x,y) to (x,y+1)
  /// Qubit order along the boustrophedon snake over vertices (h then v per vertex).
  std::vector<int> snake() const;
};

StabilizerTableau prepare_product(int n);   // |+…+⟩, symmetric under ∏X
StabilizerTableau prepare_ghz(int n);
StabilizerTableau prepare_cluster(int n);   // periodic ring, n even
StabilizerTableau prepare_toric(const Lattice& L);

int pauli_expectation(const StabilizerTableau& s, const PauliString& P);
int entropy(const StabilizerTableau& s, const std::vector<int>& region);
int mutual_information(const StabilizerTableau& s, const std::vector<int>& A, const std::vector<int>& B);
int conditional_mutual_information(const StabilizerTableau& s, const std::vector<int>& A,
                                   const std::vector<int>& B, const std::vector<int>& C);
int tee_kitaev_preskill(const StabilizerTableau& s, const std::vector<int>& A,
                        const std::vector<int>& B, const std::vector<int>& C);

struct PatchGate {
  Clifford c;
  std::vector<int> qubits;
};

/// Two-layer brickwork of symmetric patch Cliffords along `order` (a periodic chain,
/// default 0..n−1): patches of 2ξ consecutive chain positions, alternate layers shifted by ξ.
std::vector<PatchGate> brickwork_circuit(int n, int xi, Symmetry sym, Rng& rng, int layers = 2,
                                         const std::vector<int>& order = {});
void scramble(StabilizerTableau& s, int xi, Symmetry sym, Rng& rng, int layers = 2,
              const std::vector<int>& order = {});
/// C·P·C† for a Clifford acting on a subset of qubits.
PauliString conjugate_on(const Clifford& c, const std::vector<int>& qubits, const PauliString& P);
/// Heisenberg image V†·P·V of the circuit V = last gate ⋯ first gate.
PauliString heisenberg_image(const std::vector<PatchGate>& circuit, const PauliString& P);

// GF(2) helpers exposed for tests.
int gf2_rank(std::vector<Bits> rows, int ncols);

}  // namespace symlab
