#include "symlab/stabilizer.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

namespace symlab {

namespace {

int words(int n) { return (n + 63) / 64; }

int popcount_and(const Bits& a, const Bits& b) {
  int c = 0;
  for (size_t i = 0; i < a.size(); ++i) c += std::popcount(a[i] & b[i]);
  return c;
}

void xor_into(Bits& a, const Bits& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
}

bool any_bit(const Bits& a) {
  for (auto w : a)
    if (w) return true;
  return false;
}

// Symplectic vectors of length 2n: x bits then z bits.
Bits to_sym(const PauliString& p) {
  Bits v(words(2 * p.n), 0);
  for (int q = 0; q < p.n; ++q) {
    if (bit_get(p.x, q)) bit_set(v, q, true);
    if (bit_get(p.z, q)) bit_set(v, p.n + q, true);
  }
  return v;
}

PauliString from_sym(int n, const Bits& v) {
  PauliString p(n);
  for (int q = 0; q < n; ++q) {
    bit_set(p.x, q, bit_get(v, q));
    bit_set(p.z, q, bit_get(v, n + q));
  }
  p.phase = popcount_and(p.x, p.z) & 1;  // Hermitian
  return p;
}

int sym_form(const Bits& a, const Bits& b, int n) {
  int s = 0;
  for (int q = 0; q < n; ++q)
    s ^= (bit_get(a, q) & bit_get(b, n + q)) ^ (bit_get(a, n + q) & bit_get(b, q));
  return s;
}

Bits random_bits(int len, Rng& rng) {
  Bits v(words(len), 0);
  for (auto& w : v) w = rng();
  if (len % 64) v.back() &= (1ULL << (len % 64)) - 1;
  return v;
}

// Gauss-Jordan inverse of a square GF(2) matrix given as rows; throws if singular.
std::vector<Bits> gf2_inverse(std::vector<Bits> A, int n) {
  std::vector<Bits> I(n, Bits(words(n), 0));
  for (int i = 0; i < n; ++i) bit_set(I[i], i, true);
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (bit_get(A[r], c)) { piv = r; break; }
    if (piv < 0) throw std::invalid_argument("singular GF(2) matrix");
    std::swap(A[piv], A[c]);
    std::swap(I[piv], I[c]);
    for (int r = 0; r < n; ++r)
      if (r != c && bit_get(A[r], c)) {
        xor_into(A[r], A[c]);
        xor_into(I[r], I[c]);
      }
  }
  return I;
}

}  // namespace

int gf2_rank(std::vector<Bits> rows, int ncols) {
  int rank = 0;
  for (int c = 0; c < ncols && rank < static_cast<int>(rows.size()); ++c) {
    int piv = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (bit_get(rows[r], c)) { piv = r; break; }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
      if (r != rank && bit_get(rows[r], c)) xor_into(rows[r], rows[rank]);
    ++rank;
  }
  return rank;
}

// ---------------------------------------------------------------- Pauli strings

PauliString::PauliString(int n_qubits) : n(n_qubits), x(words(n_qubits), 0), z(words(n_qubits), 0) {}

PauliString PauliString::parse(const std::string& s) {
  size_t pos = 0;
  int sign = 0;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    sign = s[0] == '-' ? 2 : 0;
    pos = 1;
  }
  PauliString p(static_cast<int>(s.size() - pos));
  for (int q = 0; q < p.n; ++q) {
    char c = s[pos + q];
    switch (c) {
      case 'I': break;
      case 'X': bit_set(p.x, q, true); break;
      case 'Z': bit_set(p.z, q, true); break;
      case 'Y': bit_set(p.x, q, true); bit_set(p.z, q, true); p.phase += 1; break;
      default: throw std::invalid_argument(std::string("bad Pauli letter: ") + c);
    }
  }
  p.phase = (p.phase + sign) & 3;
  return p;
}

PauliString PauliString::single(int n, int q, char c) { return on(n, {q}, c); }

PauliString PauliString::on(int n, const std::vector<int>& qubits, char c) {
  PauliString p(n);
  for (int q : qubits) {
    if (q < 0 || q >= n) throw std::out_of_range("qubit index out of range");
    if (c == 'X' || c == 'Y') bit_set(p.x, q, true);
    if (c == 'Z' || c == 'Y') bit_set(p.z, q, true);
    if (c == 'Y') p.phase += 1;
  }
  p.phase &= 3;
  return p;
}

bool PauliString::commutes(const PauliString& o) const {
  return ((popcount_and(x, o.z) + popcount_and(z, o.x)) & 1) == 0;
}

bool PauliString::is_identity_up_to_phase() const { return !any_bit(x) && !any_bit(z); }

std::vector<int> PauliString::support() const {
  std::vector<int> s;
  for (int q = 0; q < n; ++q)
    if (bit_get(x, q) || bit_get(z, q)) s.push_back(q);
  return s;
}

std::string PauliString::str() const {
  // Convert to Hermitian letters: X^x Z^z on a qubit with both set is −iY.
  int ph = phase;
  std::string out;
  for (int q = 0; q < n; ++q) {
    bool a = bit_get(x, q), b = bit_get(z, q);
    if (a && b) { out += 'Y'; ph -= 1; }
    else out += a ? 'X' : (b ? 'Z' : 'I');
  }
  ph = ((ph % 4) + 4) % 4;
  static const char* pre[] = {"+", "+i", "-", "-i"};
  return pre[ph] + out;
}

PauliString operator*(const PauliString& a, const PauliString& b) {
  if (a.n != b.n) throw std::invalid_argument("Pauli size mismatch");
  PauliString c(a.n);
  c.x = a.x;
  c.z = a.z;
  xor_into(c.x, b.x);
  xor_into(c.z, b.z);
  c.phase = (a.phase + b.phase + 2 * popcount_and(a.z, b.x)) & 3;
  return c;
}

// ---------------------------------------------------------------- Cliffords

Clifford::Clifford(int n) : n_(n) {
  for (int j = 0; j < n; ++j) img_.push_back(PauliString::single(n, j, 'X'));
  for (int j = 0; j < n; ++j) img_.push_back(PauliString::single(n, j, 'Z'));
}

Clifford::Clifford(int n, std::vector<PauliString> images) : n_(n), img_(std::move(images)) {
  if (static_cast<int>(img_.size()) != 2 * n) throw std::invalid_argument("need 2n images");
}

PauliString Clifford::conjugate(const PauliString& P) const {
  if (P.n != n_) throw std::invalid_argument("Pauli size mismatch");
  PauliString r(n_);
  r.phase = P.phase;
  for (int j = 0; j < n_; ++j)
    if (bit_get(P.x, j)) r = r * img_[j];
  for (int j = 0; j < n_; ++j)
    if (bit_get(P.z, j)) r = r * img_[n_ + j];
  return r;
}

Clifford Clifford::after(const Clifford& first) const {
  std::vector<PauliString> im;
  for (const auto& p : first.img_) im.push_back(conjugate(p));
  return Clifford(n_, std::move(im));
}

Clifford Clifford::inverse() const {
  const int m = 2 * n_;
  // Row i of A holds bit i of every image (columns = generators).
  std::vector<Bits> A(m, Bits(words(m), 0));
  std::vector<Bits> cols;
  for (const auto& p : img_) cols.push_back(to_sym(p));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (bit_get(cols[j], i)) bit_set(A[i], j, true);
  auto Ai = gf2_inverse(A, m);
  std::vector<PauliString> im;
  for (int g = 0; g < m; ++g) {
    // Target generator bits e_g; preimage coefficients = column g of A⁻¹.
    Bits q(words(m), 0);
    for (int i = 0; i < m; ++i)
      if (bit_get(Ai[i], g)) bit_set(q, i, true);
    PauliString Q = from_sym(n_, q);
    PauliString target = g < n_ ? PauliString::single(n_, g, 'X') : PauliString::single(n_, g - n_, 'Z');
    PauliString img = conjugate(Q);
    Q.phase = (Q.phase + target.phase - img.phase + 8) & 3;
    im.push_back(Q);
  }
  return Clifford(n_, std::move(im));
}

Clifford Clifford::conj() const {
  std::vector<PauliString> im = img_;
  for (auto& p : im) p.phase = (4 - p.phase) & 3;
  return Clifford(n_, std::move(im));
}

bool Clifford::is_valid() const {
  for (const auto& p : img_)
    if (((p.phase - popcount_and(p.x, p.z)) & 1) != 0) return false;
  for (int a = 0; a < 2 * n_; ++a)
    for (int b = a + 1; b < 2 * n_; ++b) {
      bool anti = (b == a + n_) && a < n_;
      if (img_[a].commutes(img_[b]) == anti) return false;
    }
  return true;
}

Clifford Clifford::hadamard(int n, int q) {
  Clifford c(n);
  c.img_[q] = PauliString::single(n, q, 'Z');
  c.img_[n + q] = PauliString::single(n, q, 'X');
  return c;
}

Clifford Clifford::phase_gate(int n, int q) {
  Clifford c(n);
  c.img_[q] = PauliString::single(n, q, 'Y');
  return c;
}

Clifford Clifford::cnot(int n, int ctl, int t) {
  Clifford c(n);
  c.img_[ctl] = PauliString::single(n, ctl, 'X') * PauliString::single(n, t, 'X');
  c.img_[n + t] = PauliString::single(n, ctl, 'Z') * PauliString::single(n, t, 'Z');
  return c;
}

Clifford Clifford::cz(int n, int a, int b) {
  Clifford c(n);
  c.img_[a] = PauliString::single(n, a, 'X') * PauliString::single(n, b, 'Z');
  c.img_[b] = PauliString::single(n, a, 'Z') * PauliString::single(n, b, 'X');
  return c;
}

Clifford Clifford::swap(int n, int a, int b) {
  Clifford c(n);
  std::swap(c.img_[a], c.img_[b]);
  std::swap(c.img_[n + a], c.img_[n + b]);
  return c;
}

Clifford Clifford::linear(const std::vector<Bits>& A) {
  const int n = static_cast<int>(A.size());
  auto Ai = gf2_inverse(A, n);
  Clifford c(n);
  for (int j = 0; j < n; ++j) {
    PauliString px(n), pz(n);
    for (int i = 0; i < n; ++i) bit_set(px.x, i, bit_get(A[i], j));
    pz.z = Ai[j];
    pz.z.resize(words(n));
    c.img_[j] = px;
    c.img_[n + j] = pz;
  }
  return c;
}

namespace {

// Applies i^phase X^x Z^z to a dense vector; qubit 0 is the most significant bit.
Vec apply_pauli(const PauliString& p, const Vec& v) {
  const int n = p.n;
  std::uint64_t xm = 0, zm = 0;
  for (int q = 0; q < n; ++q) {
    if (bit_get(p.x, q)) xm |= 1ULL << (n - 1 - q);
    if (bit_get(p.z, q)) zm |= 1ULL << (n - 1 - q);
  }
  static const cplx ph[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
  const cplx f = ph[p.phase & 3];
  Vec out(v.size());
  for (std::uint64_t y = 0; y < static_cast<std::uint64_t>(v.size()); ++y) {
    double s = (std::popcount(zm & y) & 1) ? -1.0 : 1.0;
    out(y ^ xm) = f * s * v(y);
  }
  return out;
}

Vec stabilizer_vector(int n, const std::vector<PauliString>& gens) {
  if (n > 14) throw CapacityError("statevector limited to 14 qubits");
  const long D = 1L << n;
  for (long b = 0; b < D; ++b) {
    Vec v = Vec::Zero(D);
    v(b) = 1;
    for (const auto& g : gens) v = 0.5 * (v + apply_pauli(g, v));
    double nv = v.norm();
    if (nv > 1e-6) return v / nv;
  }
  throw std::runtime_error("no stabilizer state found");
}

}  // namespace

Vec Clifford::zero_state() const {
  std::vector<PauliString> g(img_.begin() + n_, img_.end());
  return stabilizer_vector(n_, g);
}

Mat Clifford::matrix() const {
  if (n_ > 12) throw CapacityError("dense Clifford limited to 12 qubits");
  const long D = 1L << n_;
  Vec v0 = zero_state();
  Mat U(D, D);
  for (long y = 0; y < D; ++y) {
    PauliString p(n_);
    for (int q = 0; q < n_; ++q)
      if ((y >> (n_ - 1 - q)) & 1) p = p * img_[q];
    U.col(y) = apply_pauli(p, v0);
  }
  return U;
}

// ---------------------------------------------------------------- sampling

Clifford sample_clifford_fixing(int n, const std::vector<int>& fixed_z, Rng& rng) {
  std::vector<int> order = fixed_z;
  std::vector<char> is_fixed(n, 0);
  for (int q : fixed_z) {
    if (q < 0 || q >= n || is_fixed[q]) throw std::invalid_argument("bad fixed qubit list");
    is_fixed[q] = 1;
  }
  for (int q = 0; q < n; ++q)
    if (!is_fixed[q]) order.push_back(q);
  const int m = 2 * n;
  std::vector<Bits> A, B;  // chosen pairs
  auto project = [&](Bits v) {
    Bits orig = v;
    for (size_t t = 0; t < A.size(); ++t) {
      if (sym_form(orig, B[t], n)) xor_into(v, A[t]);
      if (sym_form(orig, A[t], n)) xor_into(v, B[t]);
    }
    return v;
  };
  auto unit_z = [&](int q) {
    Bits v(words(m), 0);
    bit_set(v, n + q, true);
    return v;
  };
  std::vector<PauliString> img(m);
  std::uniform_int_distribution<int> coin(0, 1);
  for (size_t idx = 0; idx < order.size(); ++idx) {
    const int q = order[idx];
    Bits a, b;
    if (is_fixed[q]) {
      b = unit_z(q);
      while (true) {
        a = project(random_bits(m, rng));
        if (!sym_form(a, b, n)) continue;
        bool ok = true;
        for (size_t r = idx + 1; r < order.size() && ok; ++r)
          if (is_fixed[order[r]] && sym_form(a, unit_z(order[r]), n)) ok = false;
        if (ok) break;
      }
    } else {
      do a = project(random_bits(m, rng));
      while (!any_bit(a));
      do b = project(random_bits(m, rng));
      while (!sym_form(a, b, n));
    }
    A.push_back(a);
    B.push_back(b);
    PauliString px = from_sym(n, a), pz = from_sym(n, b);
    px.phase = (px.phase + 2 * coin(rng)) & 3;
    if (!is_fixed[q]) pz.phase = (pz.phase + 2 * coin(rng)) & 3;
    img[q] = px;
    img[n + q] = pz;
  }
  return Clifford(n, std::move(img));
}

Clifford sample_clifford(int n, Rng& rng) { return sample_clifford_fixing(n, {}, rng); }

Symmetry parse_symmetry(const std::string& s) {
  if (s == "none") return Symmetry::None;
  if (s == "Z2_X") return Symmetry::Z2X;
  if (s == "Z2xZ2_even_odd") return Symmetry::Z2xZ2EvenOdd;
  throw std::invalid_argument("unknown symmetry: " + s);
}

std::string to_string(Symmetry s) {
  switch (s) {
    case Symmetry::None: return "none";
    case Symmetry::Z2X: return "Z2_X";
    case Symmetry::Z2xZ2EvenOdd: return "Z2xZ2_even_odd";
  }
  return "?";
}

std::vector<PauliString> patch_symmetry_generators(int w, Symmetry sym, int offset_parity) {
  std::vector<PauliString> g;
  if (sym == Symmetry::Z2X) {
    std::vector<int> all(w);
    for (int i = 0; i < w; ++i) all[i] = i;
    g.push_back(PauliString::on(w, all, 'X'));
  } else if (sym == Symmetry::Z2xZ2EvenOdd) {
    std::vector<int> ev, od;
    for (int i = 0; i < w; ++i) ((i + offset_parity) % 2 == 0 ? ev : od).push_back(i);
    if (!ev.empty()) g.push_back(PauliString::on(w, ev, 'X'));
    if (!od.empty()) g.push_back(PauliString::on(w, od, 'X'));
  }
  return g;
}

Clifford sample_symmetric_clifford(int w, Symmetry sym, Rng& rng, int offset_parity) {
  if (w < 1) throw std::invalid_argument("patch needs at least one qubit");
  auto gens = patch_symmetry_generators(w, sym, offset_parity);
  if (gens.empty()) return sample_clifford(w, rng);
  // Rows of A: the generator masks, completed to a basis by unit vectors.
  std::vector<Bits> A;
  for (const auto& g : gens) A.push_back(g.x);
  for (int q = 0; q < w && static_cast<int>(A.size()) < w; ++q) {
    Bits e(words(w), 0);
    bit_set(e, q, true);
    auto trial = A;
    trial.push_back(e);
    if (gf2_rank(trial, w) == static_cast<int>(trial.size())) A.push_back(e);
  }
  Clifford H(w);
  for (int q = 0; q < w; ++q) H = Clifford::hadamard(w, q).after(H);
  Clifford V = Clifford::linear(A).after(H);
  std::vector<int> fixed(gens.size());
  for (size_t i = 0; i < gens.size(); ++i) fixed[i] = static_cast<int>(i);
  Clifford Cp = sample_clifford_fixing(w, fixed, rng);
  return V.inverse().after(Cp.after(V));
}

// ---------------------------------------------------------------- states

StabilizerTableau::StabilizerTableau(int n, std::vector<PauliString> gens) : n_(n), stab_(std::move(gens)) {
  if (static_cast<int>(stab_.size()) != n) throw std::invalid_argument("need n generators");
  for (int i = 0; i < n; ++i) {
    if (stab_[i].n != n) throw std::invalid_argument("generator size mismatch");
    if (((stab_[i].phase - popcount_and(stab_[i].x, stab_[i].z)) & 1) != 0)
      throw std::invalid_argument("generator is not Hermitian");
    for (int j = i + 1; j < n; ++j)
      if (!stab_[i].commutes(stab_[j])) throw std::invalid_argument("generators do not commute");
  }
  // Solve ⟨d_i, S_j⟩ = δ_ij; constraint row j is (S_j.z | S_j.x) against d = (d.x | d.z).
  const int m = 2 * n;
  std::vector<Bits> M(n, Bits(words(m), 0));
  for (int j = 0; j < n; ++j)
    for (int q = 0; q < n; ++q) {
      if (bit_get(stab_[j].z, q)) bit_set(M[j], q, true);
      if (bit_get(stab_[j].x, q)) bit_set(M[j], n + q, true);
    }
  std::vector<Bits> R(n, Bits(words(n), 0));
  for (int j = 0; j < n; ++j) bit_set(R[j], j, true);
  std::vector<int> pivcol;
  int row = 0;
  for (int c = 0; c < m && row < n; ++c) {
    int piv = -1;
    for (int r = row; r < n; ++r)
      if (bit_get(M[r], c)) { piv = r; break; }
    if (piv < 0) continue;
    std::swap(M[piv], M[row]);
    std::swap(R[piv], R[row]);
    for (int r = 0; r < n; ++r)
      if (r != row && bit_get(M[r], c)) {
        xor_into(M[r], M[row]);
        xor_into(R[r], R[row]);
      }
    pivcol.push_back(c);
    ++row;
  }
  if (row < n) throw std::invalid_argument("generators are not independent");
  std::vector<Bits> d(n, Bits(words(m), 0));
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r)
      if (bit_get(R[r], i)) bit_set(d[i], pivcol[r], true);
  for (int i = 0; i < n; ++i) destab_.push_back(from_sym(n, d[i]));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (!destab_[i].commutes(destab_[j])) {
        destab_[i] = destab_[i] * stab_[j];
        destab_[i].phase = popcount_and(destab_[i].x, destab_[i].z) & 1;
      }
}

bool StabilizerTableau::is_valid() const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      if (!stab_[i].commutes(stab_[j])) return false;
      if (i != j && !destab_[i].commutes(destab_[j])) return false;
      if (destab_[i].commutes(stab_[j]) == (i == j)) return false;
    }
  return true;
}

PauliString conjugate_on(const Clifford& c, const std::vector<int>& qubits, const PauliString& P) {
  const int w = static_cast<int>(qubits.size());
  if (c.n() != w) throw std::invalid_argument("Clifford width does not match qubit list");
  PauliString sub(w);
  for (int i = 0; i < w; ++i) {
    bit_set(sub.x, i, bit_get(P.x, qubits[i]));
    bit_set(sub.z, i, bit_get(P.z, qubits[i]));
  }
  PauliString img = c.conjugate(sub);
  PauliString out = P;
  for (int i = 0; i < w; ++i) {
    bit_set(out.x, qubits[i], bit_get(img.x, i));
    bit_set(out.z, qubits[i], bit_get(img.z, i));
  }
  out.phase = (P.phase + img.phase) & 3;
  return out;
}

void StabilizerTableau::apply(const Clifford& c, const std::vector<int>& qubits) {
  for (auto& s : stab_) s = conjugate_on(c, qubits, s);
  for (auto& d : destab_) d = conjugate_on(c, qubits, d);
}

void StabilizerTableau::apply(const Clifford& c) {
  std::vector<int> all(n_);
  for (int i = 0; i < n_; ++i) all[i] = i;
  apply(c, all);
}

int StabilizerTableau::expectation(const PauliString& P) const {
  if (P.n != n_) throw std::invalid_argument("Pauli size mismatch");
  for (const auto& s : stab_)
    if (!s.commutes(P)) return 0;
  PauliString Q(n_);
  for (int i = 0; i < n_; ++i)
    if (!destab_[i].commutes(P)) Q = Q * stab_[i];
  if (Q.x != P.x || Q.z != P.z) throw std::logic_error("stabilizer decomposition failed");
  int diff = (P.phase - Q.phase + 8) & 3;
  if (diff == 0) return 1;
  if (diff == 2) return -1;
  throw std::invalid_argument("non-Hermitian Pauli");
}

int StabilizerTableau::entropy(const std::vector<int>& region) const {
  const int a = static_cast<int>(region.size());
  std::vector<char> seen(n_, 0);
  for (int q : region) {
    if (q < 0 || q >= n_) throw std::out_of_range("region index out of range");
    if (seen[q]) throw std::invalid_argument("region has duplicate sites");
    seen[q] = 1;
  }
  std::vector<Bits> rows;
  for (const auto& s : stab_) {
    Bits r(words(2 * a), 0);
    for (int i = 0; i < a; ++i) {
      if (bit_get(s.x, region[i])) bit_set(r, i, true);
      if (bit_get(s.z, region[i])) bit_set(r, a + i, true);
    }
    rows.push_back(r);
  }
  return gf2_rank(rows, 2 * a) - a;
}

Vec StabilizerTableau::statevector() const { return stabilizer_vector(n_, stab_); }

// ---------------------------------------------------------------- fixed points

int Lattice::h(int x, int y) const { return 2 * (((y % Ly + Ly) % Ly) * Lx + ((x % Lx + Lx) % Lx)); }
int Lattice::v(int x, int y) const { return h(x, y) + 1; }

std::vector<int> Lattice::snake() const {
  std::vector<int> s;
  for (int y = 0; y < Ly; ++y)
    for (int i = 0; i < Lx; ++i) {
      int x = (y % 2 == 0) ? i : Lx - 1 - i;
      s.push_back(h(x, y));
      s.push_back(v(x, y));
    }
  return s;
}

StabilizerTableau prepare_product(int n) {
  std::vector<PauliString> g;
  for (int i = 0; i < n; ++i) g.push_back(PauliString::single(n, i, 'X'));
  return StabilizerTableau(n, g);
}

StabilizerTableau prepare_ghz(int n) {
  if (n < 2) throw std::invalid_argument("GHZ needs n >= 2");
  std::vector<PauliString> g;
  for (int i = 0; i + 1 < n; ++i) g.push_back(PauliString::on(n, {i, i + 1}, 'Z'));
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  g.push_back(PauliString::on(n, all, 'X'));
  return StabilizerTableau(n, g);
}

StabilizerTableau prepare_cluster(int n) {
  if (n < 4 || n % 2) throw std::invalid_argument("cluster ring needs even n >= 4");
  std::vector<PauliString> g;
  for (int i = 0; i < n; ++i)
    g.push_back(PauliString::single(n, (i + n - 1) % n, 'Z') * PauliString::single(n, i, 'X') *
                PauliString::single(n, (i + 1) % n, 'Z'));
  return StabilizerTableau(n, g);
}

StabilizerTableau prepare_toric(const Lattice& L) {
  if (L.Lx < 2 || L.Ly < 2) throw std::invalid_argument("torus needs Lx, Ly >= 2");
  const int n = L.qubits();
  std::vector<PauliString> g;
  for (int y = 0; y < L.Ly; ++y)
    for (int x = 0; x < L.Lx; ++x) {
      if (x == L.Lx - 1 && y == L.Ly - 1) continue;
      g.push_back(PauliString::on(n, {L.h(x, y), L.h(x - 1, y), L.v(x, y), L.v(x, y - 1)}, 'X'));
      g.push_back(PauliString::on(n, {L.h(x, y), L.h(x, y + 1), L.v(x, y), L.v(x + 1, y)}, 'Z'));
    }
  std::vector<int> hl, vl;
  for (int x = 0; x < L.Lx; ++x) hl.push_back(L.h(x, 0));
  for (int y = 0; y < L.Ly; ++y) vl.push_back(L.v(0, y));
  g.push_back(PauliString::on(n, hl, 'Z'));
  g.push_back(PauliString::on(n, vl, 'Z'));
  return StabilizerTableau(n, g);
}

int pauli_expectation(const StabilizerTableau& s, const PauliString& P) { return s.expectation(P); }
int entropy(const StabilizerTableau& s, const std::vector<int>& region) { return s.entropy(region); }

namespace {
std::vector<int> join(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> s = a;
  s.insert(s.end(), b.begin(), b.end());
  return s;
}
void check_disjoint(std::initializer_list<const std::vector<int>*> regs) {
  std::vector<int> all;
  for (auto r : regs) all.insert(all.end(), r->begin(), r->end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) throw std::invalid_argument("regions overlap");
}
}  // namespace

int mutual_information(const StabilizerTableau& s, const std::vector<int>& A, const std::vector<int>& B) {
  check_disjoint({&A, &B});
  return s.entropy(A) + s.entropy(B) - s.entropy(join(A, B));
}

int conditional_mutual_information(const StabilizerTableau& s, const std::vector<int>& A,
                                   const std::vector<int>& B, const std::vector<int>& C) {
  check_disjoint({&A, &B, &C});
  return s.entropy(join(A, C)) + s.entropy(join(B, C)) - s.entropy(C) - s.entropy(join(join(A, B), C));
}

int tee_kitaev_preskill(const StabilizerTableau& s, const std::vector<int>& A, const std::vector<int>& B,
                        const std::vector<int>& C) {
  check_disjoint({&A, &B, &C});
  return s.entropy(join(A, B)) + s.entropy(join(B, C)) + s.entropy(join(A, C)) - s.entropy(A) -
         s.entropy(B) - s.entropy(C) - s.entropy(join(join(A, B), C));
}

// ---------------------------------------------------------------- scrambling

std::vector<PatchGate> brickwork_circuit(int n, int xi, Symmetry sym, Rng& rng, int layers,
                                         const std::vector<int>& order_in) {
  std::vector<PatchGate> gates;
  if (xi == 0) return gates;
  std::vector<int> order = order_in;
  if (order.empty()) {
    order.resize(n);
    for (int i = 0; i < n; ++i) order[i] = i;
  }
  const int L = static_cast<int>(order.size());
  if (xi < 0 || L % (2 * xi) != 0) throw std::invalid_argument("2ξ must divide the chain length");
  for (int layer = 0; layer < layers; ++layer) {
    const int off = (layer % 2) * xi;
    for (int start = off; start < L + off; start += 2 * xi) {
      PatchGate g;
      for (int i = 0; i < 2 * xi; ++i) g.qubits.push_back(order[(start + i) % L]);
      g.c = sample_symmetric_clifford(2 * xi, sym, rng, start % 2);
      gates.push_back(std::move(g));
    }
  }
  return gates;
}

void scramble(StabilizerTableau& s, int xi, Symmetry sym, Rng& rng, int layers, const std::vector<int>& order) {
  for (const auto& g : brickwork_circuit(s.n(), xi, sym, rng, layers, order)) s.apply(g.c, g.qubits);
}

PauliString heisenberg_image(const std::vector<PatchGate>& circuit, const PauliString& P) {
  PauliString Q = P;
  for (auto it = circuit.rbegin(); it != circuit.rend(); ++it) Q = conjugate_on(it->c.inverse(), it->qubits, Q);
  return Q;
}

}  // namespace symlab
