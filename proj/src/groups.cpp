#include "symlab/groups.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <regex>
#include <sstream>

namespace symlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Digits of an Abelian element in mixed radix over the cyclic factors.
std::vector<int> digits_of(int g, const std::vector<int>& factors) {
  std::vector<int> d(factors.size());
  for (int j = static_cast<int>(factors.size()) - 1; j >= 0; --j) {
    d[j] = g % factors[j];
    g /= factors[j];
  }
  return d;
}

}  // namespace

long checked_pow(long base, int exp, long budget) {
  long v = 1;
  for (int i = 0; i < exp; ++i) {
    if (v > budget / std::max(1L, base)) throw CapacityError("dimension exceeds budget");
    v *= base;
  }
  if (v > budget) throw CapacityError("dimension exceeds budget");
  return v;
}

FiniteGroup::FiniteGroup(std::string name, std::vector<std::vector<int>> table,
                         std::vector<int> cyclic_factors)
    : name_(std::move(name)), table_(std::move(table)), factors_(std::move(cyclic_factors)) {
  const int n = order();
  if (n < 1) throw std::invalid_argument("group must be nonempty");
  for (const auto& row : table_) {
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("table not square");
    for (int v : row)
      if (v < 0 || v >= n) throw std::invalid_argument("table entry out of range");
  }
  for (int a = 0; a < n; ++a)
    if (table_[0][a] != a || table_[a][0] != a)
      throw std::invalid_argument("element 0 must be the identity");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
          throw std::invalid_argument("table is not associative");
  inv_.assign(n, -1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (table_[a][b] == 0) inv_[a] = b;
  for (int a = 0; a < n; ++a)
    if (inv_[a] < 0 || table_[inv_[a]][a] != 0) throw std::invalid_argument("missing inverse");
  abelian_ = true;
  for (int a = 0; a < n && abelian_; ++a)
    for (int b = 0; b < n; ++b)
      if (table_[a][b] != table_[b][a]) { abelian_ = false; break; }
  build_irreps();
}

cplx FiniteGroup::abelian_character(int x, int g) const {
  if (!abelian_) throw UnsupportedError("characters by charge require an Abelian group");
  if (factors_.empty()) return 1.0;
  auto dx = digits_of(x, factors_);
  auto dg = digits_of(g, factors_);
  double phase = 0;
  for (size_t j = 0; j < factors_.size(); ++j)
    phase += 2 * kPi * dx[j] * dg[j] / factors_[j];
  return std::polar(1.0, phase);
}

void FiniteGroup::build_irreps() {
  irreps_.clear();
  const int n = order();
  if (abelian_) {
    if (factors_.empty() && n != 1)
      throw std::invalid_argument("Abelian group needs its cyclic factors");
    for (int x = 0; x < n; ++x) {
      Irrep ir;
      ir.dim = 1;
      for (int g = 0; g < n; ++g) ir.mats.push_back(Mat::Constant(1, 1, abelian_character(x, g)));
      irreps_.push_back(std::move(ir));
    }
    return;
  }
  if (name_ != "S3") throw UnsupportedError("irreps only tabulated for S3 among non-Abelian groups");
  // Elements are permutations of 3 symbols in lexicographic order.
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do perms.push_back(p); while (std::next_permutation(p.begin(), p.end()));
  Eigen::Matrix<double, 3, 2> basis;
  basis << 1 / std::sqrt(2.0), 1 / std::sqrt(6.0), -1 / std::sqrt(2.0), 1 / std::sqrt(6.0), 0,
      -2 / std::sqrt(6.0);
  Irrep triv, sign, stdrep;
  triv.dim = 1;
  sign.dim = 1;
  stdrep.dim = 2;
  for (const auto& q : perms) {
    Eigen::Matrix3d P = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 3; ++i) P(q[i], i) = 1;
    triv.mats.push_back(Mat::Constant(1, 1, 1.0));
    sign.mats.push_back(Mat::Constant(1, 1, P.determinant()));
    Eigen::Matrix2d r = basis.transpose() * P * basis;
    stdrep.mats.push_back(r.cast<cplx>());
  }
  irreps_ = {triv, sign, stdrep};
}

FiniteGroup build_group(const std::string& descriptor) {
  if (descriptor == "trivial" || descriptor == "Z1") return FiniteGroup("trivial", {{0}}, {});
  if (descriptor == "S3") {
    std::vector<std::array<int, 3>> perms;
    std::array<int, 3> p{0, 1, 2};
    do perms.push_back(p); while (std::next_permutation(p.begin(), p.end()));
    std::vector<std::vector<int>> t(6, std::vector<int>(6));
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        std::array<int, 3> c{};
        for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
        t[a][b] = static_cast<int>(std::find(perms.begin(), perms.end(), c) - perms.begin());
      }
    return FiniteGroup("S3", t, {});
  }
  static const std::regex whole("^Z[0-9]+(xZ[0-9]+)*$");
  if (!std::regex_match(descriptor, whole))
    throw std::invalid_argument("malformed group descriptor: '" + descriptor + "'");
  std::vector<int> factors;
  std::stringstream ss(descriptor);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    int p = std::stoi(part.substr(1));
    if (p < 2) throw std::invalid_argument("cyclic order must be >= 2 in '" + descriptor + "'");
    factors.push_back(p);
  }
  int n = 1;
  for (int p : factors) {
    n *= p;
    if (n > 64) throw CapacityError("group order above 64 is not supported");
  }
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      auto da = digits_of(a, factors), db = digits_of(b, factors);
      int c = 0;
      for (size_t j = 0; j < factors.size(); ++j) c = c * factors[j] + (da[j] + db[j]) % factors[j];
      t[a][b] = c;
    }
  return FiniteGroup(descriptor, t, factors);
}

SiteRepresentation regular_representation(const FiniteGroup& g, int ancilla_dim) {
  if (ancilla_dim < 1) throw std::invalid_argument("ancilla_dim must be >= 1");
  SiteRepresentation rep;
  rep.group = g;
  rep.ancilla_dim = ancilla_dim;
  rep.site_dim = g.order() * ancilla_dim;
  for (int a = 0; a < g.order(); ++a) {
    Mat reg = Mat::Zero(g.order(), g.order());
    for (int h = 0; h < g.order(); ++h) reg(g.mul(a, h), h) = 1;
    rep.matrices.push_back(kron(reg, Mat::Identity(ancilla_dim, ancilla_dim)));
  }
  return rep;
}

Mat global_symmetry_operator(const SiteRepresentation& rep, int n, int g) {
  checked_pow(rep.site_dim, n, kDenseBudget);
  Mat out = Mat::Identity(1, 1);
  for (int i = 0; i < n; ++i) out = kron(out, rep.matrices.at(g));
  return out;
}

int charge_of(const std::vector<int>& x, const FiniteGroup& g) {
  if (!g.abelian()) throw UnsupportedError("charge_of requires an Abelian group");
  int c = g.identity();
  for (int v : x) {
    if (v < 0 || v >= g.order()) throw std::invalid_argument("charge label out of range");
    c = g.mul(c, v);
  }
  return c;
}

namespace {

// Abelian case: per-site character transform followed by the cumulative-charge ladder.
SectorDecomposition abelian_sectors(const SiteRepresentation& rep, int n, long D) {
  const FiniteGroup& G = rep.group;
  const int q = G.order(), a = rep.ancilla_dim;
  SectorDecomposition out;
  out.group = G;
  out.n_sites = n;
  out.total_dim = D;
  out.basis_change = Mat::Zero(D, D);
  // Site vectors |x>_c ⊗ |anc>.
  std::vector<std::vector<Vec>> site(q, std::vector<Vec>(a));
  for (int x = 0; x < q; ++x)
    for (int b = 0; b < a; ++b) {
      Vec v = Vec::Zero(q * a);
      for (int h = 0; h < q; ++h) v(h * a + b) = std::conj(G.abelian_character(x, h)) / std::sqrt(double(q));
      site[x][b] = v;
    }
  const long mult = D / q;
  long col = 0;
  for (int lam = 0; lam < q; ++lam) {
    out.sectors.push_back({lam, 1, mult, col});
    for (long m = 0; m < mult; ++m) {
      // m = mixed radix over (y_1..y_{n-1}, anc_1..anc_n), y_1 most significant.
      long r = m;
      std::vector<int> anc(n), y(n);
      for (int i = n - 1; i >= 0; --i) { anc[i] = static_cast<int>(r % a); r /= a; }
      for (int i = n - 2; i >= 0; --i) { y[i] = static_cast<int>(r % q); r /= q; }
      y[n - 1] = lam;
      Vec v = Vec::Ones(1);
      int prev = G.identity();
      for (int i = 0; i < n; ++i) {
        int x = G.mul(G.inv(prev), y[i]);
        prev = y[i];
        const Vec& s = site[x][anc[i]];
        Vec nv(v.size() * s.size());
        for (Eigen::Index u = 0; u < v.size(); ++u) nv.segment(u * s.size(), s.size()) = v(u) * s;
        v = std::move(nv);
      }
      out.basis_change.col(col++) = v;
    }
  }
  return out;
}

// General case: isotypic projectors P^λ_{ij} with fixed irrep matrices.
SectorDecomposition projector_sectors(const SiteRepresentation& rep, int n, long D) {
  const FiniteGroup& G = rep.group;
  std::vector<Mat> R;
  for (int g = 0; g < G.order(); ++g) R.push_back(global_symmetry_operator(rep, n, g));
  SectorDecomposition out;
  out.group = G;
  out.n_sites = n;
  out.total_dim = D;
  out.basis_change = Mat::Zero(D, D);
  long col = 0;
  const auto& irreps = G.irreps();
  for (size_t lam = 0; lam < irreps.size(); ++lam) {
    const Irrep& ir = irreps[lam];
    auto proj = [&](int i, int j) {
      Mat P = Mat::Zero(D, D);
      for (int g = 0; g < G.order(); ++g) P += std::conj(ir.mats[g](i, j)) * R[g];
      return Mat(P * (double(ir.dim) / G.order()));
    };
    Mat P00 = proj(0, 0);
    // Deterministic Gram-Schmidt over columns in index order.
    std::vector<Vec> basis;
    for (long c = 0; c < D; ++c) {
      Vec v = P00.col(c);
      for (const auto& b : basis) v -= b.dot(v) * b;
      for (const auto& b : basis) v -= b.dot(v) * b;
      double nv = v.norm();
      if (nv > 1e-8) basis.push_back(v / nv);
    }
    std::vector<Mat> Pi0;
    for (int i = 0; i < ir.dim; ++i) Pi0.push_back(proj(i, 0));
    out.sectors.push_back({static_cast<int>(lam), ir.dim, static_cast<long>(basis.size()), col});
    for (const auto& v : basis)
      for (int i = 0; i < ir.dim; ++i) out.basis_change.col(col++) = Pi0[i] * v;
  }
  if (col != D) throw std::runtime_error("sector decomposition did not span the space");
  return out;
}

}  // namespace

SectorDecomposition sector_decomposition(const SiteRepresentation& rep, int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  long D = checked_pow(rep.site_dim, n, kDenseBudget);
  if (rep.group.abelian()) return abelian_sectors(rep, n, D);
  return projector_sectors(rep, n, D);
}

bool is_symmetric(const Mat& U, const SiteRepresentation& rep, int n, double tol) {
  long D = checked_pow(rep.site_dim, n, kDenseBudget);
  if (U.rows() != D || U.cols() != D) throw std::invalid_argument("dimension mismatch");
  for (int g = 0; g < rep.group.order(); ++g) {
    Mat R = global_symmetry_operator(rep, n, g);
    if ((U * R - R * U).norm() > tol) return false;
  }
  return true;
}

}  // namespace symlab
