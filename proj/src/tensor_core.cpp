#include "symlab/tensor_core.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace symlab {

int worker_count() {
  const char* env = std::getenv("SYMLAB_THREADS");
  if (!env) return 1;
  int v = std::atoi(env);
  return v < 1 ? 1 : v;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat kron_all(const std::vector<Mat>& factors) {
  Mat out = Mat::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

Mat haar_unitary(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat Z(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) Z(i, j) = cplx(nd(rng), nd(rng));
  Eigen::HouseholderQR<Mat> qr(Z);
  Mat Q = qr.householderQ();
  Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    cplx d = R(j, j);
    double a = std::abs(d);
    Q.col(j) *= (a > 0 ? d / a : cplx(1.0));
  }
  return Q;
}

long SubsystemLayout::total() const {
  long t = 1;
  for (int d : dims) t *= d;
  return t;
}

Mat partial_trace(const Mat& op, const SubsystemLayout& layout, std::vector<int> keep) {
  const int n = static_cast<int>(layout.dims.size());
  std::sort(keep.begin(), keep.end());
  for (int s : keep)
    if (s < 0 || s >= n) throw std::out_of_range("region index out of range");
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
    throw std::invalid_argument("duplicate site in region");
  const long D = layout.total();
  if (op.rows() != D || op.cols() != D) throw std::invalid_argument("operator/layout mismatch");
  std::vector<char> kept(n, 0);
  for (int s : keep) kept[s] = 1;
  long dk = 1;
  for (int s : keep) dk *= layout.dims[s];
  // Strides (site 0 most significant).
  std::vector<long> stride(n);
  long st = 1;
  for (int s = n - 1; s >= 0; --s) { stride[s] = st; st *= layout.dims[s]; }
  std::vector<long> kidx(D), tidx(D);
  for (long x = 0; x < D; ++x) {
    long ki = 0, ti = 0;
    for (int s = 0; s < n; ++s) {
      long digit = (x / stride[s]) % layout.dims[s];
      if (kept[s]) ki = ki * layout.dims[s] + digit;
      else ti = ti * layout.dims[s] + digit;
    }
    kidx[x] = ki;
    tidx[x] = ti;
  }
  Mat out = Mat::Zero(dk, dk);
  for (long x = 0; x < D; ++x)
    for (long y = 0; y < D; ++y)
      if (tidx[x] == tidx[y]) out(kidx[x], kidx[y]) += op(x, y);
  return out;
}

Norms norms(const Mat& op) {
  Eigen::JacobiSVD<Mat> svd(op);
  const auto& s = svd.singularValues();
  Norms n;
  n.trace_norm = s.sum();
  n.spectral_norm = s.size() ? s(0) : 0.0;
  n.frobenius = op.norm();
  return n;
}

double spectral_norm_power(const Mat& op, int iters) {
  if (op.size() == 0) return 0;
  Vec v = Vec::Ones(op.cols()) / std::sqrt(double(op.cols()));
  // Deterministic perturbation to avoid orthogonal start vectors.
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += cplx(1e-3 * (i % 7), 1e-3 * (i % 5));
  v.normalize();
  double lam = 0;
  for (int t = 0; t < iters; ++t) {
    Vec w = op.adjoint() * (op * v);
    double nw = w.norm();
    if (nw == 0) return 0;
    lam = nw;
    v = w / nw;
  }
  return std::sqrt(lam);
}

bool is_hermitian(const Mat& A, double tol) {
  return A.rows() == A.cols() && (A - A.adjoint()).norm() <= tol * std::max(1.0, A.norm());
}

RVec hermitian_eigenvalues(const Mat& A) {
  Mat H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double hermitian_trace_norm(const Mat& A) { return hermitian_eigenvalues(A).cwiseAbs().sum(); }

bool psd_order_check(const Mat& A, const Mat& B, double tol) {
  if (!is_hermitian(A, 1e-9) || !is_hermitian(B, 1e-9))
    throw std::invalid_argument("psd_order_check requires Hermitian inputs");
  RVec ev = hermitian_eigenvalues(B - A);
  return ev.size() == 0 || ev(0) >= -tol;
}

Mat copy_permutation(const std::vector<int>& perm, int d) {
  const int k = static_cast<int>(perm.size());
  long D = 1;
  for (int i = 0; i < k; ++i) D *= d;
  Mat P = Mat::Zero(D, D);
  std::vector<int> in(k), out(k);
  for (long x = 0; x < D; ++x) {
    long r = x;
    for (int j = k - 1; j >= 0; --j) { in[j] = static_cast<int>(r % d); r /= d; }
    for (int j = 0; j < k; ++j) out[perm[j]] = in[j];
    long y = 0;
    for (int j = 0; j < k; ++j) y = y * d + out[j];
    P(y, x) = 1;
  }
  return P;
}

}  // namespace symlab
