#pragma once
// Dense complex linear algebra used by every other module.

#include <vector>

#include "symlab/common.hpp"

namespace symlab {

Mat kron(const Mat& a, const Mat& b);
Mat kron_all(const std::vector<Mat>& factors);

/// Haar unitary via QR of a complex Gaussian matrix with phase-corrected R.
Mat haar_unitary(int dim, Rng& rng);

/// Site dimensions; a region is a list of site indices.
struct SubsystemLayout {
  std::vector<int> dims;
  long total() const;
};

/// Partial trace keeping `keep` (in ascending site order).
Mat partial_trace(const Mat& op, const SubsystemLayout& layout, std::vector<int> keep);

struct Norms {
  double trace_norm = 0, spectral_norm = 0, frobenius = 0;
};
Norms norms(const Mat& op);

/// Largest singular value by power iteration on A†A (used as a cross-check).
double spectral_norm_power(const Mat& op, int iters = 500);

/// True iff B − A ⪰ −tol (both Hermitian).
bool psd_order_check(const Mat& A, const Mat& B, double tol = 1e-9);

bool is_hermitian(const Mat& A, double tol = 1e-10);

/// Eigenvalues of a Hermitian matrix, ascending.
RVec hermitian_eigenvalues(const Mat& A);

/// Trace norm of a Hermitian matrix.
double hermitian_trace_norm(const Mat& A);

/// Permutation operator on `k` copies of a `d`-dimensional space moving the
/// content of slot j to slot perm[j].
Mat copy_permutation(const std::vector<int>& perm, int d);

}  // namespace symlab
