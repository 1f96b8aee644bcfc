#pragma once
// Shared aliases, error types and deterministic RNG stream derivation.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace symlab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Raised when a request exceeds the dense or combinatorial budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation is not defined for the given input class.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a computed operator leaves the subspace it must live in.
class SupportLeakageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr long kDenseBudget = 4096;

/// SplitMix64 finalizer; used to derive independent streams from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based stream derivation: the stream for task `index` depends only
/// on (master, index), never on worker count or scheduling.
inline Rng stream_rng(std::uint64_t master, std::uint64_t index) {
  return Rng(splitmix64(master ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

/// Worker count from SYMLAB_THREADS (default 1).
int worker_count();

}  // namespace symlab
