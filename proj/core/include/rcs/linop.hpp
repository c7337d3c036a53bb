#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rcs/vec.hpp"

namespace rcs {

// Matrix-free linear operator with an exact adjoint. Values are immutable
// after construction and cheap to copy (shared payload), so they can be
// handed to concurrent Monte Carlo workers; apply/adjoint_apply are pure.
class LinearMap {
 public:
  enum class Kind { Identity, Dense, GaussianOrthonormal, PartialDct, Composed, Custom };

  int rows() const;
  int cols() const;
  Kind kind() const;
  std::string name() const;

  Vec apply(const Vec& x) const;
  Vec adjoint_apply(const Vec& y) const;

  static LinearMap identity(int n);

  // entries is row-major, rows*cols long.
  static LinearMap dense(int rows, int cols, Vec entries);

  // m x n standard Gaussian rows, orthonormalized (modified Gram-Schmidt,
  // two passes). Deterministic per seed. Requires 0 < m <= n.
  static LinearMap gaussian_orthonormal(int m, int n, std::uint64_t seed);

  // m distinct rows of the n-point orthonormal DCT-II, chosen uniformly
  // without replacement. Stored implicitly (row indices only); apply runs
  // the fast transform and subsamples. n must be a power of two, 0 < m <= n.
  static LinearMap partial_dct(int n, int m, std::uint64_t seed);

  // Lazy composition outer * inner; requires outer.cols == inner.rows.
  static LinearMap compose(LinearMap outer, LinearMap inner);

  // Arbitrary user map given by a matching apply/adjoint pair.
  static LinearMap custom(int rows, int cols, std::function<Vec(const Vec&)> apply,
                          std::function<Vec(const Vec&)> adjoint, std::string name);

  // Selected DCT row indices (PartialDct only; ascending).
  const std::vector<int>& dct_row_indices() const;

 private:
  struct Impl;
  explicit LinearMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

struct EigEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Power iteration on x -> A^T(A x) from a seeded random start. The Rayleigh
// estimate approaches lambda_max(A^T A) from below; callers that need a safe
// Lipschitz constant multiply by kEigSafety.
EigEstimate max_eig_gram(const LinearMap& map, double tol, int max_iter, std::uint64_t seed);

inline constexpr double kEigSafety = 1.01;

inline double safe_lambda_max(const LinearMap& map, std::uint64_t seed = 0) {
  return kEigSafety * max_eig_gram(map, 1e-10, 2000, seed).value;
}

}  // namespace rcs
