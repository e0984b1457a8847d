#pragma once

// Truncated SVD by Golub-Kahan-Lanczos bidiagonalization with full
// reorthogonalization. The Krylov space is grown until the leading k
// singular values of the projected bidiagonal stop moving (relative change
// below tol) and their residuals are small; at full dimension the
// factorization is exact. The small bidiagonal problem is solved with
// one-sided Jacobi rotations.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ontoq {

/// Row-major dense matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  /// y = A x; x has cols() entries, y has rows().
  virtual void apply(const double* x, double* y) const = 0;
  /// y = A^T x; x has rows() entries, y has cols().
  virtual void apply_transpose(const double* x, double* y) const = 0;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(const DenseMatrix& m) : m_(m) {}
  std::size_t rows() const override { return m_.rows; }
  std::size_t cols() const override { return m_.cols; }
  void apply(const double* x, double* y) const override;
  void apply_transpose(const double* x, double* y) const override;

 private:
  const DenseMatrix& m_;
};

struct SvdOptions {
  double tol = 1e-9;
  /// Lanczos steps allowed per requested singular triplet.
  std::size_t max_iter = 500;
  std::uint64_t seed = 0x5eed5eedULL;
};

struct SvdResult {
  std::vector<double> sigma;  // non-increasing
  DenseMatrix u;              // rows x k, orthonormal columns
  DenseMatrix v;              // cols x k, orthonormal columns
  std::size_t lanczos_steps = 0;
};

/// Rank-k factorization A ~ U diag(sigma) V^T. Columns of U are signed so
/// their first entry that is not numerically zero is positive.
/// Throws InvalidConfig for k == 0, k > min(rows, cols) or tol <= 0, and
/// NoConvergence when the step budget runs out first.
SvdResult truncated_svd(const LinearOperator& a, std::size_t k, const SvdOptions& options = {});

}  // namespace ontoq
