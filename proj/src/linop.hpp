#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vec.hpp"

namespace trisplit {

/// Spectral data of a p x m operator A: the quantities every step-size and
/// descent constant is built from.
struct SpectralQuantities {
  double operator_norm = 0.0; // ||A|| = sqrt(lambda_max(AA^T))
  double min_eig_aat = 0.0;   // lambda_min(AA^T), clamped at 0
  double kappa = 0.0;         // ||A||^2 / lambda_min(AA^T)
  bool surjective = false;    // min_eig_aat > 1e-12 * ||A||^2
};

/// Eigenvalues of a dense symmetric n x n matrix (row-major), ascending.
/// Cyclic Jacobi; exact to machine precision for the desk-scale matrices
/// handled here.
std::vector<double> symmetric_eigenvalues(std::size_t n, std::vector<double> a);

SpectralQuantities spectral_quantities(std::size_t rows, std::size_t cols,
                                       const std::vector<double> &entries);

/// Dense linear operator with cached spectral quantities. Immutable after
/// construction; operations are pure and safe to share across threads.
class DenseOperator {
public:
  DenseOperator(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseOperator identity(std::size_t n);
  /// (m-1) x m forward-difference operator, rows (..., -1, 1, ...).
  static DenseOperator first_difference(std::size_t m);
  /// Comma-separated rows, one matrix row per line.
  static DenseOperator from_csv(const std::string &path);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<double> &entries() const { return entries_; }
  double entry(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  const SpectralQuantities &spectral() const { return spec_; }
  double norm() const { return spec_.operator_norm; }
  double min_eig_aat() const { return spec_.min_eig_aat; }
  double kappa() const { return spec_.kappa; }
  bool surjective() const { return spec_.surjective; }

  /// A x
  Vec apply(std::span<const double> x) const;
  /// A^T v
  Vec adjoint_apply(std::span<const double> v) const;
  /// B x with B = tau Id - beta A^T A
  Vec coupling_apply(double tau, double beta, std::span<const double> x) const;

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_; // row-major
  SpectralQuantities spec_;
};

} // namespace trisplit
