#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>

#include "linop.hpp"
#include "vec.hpp"

namespace trisplit {

/// Catalog of nonsmooth terms with closed-form proximal maps. Values use the
/// IEEE +infinity as the "outside the domain" sentinel: it propagates through
/// sums and compares greater than every finite real.
///
/// Set-valued prox cases are resolved deterministically: among minimizers the
/// one of smallest Euclidean norm is returned (for the hard threshold this
/// maps the equality case |v_i| = sqrt(2 gamma w) to 0).
class ProxFunction {
public:
  enum class Kind { Zero, L1, L0, SquaredL2, BoxIndicator };

  static ProxFunction zero();
  static ProxFunction l1(double weight);
  static ProxFunction l0(double weight);
  /// (weight/2) ||v||^2
  static ProxFunction squared_l2(double weight);
  static ProxFunction box_indicator(double lo, double hi);

  Kind kind() const { return kind_; }
  double weight() const { return weight_; }
  double box_lo() const { return lo_; }
  double box_hi() const { return hi_; }
  /// Explicit finite lower bound (0 for every catalog kind).
  double lower_bound() const { return 0.0; }
  bool coercive() const;
  std::string kind_name() const;

  double evaluate(std::span<const double> v) const;
  Vec prox(double gamma, std::span<const double> v) const;

private:
  ProxFunction(Kind kind, double weight, double lo, double hi)
      : kind_(kind), weight_(weight), lo_(lo), hi_(hi) {}

  Kind kind_;
  double weight_;
  double lo_, hi_; // BoxIndicator bounds
};

/// Smooth coupling H(x, y): value, block gradients and an exact Lipschitz
/// constant of the full gradient.
class SmoothCoupling {
public:
  enum class Kind { Quadratic, Separable, Custom };

  using ValueFn = std::function<double(std::span<const double>, std::span<const double>)>;
  using GradFn = std::function<Vec(std::span<const double>, std::span<const double>)>;

  /// H(x, y) = (weight/2) ||Kx + My - b||^2. The Lipschitz constant is the
  /// exact spectral norm of the Hessian weight * [K M]^T [K M].
  static SmoothCoupling quadratic(DenseOperator k, DenseOperator m, Vec b,
                                  double weight = 1.0);

  /// H(x, y) = (wx/2) ||x - c||^2 + (wy/2) ||y - d||^2, L = max(wx, wy).
  static SmoothCoupling separable(double wx, Vec c, double wy, Vec d);

  /// User-registered oracles with a declared Lipschitz constant; validated by
  /// sampling only, never certified.
  static SmoothCoupling custom(std::size_t x_dim, std::size_t y_dim, ValueFn value,
                               GradFn grad_x, GradFn grad_y, double declared_lipschitz);

  Kind kind() const { return kind_; }
  std::size_t x_dim() const { return x_dim_; }
  std::size_t y_dim() const { return y_dim_; }
  double lipschitz() const { return lipschitz_; }
  /// L * sqrt(2): the shared bound for the blockwise constants.
  double ell_plus() const { return lipschitz_ * std::numbers::sqrt2; }
  bool coercive() const;

  double value(std::span<const double> x, std::span<const double> y) const;
  Vec grad_x(std::span<const double> x, std::span<const double> y) const;
  Vec grad_y(std::span<const double> x, std::span<const double> y) const;

private:
  SmoothCoupling() = default;

  Kind kind_ = Kind::Separable;
  std::size_t x_dim_ = 0, y_dim_ = 0;
  double lipschitz_ = 0.0;

  // Quadratic
  std::optional<DenseOperator> k_, m_;
  Vec b_;
  double quad_weight_ = 1.0;

  // Separable
  double wx_ = 0.0, wy_ = 0.0;
  Vec c_, d_;

  // Custom
  ValueFn value_fn_;
  GradFn grad_x_fn_, grad_y_fn_;

  void check_dims(std::span<const double> x, std::span<const double> y) const;
};

} // namespace trisplit
