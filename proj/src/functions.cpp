#include "functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "errors.hpp"

namespace trisplit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ProxFunction ProxFunction::zero() { return ProxFunction(Kind::Zero, 0.0, 0.0, 0.0); }

ProxFunction ProxFunction::l1(double weight) {
  if (weight < 0.0) throw InvalidArgumentError("l1: weight must be nonnegative");
  return ProxFunction(Kind::L1, weight, 0.0, 0.0);
}

ProxFunction ProxFunction::l0(double weight) {
  if (weight < 0.0) throw InvalidArgumentError("l0: weight must be nonnegative");
  return ProxFunction(Kind::L0, weight, 0.0, 0.0);
}

ProxFunction ProxFunction::squared_l2(double weight) {
  if (weight < 0.0) throw InvalidArgumentError("squared_l2: weight must be nonnegative");
  return ProxFunction(Kind::SquaredL2, weight, 0.0, 0.0);
}

ProxFunction ProxFunction::box_indicator(double lo, double hi) {
  if (!(lo <= hi)) throw InvalidArgumentError("box_indicator: need lo <= hi");
  return ProxFunction(Kind::BoxIndicator, 0.0, lo, hi);
}

bool ProxFunction::coercive() const {
  switch (kind_) {
  case Kind::L1:
  case Kind::SquaredL2:
    return weight_ > 0.0;
  case Kind::BoxIndicator:
    return true; // +inf outside a bounded set
  case Kind::Zero:
  case Kind::L0:
    return false;
  }
  return false;
}

std::string ProxFunction::kind_name() const {
  switch (kind_) {
  case Kind::Zero: return "zero";
  case Kind::L1: return "l1";
  case Kind::L0: return "l0";
  case Kind::SquaredL2: return "squared_l2";
  case Kind::BoxIndicator: return "box";
  }
  return "?";
}

double ProxFunction::evaluate(std::span<const double> v) const {
  switch (kind_) {
  case Kind::Zero:
    return 0.0;
  case Kind::L1: {
    double s = 0.0;
    for (double vi : v) s += std::abs(vi);
    return weight_ * s;
  }
  case Kind::L0: {
    std::size_t nnz = 0;
    for (double vi : v)
      if (vi != 0.0) ++nnz;
    return weight_ * static_cast<double>(nnz);
  }
  case Kind::SquaredL2:
    return 0.5 * weight_ * norm_sq(v);
  case Kind::BoxIndicator:
    for (double vi : v)
      if (vi < lo_ || vi > hi_) return kInf;
    return 0.0;
  }
  return 0.0;
}

Vec ProxFunction::prox(double gamma, std::span<const double> v) const {
  if (!(gamma > 0.0)) throw InvalidArgumentError("prox: gamma must be positive");
  Vec r(v.begin(), v.end());
  switch (kind_) {
  case Kind::Zero:
    break;
  case Kind::L1: {
    const double t = gamma * weight_;
    for (double &ri : r) {
      if (ri > t)
        ri -= t;
      else if (ri < -t)
        ri += t;
      else
        ri = 0.0;
    }
    break;
  }
  case Kind::L0: {
    // Keep v_i iff |v_i| > sqrt(2 gamma w); the tie goes to 0.
    const double t = std::sqrt(2.0 * gamma * weight_);
    for (double &ri : r)
      if (std::abs(ri) <= t) ri = 0.0;
    break;
  }
  case Kind::SquaredL2: {
    const double s = 1.0 / (1.0 + gamma * weight_);
    for (double &ri : r) ri *= s;
    break;
  }
  case Kind::BoxIndicator:
    for (double &ri : r) ri = std::min(std::max(ri, lo_), hi_);
    break;
  }
  return r;
}

SmoothCoupling SmoothCoupling::quadratic(DenseOperator k, DenseOperator m, Vec b,
                                         double weight) {
  if (k.rows() != m.rows())
    throw DimensionError("quadratic coupling: K and M must have the same number of rows");
  if (b.size() != k.rows())
    throw DimensionError("quadratic coupling: offset length must match K rows");
  if (!(weight > 0.0)) throw InvalidArgumentError("quadratic coupling: weight must be positive");

  SmoothCoupling h;
  h.kind_ = Kind::Quadratic;
  h.x_dim_ = k.cols();
  h.y_dim_ = m.cols();

  // Stacked J = [K M]; the Hessian is weight * J^T J, so L = weight * ||J||^2.
  const std::size_t rows = k.rows();
  const std::size_t cols = k.cols() + m.cols();
  std::vector<double> j(rows * cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < k.cols(); ++c) j[i * cols + c] = k.entry(i, c);
    for (std::size_t c = 0; c < m.cols(); ++c) j[i * cols + k.cols() + c] = m.entry(i, c);
  }
  const SpectralQuantities js = spectral_quantities(rows, cols, j);
  h.lipschitz_ = weight * js.operator_norm * js.operator_norm;

  h.k_ = std::move(k);
  h.m_ = std::move(m);
  h.b_ = std::move(b);
  h.quad_weight_ = weight;
  return h;
}

SmoothCoupling SmoothCoupling::separable(double wx, Vec c, double wy, Vec d) {
  if (wx < 0.0 || wy < 0.0)
    throw InvalidArgumentError("separable coupling: weights must be nonnegative");
  SmoothCoupling h;
  h.kind_ = Kind::Separable;
  h.x_dim_ = c.size();
  h.y_dim_ = d.size();
  h.lipschitz_ = std::max(wx, wy);
  h.wx_ = wx;
  h.wy_ = wy;
  h.c_ = std::move(c);
  h.d_ = std::move(d);
  return h;
}

SmoothCoupling SmoothCoupling::custom(std::size_t x_dim, std::size_t y_dim, ValueFn value,
                                      GradFn grad_x, GradFn grad_y,
                                      double declared_lipschitz) {
  if (!(declared_lipschitz > 0.0))
    throw InvalidArgumentError("custom coupling: declared Lipschitz constant must be positive");
  SmoothCoupling h;
  h.kind_ = Kind::Custom;
  h.x_dim_ = x_dim;
  h.y_dim_ = y_dim;
  h.lipschitz_ = declared_lipschitz;
  h.value_fn_ = std::move(value);
  h.grad_x_fn_ = std::move(grad_x);
  h.grad_y_fn_ = std::move(grad_y);
  return h;
}

bool SmoothCoupling::coercive() const {
  switch (kind_) {
  case Kind::Separable:
    return wx_ > 0.0 && wy_ > 0.0;
  case Kind::Quadratic: {
    // Coercive iff [K M] has full column rank, i.e. J^T J positive definite.
    const std::size_t rows = k_->rows();
    const std::size_t cols = x_dim_ + y_dim_;
    if (rows < cols) return false;
    std::vector<double> j(rows * cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t c = 0; c < k_->cols(); ++c) j[i * cols + c] = k_->entry(i, c);
      for (std::size_t c = 0; c < m_->cols(); ++c)
        j[i * cols + k_->cols() + c] = m_->entry(i, c);
    }
    std::vector<double> jtj(cols * cols, 0.0);
    for (std::size_t a = 0; a < cols; ++a)
      for (std::size_t b = a; b < cols; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s += j[i * cols + a] * j[i * cols + b];
        jtj[a * cols + b] = s;
        jtj[b * cols + a] = s;
      }
    const auto ev = symmetric_eigenvalues(cols, std::move(jtj));
    return ev.front() > 1e-12 * std::max(ev.back(), 0.0);
  }
  case Kind::Custom:
    return false; // unknown; callers must declare coercivity at the instance level
  }
  return false;
}

void SmoothCoupling::check_dims(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != x_dim_ || y.size() != y_dim_)
    throw DimensionError("coupling: argument dimensions (" + std::to_string(x.size()) + ", " +
                         std::to_string(y.size()) + ") do not match (" +
                         std::to_string(x_dim_) + ", " + std::to_string(y_dim_) + ")");
}

double SmoothCoupling::value(std::span<const double> x, std::span<const double> y) const {
  check_dims(x, y);
  switch (kind_) {
  case Kind::Quadratic: {
    const Vec kx = k_->apply(x);
    const Vec my = m_->apply(y);
    double s = 0.0;
    for (std::size_t i = 0; i < kx.size(); ++i) {
      const double r = kx[i] + my[i] - b_[i];
      s += r * r;
    }
    return 0.5 * quad_weight_ * s;
  }
  case Kind::Separable: {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = x[i] - c_[i];
      s += 0.5 * wx_ * r * r;
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double r = y[i] - d_[i];
      s += 0.5 * wy_ * r * r;
    }
    return s;
  }
  case Kind::Custom:
    return value_fn_(x, y);
  }
  return 0.0;
}

Vec SmoothCoupling::grad_x(std::span<const double> x, std::span<const double> y) const {
  check_dims(x, y);
  switch (kind_) {
  case Kind::Quadratic: {
    Vec r = k_->apply(x);
    const Vec my = m_->apply(y);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = quad_weight_ * (r[i] + my[i] - b_[i]);
    return k_->adjoint_apply(r);
  }
  case Kind::Separable: {
    Vec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = wx_ * (x[i] - c_[i]);
    return g;
  }
  case Kind::Custom:
    return grad_x_fn_(x, y);
  }
  return {};
}

Vec SmoothCoupling::grad_y(std::span<const double> x, std::span<const double> y) const {
  check_dims(x, y);
  switch (kind_) {
  case Kind::Quadratic: {
    Vec r = k_->apply(x);
    const Vec my = m_->apply(y);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = quad_weight_ * (r[i] + my[i] - b_[i]);
    return m_->adjoint_apply(r);
  }
  case Kind::Separable: {
    Vec g(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) g[i] = wy_ * (y[i] - d_[i]);
    return g;
  }
  case Kind::Custom:
    return grad_y_fn_(x, y);
  }
  return {};
}

} // namespace trisplit
