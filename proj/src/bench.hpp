#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "functions.hpp"
#include "linop.hpp"

namespace trisplit {

/// Which of the boundedness routes the instance certifies: H coercive, or A
/// invertible together with F and G coercive. Instances satisfying neither
/// are honest about it ("unguarded").
struct AssumptionFlags {
  bool h_coercive = false;
  bool a_invertible = false;
  bool f_coercive = false;
  bool g_coercive = false;

  bool boundedness_guaranteed() const {
    return h_coercive || (a_invertible && f_coercive && g_coercive);
  }
};

/// A full problem instance: oracles for F, G, H and the operator A, plus the
/// metadata the diagnostics consume. Immutable; construction is pure.
struct ProblemInstance {
  std::string name;
  std::uint64_t seed = 0;
  ProxFunction f = ProxFunction::zero();
  ProxFunction g = ProxFunction::zero();
  SmoothCoupling h = SmoothCoupling::separable(0.0, {}, 0.0, {});
  DenseOperator a = DenseOperator::identity(1);
  AssumptionFlags flags;
  std::optional<Vec> solution_x; // analytic minimizer, when known
  std::optional<Vec> solution_y;
  std::optional<double> inf_h;   // infimum of H over all space, when known
  std::optional<Vec> signal;     // synthetic observation used to build H

  std::size_t m() const { return a.cols(); }
  std::size_t p() const { return a.rows(); }
  std::size_t q() const { return h.y_dim(); }

  /// F(Ax) + G(y) + H(x, y)
  double objective(std::span<const double> x, std::span<const double> y) const;

  /// inf F + inf G + inf H when the H infimum is declared.
  std::optional<double> psi_lower_hint() const;
};

ProblemInstance make_convex_sanity(std::size_t m);
ProblemInstance make_tv_sparse_recovery(std::size_t m, std::uint64_t seed);
ProblemInstance make_reduction_palm(std::size_t m, std::size_t q);
ProblemInstance make_reduction_yfree(std::size_t m, std::size_t p);
ProblemInstance make_reduction_proxgrad(std::size_t q);

/// Axis-aligned search box over the concatenated (x, y) coordinates.
struct GridBox {
  Vec lo;
  Vec hi;
};

struct OracleResult {
  Vec x;
  Vec y;
  double value = 0.0;
};

/// Exhaustive grid minimization of the objective, then a refinement sweep at
/// `refine_resolution` around the best coarse cell. Deterministic: ties keep
/// the lexicographically first grid point.
OracleResult brute_force_oracle(const ProblemInstance &problem, const GridBox &box,
                                double resolution, double refine_resolution = 1e-5);

} // namespace trisplit
