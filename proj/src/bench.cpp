#include "bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "errors.hpp"

namespace trisplit {

namespace {

// Platform-stable draws from mt19937_64: the engine output is standardized,
// the distributions below avoid the implementation-defined std:: ones.
double u01(std::mt19937_64 &gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double gauss(std::mt19937_64 &gen) {
  double a = u01(gen);
  while (a == 0.0) a = u01(gen);
  const double b = u01(gen);
  return std::sqrt(-2.0 * std::log(a)) * std::cos(2.0 * std::numbers::pi * b);
}

Vec fixed_prefix(std::initializer_list<double> values, std::size_t n) {
  Vec v(values);
  if (n > v.size())
    throw InvalidArgumentError("instance dimension exceeds the fixed data length");
  v.resize(n);
  return v;
}

} // namespace

double ProblemInstance::objective(std::span<const double> x, std::span<const double> y) const {
  const Vec ax = a.apply(x);
  return f.evaluate(ax) + g.evaluate(y) + h.value(x, y);
}

std::optional<double> ProblemInstance::psi_lower_hint() const {
  if (!inf_h) return std::nullopt;
  return f.lower_bound() + g.lower_bound() + *inf_h;
}

ProblemInstance make_convex_sanity(std::size_t m) {
  if (m < 1 || m > 4)
    throw InvalidArgumentError("convex_sanity: m must be in [1, 4]");

  const Vec c = fixed_prefix({1.5, -2.0, 0.75, 3.0}, m);
  const Vec d = fixed_prefix({0.5, 1.0, -1.5, 2.0}, m);

  ProblemInstance pb;
  pb.name = "convex_sanity";
  pb.f = ProxFunction::l1(1.0);
  pb.g = ProxFunction::squared_l2(1.0);
  pb.h = SmoothCoupling::separable(1.0, c, 1.0, d);
  pb.a = DenseOperator::identity(m);
  pb.flags = {.h_coercive = true, .a_invertible = true, .f_coercive = true, .g_coercive = true};
  pb.inf_h = 0.0;

  // x* = soft-threshold(c, 1), y* = d/2; verified against the grid oracle in
  // the test suite.
  Vec xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = c[i] > 1.0 ? c[i] - 1.0 : (c[i] < -1.0 ? c[i] + 1.0 : 0.0);
    ys[i] = 0.5 * d[i];
  }
  pb.solution_x = std::move(xs);
  pb.solution_y = std::move(ys);
  return pb;
}

ProblemInstance make_tv_sparse_recovery(std::size_t m, std::uint64_t seed) {
  if (m < 3) throw InvalidArgumentError("tv_sparse_recovery: m must be at least 3");

  std::mt19937_64 gen(seed);

  // Piecewise-constant signal over three blocks, plus small noise.
  Vec b(m);
  const std::size_t b1 = m / 3;
  const std::size_t b2 = 2 * m / 3;
  const double levels[3] = {4.0 * u01(gen) - 2.0, 4.0 * u01(gen) - 2.0, 4.0 * u01(gen) - 2.0};
  for (std::size_t i = 0; i < m; ++i) {
    const double level = i < b1 ? levels[0] : (i < b2 ? levels[1] : levels[2]);
    b[i] = level + 0.05 * gauss(gen);
  }

  ProblemInstance pb;
  pb.name = "tv_sparse_recovery";
  pb.seed = seed;
  pb.f = ProxFunction::l1(0.1);
  pb.g = ProxFunction::l0(0.05);
  pb.h = SmoothCoupling::quadratic(DenseOperator::identity(m),
                                   [&] {
                                     std::vector<double> e(m * m, 0.0);
                                     for (std::size_t i = 0; i < m; ++i) e[i * m + i] = -1.0;
                                     return DenseOperator(m, m, std::move(e));
                                   }(),
                                   b);
  pb.a = DenseOperator::first_difference(m);
  // H(x, y) = 0.5 ||x - y - b||^2 is flat along x = y + t, and the L0 term is
  // bounded: neither boundedness route applies.
  pb.flags = {.h_coercive = false, .a_invertible = false, .f_coercive = true,
              .g_coercive = false};
  pb.inf_h = 0.0;
  pb.signal = b;
  return pb;
}

ProblemInstance make_reduction_palm(std::size_t m, std::size_t q) {
  if (m < 1 || q < 1) throw InvalidArgumentError("reduction_palm: dims must be positive");

  // Deterministic coupling matrix M and offset b.
  std::mt19937_64 gen(0x9e3779b97f4a7c15ull);
  std::vector<double> me(m * q);
  for (double &v : me) v = 2.0 * u01(gen) - 1.0;
  Vec b(m);
  for (double &v : b) v = 2.0 * u01(gen) - 1.0;

  ProblemInstance pb;
  pb.name = "reduction_palm";
  pb.f = ProxFunction::zero();
  pb.g = ProxFunction::l1(0.4);
  pb.h = SmoothCoupling::quadratic(DenseOperator::identity(m),
                                   DenseOperator(m, q, std::move(me)), std::move(b));
  pb.a = DenseOperator::identity(m);
  pb.flags = {.h_coercive = false, .a_invertible = true, .f_coercive = false,
              .g_coercive = true};
  pb.inf_h = 0.0;
  return pb;
}

ProblemInstance make_reduction_yfree(std::size_t m, std::size_t p) {
  if (m < 2 || p < 1 || p > m)
    throw InvalidArgumentError("reduction_yfree: need 1 <= p <= m, m >= 2");

  std::mt19937_64 gen(0xc0ffee ^ (m * 1315423911ull + p));
  std::vector<double> ae(p * m);
  for (double &v : ae) v = gauss(gen);
  DenseOperator a(p, m, std::move(ae));
  if (!a.surjective())
    throw NotSurjectiveError("reduction_yfree: sampled operator is rank deficient");

  Vec c(m);
  for (double &v : c) v = 2.0 * u01(gen) - 1.0;

  ProblemInstance pb;
  pb.name = "reduction_yfree";
  pb.f = ProxFunction::l1(0.5);
  pb.g = ProxFunction::zero();
  // H depends on x only; the y block must stay frozen at y0.
  pb.h = SmoothCoupling::separable(1.0, std::move(c), 0.0, Vec(2, 0.0));
  pb.a = std::move(a);
  pb.flags = {.h_coercive = false, .a_invertible = false, .f_coercive = true,
              .g_coercive = false};
  pb.inf_h = 0.0;
  return pb;
}

ProblemInstance make_reduction_proxgrad(std::size_t q) {
  if (q < 1) throw InvalidArgumentError("reduction_proxgrad: q must be positive");

  std::mt19937_64 gen(0xfeedface ^ (q * 2654435761ull));
  Vec d(q);
  for (double &v : d) v = 2.0 * u01(gen) - 1.0;

  ProblemInstance pb;
  pb.name = "reduction_proxgrad";
  pb.f = ProxFunction::zero();
  pb.g = ProxFunction::l1(0.3);
  // H depends on y only; the y block runs a plain proximal-gradient iteration.
  pb.h = SmoothCoupling::separable(0.0, Vec(q, 0.0), 1.0, std::move(d));
  pb.a = DenseOperator::identity(q);
  pb.flags = {.h_coercive = false, .a_invertible = true, .f_coercive = false,
              .g_coercive = true};
  pb.inf_h = 0.0;
  return pb;
}

OracleResult brute_force_oracle(const ProblemInstance &problem, const GridBox &box,
                                double resolution, double refine_resolution) {
  const std::size_t dims = problem.m() + problem.q();
  if (box.lo.size() != dims || box.hi.size() != dims)
    throw DimensionError("oracle: box must cover all " + std::to_string(dims) +
                         " coordinates");
  if (dims > 3)
    throw GridTooLargeError("oracle: combined dimension exceeds 3");
  if (!(resolution > 0.0) || !(refine_resolution > 0.0))
    throw InvalidArgumentError("oracle: resolutions must be positive");

  auto sweep = [&](const GridBox &bx, double res, Vec &best_point, double &best_value) {
    std::vector<std::size_t> steps(dims);
    double total = 1.0;
    for (std::size_t i = 0; i < dims; ++i) {
      if (!(bx.lo[i] <= bx.hi[i])) throw InvalidArgumentError("oracle: empty box");
      steps[i] = static_cast<std::size_t>(std::floor((bx.hi[i] - bx.lo[i]) / res)) + 1;
      total *= static_cast<double>(steps[i]);
    }
    if (total > 1e8) throw GridTooLargeError("oracle: grid would exceed 1e8 points");

    std::vector<std::size_t> idx(dims, 0);
    Vec point(dims);
    Vec x(problem.m()), y(problem.q());
    bool done = false;
    while (!done) {
      for (std::size_t i = 0; i < dims; ++i)
        point[i] = bx.lo[i] + static_cast<double>(idx[i]) * res;
      std::copy(point.begin(), point.begin() + static_cast<long>(problem.m()), x.begin());
      std::copy(point.begin() + static_cast<long>(problem.m()), point.end(), y.begin());
      const double v = problem.objective(x, y);
      if (v < best_value) {
        best_value = v;
        best_point = point;
      }
      // Row-major increment: the first hit of a value is the
      // lexicographically smallest grid point.
      std::size_t k = dims;
      while (k > 0) {
        --k;
        if (++idx[k] < steps[k]) break;
        idx[k] = 0;
        if (k == 0) done = true;
      }
    }
  };

  Vec best_point;
  double best_value = std::numeric_limits<double>::infinity();
  sweep(box, resolution, best_point, best_value);

  GridBox refine;
  refine.lo.resize(dims);
  refine.hi.resize(dims);
  for (std::size_t i = 0; i < dims; ++i) {
    refine.lo[i] = std::max(box.lo[i], best_point[i] - resolution);
    refine.hi[i] = std::min(box.hi[i], best_point[i] + resolution);
  }
  sweep(refine, refine_resolution, best_point, best_value);

  OracleResult out;
  out.x.assign(best_point.begin(), best_point.begin() + static_cast<long>(problem.m()));
  out.y.assign(best_point.begin() + static_cast<long>(problem.m()), best_point.end());
  out.value = best_value;
  return out;
}

} // namespace trisplit
