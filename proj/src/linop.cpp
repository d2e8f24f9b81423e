#include "linop.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace trisplit {

std::vector<double> symmetric_eigenvalues(std::size_t n, std::vector<double> a) {
  if (a.size() != n * n)
    throw DimensionError("symmetric_eigenvalues: matrix storage does not match dimension");
  if (n == 0) return {};
  if (n == 1) return {a[0]};

  auto at = [&](std::size_t i, std::size_t j) -> double & { return a[i * n + j]; };

  double frob = 0.0;
  for (double v : a) frob += v * v;
  frob = std::sqrt(frob);
  const double stop = 1e-15 * std::max(frob, std::numeric_limits<double>::min());

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * at(i, j) * at(i, j);
    if (std::sqrt(off) <= stop) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double app = at(p, p);
        const double aqq = at(q, q);
        // Rotation angle that annihilates a_pq (Rutishauser's formulas).
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

SpectralQuantities spectral_quantities(std::size_t rows, std::size_t cols,
                                       const std::vector<double> &entries) {
  if (rows == 0 || cols == 0)
    throw DimensionError("spectral_quantities: operator must have at least one row and column");
  if (entries.size() != rows * cols)
    throw DimensionError("spectral_quantities: matrix storage does not match dimensions");

  // AA^T is p x p; its extreme eigenvalues give ||A||^2 and lambda_min(AA^T).
  std::vector<double> aat(rows * rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = i; j < rows; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < cols; ++k)
        s += entries[i * cols + k] * entries[j * cols + k];
      aat[i * rows + j] = s;
      aat[j * rows + i] = s;
    }

  const std::vector<double> ev = symmetric_eigenvalues(rows, std::move(aat));
  const double lmax = std::max(0.0, ev.back());
  const double lmin = std::max(0.0, ev.front());

  SpectralQuantities spec;
  spec.operator_norm = std::sqrt(lmax);
  spec.min_eig_aat = lmin;
  spec.surjective = lmin > 1e-12 * lmax;
  spec.kappa = spec.surjective ? lmax / lmin : std::numeric_limits<double>::infinity();
  return spec;
}

DenseOperator::DenseOperator(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)),
      spec_(spectral_quantities(rows, cols, entries_)) {}

DenseOperator DenseOperator::identity(std::size_t n) {
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
  return DenseOperator(n, n, std::move(e));
}

DenseOperator DenseOperator::first_difference(std::size_t m) {
  if (m < 2) throw DimensionError("first_difference: need at least 2 columns");
  std::vector<double> e((m - 1) * m, 0.0);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    e[i * m + i] = -1.0;
    e[i * m + i + 1] = 1.0;
  }
  return DenseOperator(m - 1, m, std::move(e));
}

DenseOperator DenseOperator::from_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file: " + path);

  std::vector<double> entries;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception &) {
        throw IoError(path + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.empty()) continue;
    if (cols == 0) cols = row.size();
    if (row.size() != cols)
      throw IoError(path + ": ragged rows (" + std::to_string(row.size()) + " vs " +
                    std::to_string(cols) + " columns)");
    entries.insert(entries.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw IoError(path + ": empty matrix");
  return DenseOperator(rows, cols, std::move(entries));
}

Vec DenseOperator::apply(std::span<const double> x) const {
  if (x.size() != cols_)
    throw DimensionError("apply: vector has length " + std::to_string(x.size()) +
                         ", operator has " + std::to_string(cols_) + " columns");
  Vec r(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    const double *row = entries_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) s += row[j] * x[j];
    r[i] = s;
  }
  return r;
}

Vec DenseOperator::adjoint_apply(std::span<const double> v) const {
  if (v.size() != rows_)
    throw DimensionError("adjoint_apply: vector has length " + std::to_string(v.size()) +
                         ", operator has " + std::to_string(rows_) + " rows");
  Vec r(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double *row = entries_.data() + i * cols_;
    const double vi = v[i];
    for (std::size_t j = 0; j < cols_; ++j) r[j] += row[j] * vi;
  }
  return r;
}

Vec DenseOperator::coupling_apply(double tau, double beta, std::span<const double> x) const {
  if (x.size() != cols_)
    throw DimensionError("coupling_apply: vector has length " + std::to_string(x.size()) +
                         ", operator has " + std::to_string(cols_) + " columns");
  const Vec ax = apply(x);
  Vec r = adjoint_apply(ax);
  for (std::size_t j = 0; j < cols_; ++j) r[j] = tau * x[j] - beta * r[j];
  return r;
}

} // namespace trisplit
