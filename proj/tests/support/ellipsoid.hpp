#pragma once

// Textbook ellipsoid method: the generic convex solver used as the
// independent oracle for prox-mapping tests. Needs only subgradients and
// (optional) constraint cuts; intended for dimensions <= 8.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace filtfit::testing {

struct ConvexInstance {
  std::function<double(const std::vector<double>&)> objective;
  std::function<std::vector<double>(const std::vector<double>&)> subgradient;
  // constraint(x) <= 0 defines the feasible set (optional).
  std::function<double(const std::vector<double>&)> constraint;
  std::function<std::vector<double>(const std::vector<double>&)> constraint_grad;
};

struct EllipsoidResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
};

inline EllipsoidResult ellipsoid_minimize(const ConvexInstance& inst, std::size_t d,
                                          double radius, int iters = 20000,
                                          double feas_tol = 1e-12) {
  std::vector<double> c(d, 0.0);
  std::vector<std::vector<double>> P(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) P[i][i] = radius * radius;

  EllipsoidResult best;
  const double dd = static_cast<double>(d);

  for (int it = 0; it < iters; ++it) {
    std::vector<double> g;
    const bool infeasible = inst.constraint && inst.constraint(c) > feas_tol;
    if (infeasible) {
      g = inst.constraint_grad(c);
    } else {
      const double val = inst.objective(c);
      if (val < best.value) {
        best.value = val;
        best.x = c;
      }
      g = inst.subgradient(c);
    }

    std::vector<double> pg(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) pg[i] += P[i][j] * g[j];
    double gpg = 0.0;
    for (std::size_t i = 0; i < d; ++i) gpg += g[i] * pg[i];
    if (!(gpg > 0.0) || !std::isfinite(gpg)) break;  // flat cut; nothing to shrink

    const double s = std::sqrt(gpg);
    for (std::size_t i = 0; i < d; ++i) c[i] -= pg[i] / ((dd + 1.0) * s);
    const double f1 = dd * dd / (dd * dd - 1.0);
    const double f2 = 2.0 / (dd + 1.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) P[i][j] = f1 * (P[i][j] - f2 * pg[i] * pg[j] / gpg);
  }
  return best;
}

}  // namespace filtfit::testing
