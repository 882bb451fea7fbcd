#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "freeform/error.hpp"

namespace freeform {

/// Composite Gauss-Legendre settings: `order` points per panel, 2^level panels.
/// `angular` is the number of trapezoid points in the angle of polar charts
/// (0 selects 2 * order * 2^level).
struct QuadratureSpec {
  int order = 8;
  int level = 3;
  int angular = 0;

  int panels() const { return 1 << level; }
  int angular_points() const { return angular > 0 ? angular : 2 * order * panels(); }

  void validate() const {
    if (order < 1 || order > 64) throw ConfigError("quadrature order must lie in [1, 64]");
    if (level < 0 || level > 12) throw ConfigError("quadrature level must lie in [0, 12]");
    if (angular < 0) throw ConfigError("angular point count must be nonnegative");
  }
};

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Legendre P_n(x) and its derivative.
inline std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace detail

/// Gauss-Legendre rule on [-1, 1] (Newton iteration on the Legendre recurrence).
inline Rule1D gauss_legendre(int order) {
  Rule1D rule;
  rule.nodes.assign(order, 0.0);
  rule.weights.assign(order, 0.0);
  if (order == 1) {
    rule.weights[0] = 2.0;
    return rule;
  }
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre(order, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = detail::legendre(order, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

/// Composite rule on [a, b] with equal panels.
inline Rule1D composite_rule(double a, double b, const QuadratureSpec& spec) {
  spec.validate();
  const Rule1D base = gauss_legendre(spec.order);
  const int panels = spec.panels();
  const double width = (b - a) / panels;
  Rule1D rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * spec.order);
  rule.weights.reserve(rule.nodes.capacity());
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (int i = 0; i < spec.order; ++i) {
      rule.nodes.push_back(lo + 0.5 * width * (base.nodes[i] + 1.0));
      rule.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return rule;
}

/// Pairwise (cascade) summation; the result depends only on the input order.
inline double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t mid = values.size() / 2;
  return pairwise_sum(values.first(mid)) + pairwise_sum(values.subspan(mid));
}

/// Surface area of the unit m-sphere in R^{m+1} (2 pi for m = 1, 4 pi for m = 2).
inline double sphere_area(int m) {
  // |S^m| = 2 pi^{(m+1)/2} / Gamma((m+1)/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
}

}  // namespace freeform
