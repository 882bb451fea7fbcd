#pragma once

// Integral functionals and the inequality checks built on them.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "freeform/diagnostics.hpp"
#include "freeform/immersion.hpp"
#include "freeform/shapes.hpp"
#include "freeform/symalg.hpp"

namespace freeform {

struct Tolerances {
  double rel = 1e-8;
  double abs = 1e-12;
  double gate = 1e-10;      // slack for Ricci / convexity / sub-static gates
  double position = 1e-10;  // free-boundary position residual (relative to max(1, R_model))
  double angle = 1e-8;      // free-boundary angle residual

  void validate() const {
    if (!(rel > 0.0 && abs > 0.0 && gate > 0.0 && position > 0.0 && angle > 0.0))
      throw ConfigError("tolerances must be positive");
  }
};

enum class Status { pass, fail, inapplicable };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    default:
      return "inapplicable";
  }
}

struct Hypotheses {
  double ricci_min = std::numeric_limits<double>::quiet_NaN();
  double convexity_min = std::numeric_limits<double>::quiet_NaN();
  double free_boundary_pos = 0.0;
  double free_boundary_angle = 0.0;
  bool half_ball = true;
  double substatic_min = std::numeric_limits<double>::quiet_NaN();
  bool satisfied = true;
  std::vector<std::string> violations;

  void violate(const std::string& what) {
    satisfied = false;
    violations.push_back(what);
  }
};

struct InequalityCheck {
  std::string name;
  int n = 0, K = 0, k = 0;
  double lhs = 0.0, rhs = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  Hypotheses hypotheses;
  bool equality_expected = false;
  Status status = Status::pass;
  std::map<std::string, double> details;

  /// Applies pass <=> lhs <= rhs (1 + rel) + abs and hypotheses hold.
  /// The ratio is left undefined when rhs is at the roundoff floor abs.
  void finalize(const Tolerances& tol) {
    ratio = rhs > tol.abs ? lhs / rhs : std::numeric_limits<double>::quiet_NaN();
    if (!hypotheses.satisfied) {
      status = Status::inapplicable;
    } else {
      status = lhs <= rhs * (1.0 + tol.rel) + tol.abs ? Status::pass : Status::fail;
    }
  }
};

namespace detail {

inline std::vector<double> node_weights(const std::vector<PointFrame>& nodes, const std::optional<Potential>& weight) {
  std::vector<double> w(nodes.size(), 1.0);
  if (!weight) return w;
  for (std::size_t i = 0; i < nodes.size(); ++i) w[i] = potential_value(*weight, nodes[i].position);
  return w;
}

inline double weighted_sum(const std::vector<PointFrame>& nodes, const std::vector<double>& w,
                           const std::function<double(const PointFrame&)>& g) {
  std::vector<double> terms(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = w[i] * g(nodes[i]) * nodes[i].weight;
  return pairwise_sum(terms);
}

/// |T°_k|^2 in the orthonormal frame.
inline double traceless_newton_norm2(const PointFrame& f, int k) {
  const Eigen::VectorXd H = mean_curvatures(f.kappa);
  const Eigen::MatrixXd T = newton_tensors_orthonormal(f.shape, H)[static_cast<std::size_t>(k)];
  return traceless_part(T, H(k), k).squaredNorm();
}

inline void require_order(int n, int k) {
  if (k < 1 || k > n - 1) throw DomainError("order k must lie in [1, n-1]");
}

/// Flat-coordinate derivative of V_a along the space-form normal.
inline double potential_normal_derivative(const Potential& V, const PointFrame& f) {
  return V.flat_gradient(f.position).dot(f.normal);
}

}  // namespace detail

/// Integral of w H_k over the integral of w, w = 1 or V_a.
inline double average_hk(const Immersion& immersion, int k, const std::optional<Potential>& weight = std::nullopt,
                         const QuadratureSpec& spec = {}) {
  if (k < 0 || k > immersion.dim()) throw DomainError("order k must lie in [0, n]");
  const std::vector<PointFrame> nodes = immersion.nodes(spec);
  const std::vector<double> w = detail::node_weights(nodes, weight);
  for (double v : w)
    if (!(v > 0.0)) throw DomainError("weight must be positive on the hypersurface");
  const double num = detail::weighted_sum(nodes, w, [k](const PointFrame& f) { return mean_curvatures(f.kappa)(k); });
  const double den = detail::weighted_sum(nodes, w, [](const PointFrame&) { return 1.0; });
  return num / den;
}

/// Gate values shared by the checks: Ricci and convexity minima, contact residuals,
/// and for a weight the half-ball flag and the smallest sub-static eigenvalue.
inline Hypotheses evaluate_hypotheses(const Immersion& immersion, const std::vector<PointFrame>& nodes,
                                      const std::optional<Potential>& weight, const QuadratureSpec& spec,
                                      const Tolerances& tol) {
  Hypotheses h;
  h.ricci_min = ricci_min(nodes, immersion.space().K());
  h.convexity_min = convexity_min(nodes);
  if (immersion.has_boundary()) {
    const FreeBoundaryResidual fb = free_boundary_residual(immersion, spec);
    h.free_boundary_pos = fb.position;
    h.free_boundary_angle = fb.angle;
    if (fb.position > tol.position * std::max(1.0, immersion.ball()->model_radius()))
      h.violate("free boundary position");
    if (fb.angle > tol.angle) h.violate("free boundary angle");
  }
  if (weight) {
    double smin = std::numeric_limits<double>::infinity();
    for (const PointFrame& f : nodes) {
      const double V = potential_value(*weight, f.position);
      if (!(V > 0.0)) h.half_ball = false;
      const double Vn = detail::potential_normal_derivative(*weight, f);
      smin = std::min(smin, symmetric_eigenvalues(substatic_tensor_orthonormal(f.shape, V, Vn)).minCoeff());
    }
    if (immersion.has_boundary())
      for (const BoundaryFrame& b : immersion.boundary_nodes(spec))
        if (!(potential_value(*weight, b.position) > 0.0)) h.half_ball = false;
    h.substatic_min = smin;
  }
  return h;
}

/// Both sides of the (weighted) main inequality
///   int w (H_k - avg)^2 <= n(n-1)/(n-k)^2 int w |T°_k|^2.
///
/// Unweighted checks gate on nonnegative Ricci curvature, weighted ones on the
/// half-ball condition and a nonnegative sub-static tensor.
inline InequalityCheck check_main_inequality(const Immersion& immersion, int k,
                                             const std::optional<Potential>& weight = std::nullopt,
                                             const QuadratureSpec& spec = {}, const Tolerances& tol = {}) {
  const int n = immersion.dim();
  detail::require_order(n, k);
  const std::vector<PointFrame> nodes = immersion.nodes(spec);
  InequalityCheck c;
  c.name = weight ? "thm4" : (immersion.closed() ? "kwong" : "thm1");
  c.n = n;
  c.K = immersion.space().K();
  c.k = k;
  c.hypotheses = evaluate_hypotheses(immersion, nodes, weight, spec, tol);
  if (weight) {
    if (!c.hypotheses.half_ball) c.hypotheses.violate("half ball");
    if (!(c.hypotheses.substatic_min >= -tol.gate)) c.hypotheses.violate("sub-static");
  } else if (!(c.hypotheses.ricci_min >= -tol.gate)) {
    c.hypotheses.violate("nonnegative Ricci");
  }

  const std::vector<double> w = detail::node_weights(nodes, weight);
  const double mass = detail::weighted_sum(nodes, w, [](const PointFrame&) { return 1.0; });
  const double mean =
      detail::weighted_sum(nodes, w, [k](const PointFrame& f) { return mean_curvatures(f.kappa)(k); }) / mass;
  c.lhs = detail::weighted_sum(nodes, w, [k, mean](const PointFrame& f) {
    const double d = mean_curvatures(f.kappa)(k) - mean;
    return d * d;
  });
  const double tnorm = detail::weighted_sum(nodes, w, [k](const PointFrame& f) { return detail::traceless_newton_norm2(f, k); });
  c.rhs = (double(n) * (n - 1) / double((n - k) * (n - k))) * tnorm;

  const double nu = non_umbilicity(nodes);
  c.equality_expected = nu <= 1e-8;
  double area = 0.0, kmax = 0.0;
  for (const PointFrame& f : nodes) {
    area += f.weight;
    kmax = std::max(kmax, f.kappa.cwiseAbs().maxCoeff());
  }
  const double curvature_scale = kmax + std::pow(area, -1.0 / n);
  const double normalisation = std::abs(mass) * std::pow(curvature_scale, 2 * k);
  c.details["mean"] = mean;
  c.details["weight_mass"] = mass;
  c.details["traceless_norm"] = tnorm;
  c.details["non_umbilicity"] = nu;
  c.details["lhs_normalized"] = c.lhs / normalisation;
  c.details["rhs_normalized"] = c.rhs / normalisation;
  c.finalize(tol);
  return c;
}

/// The main unweighted inequality for convex free-boundary hypersurfaces of a Euclidean ball,
/// gated on convexity instead of the Ricci bound.
inline InequalityCheck check_convex_corollary(const Immersion& immersion, int k, const QuadratureSpec& spec = {},
                                              const Tolerances& tol = {}) {
  if (immersion.space().K() != 0) throw DomainError("convex corollary is stated in a Euclidean ball");
  if (!immersion.has_boundary()) throw DomainError("convex corollary needs a free-boundary hypersurface");
  InequalityCheck c = check_main_inequality(immersion, k, std::nullopt, spec, tol);
  c.name = "cor-convex";
  c.hypotheses.satisfied = true;
  c.hypotheses.violations.clear();
  const FreeBoundaryResidual fb{c.hypotheses.free_boundary_pos, c.hypotheses.free_boundary_angle};
  if (fb.position > tol.position * std::max(1.0, immersion.ball()->model_radius()))
    c.hypotheses.violate("free boundary position");
  if (fb.angle > tol.angle) c.hypotheses.violate("free boundary angle");
  if (!(c.hypotheses.convexity_min >= -tol.gate)) c.hypotheses.violate("convexity");
  c.finalize(tol);
  return c;
}

/// Closed-surface inequality in flat space, in either of its two equivalent forms:
///   1:  int (H - avg H)^2        <= n/(n-1) int |h°|^2
///   2:  int |h - (avg H / n) g|^2 <= n/(n-1) int |h°|^2
/// with the identity  lhs_2 = int |h°|^2 + lhs_1 / n  recorded in the details.
inline InequalityCheck check_perez(const Immersion& immersion, int formulation, const QuadratureSpec& spec = {},
                                   const Tolerances& tol = {}) {
  if (!immersion.closed()) throw DomainError("closed-surface inequality needs a hypersurface without boundary");
  if (immersion.space().K() != 0) throw DomainError("closed-surface inequality is stated in flat space");
  if (formulation != 1 && formulation != 2) throw DomainError("formulation must be 1 or 2");
  const int n = immersion.dim();
  const std::vector<PointFrame> nodes = immersion.nodes(spec);
  const double area = integrate(nodes, [](const PointFrame&) { return 1.0; });
  const double mean = integrate(nodes, [](const PointFrame& f) { return f.kappa.sum(); }) / area;
  const double lhs1 = integrate(nodes, [mean](const PointFrame& f) { return std::pow(f.kappa.sum() - mean, 2); });
  const double hnorm = integrate(nodes, [n](const PointFrame& f) {
    return (f.kappa.array() - f.kappa.sum() / n).square().sum();
  });
  const double lhs2 = integrate(nodes, [mean, n](const PointFrame& f) {
    return (f.kappa.array() - mean / n).square().sum();
  });
  const double scale = integrate(nodes, [](const PointFrame& f) { return f.kappa.squaredNorm(); });
  InequalityCheck c;
  c.name = formulation == 1 ? "perez1" : "perez2";
  c.n = n;
  c.K = 0;
  c.k = 1;
  c.hypotheses = evaluate_hypotheses(immersion, nodes, std::nullopt, spec, tol);
  if (!(c.hypotheses.ricci_min >= -tol.gate)) c.hypotheses.violate("nonnegative Ricci");
  c.lhs = formulation == 1 ? lhs1 : lhs2;
  c.rhs = (double(n) / (n - 1)) * hnorm;
  c.equality_expected = non_umbilicity(nodes) <= 1e-8;
  const double identity = hnorm + lhs1 / n;
  c.details["lhs1"] = lhs1;
  c.details["lhs2"] = lhs2;
  c.details["traceless_norm"] = hnorm;
  c.details["identity_residual"] = std::abs(lhs2 - identity) / std::max(scale, 1e-300);
  c.details["area"] = area;
  c.finalize(tol);
  return c;
}

/// Quermassintegrals of a convex free-boundary hypersurface in the unit Euclidean ball.
struct Quermass {
  int n = 0;
  std::vector<double> W;            // W_0 .. W_min(n+1, 3); entries beyond are unsupported
  double area = 0.0;                // |Sigma|
  double boundary_length = 0.0;     // |boundary of Sigma|
  double support_integral = 0.0;    // integral of <x, nu>
  double lid = 0.0;                 // area of the spherical lid
  std::vector<double> integral_H;   // integral of H_j, j = 0..n

  double at(int k) const {
    if (k < 0 || k > n + 1) throw DomainError("quermassintegral index must lie in [0, n+1]");
    if (k >= static_cast<int>(W.size()))
      throw UnsupportedError("quermassintegral needs boundary quermassintegrals beyond the first");
    return W[static_cast<std::size_t>(k)];
  }
};

inline double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

inline Quermass quermassintegrals(const Immersion& immersion, const QuadratureSpec& spec = {},
                                  const Tolerances& tol = {}) {
  if (immersion.space().K() != 0) throw DomainError("quermassintegrals are defined in the Euclidean ball");
  if (!immersion.has_boundary() || std::abs(immersion.ball()->model_radius() - 1.0) > 1e-12)
    throw DomainError("quermassintegrals need a free-boundary hypersurface in the unit ball");
  if (!immersion.rotational()) throw UnsupportedError("quermassintegrals need a rotationally symmetric hypersurface");
  const int n = immersion.dim();
  const std::vector<PointFrame> nodes = immersion.nodes(spec);
  if (convexity_min(nodes) < -tol.gate) throw DomainError("quermassintegrals need a convex hypersurface");
  const std::vector<BoundaryFrame> boundary = immersion.boundary_nodes(spec);
  const Eigen::VectorXd a = immersion.axis();

  Quermass q;
  q.n = n;
  q.area = integrate(nodes, [](const PointFrame&) { return 1.0; });
  q.boundary_length = boundary_integrate(boundary, [](const BoundaryFrame&) { return 1.0; });
  q.support_integral = integrate(nodes, [](const PointFrame& f) { return f.position.dot(f.normal); });
  for (int j = 0; j <= n; ++j)
    q.integral_H.push_back(integrate(nodes, [j](const PointFrame& f) { return mean_curvatures(f.kappa)(j); }));

  // The enclosed region lies on the side of Sigma opposite to nu; near the axis
  // that picks the polar cap of the sphere around +a or -a.
  const double height = std::clamp(boundary.front().position.dot(a), -1.0, 1.0);
  const bool around_plus = nodes.front().normal.dot(a) < 0.0;
  const double beta = around_plus ? std::acos(height) : std::numbers::pi - std::acos(height);
  if (beta > 0.0) {
    const Rule1D rule = composite_rule(0.0, beta, QuadratureSpec{16, 2, 0});
    std::vector<double> terms;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) terms.push_back(rule.weights[i] * std::pow(std::sin(rule.nodes[i]), n - 1));
    q.lid = sphere_area(n - 1) * pairwise_sum(terms);
  }

  const double inv = 1.0 / (n + 1);
  q.W.push_back(inv * (q.support_integral + q.lid));
  q.W.push_back(inv * q.area);
  // W_k = 1/(n+1) int H_{k-1} / C(n, k-1) + (k-1)/((n+1)(n-k+2)) W^S_{k-2}, with
  // W^S_0 the lid area and W^S_1 = |boundary| / n.
  const double boundary_terms[2] = {q.lid, q.boundary_length / n};
  for (int k = 2; k <= std::min(n + 1, 3); ++k)
    q.W.push_back(inv * q.integral_H[static_cast<std::size_t>(k - 1)] / binomial(n, k - 1) +
                  (k - 1.0) / ((n + 1.0) * (n - k + 2.0)) * boundary_terms[k - 2]);
  return q;
}

/// Range of cap radii over which the cap functions are evaluated and inverted.
inline constexpr double kCapRadiusMin = 1e-3;
inline constexpr double kCapRadiusMax = 1e3;

/// f_k(r): the k-th quermassintegral of the cap of radius r in the unit ball of R^{n+1}.
inline double cap_function(int k, double r, int n, const QuadratureSpec& spec = {}) {
  const SpaceForm flat(0);
  const Ball unit(flat, 1.0);
  return quermassintegrals(*make_cap(flat, unit, r, default_axis(n)), spec).at(k);
}

/// Inverse of the strictly increasing f_k by bisection to 1e-10 in r.
inline double cap_function_inverse(int k, double value, int n, const QuadratureSpec& spec = {}) {
  double lo = kCapRadiusMin, hi = kCapRadiusMax;
  const double flo = cap_function(k, lo, n, spec), fhi = cap_function(k, hi, n, spec);
  if (!(flo < fhi)) throw RangeError("cap function is not increasing on the scanned range");
  if (!(value >= flo && value <= fhi)) throw RangeError("value lies outside the attained range of the cap function");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (cap_function(k, mid, n, spec) < value)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Low-dimensional corollaries for convex free-boundary hypersurfaces in the unit ball.
///   (i)  n = 2:  2 pi <= (1/4) (int H)^2 / |Sigma| + |boundary|
///   (ii) n = 3:  f_3(f_1^{-1}(|Sigma| / 4)) <= (1/12) ((1/3) (int H)^2 / |Sigma| + |boundary|)
/// The check stores the bound as lhs and the geometric quantity as rhs.
inline InequalityCheck check_corollary_low_dim(const Immersion& immersion, int which, const QuadratureSpec& spec = {},
                                               const Tolerances& tol = {}) {
  if (which != 1 && which != 2) throw DomainError("corollary case must be (i) or (ii)");
  const int n = immersion.dim();
  if (n != which + 1) throw DomainError(which == 1 ? "case (i) needs n = 2" : "case (ii) needs n = 3");
  if (immersion.space().K() != 0 || !immersion.has_boundary() ||
      std::abs(immersion.ball()->model_radius() - 1.0) > 1e-12)
    throw DomainError("corollary needs a free-boundary hypersurface in the unit Euclidean ball");
  const std::vector<PointFrame> nodes = immersion.nodes(spec);
  InequalityCheck c;
  c.name = which == 1 ? "cor-lowdim-i" : "cor-lowdim-ii";
  c.n = n;
  c.K = 0;
  c.k = 1;
  c.hypotheses = evaluate_hypotheses(immersion, nodes, std::nullopt, spec, tol);
  if (!(c.hypotheses.convexity_min >= -tol.gate)) c.hypotheses.violate("convexity");

  const double area = integrate(nodes, [](const PointFrame&) { return 1.0; });
  const double total_H = integrate(nodes, [](const PointFrame& f) { return f.kappa.sum(); });
  const double total_H2 = integrate(nodes, [](const PointFrame& f) { return mean_curvatures(f.kappa)(2); });
  const double length = boundary_integrate(immersion, spec, [](const BoundaryFrame&) { return 1.0; });
  const double estimate = (n - 1.0) / (2.0 * n) * total_H * total_H / area;
  c.details["area"] = area;
  c.details["boundary_length"] = length;
  c.details["total_mean_curvature"] = total_H;
  c.details["total_H2"] = total_H2;
  c.details["key_estimate_slack"] = estimate - total_H2;
  if (which == 1) {
    c.lhs = 2.0 * std::numbers::pi;
    c.rhs = 0.25 * total_H * total_H / area + length;
  } else {
    c.rhs = (total_H * total_H / (3.0 * area) + length) / 12.0;
    if (c.hypotheses.satisfied) {
      const double r = cap_function_inverse(1, area / 4.0, 3, spec);
      c.details["cap_radius"] = r;
      c.lhs = cap_function(3, r, 3, spec);
    } else {
      c.lhs = std::numeric_limits<double>::quiet_NaN();
    }
  }
  c.equality_expected = non_umbilicity(nodes) <= 1e-8;
  c.finalize(tol);
  return c;
}

/// Weak-form residual of div T_m = 0 (and of the traceless identity).
inline DivergenceResidual divergence_free_check(const Immersion& immersion, int m, const QuadratureSpec& spec = {}) {
  return immersion.weak_divergence(m, spec);
}

}  // namespace freeform
