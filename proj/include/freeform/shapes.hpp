#pragma once

// Generators of test hypersurfaces: caps, flat disks, perturbed free-boundary
// profiles and closed (perturbed) spheres.

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "freeform/chart_immersion.hpp"
#include "freeform/error.hpp"
#include "freeform/profile.hpp"
#include "freeform/profile_immersion.hpp"
#include "freeform/spaceform.hpp"

namespace freeform {

enum class Route { profile, chart };

inline Route route_from_string(const std::string& s) {
  if (s == "profile") return Route::profile;
  if (s == "chart") return Route::chart;
  throw ConfigError("unknown route '" + s + "' (expected profile or chart)");
}

/// Default rotation axis e_{n+1}.
inline Eigen::VectorXd default_axis(int n) { return Eigen::VectorXd::Unit(n + 1, n); }

namespace detail {

inline Eigen::VectorXd checked_axis(const Eigen::VectorXd& axis) {
  const double len = axis.norm();
  if (!(len > 0.0) || !std::isfinite(len)) throw DomainError("axis must be a nonzero vector");
  if (axis.size() < 3) throw DomainError("ambient dimension must be at least 3");
  return axis / len;
}

inline void require_chart_dimension(const Eigen::VectorXd& axis) {
  if (axis.size() != 3) throw UnsupportedError("full charts exist only for surfaces (n = 2)");
}

/// Chart map X(p) = (r(s)/s) (p1 e1 + p2 e2) + z(s) a, s = |p|, lifting a profile to the disk.
inline std::shared_ptr<const ChartMap> lift_profile(std::shared_ptr<const ProfileCurve> curve, const Eigen::VectorXd& a) {
  const Eigen::MatrixXd B = complement_basis(a);
  const Eigen::Vector3d e1 = B.col(0), e2 = B.col(1), av = a;
  return make_chart_map(3, [curve, e1, e2, av](auto p) {
    using T = std::remove_cvref_t<decltype(p[0])>;
    const T s = sqrt(p[0] * p[0] + p[1] * p[1]);
    const ProfilePoint q = curve->at(value_of(s));
    const T r = chain(s, q.r, q.dr, q.ddr);
    const T z = chain(s, q.z, q.dz, q.ddz);
    const T ratio = r / s;
    std::vector<T> X;
    for (int i = 0; i < 3; ++i) X.push_back(ratio * (p[0] * e1(i) + p[1] * e2(i)) + z * av(i));
    return X;
  });
}

}  // namespace detail

/// Model sphere of Euclidean radius rho centred at sqrt(rho^2 + R_model^2) a, restricted to the ball.
///
/// It meets the ball boundary orthogonally, and is umbilic in every space form
/// because model spheres are geodesic spheres (or horospheres / equidistants).
inline std::shared_ptr<const Immersion> make_cap(const SpaceForm& space, const Ball& ball, double rho,
                                                 const Eigen::VectorXd& axis, Route route = Route::profile) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("cap radius must be positive and finite");
  const Eigen::VectorXd a = detail::checked_axis(axis);
  const int n = static_cast<int>(a.size()) - 1;
  const double Rm = ball.model_radius();
  const double C = std::hypot(rho, Rm);
  if (route == Route::profile) {
    RadialSeries series;
    series.rho = rho;
    series.phi_max = std::acos(rho / C);
    auto curve = std::make_shared<PolarProfile>(C, series, false);
    return std::make_shared<ProfileImmersion>(n, space, ball, curve, a);
  }
  detail::require_chart_dimension(a);
  // Inverse stereographic parametrisation of the cap sphere from its far pole;
  // |p| = 1 lands on the contact circle.
  const double lambda = std::sqrt((C - rho) / (C + rho));
  const Eigen::MatrixXd B = detail::complement_basis(a);
  const Eigen::Vector3d e1 = B.col(0), e2 = B.col(1), av = a;
  auto map = make_chart_map(3, [=](auto p) {
    using T = std::remove_cvref_t<decltype(p[0])>;
    const T q1 = lambda * p[0], q2 = lambda * p[1];
    const T q2sum = q1 * q1 + q2 * q2;
    const T inv = 1.0 / (q2sum + 1.0);
    std::vector<T> X;
    for (int i = 0; i < 3; ++i)
      X.push_back(C * av(i) + rho * inv * (2.0 * q1 * e1(i) + 2.0 * q2 * e2(i) + (q2sum - 1.0) * av(i)));
    return X;
  });
  return std::make_shared<ChartImmersion>(space, ball, map, 0, a);
}

/// Totally geodesic disk through the ball centre with unit normal `normal`.
inline std::shared_ptr<const Immersion> make_flat_disk(const SpaceForm& space, const Ball& ball,
                                                       const Eigen::VectorXd& normal, Route route = Route::profile) {
  const Eigen::VectorXd a = detail::checked_axis(normal);
  const int n = static_cast<int>(a.size()) - 1;
  const double Rm = ball.model_radius();
  if (route == Route::profile)
    return std::make_shared<ProfileImmersion>(n, space, ball, std::make_shared<SegmentProfile>(Rm), a);
  detail::require_chart_dimension(a);
  const Eigen::MatrixXd B = detail::complement_basis(a);
  const Eigen::Vector3d e1 = B.col(0), e2 = B.col(1);
  auto map = make_chart_map(3, [=](auto p) {
    using T = std::remove_cvref_t<decltype(p[0])>;
    std::vector<T> X;
    for (int i = 0; i < 3; ++i) X.push_back(Rm * (p[0] * e1(i) + p[1] * e2(i)));
    return X;
  });
  // Orientation -a matches the limit of caps around a.
  const Eigen::Vector3d cross = e1.cross(e2);
  return std::make_shared<ChartImmersion>(space, ball, map, cross.dot(a) > 0.0 ? -1 : 1, a);
}

/// Maximal total perturbation amplitude epsilon * sum |c_j| accepted by make_profile_shape.
inline constexpr double kMaxPerturbation = 0.5;

/// Cap of model radius rho with R(phi) perturbed by epsilon sum_j c_j cos(j pi phi / phi_max).
///
/// Two extra modes b1 + b2 (phi/phi_max)^2 are solved for so that the contact
/// point stays on the ball boundary and the profile meets it orthogonally.
inline std::shared_ptr<const Immersion> make_profile_shape(const SpaceForm& space, const Ball& ball, double rho,
                                                           const std::vector<double>& coefficients, double epsilon,
                                                           const Eigen::VectorXd& axis, Route route = Route::profile) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("base cap radius must be positive and finite");
  double amplitude = 0.0;
  for (double c : coefficients) amplitude += std::abs(c);
  amplitude *= std::abs(epsilon);
  if (!(amplitude <= kMaxPerturbation)) throw DomainError("perturbation amplitude exceeds the configured bound");
  const Eigen::VectorXd a = detail::checked_axis(axis);
  const int n = static_cast<int>(a.size()) - 1;
  const double Rm = ball.model_radius();
  const double C = std::hypot(rho, Rm);

  RadialSeries series;
  series.rho = rho;
  series.phi_max = std::acos(rho / C);
  series.epsilon = epsilon;
  series.coefficients = coefficients;

  const auto residual = [&](const RadialSeries& s) {
    const ProfilePoint p = PolarProfile(C, s, false).at(1.0);
    return Eigen::Vector2d((p.r * p.r + p.z * p.z - Rm * Rm) / (Rm * Rm), (p.r * p.dz - p.z * p.dr) / (Rm * Rm));
  };
  Eigen::Vector2d F = residual(series);
  for (int it = 0; it < 60 && F.norm() > 1e-15; ++it) {
    Eigen::Matrix2d J;
    constexpr double step = 1e-7;
    for (int k = 0; k < 2; ++k) {
      RadialSeries up = series, dn = series;
      (k == 0 ? up.b1 : up.b2) += step;
      (k == 0 ? dn.b1 : dn.b2) -= step;
      J.col(k) = (residual(up) - residual(dn)) / (2.0 * step);
    }
    if (!(std::abs(J.determinant()) > 1e-14)) throw ConstraintError("contact constraint system is singular");
    const Eigen::Vector2d delta = J.partialPivLu().solve(-F);
    series.b1 += delta(0);
    series.b2 += delta(1);
    F = residual(series);
  }
  if (!(F.norm() <= 1e-13)) throw ConstraintError("contact constraints could not be enforced");

  auto curve = std::make_shared<PolarProfile>(C, series, false);
  // Embedded interior: off the axis and strictly inside the ball before the contact.
  for (int i = 1; i < 400; ++i) {
    const double t = i / 400.0;
    const ProfilePoint p = curve->at(t);
    if (!(p.r > 0.0)) throw DomainError("perturbed profile crosses the axis");
    if (!(std::hypot(p.r, p.z) < Rm)) throw DomainError("perturbed profile leaves the ball");
    if (!(std::hypot(p.dr, p.dz) > 0.0)) throw DegenerateError("perturbed profile is singular");
  }
  if (route == Route::profile) return std::make_shared<ProfileImmersion>(n, space, ball, curve, a);
  detail::require_chart_dimension(a);
  return std::make_shared<ChartImmersion>(space, ball, detail::lift_profile(curve, a), 0, a);
}

/// Closed hypersurface R(phi) = r0 (1 + epsilon sum_j c_j cos(j phi)) around the model origin,
/// r0 the model radius of the geodesic sphere of radius `radius`.
inline std::shared_ptr<const Immersion> make_closed_sphere(const SpaceForm& space, double radius, int n,
                                                           const std::vector<double>& coefficients = {},
                                                           double epsilon = 0.0,
                                                           std::optional<Eigen::VectorXd> axis = std::nullopt) {
  if (n < 2) throw DomainError("hypersurface dimension must be at least 2");
  const Eigen::VectorXd a = detail::checked_axis(axis.value_or(default_axis(n)));
  if (a.size() != n + 1) throw DomainError("axis must have n+1 components");
  double amplitude = 0.0;
  for (double c : coefficients) amplitude += std::abs(c);
  if (!(amplitude * std::abs(epsilon) <= kMaxPerturbation))
    throw DomainError("perturbation amplitude exceeds the configured bound");
  RadialSeries series;
  series.rho = radius_to_model(space, radius);
  series.phi_max = std::numbers::pi;
  series.epsilon = epsilon;
  series.coefficients = coefficients;
  auto curve = std::make_shared<PolarProfile>(0.0, series, true);
  for (int i = 0; i <= 400; ++i) {
    const ProfilePoint p = curve->at(i / 400.0);
    space.require_admissible(Eigen::Vector2d(p.r, p.z));
  }
  return std::make_shared<ProfileImmersion>(n, space, std::nullopt, curve, a);
}

/// Local chart of the ball boundary sphere around the model point `direction * R_model`,
/// oriented by the outward normal. Used to examine the boundary sphere itself.
inline std::shared_ptr<const Immersion> make_boundary_patch(const Ball& ball, const Eigen::VectorXd& direction) {
  const Eigen::VectorXd d = detail::checked_axis(direction);
  detail::require_chart_dimension(d);
  const double Rm = ball.model_radius();
  const Eigen::MatrixXd B = detail::complement_basis(d);
  const Eigen::Vector3d e1 = B.col(0), e2 = B.col(1), dv = d;
  const double orient = e1.cross(e2).dot(dv) > 0.0 ? 1.0 : -1.0;
  auto map = make_chart_map(3, [=](auto p) {
    using T = std::remove_cvref_t<decltype(p[0])>;
    const T q1 = 0.25 * p[0], q2 = 0.25 * p[1];
    const T q2sum = q1 * q1 + q2 * q2;
    const T inv = 1.0 / (1.0 + q2sum);
    std::vector<T> X;
    for (int i = 0; i < 3; ++i)
      X.push_back(Rm * inv * (2.0 * q1 * e1(i) + 2.0 * q2 * e2(i) + (1.0 - q2sum) * dv(i)));
    return X;
  });
  return std::make_shared<ChartImmersion>(ball.space(), std::nullopt, map, orient > 0.0 ? 1 : -1);
}

/// Serializable description of a generated shape.
struct ShapeSpec {
  std::string kind = "cap";  // cap | disk | profile | closed
  int K = 0;
  double R = 1.0;            // ball radius, or the sphere radius for closed shapes
  int n = 2;
  double rho = 1.0;          // model radius of the (base) cap
  Eigen::VectorXd axis;      // empty selects e_{n+1}
  double epsilon = 0.0;
  std::vector<double> coefficients;
  Route route = Route::profile;
};

inline std::shared_ptr<const Immersion> build_shape(const ShapeSpec& spec) {
  const SpaceForm space(spec.K);
  const Eigen::VectorXd axis = spec.axis.size() == 0 ? default_axis(spec.n) : spec.axis;
  if (axis.size() != spec.n + 1) throw DomainError("axis must have n+1 components");
  if (spec.kind == "closed") return make_closed_sphere(space, spec.R, spec.n, spec.coefficients, spec.epsilon, axis);
  const Ball ball(space, spec.R);
  if (spec.kind == "cap") return make_cap(space, ball, spec.rho, axis, spec.route);
  if (spec.kind == "disk") return make_flat_disk(space, ball, axis, spec.route);
  if (spec.kind == "profile")
    return make_profile_shape(space, ball, spec.rho, spec.coefficients, spec.epsilon, axis, spec.route);
  throw ConfigError("unknown shape kind '" + spec.kind + "'");
}

}  // namespace freeform
