#include <gtest/gtest.h>

#include <numbers>

#include "freeform/freeform.hpp"

using namespace freeform;

namespace {

constexpr double pi = std::numbers::pi;

double area(const Immersion& s, const QuadratureSpec& q = {}) {
  return integrate(s, q, [](const PointFrame&) { return 1.0; });
}

double boundary_length(const Immersion& s, const QuadratureSpec& q = {}) {
  return boundary_integrate(s, q, [](const BoundaryFrame&) { return 1.0; });
}

double kappa_spread(const Immersion& s) {
  double lo = 1e300, hi = -1e300;
  for (const PointFrame& f : s.nodes({})) {
    lo = std::min(lo, f.kappa.minCoeff());
    hi = std::max(hi, f.kappa.maxCoeff());
  }
  return hi - lo;
}

Eigen::VectorXd e(int n) { return default_axis(n); }

/// Area of a geodesic disk of radius R in the surface of curvature K.
double geodesic_disk_area(int K, double R) {
  if (K < 0) return 2.0 * pi * (std::cosh(R) - 1.0);
  if (K > 0) return 2.0 * pi * (1.0 - std::cos(R));
  return pi * R * R;
}

}  // namespace

TEST(Cap, EuclideanAreaBoundaryAndCurvature) {
  const SpaceForm flat(0);
  const Ball ball(flat, 1.0);
  for (Route route : {Route::profile, Route::chart})
    for (double rho : {0.3, 1.0, 4.0}) {
      const auto cap = make_cap(flat, ball, rho, e(2), route);
      const double C = std::hypot(rho, 1.0);
      EXPECT_NEAR(area(*cap), 2.0 * pi * rho * rho * (1.0 - rho / C), 1e-11) << rho;
      EXPECT_NEAR(boundary_length(*cap), 2.0 * pi * rho / C, 1e-11) << rho;
      for (const PointFrame& f : cap->nodes({})) {
        EXPECT_NEAR(f.kappa(0), 1.0 / rho, 1e-9);
        EXPECT_NEAR(f.kappa(1), 1.0 / rho, 1e-9);
      }
    }
}

TEST(Cap, UmbilicInEverySpaceForm) {
  for (int K : {-1, 0, 1})
    for (int n : {2, 3, 4}) {
      const SpaceForm space(K);
      const Ball ball(space, 1.0);
      const auto cap = make_cap(space, ball, 0.8 * ball.model_radius(), e(n));
      EXPECT_LT(kappa_spread(*cap), 1e-10) << "K=" << K << " n=" << n;
    }
}

TEST(Cap, CurvatureMatchesConformalChange) {
  // kappa = e^{-u} (kappa_flat + d_N u) with kappa_flat = <N, x - c> / rho^2 for a model sphere.
  for (int K : {-1, 1}) {
    const SpaceForm space(K);
    const Ball ball(space, 0.9);
    const double rho = 0.5 * ball.model_radius();
    const double C = std::hypot(rho, ball.model_radius());
    const auto cap = make_cap(space, ball, rho, e(2));
    for (const PointFrame& f : cap->nodes({})) {
      const Eigen::VectorXd c = C * e(2);
      const double kf = f.flat_normal.dot(f.position - c) / (rho * rho);
      const double expected = (kf + space.log_factor_gradient(f.position).dot(f.flat_normal)) / f.conformal;
      EXPECT_NEAR(f.kappa(0), expected, 1e-10);
    }
  }
}

TEST(Cap, RoutesAgree) {
  for (int K : {-1, 0, 1}) {
    const SpaceForm space(K);
    const Ball ball(space, 1.2);
    const double rho = 1.3 * ball.model_radius();
    const auto a = make_cap(space, ball, rho, e(2), Route::profile);
    const auto b = make_cap(space, ball, rho, e(2), Route::chart);
    EXPECT_NEAR(area(*a), area(*b), 1e-10);
    EXPECT_NEAR(boundary_length(*a), boundary_length(*b), 1e-10);
    const auto H = [](const PointFrame& f) { return f.mean_curvature(); };
    EXPECT_NEAR(integrate(*a, {}, H), integrate(*b, {}, H), 1e-9);
  }
}

TEST(Cap, OrientationGivesNonnegativeMeanCurvature) {
  for (int K : {-1, 0, 1})
    for (Route route : {Route::profile, Route::chart}) {
      const SpaceForm space(K);
      const Ball ball(space, 1.0);
      const auto cap = make_cap(space, ball, 2.0 * ball.model_radius(), e(2), route);
      EXPECT_GE(integrate(*cap, {}, [](const PointFrame& f) { return f.mean_curvature(); }), 0.0);
    }
}

TEST(Cap, Errors) {
  const SpaceForm flat(0);
  const Ball ball(flat, 1.0);
  EXPECT_THROW(make_cap(flat, ball, 0.0, e(2)), DomainError);
  EXPECT_THROW(make_cap(flat, ball, 1.0, Eigen::Vector3d::Zero()), DomainError);
  EXPECT_THROW(make_cap(flat, ball, 1.0, e(3), Route::chart), UnsupportedError);
}

TEST(FlatDisk, TotallyGeodesicWithKnownArea) {
  for (int K : {-1, 0, 1})
    for (Route route : {Route::profile, Route::chart}) {
      const SpaceForm space(K);
      const Ball ball(space, 0.8);
      const auto disk = make_flat_disk(space, ball, e(2), route);
      EXPECT_NEAR(area(*disk), geodesic_disk_area(K, 0.8), 1e-11);
      for (const PointFrame& f : disk->nodes({})) EXPECT_LT(f.shape.cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_NEAR(ricci_min(disk->nodes({}), K), K, 1e-12);
    }
}

TEST(ClosedSphere, GeodesicSphereCurvatureAndArea) {
  for (int K : {-1, 0, 1}) {
    const SpaceForm space(K);
    const double r = 0.9;
    const auto sphere = make_closed_sphere(space, r, 2);
    const double expected = K < 0 ? 1.0 / std::tanh(r) : (K > 0 ? std::cos(r) / std::sin(r) : 1.0 / r);
    const double sn = K < 0 ? std::sinh(r) : (K > 0 ? std::sin(r) : r);
    EXPECT_NEAR(area(*sphere), 4.0 * pi * sn * sn, 1e-10);
    for (const PointFrame& f : sphere->nodes({})) EXPECT_NEAR(f.kappa.maxCoeff(), expected, 1e-10);
    EXPECT_TRUE(sphere->closed());
    EXPECT_EQ(boundary_length(*sphere), 0.0);
  }
}

TEST(Quadrature, ObservedOrderAtLeastFour) {
  const SpaceForm flat(0);
  const Ball ball(flat, 1.0);
  const double rho = 0.7;
  const auto cap = make_cap(flat, ball, rho, e(2));
  const double exact = 2.0 * pi * rho * rho * (1.0 - rho / std::hypot(rho, 1.0));
  const double e1 = std::abs(area(*cap, QuadratureSpec{2, 1, 0}) - exact);
  const double e2 = std::abs(area(*cap, QuadratureSpec{2, 2, 0}) - exact);
  EXPECT_GE(std::log2(e1 / e2), 3.8);
}

TEST(Quadrature, ChartRouteConverges) {
  const SpaceForm space(1);
  const Ball ball(space, 1.0);
  const auto disk = make_flat_disk(space, ball, e(2), Route::chart);
  const double exact = geodesic_disk_area(1, 1.0);
  const double coarse = std::abs(area(*disk, QuadratureSpec{4, 1, 0}) - exact);
  const double fine = std::abs(area(*disk, QuadratureSpec{4, 2, 0}) - exact);
  EXPECT_LT(fine, coarse);
  EXPECT_LT(std::abs(area(*disk) - exact), 1e-12);
}

TEST(FreeBoundary, CapsAndPerturbedShapesMeetOrthogonally) {
  for (int K : {-1, 0, 1}) {
    const SpaceForm space(K);
    const Ball ball(space, 1.0);
    const double Rm = ball.model_radius();
    std::vector<std::shared_ptr<const Immersion>> shapes = {
        make_cap(space, ball, 0.5 * Rm, e(2), Route::chart), make_cap(space, ball, 2.0 * Rm, e(3)),
        make_profile_shape(space, ball, Rm, {0.4, -0.2, 0.3}, 0.02, e(2)),
        make_profile_shape(space, ball, Rm, {0.4, -0.2, 0.3}, 0.02, e(2), Route::chart)};
    for (const auto& s : shapes) {
      const FreeBoundaryResidual r = free_boundary_residual(*s);
      EXPECT_LT(r.position, 1e-12);
      EXPECT_LT(r.angle, 1e-10);
      EXPECT_LT(principal_conormal_check(*s), 1e-8);
      const BoundaryFrame b = boundary_frame_at(*s, 0.3);
      EXPECT_LT(std::abs(conormal_alignment(b)), 1e-10);
      EXPECT_LT(std::abs(normal_alignment(b)), 1e-10);
    }
  }
}

TEST(FreeBoundary, ShiftedCapIsDetected) {
  const SpaceForm flat(0);
  const Ball ball(flat, 1.0);
  const double rho = 0.8, C = std::hypot(rho, 1.0) + 0.1;
  RadialSeries series;
  series.rho = rho;
  series.phi_max = std::acos((C * C + rho * rho - 1.0) / (2.0 * C * rho));
  const auto shape =
      std::make_shared<ProfileImmersion>(2, flat, ball, std::make_shared<PolarProfile>(C, series, false), e(2));
  const FreeBoundaryResidual r = free_boundary_residual(*shape);
  EXPECT_LT(r.position, 1e-12);
  EXPECT_GT(r.angle, 0.01);
  EXPECT_THROW(boundary_frame_at(*shape, 0.0), FreeBoundaryError);
}

TEST(FreeBoundary, ClosedShapesHaveNoBoundary) {
  const auto sphere = make_closed_sphere(SpaceForm(0), 1.0, 3);
  EXPECT_EQ(free_boundary_residual(*sphere).angle, 0.0);
  EXPECT_THROW(boundary_frame_at(*sphere, 0.0), DomainError);
}

TEST(ProfileShape, ZeroAmplitudeReproducesCap) {
  const SpaceForm space(-1);
  const Ball ball(space, 1.0);
  const double rho = 0.6;
  const auto cap = make_cap(space, ball, rho, e(3));
  const auto shape = make_profile_shape(space, ball, rho, {0.3, 0.1}, 0.0, e(3));
  const auto a = cap->nodes({}), b = shape->nodes({});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_LT((a[i].position - b[i].position).norm(), 1e-13);
    EXPECT_LT((a[i].kappa - b[i].kappa).norm(), 1e-10);
  }
}

TEST(ProfileShape, PerturbationBreaksUmbilicity) {
  const SpaceForm flat(0);
  const Ball ball(flat, 1.0);
  const auto shape = make_profile_shape(flat, ball, 1.0, {0.5, -0.3}, 0.05, e(2));
  EXPECT_GT(non_umbilicity(shape->nodes({})), 0.05);
}

TEST(ProfileShape, AmplitudeBound) {
  const SpaceForm flat(0);
  const Ball ball(flat, 1.0);
  EXPECT_THROW(make_profile_shape(flat, ball, 1.0, {1.0, 1.0}, 0.3, e(2)), DomainError);
  EXPECT_THROW(make_closed_sphere(flat, 1.0, 2, {1.0}, 0.6), DomainError);
}

TEST(ProfileShape, RoutesAgree) {
  const SpaceForm space(1);
  const Ball ball(space, 1.0);
  const std::vector<double> c = {0.2, 0.5, -0.4};
  const auto a = make_profile_shape(space, ball, 0.9, c, 0.03, e(2), Route::profile);
  const auto b = make_profile_shape(space, ball, 0.9, c, 0.03, e(2), Route::chart);
  EXPECT_NEAR(area(*a), area(*b), 1e-9);
  const auto H2 = [](const PointFrame& f) { return mean_curvatures(f.kappa)(2); };
  EXPECT_NEAR(integrate(*a, {}, H2), integrate(*b, {}, H2), 1e-8);
}

TEST(Chart, FiniteDifferenceFallbackIsFlaggedAndAccurate) {
  const SpaceForm flat(0);
  const Ball ball(flat, 1.0);
  const double rho = 1.0, C = std::sqrt(2.0), lambda = std::sqrt((C - rho) / (C + rho));
  auto map = std::make_shared<FiniteDifferenceChartMap>(3, [=](const Eigen::Vector2d& p) {
    const Eigen::Vector2d q = lambda * p;
    const double s = q.squaredNorm();
    return Eigen::Vector3d(rho * 2.0 * q(0) / (1.0 + s), rho * 2.0 * q(1) / (1.0 + s), C + rho * (s - 1.0) / (1.0 + s))
        .eval();
  });
  const ChartImmersion fd(flat, ball, map);
  EXPECT_TRUE(fd.finite_difference());
  EXPECT_FALSE(make_cap(flat, ball, rho, e(2), Route::chart)->finite_difference());
  EXPECT_NEAR(area(fd), 2.0 * pi * (1.0 - 1.0 / C), 1e-6);
  for (const PointFrame& f : fd.nodes({})) EXPECT_NEAR(f.kappa.mean(), 1.0, 1e-5);
}

TEST(Chart, BoundaryPatchOfBallIsUmbilic) {
  for (int K : {-1, 0, 1}) {
    const Ball ball(SpaceForm(K), 0.7);
    const auto patch = make_boundary_patch(ball, Eigen::Vector3d(0.0, 0.6, 0.8));
    const PointFrame f = patch->frame_at(Eigen::Vector2d(0.2, -0.1));
    EXPECT_NEAR(f.kappa(0), boundary_sphere_shape_operator(ball), 1e-10);
    EXPECT_NEAR(f.kappa(1), boundary_sphere_shape_operator(ball), 1e-10);
  }
}

TEST(Ricci, EuclideanCap) {
  const SpaceForm flat(0);
  const Ball ball(flat, 1.0);
  // Gauss equation on an umbilic sphere of radius rho in R^{n+1}: Ric = (n - 1) / rho^2.
  EXPECT_NEAR(ricci_min(make_cap(flat, ball, 0.5, e(3))->nodes({}), 0), 2.0 / 0.25, 1e-9);
  EXPECT_NEAR(convexity_min(make_cap(flat, ball, 0.5, e(3))->nodes({})), 2.0, 1e-10);
}
