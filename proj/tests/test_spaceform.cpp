#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "freeform/spaceform.hpp"

using namespace freeform;

namespace {

Eigen::VectorXd random_unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = g(rng);
  return v.normalized();
}

}  // namespace

TEST(SpaceForm, CurvatureFromInt) {
  EXPECT_EQ(SpaceForm(-1).K(), -1);
  EXPECT_EQ(SpaceForm(0).K(), 0);
  EXPECT_EQ(SpaceForm(1).K(), 1);
  EXPECT_THROW(SpaceForm(2), DomainError);
}

TEST(SpaceForm, ConformalFactorValues) {
  const Eigen::Vector3d x(0.3, 0.0, 0.4);  // |x|^2 = 0.25
  EXPECT_DOUBLE_EQ(SpaceForm(0).conformal_factor(x), 1.0);
  EXPECT_DOUBLE_EQ(SpaceForm(-1).conformal_factor(x), 2.0 / 0.75);
  EXPECT_DOUBLE_EQ(SpaceForm(1).conformal_factor(x), 2.0 / 1.25);
}

TEST(SpaceForm, Admissibility) {
  EXPECT_FALSE(SpaceForm(-1).admissible(Eigen::Vector3d(1.0, 0.0, 0.0)));
  EXPECT_TRUE(SpaceForm(-1).admissible(Eigen::Vector3d(0.99, 0.0, 0.0)));
  EXPECT_TRUE(SpaceForm(1).admissible(Eigen::Vector3d(1e5, 0.0, 0.0)));
  EXPECT_FALSE(SpaceForm(1).admissible(Eigen::Vector3d(1e7, 0.0, 0.0)));
  EXPECT_FALSE(SpaceForm(0).admissible(Eigen::Vector3d(std::nan(""), 0.0, 0.0)));
}

TEST(Radius, KnownValues) {
  EXPECT_DOUBLE_EQ(radius_to_model(SpaceForm(0), 1.7), 1.7);
  // tanh(R/2) and tan(R/2)
  EXPECT_NEAR(radius_to_model(SpaceForm(-1), 1.0), std::tanh(0.5), 1e-15);
  EXPECT_NEAR(radius_to_model(SpaceForm(1), 1.0), std::tan(0.5), 1e-15);
  EXPECT_NEAR(radius_to_model(SpaceForm(1), std::numbers::pi / 2), 1.0, 1e-15);
}

TEST(Radius, RoundTrip) {
  for (int K : {-1, 0, 1})
    for (double R : {1e-3, 0.1, 0.5, 1.0, 2.0, 3.0}) {
      const SpaceForm s(K);
      EXPECT_NEAR(model_to_radius(s, radius_to_model(s, R)), R, 1e-12 * R) << "K=" << K << " R=" << R;
    }
}

TEST(Radius, Errors) {
  EXPECT_THROW(radius_to_model(SpaceForm(0), 0.0), DomainError);
  EXPECT_THROW(radius_to_model(SpaceForm(0), -1.0), DomainError);
  EXPECT_THROW(radius_to_model(SpaceForm(1), std::numbers::pi), DomainError);
  EXPECT_THROW(model_to_radius(SpaceForm(-1), 1.0), DomainError);
}

TEST(Radius, GeodesicLengthOfModelSegment) {
  // Integrate e^u along the radial segment and compare with R.
  for (int K : {-1, 1}) {
    const SpaceForm s(K);
    const double R = 1.3, Rm = radius_to_model(s, R);
    const int N = 2000;
    double L = 0.0;
    for (int i = 0; i < N; ++i) {
      const double r = (i + 0.5) * Rm / N;
      L += s.conformal_factor(Eigen::Vector3d(r, 0.0, 0.0)) * Rm / N;
    }
    EXPECT_NEAR(L, R, 1e-6);
  }
}

TEST(Ball, BoundaryShapeOperator) {
  EXPECT_DOUBLE_EQ(boundary_sphere_shape_operator(Ball(SpaceForm(0), 2.0)), 0.5);
  EXPECT_NEAR(boundary_sphere_shape_operator(Ball(SpaceForm(-1), 1.0)), 1.0 / std::tanh(1.0), 1e-15);
  EXPECT_NEAR(boundary_sphere_shape_operator(Ball(SpaceForm(1), std::numbers::pi / 2)), 0.0, 1e-15);
}

TEST(Potential, ValuesAndErrors) {
  const Eigen::Vector3d a(0.0, 0.0, 1.0);
  const Potential V(SpaceForm(-1), a);
  const Eigen::Vector3d x(0.1, 0.2, 0.5);
  EXPECT_NEAR(potential_value(V, x), 2.0 / (1.0 - 0.3) * 0.5, 1e-15);
  EXPECT_THROW(Potential(SpaceForm(0), Eigen::Vector3d::Zero()), DomainError);
  EXPECT_THROW(Potential(SpaceForm(0), Eigen::Vector3d(1.0, 1.0, 0.0)), DomainError);
  EXPECT_THROW(potential_value(V, Eigen::Vector2d(0.1, 0.1)), DomainError);
  EXPECT_THROW(potential_value(V, Eigen::Vector3d(1.0, 0.5, 0.0)), DomainError);
}

TEST(Potential, LinearInDirection) {
  std::mt19937_64 rng(1);
  for (int K : {-1, 0, 1}) {
    const SpaceForm s(K);
    const Eigen::VectorXd a = random_unit(rng, 3), b = random_unit(rng, 3);
    const double t = 0.6;
    const Eigen::Vector3d x(0.2, -0.3, 0.1);
    const Eigen::VectorXd bo = (b - b.dot(a) * a).normalized();
    const Eigen::VectorXd d = std::cos(t) * a + std::sin(t) * bo;
    EXPECT_NEAR(potential_value(Potential(s, d), x),
                std::cos(t) * potential_value(Potential(s, a), x) + std::sin(t) * potential_value(Potential(s, bo), x),
                1e-14);
  }
}

TEST(Potential, FlatGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  for (int K : {-1, 0, 1}) {
    const Potential V(SpaceForm(K), random_unit(rng, 3));
    const Eigen::Vector3d x(0.15, -0.25, 0.35);
    const Eigen::VectorXd grad = V.flat_gradient(x);
    for (int i = 0; i < 3; ++i) {
      const double h = 1e-6;
      Eigen::Vector3d p = x, m = x;
      p(i) += h;
      m(i) -= h;
      EXPECT_NEAR(grad(i), (potential_value(V, p) - potential_value(V, m)) / (2 * h), 1e-8);
    }
  }
}

TEST(HalfBall, Membership) {
  const SpaceForm s(0);
  const Ball B(s, 1.0);
  const Potential V(s, Eigen::Vector3d(0.0, 0.0, 1.0));
  EXPECT_TRUE(half_ball_membership(V, B, Eigen::Vector3d(0.0, 0.0, 0.5)));
  EXPECT_FALSE(half_ball_membership(V, B, Eigen::Vector3d(0.0, 0.0, -0.5)));
  EXPECT_FALSE(half_ball_membership(V, B, Eigen::Vector3d(0.5, 0.0, 0.0)));
  EXPECT_FALSE(half_ball_membership(V, B, Eigen::Vector3d(0.0, 0.0, 1.5)));
  EXPECT_FALSE(half_ball_membership(Potential(SpaceForm(-1), Eigen::Vector3d(0.0, 0.0, 1.0)), Ball(SpaceForm(-1), 1.0),
                                    Eigen::Vector3d(0.0, 0.0, 1.2)));
}

TEST(BoundaryRatio, ClosedForm) {
  // (V_a)_N / V_a on the geodesic sphere equals coth R, 1/R or cot R.
  std::mt19937_64 rng(3);
  for (int K : {-1, 0, 1})
    for (double R : {0.3, 1.0, 1.4}) {
      const SpaceForm s(K);
      const Ball B(s, R);
      const Potential V(s, Eigen::Vector3d(0.0, 0.0, 1.0));
      Eigen::VectorXd d = random_unit(rng, 3);
      if (d(2) < 0.1) d(2) = std::abs(d(2)) + 0.1, d.normalize();
      const double ratio = boundary_potential_ratio(V, B, B.model_radius() * d);
      EXPECT_NEAR(ratio, boundary_sphere_shape_operator(B), 1e-12) << "K=" << K << " R=" << R;
    }
}

TEST(BoundaryRatio, Errors) {
  const SpaceForm s(0);
  const Ball B(s, 1.0);
  const Potential V(s, Eigen::Vector3d(0.0, 0.0, 1.0));
  EXPECT_THROW(boundary_potential_ratio(V, B, Eigen::Vector3d(0.0, 0.0, 0.5)), DomainError);
  EXPECT_THROW(boundary_potential_ratio(V, B, Eigen::Vector3d(1.0, 0.0, 0.0)), DegenerateError);
}
