#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "freeform/freeform.hpp"

using namespace freeform;

namespace {

constexpr double pi = std::numbers::pi;

Eigen::VectorXd e(int n) { return default_axis(n); }

/// Rotationally symmetric cubic in z = <x, e_{n+1}> and |x|^2.
std::shared_ptr<const AmbientField> symmetric_cubic(double c0, double c1, double c2, double c3) {
  return make_field([=](auto x) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    T r2(0.0);
    for (const T& c : x) r2 += c * c;
    const T z = x[x.size() - 1];
    return c0 + c1 * z + c2 * z * z + c3 * z * r2;
  });
}

/// Positive weight 1 + w1 z + w2 |x|^2.
std::shared_ptr<const AmbientField> symmetric_weight(double w1, double w2) {
  return make_field([=](auto x) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    T r2(0.0);
    for (const T& c : x) r2 += c * c;
    return 1.0 + w1 * x[x.size() - 1] + w2 * r2;
  });
}

}  // namespace

TEST(Reilly, FlatDiskWitness) {
  const SpaceForm flat(0);
  const auto disk = make_flat_disk(flat, Ball(flat, 1.0), e(2), Route::chart);
  const auto f = make_field([](auto x) { return x[0] * x[0] + x[1] * x[1]; });
  const ReillyLedger L = reilly_residual(*disk, constant_field(1.0), f);
  EXPECT_NEAR(L.bulk_lhs, 8.0 * pi, 1e-12);
  EXPECT_NEAR(L.bulk_substatic, 0.0, 1e-12);
  EXPECT_LT(L.relative(), 1e-12);
}

TEST(Reilly, PotentialIsInTheKernel) {
  for (int K : {-1, 0, 1}) {
    const SpaceForm space(K);
    const Ball ball(space, 1.0);
    const Potential V(space, e(2));
    const auto cap = make_cap(space, ball, 0.7 * ball.model_radius(), e(2));
    const ReillyLedger L = reilly_residual(*cap, potential_field(V), potential_field(V));
    EXPECT_LT(std::abs(L.bulk_lhs), 1e-12);
    EXPECT_LT(std::abs(L.discarded()), 1e-12);
  }
}

TEST(Reilly, IdentityHoldsOnRandomFields) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int K : {-1, 0, 1})
    for (int n : {2, 3})
      for (int trial = 0; trial < 3; ++trial) {
        const SpaceForm space(K);
        const Ball ball(space, 1.0);
        const double Rm = ball.model_radius();
        const auto shape = trial == 0 ? make_cap(space, ball, 1.5 * Rm, e(n))
                                      : make_profile_shape(space, ball, Rm, {u(rng), u(rng)}, 0.005, e(n));
        const auto f = symmetric_cubic(u(rng), u(rng), u(rng), u(rng));
        const Field V = trial == 2 ? Field(potential_field(Potential(space, e(n)))) : Field(symmetric_weight(0.2 * u(rng), 0.1));
        const ReillyLedger L = reilly_residual(*shape, V, f);
        EXPECT_LT(L.relative(), 1e-9) << "K=" << K << " n=" << n << " trial=" << trial;
        EXPECT_GT(L.scale, 1e-3);
      }
}

TEST(Reilly, IdentityHoldsOnChartsWithGeneralFields) {
  for (int K : {-1, 0, 1}) {
    const SpaceForm space(K);
    const Ball ball(space, 1.0);
    const auto shape = make_profile_shape(space, ball, ball.model_radius(), {0.3, -0.2}, 0.01, e(2), Route::chart);
    const auto f = make_field([](auto x) { return 0.3 + x[0] - 0.5 * x[1] * x[2] + x[0] * x[0] * x[1]; });
    const auto V = make_field([](auto x) { return 1.0 + 0.2 * x[0] - 0.1 * x[1] + 0.1 * x[2] * x[2]; });
    EXPECT_LT(reilly_residual(*shape, V, f).relative(), 1e-9) << K;
  }
}

TEST(Reilly, ConvergesUnderRefinement) {
  const SpaceForm space(1);
  const Ball ball(space, 1.0);
  const auto shape = make_profile_shape(space, ball, 0.8, {0.4, -0.3, 0.2}, 0.01, e(3));
  const ReillyConvergence c = reilly_convergence(*shape, symmetric_weight(0.1, 0.05), symmetric_cubic(0.2, 1.0, -0.7, 0.4));
  ASSERT_EQ(c.residuals.size(), 3u);
  EXPECT_GE(c.order, 2.0);
  EXPECT_LT(reilly_residual(*shape, symmetric_weight(0.1, 0.05), symmetric_cubic(0.2, 1.0, -0.7, 0.4)).relative(), 1e-9);
}

TEST(Reilly, RejectsNonpositiveWeightAndAsymmetricFields) {
  const SpaceForm flat(0);
  const auto cap = make_cap(flat, Ball(flat, 1.0), 1.0, e(2));
  EXPECT_THROW(reilly_residual(*cap, constant_field(-1.0), constant_field(1.0)), DomainError);
  const auto tilted = make_field([](auto x) { return x[0]; });
  EXPECT_THROW(reilly_residual(*cap, constant_field(1.0), tilted), AsymmetryError);
}

TEST(Chebyshev, EvenBasisValuesAndDerivatives) {
  const double theta = 0.4, t = std::cos(theta);
  const Eigen::Matrix3Xd B = ChebyshevProfileField::basis(t, 5);
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(B(0, j), std::cos(2 * j * theta), 1e-14);
  const double h = 1e-5;
  const Eigen::Matrix3Xd P = ChebyshevProfileField::basis(t + h, 5), M = ChebyshevProfileField::basis(t - h, 5);
  for (int j = 0; j < 5; ++j) {
    EXPECT_NEAR(B(1, j), (P(0, j) - M(0, j)) / (2 * h), 1e-6);
    EXPECT_NEAR(B(2, j), (P(1, j) - M(1, j)) / (2 * h), 1e-5);
  }
}

TEST(Neumann, CapsHaveTrivialSolution) {
  for (int K : {-1, 0, 1}) {
    const SpaceForm space(K);
    const Ball ball(space, 1.0);
    const auto cap = make_cap(space, ball, ball.model_radius(), e(3));
    const NeumannSolution s = solve_neumann(*cap, 1);
    EXPECT_LT(s.field->coefficients().cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Neumann, PerturbedShapesSolveToTolerance) {
  for (int K : {-1, 0, 1})
    for (bool weighted : {false, true}) {
      const SpaceForm space(K);
      const Ball ball(space, 1.0);
      const auto shape = make_profile_shape(space, ball, ball.model_radius(), {0.5, -0.3, 0.2}, 0.01, e(3));
      std::optional<Potential> w;
      if (weighted) w = Potential(space, e(3));
      for (int k : {1, 2}) {
        const NeumannSolution s = solve_neumann(*shape, k, w);
        EXPECT_LT(s.residual, 1e-7);
        EXPECT_LT(s.robin, 1e-8);
        EXPECT_NEAR(s.mean, average_hk(*shape, k, w), 1e-12 * (1.0 + std::abs(s.mean)));
        const Field V = w ? Field(potential_field(*w)) : Field(constant_field(1.0));
        const Field f = std::shared_ptr<const ProfileField>(s.field);
        double mass = 0.0, moment = 0.0;
        for (const PointFrame& node : shape->nodes({})) {
          const double v = shape->local_jet(V, node).value;
          mass += node.weight * v;
          moment += node.weight * v * shape->local_jet(f, node).value;
        }
        EXPECT_LT(std::abs(moment) / mass, 1e-9);
      }
    }
}

TEST(Neumann, Errors) {
  const SpaceForm flat(0);
  const Ball ball(flat, 1.0);
  EXPECT_THROW(solve_neumann(*make_cap(flat, ball, 1.0, e(2), Route::chart), 1), UnsupportedError);
  EXPECT_THROW(solve_neumann(*make_closed_sphere(flat, 1.0, 2), 1), UnsupportedError);
  EXPECT_THROW(solve_neumann(*make_cap(flat, ball, 1.0, e(2)), 1, Potential(flat, Eigen::Vector3d(1.0, 0.0, 0.0))),
               AsymmetryError);
  EXPECT_THROW(solve_neumann(*make_cap(flat, ball, 1.0, e(2)), 3), DomainError);
}

TEST(ProofChain, LedgerClosesOnPerturbedShapes) {
  for (int K : {-1, 0, 1})
    for (int n : {2, 3})
      for (bool weighted : {false, true}) {
        const SpaceForm space(K);
        const Ball ball(space, 1.0);
        const auto shape = make_profile_shape(space, ball, 1.2 * ball.model_radius(), {0.4, 0.3, -0.2}, 0.008, e(n));
        std::optional<Potential> w;
        if (weighted) w = Potential(space, e(n));
        for (int k = 1; k < n; ++k) {
          const NeumannSolution s = solve_neumann(*shape, k, w);
          const ProofChainLedger L = proof_chain_check(*shape, k, w, s);
          EXPECT_LT(L.identity_residual, 1e-6);
          EXPECT_LT(L.slack_residual, 1e-5);
          EXPECT_LT(L.lhs_mismatch, 1e-6);
          EXPECT_LT(L.rhs_mismatch, 1e-6);
          if (check_main_inequality(*shape, k, w).status == Status::pass) {
            EXPECT_TRUE(L.slack_nonnegative);
            EXPECT_TRUE(L.chain_holds);
          }
        }
      }
}

TEST(ProofChain, SlackTurnsNegativeWithoutTheRicciBound) {
  // Perturbed hyperbolic shape with Ric < 0 somewhere: the discarded Reilly terms change sign.
  const SpaceForm space(-1);
  const Ball ball(space, 1.0);
  const auto shape = make_profile_shape(space, ball, 1.2 * ball.model_radius(), {0.4, 0.3, -0.2}, 0.008, e(2));
  const ProofChainLedger L = proof_chain_check(*shape, 1, std::nullopt, solve_neumann(*shape, 1));
  EXPECT_LT(L.slack, 0.0);
  EXPECT_LT(L.slack_residual, 1e-5);
  EXPECT_FALSE(L.chain_holds);
  EXPECT_EQ(check_main_inequality(*shape, 1).status, Status::inapplicable);
}

TEST(Substatic, ThreeFormsAgreeInEverySpaceForm) {
  for (int K : {-1, 0, 1})
    for (int n : {2, 3}) {
      const SpaceForm space(K);
      const Ball ball(space, 1.0);
      const Potential V(space, e(n));
      for (const auto& shape : {make_cap(space, ball, 0.6 * ball.model_radius(), e(n)),
                                make_profile_shape(space, ball, ball.model_radius(), {0.3, 0.4}, 0.02, e(n))}) {
        const SubstaticReport r = substatic_consistency(*shape, V);
        EXPECT_LT(r.residual, 1e-8);
        EXPECT_LT(r.hessian_residual, 1e-8);
      }
    }
}

TEST(Substatic, PositiveOnEuclideanCaps) {
  const SpaceForm flat(0);
  for (double rho : {0.3, 1.0, 3.0}) {
    const auto cap = make_cap(flat, Ball(flat, 1.0), rho, e(2));
    EXPECT_GT(substatic_consistency(*cap, Potential(flat, e(2))).min_eigenvalue, 0.0) << rho;
  }
}

TEST(BoundaryIdentity, HoldsAtRandomPoints) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int K : {-1, 0, 1})
    for (int i = 0; i < 20; ++i) {
      const Ball ball(SpaceForm(K), 0.5 + 0.05 * i);
      Eigen::Vector3d a(g(rng), g(rng), g(rng)), d(g(rng), g(rng), g(rng));
      a.normalize();
      d.normalize();
      if (d.dot(a) < 0.05) d = (d + (0.1 - d.dot(a)) * a).normalized();
      EXPECT_LT(boundary_identity_residual(ball, Potential(SpaceForm(K), a), d), 1e-10);
    }
}
