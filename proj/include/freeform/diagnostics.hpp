#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "freeform/immersion.hpp"
#include "freeform/symalg.hpp"

namespace freeform {

struct FreeBoundaryResidual {
  double position = 0.0;  // max | |x| - R_model |
  double angle = 0.0;     // max |<N_flat, x>| / |x|
};

/// Contact residuals at the boundary nodes; zero for closed hypersurfaces.
inline FreeBoundaryResidual free_boundary_residual(const Immersion& immersion, const QuadratureSpec& spec = {}) {
  FreeBoundaryResidual r;
  if (!immersion.has_boundary()) return r;
  const double Rm = immersion.ball()->model_radius();
  for (const BoundaryFrame& b : immersion.boundary_nodes(spec)) {
    const double len = b.position.norm();
    r.position = std::max(r.position, std::abs(len - Rm));
    r.angle = std::max(r.angle, std::abs(b.interior.flat_normal.dot(b.position)) / len);
  }
  return r;
}

/// Boundary frame at boundary chart parameter q; throws when the contact is not orthogonal.
inline BoundaryFrame boundary_frame_at(const Immersion& immersion, double q, double angle_tol = 1e-6) {
  if (!immersion.has_boundary()) throw DomainError("hypersurface has no free boundary");
  BoundaryFrame b = immersion.boundary_frame(q);
  const double angle = std::abs(b.interior.flat_normal.dot(b.position)) / b.position.norm();
  if (angle > angle_tol) throw FreeBoundaryError("boundary does not meet the ball boundary orthogonally");
  return b;
}

/// 1 - cos of the angle between mu and N-bar (both space-form unit vectors).
inline double conormal_alignment(const BoundaryFrame& b) {
  const double e2u = b.interior.conformal * b.interior.conformal;
  return 1.0 - e2u * b.conormal.dot(b.ball_normal);
}

/// 1 - cos of the angle between nu-bar and nu.
inline double normal_alignment(const BoundaryFrame& b) {
  const double e2u = b.interior.conformal * b.interior.conformal;
  return 1.0 - e2u * b.sphere_normal.dot(b.normal);
}

/// max over boundary nodes, tangents Z and k of |h(mu, Z)| and |T_k(mu, Z)|,
/// each normalised by max(1, |h|) resp. max(1, |T_k|).
inline double principal_conormal_check(const Immersion& immersion, const QuadratureSpec& spec = {}) {
  double worst = 0.0;
  if (!immersion.has_boundary()) return worst;
  for (const BoundaryFrame& b : immersion.boundary_nodes(spec)) {
    const Eigen::MatrixXd& S = b.interior.shape;
    const Eigen::VectorXd H = mean_curvatures(b.interior.kappa);
    const Eigen::VectorXd mu = b.conormal_frame;
    for (Eigen::Index z = 0; z < b.tangent_frame.cols(); ++z) {
      const Eigen::VectorXd Z = b.tangent_frame.col(z);
      worst = std::max(worst, std::abs(mu.dot(S * Z)) / std::max(1.0, S.norm()));
      for (const Eigen::MatrixXd& T : newton_tensors_orthonormal(S, H))
        worst = std::max(worst, std::abs(mu.dot(T * Z)) / std::max(1.0, T.norm()));
    }
  }
  return worst;
}

/// Smallest eigenvalue of the Ricci tensor from the Gauss equation, relative to g.
inline double ricci_min(const PointFrame& frame, int K) {
  return symmetric_eigenvalues(gauss_ricci_orthonormal(frame.shape, K)).minCoeff();
}

inline double ricci_min(const std::vector<PointFrame>& nodes, int K) {
  double m = std::numeric_limits<double>::infinity();
  for (const PointFrame& f : nodes) m = std::min(m, ricci_min(f, K));
  return m;
}

/// Smallest principal curvature over the nodes.
inline double convexity_min(const std::vector<PointFrame>& nodes) {
  double m = std::numeric_limits<double>::infinity();
  for (const PointFrame& f : nodes) m = std::min(m, f.kappa.minCoeff());
  return m;
}

/// Dimensionless non-umbilicity: max spread of principal curvatures times |Sigma|^{1/n}.
inline double non_umbilicity(const std::vector<PointFrame>& nodes) {
  double spread = 0.0, area = 0.0;
  int n = 0;
  for (const PointFrame& f : nodes) {
    spread = std::max(spread, f.kappa.maxCoeff() - f.kappa.minCoeff());
    area += f.weight;
    n = f.n;
  }
  return n > 0 ? spread * std::pow(area, 1.0 / n) : 0.0;
}

}  // namespace freeform
