#pragma once

#include <Eigen/Dense>

namespace freeform {

/// Geometry of the hypersurface at one chart point.
///
/// Chart tensors (g, h) use the immersion's own coordinates; `frame` holds the
/// chart components of a g-orthonormal frame and `shape` is h in that frame.
struct PointFrame {
  int n = 0;
  Eigen::VectorXd chart;      // chart point
  Eigen::VectorXd position;   // model coordinates, size n+1
  Eigen::VectorXd normal;     // nu in model components (space-form unit length)
  Eigen::VectorXd flat_normal;// Euclidean unit normal with the same orientation
  Eigen::MatrixXd tangents;   // (n+1) x n flat partial derivatives of the map
  Eigen::MatrixXd g, g_inv, h;
  Eigen::MatrixXd frame;
  Eigen::MatrixXd shape;
  Eigen::VectorXd kappa;      // ascending principal curvatures
  double conformal = 1.0;     // e^u at position
  double weight = 0.0;        // area weight dA (0 when not a quadrature node)

  double mean_curvature() const { return shape.trace(); }
};

/// Geometry along the boundary of a free-boundary hypersurface.
struct BoundaryFrame {
  Eigen::VectorXd chart;            // chart point of the boundary node
  Eigen::VectorXd position;
  Eigen::VectorXd conormal;         // mu, model components
  Eigen::VectorXd ball_normal;      // N-bar, outward normal of the ball boundary
  Eigen::VectorXd sphere_normal;    // nu-bar, outward normal of the boundary inside the ball boundary
  Eigen::VectorXd normal;           // nu
  Eigen::MatrixXd tangents;         // (n+1) x (n-1) orthonormal tangents of the boundary
  Eigen::VectorXd conormal_frame;   // mu in the orthonormal frame of `interior`
  Eigen::MatrixXd tangent_frame;    // tangents in the orthonormal frame of `interior`
  Eigen::MatrixXd shape;            // second fundamental form of the boundary inside the hypersurface
  double mean_curvature = 0.0;      // trace of `shape`
  double weight = 0.0;              // boundary measure weight
  PointFrame interior;              // hypersurface frame at the same point
};

}  // namespace freeform
