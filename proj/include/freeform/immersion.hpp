#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "freeform/error.hpp"
#include "freeform/field.hpp"
#include "freeform/frame.hpp"
#include "freeform/quadrature.hpp"
#include "freeform/spaceform.hpp"

namespace freeform {

/// Weak-form residual of the divergence identity for a Newton tensor.
struct DivergenceResidual {
  double residual = 0.0;  // max over test fields of |integral| / scale
  double scale = 0.0;     // max over test fields of the integral of |T| |grad X|
};

/// Hypersurface of a space form given by a parametrisation.
///
/// Two routes implement this interface: full two-dimensional charts over the
/// unit disk (n = 2) and rotationally symmetric profiles (any n). All derived
/// quantities are handed out in g-orthonormal frames so that downstream code
/// does not depend on the route.
class Immersion {
 public:
  virtual ~Immersion() = default;

  virtual int dim() const = 0;
  virtual const SpaceForm& space() const = 0;
  /// Ball the hypersurface has free boundary in; empty for closed or local charts.
  virtual const std::optional<Ball>& ball() const = 0;
  virtual bool closed() const = 0;
  virtual bool rotational() const = 0;
  virtual bool finite_difference() const { return false; }
  virtual std::string route() const = 0;
  /// Rotation axis of a rotational shape.
  virtual Eigen::VectorXd axis() const { throw UnsupportedError("immersion has no rotation axis"); }

  bool has_boundary() const { return !closed() && ball().has_value(); }
  int ambient_dim() const { return dim() + 1; }

  virtual PointFrame frame_at(const Eigen::VectorXd& chart) const = 0;
  /// Frames at the quadrature nodes; `weight` holds dA.
  virtual std::vector<PointFrame> nodes(const QuadratureSpec& spec) const = 0;
  /// Frames at the boundary nodes; `weight` holds the boundary measure.
  virtual std::vector<BoundaryFrame> boundary_nodes(const QuadratureSpec& spec) const = 0;
  /// Boundary frame at boundary chart parameter q (angle for disk charts,
  /// ignored for profiles); `weight` is the boundary density per unit q.
  virtual BoundaryFrame boundary_frame(double q) const = 0;

  virtual LocalJet local_jet(const Field& field, const PointFrame& frame) const = 0;
  virtual BoundaryJet boundary_jet(const Field& field, const BoundaryFrame& frame) const = 0;

  /// Weak check of div T_m = 0 against compactly supported test fields.
  virtual DivergenceResidual weak_divergence(int m, const QuadratureSpec& spec) const = 0;
};

/// Sum of integrand(frame) dA over the quadrature nodes.
inline double integrate(const std::vector<PointFrame>& nodes, const std::function<double(const PointFrame&)>& integrand) {
  std::vector<double> terms;
  terms.reserve(nodes.size());
  for (const PointFrame& f : nodes) terms.push_back(integrand(f) * f.weight);
  return pairwise_sum(terms);
}

inline double integrate(const Immersion& immersion, const QuadratureSpec& spec,
                        const std::function<double(const PointFrame&)>& integrand) {
  return integrate(immersion.nodes(spec), integrand);
}

inline double boundary_integrate(const std::vector<BoundaryFrame>& nodes,
                                 const std::function<double(const BoundaryFrame&)>& integrand) {
  std::vector<double> terms;
  terms.reserve(nodes.size());
  for (const BoundaryFrame& f : nodes) terms.push_back(integrand(f) * f.weight);
  return pairwise_sum(terms);
}

inline double boundary_integrate(const Immersion& immersion, const QuadratureSpec& spec,
                                 const std::function<double(const BoundaryFrame&)>& integrand) {
  if (!immersion.has_boundary()) return 0.0;
  return boundary_integrate(immersion.boundary_nodes(spec), integrand);
}

namespace detail {

/// Unit vector orthogonal to the n columns of an (n+1) x n matrix, oriented so
/// that det[tangents | normal] > 0.
inline Eigen::VectorXd cofactor_normal(const Eigen::MatrixXd& tangents) {
  const Eigen::Index m = tangents.rows();
  Eigen::VectorXd N(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    Eigen::MatrixXd minor(m - 1, m - 1);
    for (Eigen::Index i = 0, r = 0; i < m; ++i) {
      if (i == k) continue;
      minor.row(r++) = tangents.row(i);
    }
    N(k) = ((m - 1 + k) % 2 == 0 ? 1.0 : -1.0) * minor.determinant();
  }
  const double len = N.norm();
  if (!(len > 0.0)) throw DegenerateError("tangent vectors are linearly dependent");
  return N / len;
}

/// Orthonormal basis of the complement of a unit vector (columns).
inline Eigen::MatrixXd complement_basis(const Eigen::VectorXd& a) {
  const Eigen::Index m = a.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
  if (Q.col(0).dot(a) < 0.0) Q.col(0) = -Q.col(0);
  Eigen::MatrixXd B = Q.rightCols(m - 1);
  // Fix orientation so that det[B | a] > 0.
  Eigen::MatrixXd full(m, m);
  full << B, a;
  if (full.determinant() < 0.0) B.col(0) = -B.col(0);
  return B;
}

/// Orthonormal frame data from chart tensors: E = L^{-T} with g = L L^T.
inline void fill_orthonormal(PointFrame& f) {
  Eigen::LLT<Eigen::MatrixXd> llt(f.g);
  if (llt.info() != Eigen::Success) throw DegenerateError("induced metric is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd Linv = L.inverse();
  f.frame = Linv.transpose();
  f.shape = Linv * f.h * Linv.transpose();
  f.shape = 0.5 * (f.shape + f.shape.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.shape, Eigen::EigenvaluesOnly);
  f.kappa = es.eigenvalues();
}

/// Fill N-bar and nu-bar of a boundary frame from position, conormal and normal.
///
/// nu-bar is the unit vector orthogonal to N-bar in the plane spanned by mu and
/// nu, oriented so that (N-bar, nu-bar) and (mu, nu) define the same orientation.
inline void complete_boundary_normals(BoundaryFrame& b, double conformal) {
  const double e2u = conformal * conformal;
  b.ball_normal = b.position.normalized() / conformal;
  double alpha = e2u * b.ball_normal.dot(b.conormal);
  double beta = e2u * b.ball_normal.dot(b.normal);
  const double len = std::hypot(alpha, beta);
  alpha /= len;
  beta /= len;
  b.sphere_normal = -beta * b.conormal + alpha * b.normal;
}

}  // namespace detail

}  // namespace freeform
