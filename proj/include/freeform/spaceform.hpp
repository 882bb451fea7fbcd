#pragma once

// Conformal ball models of the three simply connected space forms.
//
// A model point x lives in flat coordinates of R^{n+1}; the space-form metric
// is e^{2u} times the flat one with
//   K =  0 : e^u = 1
//   K = -1 : e^u = 2 / (1 - |x|^2)   (open unit ball)
//   K = +1 : e^u = 2 / (1 + |x|^2)   (sphere minus the south pole)
// Angles agree with flat angles, so orthogonality tests run in flat terms.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "freeform/error.hpp"
#include "freeform/jet.hpp"

namespace freeform {

enum class Curvature : int { hyperbolic = -1, flat = 0, spherical = 1 };

inline Curvature curvature_from_int(int K) {
  switch (K) {
    case -1:
      return Curvature::hyperbolic;
    case 0:
      return Curvature::flat;
    case 1:
      return Curvature::spherical;
    default:
      throw DomainError("sectional curvature must be -1, 0 or +1, got " + std::to_string(K));
  }
}

class SpaceForm {
 public:
  explicit SpaceForm(Curvature K, double cutoff = 1e6) : K_(K), cutoff_(cutoff) {
    if (!(cutoff > 0.0)) throw DomainError("admissibility cutoff must be positive");
  }
  explicit SpaceForm(int K, double cutoff = 1e6) : SpaceForm(curvature_from_int(K), cutoff) {}

  Curvature curvature() const { return K_; }
  int K() const { return static_cast<int>(K_); }
  double cutoff() const { return cutoff_; }

  bool admissible(const Eigen::VectorXd& x) const {
    const double r = x.norm();
    if (!std::isfinite(r)) return false;
    switch (K_) {
      case Curvature::hyperbolic:
        return r < 1.0;
      case Curvature::spherical:
        return r <= cutoff_;
      default:
        return true;
    }
  }

  void require_admissible(const Eigen::VectorXd& x) const {
    if (!admissible(x)) throw DomainError("point outside the conformal model");
  }

  /// e^u at x, for plain scalars and jets alike.
  template <class T>
  T conformal_factor(std::span<const T> x) const {
    T r2(0.0);
    for (const T& c : x) r2 += c * c;
    switch (K_) {
      case Curvature::hyperbolic:
        return 2.0 / (1.0 - r2);
      case Curvature::spherical:
        return 2.0 / (1.0 + r2);
      default:
        return T(1.0);
    }
  }

  double conformal_factor(const Eigen::VectorXd& x) const {
    return conformal_factor(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }

  /// Flat gradient of u = log e^u.
  Eigen::VectorXd log_factor_gradient(const Eigen::VectorXd& x) const {
    const double r2 = x.squaredNorm();
    switch (K_) {
      case Curvature::hyperbolic:
        return (2.0 / (1.0 - r2)) * x;
      case Curvature::spherical:
        return (-2.0 / (1.0 + r2)) * x;
      default:
        return Eigen::VectorXd::Zero(x.size());
    }
  }

 private:
  Curvature K_;
  double cutoff_;
};

/// Euclidean radius of the geodesic sphere of radius R centred at the model origin.
inline double radius_to_model(const SpaceForm& space, double R) {
  if (!(R > 0.0)) throw DomainError("geodesic radius must be positive");
  switch (space.curvature()) {
    case Curvature::hyperbolic:
      return std::tanh(0.5 * R);
    case Curvature::spherical:
      if (!(R < std::numbers::pi)) throw DomainError("geodesic radius must be below pi when K = +1");
      return std::tan(0.5 * R);
    default:
      return R;
  }
}

/// Inverse of radius_to_model.
inline double model_to_radius(const SpaceForm& space, double model_radius) {
  if (!(model_radius > 0.0)) throw DomainError("model radius must be positive");
  switch (space.curvature()) {
    case Curvature::hyperbolic:
      if (!(model_radius < 1.0)) throw DomainError("model radius must be below 1 when K = -1");
      return 2.0 * std::atanh(model_radius);
    case Curvature::spherical:
      return 2.0 * std::atan(model_radius);
    default:
      return model_radius;
  }
}

/// Closed geodesic ball centred at the model origin.
class Ball {
 public:
  Ball(const SpaceForm& space, double R) : space_(space), radius_(R), model_radius_(radius_to_model(space, R)) {}

  const SpaceForm& space() const { return space_; }
  double radius() const { return radius_; }
  double model_radius() const { return model_radius_; }

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const { return x.norm() <= model_radius_ + tol; }

 private:
  SpaceForm space_;
  double radius_;
  double model_radius_;
};

/// Umbilicity factor c of the ball boundary: h = c g on the geodesic sphere.
inline double boundary_sphere_shape_operator(const Ball& ball) {
  const double R = ball.radius();
  switch (ball.space().curvature()) {
    case Curvature::hyperbolic:
      return 1.0 / std::tanh(R);
    case Curvature::spherical:
      return std::cos(R) / std::sin(R);
    default:
      return 1.0 / R;
  }
}

/// The potential V_a = e^u <x, a> for a unit direction a.
class Potential {
 public:
  Potential(const SpaceForm& space, Eigen::VectorXd direction) : space_(space), a_(std::move(direction)) {
    const double len = a_.norm();
    if (!(len > 0.0) || !std::isfinite(len)) throw DomainError("potential direction must be nonzero");
    if (std::abs(len - 1.0) > 1e-12) throw DomainError("potential direction must be a unit vector");
  }

  const SpaceForm& space() const { return space_; }
  const Eigen::VectorXd& direction() const { return a_; }
  int ambient_dim() const { return static_cast<int>(a_.size()); }

  template <class T>
  T value(std::span<const T> x) const {
    T dot(0.0);
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * a_(static_cast<Eigen::Index>(i));
    return space_.conformal_factor(x) * dot;
  }

  /// Flat gradient: e^u (a + <x, a> grad u).
  Eigen::VectorXd flat_gradient(const Eigen::VectorXd& x) const {
    const double eu = space_.conformal_factor(x);
    return eu * (a_ + x.dot(a_) * space_.log_factor_gradient(x));
  }

 private:
  SpaceForm space_;
  Eigen::VectorXd a_;
};

inline double potential_value(const Potential& potential, const Eigen::VectorXd& x) {
  if (x.size() != potential.ambient_dim()) throw DomainError("dimension mismatch between point and potential");
  potential.space().require_admissible(x);
  return potential.value(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

/// x lies in B_{a+}: V_a(x) > 0 and x in the closed ball.
inline bool half_ball_membership(const Potential& potential, const Ball& ball, const Eigen::VectorXd& x,
                                 double tol = 1e-12) {
  if (!potential.space().admissible(x)) return false;
  return potential_value(potential, x) > 0.0 && ball.contains(x, tol);
}

/// (V_a)_N / V_a on the ball boundary, N the outward unit normal of the ball.
///
/// Uses grad_flat f = e^{2u} grad f, so  gbar(grad V, N) = e^{-u} <grad_flat V, x/|x|>.
inline double boundary_potential_ratio(const Potential& potential, const Ball& ball, const Eigen::VectorXd& x,
                                       double tol = 1e-10) {
  const double r = x.norm();
  if (std::abs(r - ball.model_radius()) > tol * std::max(1.0, ball.model_radius()))
    throw DomainError("point is not on the ball boundary");
  const double V = potential_value(potential, x);
  if (std::abs(V) <= 1e-300) throw DegenerateError("potential vanishes at the boundary point");
  const double eu = ball.space().conformal_factor(x);
  const double normal_derivative = potential.flat_gradient(x).dot(x / r) / eu;
  return normal_derivative / V;
}

}  // namespace freeform
