#pragma once

#include <Eigen/Dense>

#include <limits>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "freeform/jet.hpp"
#include "freeform/spaceform.hpp"

namespace freeform {

/// Scalar function on model coordinates, evaluable on plain values and jets.
class AmbientField {
 public:
  virtual ~AmbientField() = default;
  virtual double operator()(std::span<const double> x) const = 0;
  virtual Jet<1> operator()(std::span<const Jet<1>> x) const = 0;
  virtual Jet<2> operator()(std::span<const Jet<2>> x) const = 0;
};

template <class F>
class LambdaField final : public AmbientField {
 public:
  explicit LambdaField(F f) : f_(std::move(f)) {}
  double operator()(std::span<const double> x) const override { return f_(x); }
  Jet<1> operator()(std::span<const Jet<1>> x) const override { return f_(x); }
  Jet<2> operator()(std::span<const Jet<2>> x) const override { return f_(x); }

 private:
  F f_;
};

/// Wrap a generic lambda `[](auto x) { ... }` taking a span of scalars.
template <class F>
std::shared_ptr<const AmbientField> make_field(F f) {
  return std::make_shared<LambdaField<F>>(std::move(f));
}

inline std::shared_ptr<const AmbientField> constant_field(double c) {
  return make_field([c](auto x) {
    using T = std::remove_cvref_t<decltype(x[0])>;
    return T(c);
  });
}

inline std::shared_ptr<const AmbientField> potential_field(const Potential& potential) {
  return make_field([potential](auto x) { return potential.value(x); });
}

/// d/ds f(x + s dir) at s = 0.
inline double directional_derivative(const AmbientField& f, const Eigen::VectorXd& x, const Eigen::VectorXd& dir) {
  std::vector<Jet<1>> line(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    line[static_cast<std::size_t>(i)] = Jet<1>(x(i));
    line[static_cast<std::size_t>(i)].d(0) = dir(i);
  }
  return f(std::span<const Jet<1>>(line)).d(0);
}

/// Rotationally symmetric field given as a function of the profile parameter t.
class ProfileField {
 public:
  virtual ~ProfileField() = default;
  /// Value with first and second t-derivatives.
  virtual Jet<1> at(double t) const = 0;
};

using Field = std::variant<std::shared_ptr<const AmbientField>, std::shared_ptr<const ProfileField>>;

/// Field restricted to the hypersurface, derivatives expressed in a g-orthonormal frame.
struct LocalJet {
  double value = 0.0;
  Eigen::VectorXd grad;   // intrinsic gradient
  Eigen::MatrixXd hess;   // intrinsic Hessian
  double normal = std::numeric_limits<double>::quiet_NaN();  // ambient derivative along nu (ambient fields only)

  double laplacian() const { return hess.trace(); }
};

/// Field on the boundary of the hypersurface.
struct BoundaryJet {
  double value = 0.0;
  double conormal = 0.0;  // derivative along mu
  double normal = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd grad;   // gradient within the boundary, boundary orthonormal frame
  double laplacian = 0.0; // Laplacian of the boundary manifold
};

}  // namespace freeform
