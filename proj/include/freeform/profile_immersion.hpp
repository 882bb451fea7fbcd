#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "freeform/immersion.hpp"
#include "freeform/profile.hpp"
#include "freeform/symalg.hpp"

namespace freeform {

/// Rotationally symmetric hypersurface X = r(t) w + z(t) a of any dimension n.
///
/// The chart of a frame is the single profile parameter t; chart tensors use
/// the coordinates (t, y_2, ..., y_n) with y the flat arclength on the orbit
/// sphere, so g and h are diagonal.
class ProfileImmersion final : public Immersion {
 public:
  /// orientation: +1 / -1 fixes the sign of the normal, 0 picks the one with integral of H >= 0.
  ProfileImmersion(int n, const SpaceForm& space, std::optional<Ball> ball, std::shared_ptr<const ProfileCurve> curve,
                   const Eigen::VectorXd& axis, int orientation = 0)
      : n_(n), space_(space), ball_(std::move(ball)), curve_(std::move(curve)), axis_(axis.normalized()) {
    if (n < 2) throw DomainError("hypersurface dimension must be at least 2");
    if (axis.size() != n + 1) throw DomainError("axis must have n+1 components");
    basis_ = detail::complement_basis(axis_);
    if (orientation != 0) {
      orientation_ = orientation > 0 ? 1.0 : -1.0;
    } else {
      const double total = integrate(*this, QuadratureSpec{}, [](const PointFrame& f) { return f.mean_curvature(); });
      orientation_ = total < 0.0 ? -1.0 : 1.0;
    }
  }

  int dim() const override { return n_; }
  const SpaceForm& space() const override { return space_; }
  const std::optional<Ball>& ball() const override { return ball_; }
  bool closed() const override { return curve_->closed(); }
  bool rotational() const override { return true; }
  std::string route() const override { return "profile"; }
  Eigen::VectorXd axis() const override { return axis_; }
  double orientation() const { return orientation_; }
  const ProfileCurve& curve() const { return *curve_; }

  /// Warped-product data of the induced metric g = sigma^2 dt^2 + rho^2 g_sphere.
  struct Metric {
    double t = 0.0;
    ProfilePoint p;
    Eigen::VectorXd x;
    double conformal = 1.0, dconformal = 0.0;
    double speed = 0.0;  // flat |gamma'|
    double sigma = 0.0, dsigma = 0.0;
    double rho = 0.0, drho = 0.0;
  };

  Metric metric(double t) const {
    Metric m;
    m.t = t;
    m.p = curve_->at(t);
    const Eigen::VectorXd e1 = basis_.col(0);
    m.x = m.p.r * e1 + m.p.z * axis_;
    std::vector<Jet<1>> xj(static_cast<std::size_t>(n_ + 1));
    for (int i = 0; i <= n_; ++i) {
      Jet<1>& c = xj[static_cast<std::size_t>(i)];
      c.v = m.x(i);
      c.d(0) = m.p.dr * e1(i) + m.p.dz * axis_(i);
      c.dd(0, 0) = m.p.ddr * e1(i) + m.p.ddz * axis_(i);
    }
    space_.require_admissible(m.x);
    const Jet<1> eu = space_.conformal_factor(std::span<const Jet<1>>(xj));
    m.conformal = eu.v;
    m.dconformal = eu.d(0);
    m.speed = std::hypot(m.p.dr, m.p.dz);
    if (!(m.speed > 0.0)) throw DegenerateError("profile curve has zero speed");
    const double dspeed = (m.p.dr * m.p.ddr + m.p.dz * m.p.ddz) / m.speed;
    m.sigma = m.conformal * m.speed;
    m.dsigma = m.dconformal * m.speed + m.conformal * dspeed;
    m.rho = m.conformal * m.p.r;
    m.drho = m.dconformal * m.p.r + m.conformal * m.p.dr;
    return m;
  }

  PointFrame frame_at(const Eigen::VectorXd& chart) const override {
    const double t = chart(0);
    if (!(t > 0.0 && t <= 1.0) || (closed() && t >= 1.0))
      throw DomainError("profile parameter must lie off the axis");
    const Metric m = metric(t);
    const ProfilePoint& p = m.p;
    if (!(p.r > 0.0)) throw DegenerateError("profile curve meets the axis at an interior parameter");
    const Eigen::VectorXd e1 = basis_.col(0);
    const Eigen::VectorXd Nf = (p.dz * e1 - p.dr * axis_) / m.speed;
    const double dNu = space_.log_factor_gradient(m.x).dot(Nf);
    const double k_mer = (p.dr * p.ddz - p.dz * p.ddr) / (m.speed * m.speed * m.speed);
    const double k_par = p.dz / (p.r * m.speed);
    const double kappa_mer = orientation_ * (k_mer + dNu) / m.conformal;
    const double kappa_par = orientation_ * (k_par + dNu) / m.conformal;

    PointFrame f;
    f.n = n_;
    f.chart = Eigen::VectorXd::Constant(1, t);
    f.position = m.x;
    f.conformal = m.conformal;
    f.flat_normal = orientation_ * Nf;
    f.normal = f.flat_normal / m.conformal;
    f.tangents.resize(n_ + 1, n_);
    f.tangents.col(0) = p.dr * e1 + p.dz * axis_;
    for (int j = 1; j < n_; ++j) f.tangents.col(j) = p.r * basis_.col(j);
    Eigen::VectorXd gdiag = Eigen::VectorXd::Constant(n_, m.rho * m.rho);
    gdiag(0) = m.sigma * m.sigma;
    Eigen::VectorXd kdiag = Eigen::VectorXd::Constant(n_, kappa_par);
    kdiag(0) = kappa_mer;
    f.g = gdiag.asDiagonal();
    f.g_inv = gdiag.cwiseInverse().asDiagonal();
    f.h = kdiag.cwiseProduct(gdiag).asDiagonal();
    f.frame = gdiag.cwiseSqrt().cwiseInverse().asDiagonal();
    f.shape = kdiag.asDiagonal();
    f.kappa = kdiag;
    std::sort(f.kappa.data(), f.kappa.data() + n_);
    return f;
  }

  std::vector<PointFrame> nodes(const QuadratureSpec& spec) const override {
    const Rule1D rule = composite_rule(0.0, 1.0, spec);
    const double orbit = sphere_area(n_ - 1);
    std::vector<PointFrame> out;
    out.reserve(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      PointFrame f = frame_at(Eigen::VectorXd::Constant(1, rule.nodes[i]));
      const double rho = f.conformal * curve_->at(rule.nodes[i]).r;
      const double sigma = std::sqrt(f.g(0, 0));
      f.weight = rule.weights[i] * orbit * std::pow(rho, n_ - 1) * sigma;
      out.push_back(std::move(f));
    }
    return out;
  }

  std::vector<BoundaryFrame> boundary_nodes(const QuadratureSpec&) const override {
    if (!has_boundary()) return {};
    return {boundary_frame(0.0)};
  }

  BoundaryFrame boundary_frame(double) const override {
    if (closed()) throw DomainError("closed hypersurface has no boundary");
    const Metric m = metric(1.0);
    BoundaryFrame b;
    b.interior = frame_at(Eigen::VectorXd::Constant(1, 1.0));
    b.chart = b.interior.chart;
    b.position = b.interior.position;
    b.conormal = b.interior.tangents.col(0) / m.sigma;
    b.normal = b.interior.normal;
    detail::complete_boundary_normals(b, m.conformal);
    b.tangents.resize(n_ + 1, n_ - 1);
    for (int j = 1; j < n_; ++j) b.tangents.col(j - 1) = basis_.col(j) / m.conformal;
    b.conormal_frame = Eigen::VectorXd::Unit(n_, 0);
    b.tangent_frame = Eigen::MatrixXd::Identity(n_, n_).rightCols(n_ - 1);
    const double c = m.drho / (m.sigma * m.rho);
    b.shape = c * Eigen::MatrixXd::Identity(n_ - 1, n_ - 1);
    b.mean_curvature = (n_ - 1) * c;
    b.weight = sphere_area(n_ - 1) * std::pow(m.rho, n_ - 1);
    return b;
  }

  LocalJet local_jet(const Field& field, const PointFrame& frame) const override {
    const double t = frame.chart(0);
    const Metric m = metric(t);
    const Jet<1> f = evaluate(field, m);
    LocalJet j;
    j.value = f.v;
    const double fs = f.d(0) / m.sigma;
    const double fss = (f.dd(0, 0) - (m.dsigma / m.sigma) * f.d(0)) / (m.sigma * m.sigma);
    j.grad = Eigen::VectorXd::Zero(n_);
    j.grad(0) = fs;
    j.hess = Eigen::MatrixXd::Zero(n_, n_);
    j.hess(0, 0) = fss;
    for (int i = 1; i < n_; ++i) j.hess(i, i) = (m.drho / (m.sigma * m.rho)) * fs;
    if (const auto* ambient = std::get_if<std::shared_ptr<const AmbientField>>(&field))
      j.normal = directional_derivative(**ambient, frame.position, frame.normal);
    return j;
  }

  BoundaryJet boundary_jet(const Field& field, const BoundaryFrame& frame) const override {
    const Metric m = metric(1.0);
    const Jet<1> f = evaluate(field, m);
    BoundaryJet j;
    j.value = f.v;
    j.conormal = f.d(0) / m.sigma;
    j.grad = Eigen::VectorXd::Zero(n_ - 1);
    j.laplacian = 0.0;
    if (const auto* ambient = std::get_if<std::shared_ptr<const AmbientField>>(&field))
      j.normal = directional_derivative(**ambient, frame.position, frame.normal);
    return j;
  }

  DivergenceResidual weak_divergence(int m, const QuadratureSpec& spec) const override {
    if (m < 0 || m > n_ - 1) throw DomainError("Newton tensor order must lie in [0, n-1]");
    if (m == 0) return {};
    // Test fields X = phi(t) e_s with phi supported on [1/4, 3/4]; meridians are
    // geodesics, so grad X = diag(phi_s, phi rho_s / rho, ...).
    constexpr double lo = 0.25, hi = 0.75;
    DivergenceResidual out;
    const std::vector<PointFrame> frames = nodes(spec);
    for (int variant = 0; variant < 3; ++variant) {
      std::vector<double> pairing, traceless, norm;
      for (const PointFrame& f : frames) {
        const double t = f.chart(0);
        double phi = 0.0, dphi = 0.0;
        if (t > lo && t < hi) {
          const double q = 16.0 * (t - lo) * (hi - t);
          const double dq = 16.0 * (lo + hi - 2.0 * t);
          const double tv = std::pow(t, variant);
          const double dtv = variant == 0 ? 0.0 : variant * std::pow(t, variant - 1);
          phi = q * q * q * tv;
          dphi = 3.0 * q * q * dq * tv + q * q * q * dtv;
        }
        const Metric mt = metric(t);
        Eigen::VectorXd grad_diag = Eigen::VectorXd::Constant(n_, phi * mt.drho / (mt.sigma * mt.rho));
        grad_diag(0) = dphi / mt.sigma;
        const Eigen::VectorXd H = mean_curvatures(f.kappa);
        const Eigen::MatrixXd T = newton_tensors_orthonormal(f.shape, H)[static_cast<std::size_t>(m)];
        const Eigen::MatrixXd Tc = traceless_part(T, H(m), m);
        const double div = grad_diag.sum();
        pairing.push_back(f.weight * T.diagonal().dot(grad_diag));
        traceless.push_back(f.weight * (Tc.diagonal().dot(grad_diag) + (double(n_ - m) / n_) * H(m) * div));
        norm.push_back(f.weight * T.norm() * grad_diag.norm());
      }
      const double scale = pairwise_sum(norm);
      if (scale <= 0.0) continue;
      const double r = std::max(std::abs(pairwise_sum(pairing)), std::abs(pairwise_sum(traceless))) / scale;
      out.residual = std::max(out.residual, r);
      out.scale = std::max(out.scale, scale);
    }
    return out;
  }

 private:
  Jet<1> evaluate(const Field& field, const Metric& m) const {
    if (const auto* profile = std::get_if<std::shared_ptr<const ProfileField>>(&field)) return (*profile)->at(m.t);
    const AmbientField& f = *std::get<std::shared_ptr<const AmbientField>>(field);
    const Eigen::VectorXd e1 = basis_.col(0);
    std::vector<Jet<1>> xj(static_cast<std::size_t>(n_ + 1));
    for (int i = 0; i <= n_; ++i) {
      Jet<1>& c = xj[static_cast<std::size_t>(i)];
      c.v = m.x(i);
      c.d(0) = m.p.dr * e1(i) + m.p.dz * axis_(i);
      c.dd(0, 0) = m.p.ddr * e1(i) + m.p.ddz * axis_(i);
    }
    const Jet<1> value = f(std::span<const Jet<1>>(xj));
    // Profile formulas assume a field constant on orbits.
    for (int j = 0; j < n_; ++j) {
      const Eigen::VectorXd y = m.p.r * (j == 0 ? Eigen::VectorXd(-e1) : Eigen::VectorXd(basis_.col(j))) + m.p.z * axis_;
      const double fy = f(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
      if (std::abs(fy - value.v) > 1e-9 * (1.0 + std::abs(value.v)))
        throw AsymmetryError("field is not rotationally symmetric about the profile axis");
    }
    return value;
  }

  int n_;
  SpaceForm space_;
  std::optional<Ball> ball_;
  std::shared_ptr<const ProfileCurve> curve_;
  Eigen::VectorXd axis_;
  Eigen::MatrixXd basis_;
  double orientation_ = 1.0;
};

}  // namespace freeform
