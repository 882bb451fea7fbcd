#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include "freeform/immersion.hpp"
#include "freeform/symalg.hpp"

namespace freeform {

/// Map from the closed unit disk of R^2 into model coordinates, with jets.
class ChartMap {
 public:
  virtual ~ChartMap() = default;
  virtual int ambient_dim() const = 0;
  /// Components of X(p) with first and second derivatives in p.
  virtual std::vector<Jet<2>> operator()(const Eigen::Vector2d& p) const = 0;
  virtual bool finite_difference() const { return false; }
};

/// Chart map from a generic lambda `[](std::span<const T> p) -> std::vector<T>`.
template <class F>
class JetChartMap final : public ChartMap {
 public:
  JetChartMap(int ambient, F f) : ambient_(ambient), f_(std::move(f)) {}
  int ambient_dim() const override { return ambient_; }
  std::vector<Jet<2>> operator()(const Eigen::Vector2d& p) const override {
    const std::array<Jet<2>, 2> pj{Jet<2>::variable(p(0), 0), Jet<2>::variable(p(1), 1)};
    std::vector<Jet<2>> X = f_(std::span<const Jet<2>>(pj));
    if (static_cast<int>(X.size()) != ambient_) throw DomainError("chart map returned the wrong number of components");
    return X;
  }

 private:
  int ambient_;
  F f_;
};

template <class F>
std::shared_ptr<const ChartMap> make_chart_map(int ambient, F f) {
  return std::make_shared<JetChartMap<F>>(ambient, std::move(f));
}

/// Plain map whose derivatives come from central differences (step 1e-4).
///
/// The map is sampled up to one step outside the unit disk.
class FiniteDifferenceChartMap final : public ChartMap {
 public:
  using Map = std::function<Eigen::VectorXd(const Eigen::Vector2d&)>;
  FiniteDifferenceChartMap(int ambient, Map map, double step = 1e-4)
      : ambient_(ambient), map_(std::move(map)), step_(step) {}

  int ambient_dim() const override { return ambient_; }
  bool finite_difference() const override { return true; }

  std::vector<Jet<2>> operator()(const Eigen::Vector2d& p) const override {
    const double s = step_;
    const auto at = [&](double a, double b) { return map_(p + Eigen::Vector2d(a, b)); };
    const Eigen::VectorXd c = at(0, 0);
    const Eigen::VectorXd xp = at(s, 0), xm = at(-s, 0), yp = at(0, s), ym = at(0, -s);
    const Eigen::VectorXd pp = at(s, s), pm = at(s, -s), mp = at(-s, s), mm = at(-s, -s);
    std::vector<Jet<2>> X(static_cast<std::size_t>(ambient_));
    for (int i = 0; i < ambient_; ++i) {
      Jet<2>& J = X[static_cast<std::size_t>(i)];
      J.v = c(i);
      J.d(0) = (xp(i) - xm(i)) / (2.0 * s);
      J.d(1) = (yp(i) - ym(i)) / (2.0 * s);
      J.dd(0, 0) = (xp(i) - 2.0 * c(i) + xm(i)) / (s * s);
      J.dd(1, 1) = (yp(i) - 2.0 * c(i) + ym(i)) / (s * s);
      J.dd(0, 1) = J.dd(1, 0) = (pp(i) - pm(i) - mp(i) + mm(i)) / (4.0 * s * s);
    }
    return X;
  }

 private:
  int ambient_;
  Map map_;
  double step_;
};

/// Surface (n = 2) parametrised over the closed unit disk; the boundary of the
/// disk maps to the boundary of the surface.
class ChartImmersion final : public Immersion {
 public:
  /// Chart quantities at one point.
  struct ChartData {
    std::vector<Jet<2>> X;
    Eigen::VectorXd x, flat_normal;
    Eigen::MatrixXd tangents;
    Eigen::Matrix2d g, g_inv, h;
    std::array<Eigen::Matrix2d, 2> dg;     // dg[k](i,j) = d_k g_ij
    std::array<Eigen::Matrix2d, 2> gamma;  // gamma[l](i,j) = Gamma^l_ij
    double conformal = 1.0;
  };

  /// orientation: +1 keeps X_1 x X_2 (generalised cross product), -1 flips it,
  /// 0 picks the one with integral of H >= 0.
  ChartImmersion(const SpaceForm& space, std::optional<Ball> ball, std::shared_ptr<const ChartMap> map,
                 int orientation = 0, std::optional<Eigen::VectorXd> axis = std::nullopt)
      : space_(space), ball_(std::move(ball)), map_(std::move(map)), axis_(std::move(axis)) {
    if (map_->ambient_dim() != 3) throw DomainError("full charts are two-dimensional surfaces in 3-space");
    if (orientation != 0) {
      orientation_ = orientation > 0 ? 1.0 : -1.0;
    } else {
      const double total = integrate(*this, QuadratureSpec{}, [](const PointFrame& f) { return f.mean_curvature(); });
      orientation_ = total < 0.0 ? -1.0 : 1.0;
    }
  }

  int dim() const override { return 2; }
  const SpaceForm& space() const override { return space_; }
  const std::optional<Ball>& ball() const override { return ball_; }
  bool closed() const override { return false; }
  bool rotational() const override { return false; }
  bool finite_difference() const override { return map_->finite_difference(); }
  std::string route() const override { return "chart"; }
  Eigen::VectorXd axis() const override {
    if (!axis_) throw UnsupportedError("chart has no rotation axis");
    return *axis_;
  }

  ChartData data(const Eigen::Vector2d& p) const {
    ChartData d;
    d.X = (*map_)(p);
    const int m = 3;
    d.x.resize(m);
    d.tangents.resize(m, 2);
    std::array<Eigen::Vector3d, 4> second;  // X_00, X_01, X_11 (index 3 unused)
    for (int c = 0; c < m; ++c) {
      const Jet<2>& J = d.X[static_cast<std::size_t>(c)];
      d.x(c) = J.v;
      d.tangents(c, 0) = J.d(0);
      d.tangents(c, 1) = J.d(1);
      second[0](c) = J.dd(0, 0);
      second[1](c) = J.dd(0, 1);
      second[2](c) = J.dd(1, 1);
    }
    space_.require_admissible(d.x);
    const auto Xij = [&](int i, int j) -> const Eigen::Vector3d& { return second[static_cast<std::size_t>(i + j)]; };
    d.flat_normal = orientation_ * detail::cofactor_normal(d.tangents);
    d.conformal = space_.conformal_factor(d.x);
    const double e2u = d.conformal * d.conformal;
    const Eigen::VectorXd grad_u = space_.log_factor_gradient(d.x);
    const double dNu = grad_u.dot(d.flat_normal);
    Eigen::Matrix2d gf, hf;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        gf(i, j) = d.tangents.col(i).dot(d.tangents.col(j));
        hf(i, j) = -d.flat_normal.dot(Xij(i, j));
      }
    d.g = e2u * gf;
    if (!(d.g.determinant() > 0.0)) throw DegenerateError("induced metric is singular");
    d.g_inv = d.g.inverse();
    d.h = d.conformal * (hf + dNu * gf);
    for (int k = 0; k < 2; ++k) {
      const double du_k = grad_u.dot(d.tangents.col(k));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          d.dg[k](i, j) = 2.0 * du_k * d.g(i, j) +
                          e2u * (Xij(i, k).dot(d.tangents.col(j)) + d.tangents.col(i).dot(Xij(j, k)));
    }
    for (int l = 0; l < 2; ++l)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double s = 0.0;
          for (int q = 0; q < 2; ++q) s += d.g_inv(l, q) * (d.dg[i](j, q) + d.dg[j](i, q) - d.dg[q](i, j));
          d.gamma[l](i, j) = 0.5 * s;
        }
    return d;
  }

  PointFrame frame_at(const Eigen::VectorXd& chart) const override {
    if (chart.size() != 2 || chart.norm() > 1.0 + 1e-12) throw DomainError("chart point must lie in the closed unit disk");
    const ChartData d = data(chart);
    PointFrame f;
    f.n = 2;
    f.chart = chart;
    f.position = d.x;
    f.conformal = d.conformal;
    f.flat_normal = d.flat_normal;
    f.normal = d.flat_normal / d.conformal;
    f.tangents = d.tangents;
    f.g = d.g;
    f.g_inv = d.g_inv;
    f.h = 0.5 * (d.h + d.h.transpose());
    detail::fill_orthonormal(f);
    return f;
  }

  std::vector<PointFrame> nodes(const QuadratureSpec& spec) const override {
    const Rule1D radial = composite_rule(0.0, 1.0, spec);
    const int M = spec.angular_points();
    const double dtheta = 2.0 * std::numbers::pi / M;
    std::vector<PointFrame> out;
    out.reserve(radial.nodes.size() * static_cast<std::size_t>(M));
    for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
      const double s = radial.nodes[i];
      for (int j = 0; j < M; ++j) {
        const double theta = dtheta * (j + 0.5);
        PointFrame f = frame_at(Eigen::Vector2d(s * std::cos(theta), s * std::sin(theta)));
        f.weight = radial.weights[i] * s * dtheta * std::sqrt(f.g.determinant());
        out.push_back(std::move(f));
      }
    }
    return out;
  }

  std::vector<BoundaryFrame> boundary_nodes(const QuadratureSpec& spec) const override {
    if (!has_boundary()) return {};
    const int M = spec.angular_points();
    const double dtheta = 2.0 * std::numbers::pi / M;
    std::vector<BoundaryFrame> out;
    out.reserve(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
      BoundaryFrame b = boundary_frame(dtheta * j);
      b.weight *= dtheta;
      out.push_back(std::move(b));
    }
    return out;
  }

  BoundaryFrame boundary_frame(double theta) const override {
    const Eigen::Vector2d p(std::cos(theta), std::sin(theta));
    const Eigen::Vector2d T(-std::sin(theta), std::cos(theta));
    const ChartData d = data(p);
    BoundaryFrame b;
    b.interior = frame_at(p);
    b.chart = p;
    b.position = d.x;
    const Eigen::Vector2d mu = conormal_chart(d, p);
    const double gamma = T.dot(d.g * T);
    const Eigen::Matrix2d Einv = b.interior.frame.inverse();
    b.conormal = d.tangents * mu;
    b.normal = b.interior.normal;
    detail::complete_boundary_normals(b, d.conformal);
    b.tangents = d.tangents * T / std::sqrt(gamma);
    b.conormal_frame = Einv * mu;
    b.tangent_frame = Einv * T / std::sqrt(gamma);
    Eigen::Vector2d accel = -p;
    for (int l = 0; l < 2; ++l) accel(l) += T.dot(d.gamma[l] * T);
    const double hb = -mu.dot(d.g * accel) / gamma;
    b.shape = Eigen::MatrixXd::Constant(1, 1, hb);
    b.mean_curvature = hb;
    b.weight = std::sqrt(gamma);
    return b;
  }

  LocalJet local_jet(const Field& field, const PointFrame& frame) const override {
    const ChartData d = data(frame.chart);
    const Jet<2> f = evaluate(field, d);
    Eigen::Matrix2d hess = f.dd;
    for (int l = 0; l < 2; ++l) hess -= f.d(l) * d.gamma[l];
    LocalJet j;
    j.value = f.v;
    j.grad = frame.frame.transpose() * Eigen::Vector2d(f.d);
    j.hess = frame.frame.transpose() * hess * frame.frame;
    j.hess = 0.5 * (j.hess + j.hess.transpose());
    j.normal = directional_derivative(ambient(field), frame.position, frame.normal);
    return j;
  }

  BoundaryJet boundary_jet(const Field& field, const BoundaryFrame& frame) const override {
    const Eigen::Vector2d p = frame.chart;
    const Eigen::Vector2d T(-p(1), p(0));
    const ChartData d = data(p);
    const Jet<2> f = evaluate(field, d);
    const Eigen::Vector2d df = f.d;
    const double gamma = T.dot(d.g * T);
    double dgamma = 2.0 * T.dot(d.g * (-p));
    for (int k = 0; k < 2; ++k) dgamma += T(k) * T.dot(d.dg[k] * T);
    const double f_t = df.dot(T);
    const double f_tt = T.dot(f.dd * T) - df.dot(p);
    BoundaryJet j;
    j.value = f.v;
    j.conormal = df.dot(conormal_chart(d, p));
    j.grad = Eigen::VectorXd::Constant(1, f_t / std::sqrt(gamma));
    j.laplacian = f_tt / gamma - f_t * dgamma / (2.0 * gamma * gamma);
    j.normal = directional_derivative(ambient(field), frame.position, frame.normal);
    return j;
  }

  DivergenceResidual weak_divergence(int m, const QuadratureSpec& spec) const override {
    if (m < 0 || m > 1) throw DomainError("Newton tensor order must lie in [0, n-1]");
    if (m == 0) return {};
    // Test fields X = b(|p|) q(p), b supported on the annulus 1/4 < |p| < 3/4.
    constexpr double lo = 0.25, hi = 0.75;
    const std::vector<PointFrame> frames = nodes(spec);
    DivergenceResidual out;
    for (int variant = 0; variant < 4; ++variant) {
      std::vector<double> pairing, traceless, norm;
      for (const PointFrame& f : frames) {
        const Eigen::Vector2d p = f.chart;
        const double s = p.norm();
        if (!(s > lo && s < hi)) continue;
        const double q = 16.0 * (s - lo) * (hi - s);
        const double b = q * q * q;
        const double db = 3.0 * q * q * 16.0 * (lo + hi - 2.0 * s);
        Eigen::Vector2d v;
        Eigen::Matrix2d dv;  // dv(j,i) = d_i v^j
        switch (variant) {
          case 0: v << 1, 0; dv.setZero(); break;
          case 1: v << 0, 1; dv.setZero(); break;
          case 2: v << -p(1), p(0); dv << 0, -1, 1, 0; break;
          default: v = p; dv.setIdentity(); break;
        }
        const ChartData d = data(p);
        const Eigen::Vector2d X = b * v;
        Eigen::Matrix2d D = v * (db * p / s).transpose() + b * dv;
        for (int j = 0; j < 2; ++j)
          for (int i = 0; i < 2; ++i) D(j, i) += d.gamma[j].row(i).dot(X);
        const Eigen::VectorXd H = mean_curvatures(f.kappa);
        const Eigen::MatrixXd To = newton_tensors_orthonormal(f.shape, H)[1];
        const Eigen::MatrixXd Tc = traceless_part(To, H(1), 1);
        const Eigen::Matrix2d Einv = f.frame.inverse();
        const Eigen::Matrix2d Do = Einv * D * f.frame;
        pairing.push_back(f.weight * (To * Do).trace());
        traceless.push_back(f.weight * ((Tc * Do).trace() + 0.5 * H(1) * D.trace()));
        norm.push_back(f.weight * To.norm() * Do.norm());
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
  static Eigen::Vector2d conormal_chart(const ChartData& d, const Eigen::Vector2d& p) {
    const Eigen::Vector2d up = d.g_inv * p;
    return up / std::sqrt(p.dot(up));
  }

  static const AmbientField& ambient(const Field& field) {
    const auto* a = std::get_if<std::shared_ptr<const AmbientField>>(&field);
    if (!a) throw UnsupportedError("profile fields need a rotationally symmetric immersion");
    return **a;
  }

  static Jet<2> evaluate(const Field& field, const ChartData& d) {
    return ambient(field)(std::span<const Jet<2>>(d.X));
  }

  SpaceForm space_;
  std::optional<Ball> ball_;
  std::shared_ptr<const ChartMap> map_;
  std::optional<Eigen::VectorXd> axis_;
  double orientation_ = 1.0;
};

}  // namespace freeform
