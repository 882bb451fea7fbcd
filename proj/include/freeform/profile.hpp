#pragma once

// Profile curves t -> (r(t), z(t)), t in [0, 1], of rotationally symmetric
// hypersurfaces X = r(t) w + z(t) a with w on the unit sphere of a^perp.
// r is odd and z even in t so the surface is smooth across the axis.

#include <cmath>
#include <numbers>
#include <vector>

namespace freeform {

struct ProfilePoint {
  double r = 0.0, dr = 0.0, ddr = 0.0;
  double z = 0.0, dz = 0.0, ddz = 0.0;
};

class ProfileCurve {
 public:
  virtual ~ProfileCurve() = default;
  virtual ProfilePoint at(double t) const = 0;
  /// True when t = 1 is a second axis point (closed hypersurface).
  virtual bool closed() const = 0;
};

/// Straight segment r = length t, z = 0.
class SegmentProfile final : public ProfileCurve {
 public:
  explicit SegmentProfile(double length) : length_(length) {}
  ProfilePoint at(double t) const override { return {length_ * t, length_, 0.0, 0.0, 0.0, 0.0}; }
  bool closed() const override { return false; }

 private:
  double length_;
};

/// Radius function R(phi) = rho (1 + eps sum_j c_j cos(j pi phi / phi_max) + b1 + b2 (phi / phi_max)^2).
struct RadialSeries {
  double rho = 1.0;
  double phi_max = std::numbers::pi;
  double epsilon = 0.0;
  std::vector<double> coefficients;
  double b1 = 0.0;
  double b2 = 0.0;

  /// R, dR/dphi, d^2R/dphi^2.
  void eval(double phi, double& R, double& dR, double& ddR) const {
    const double w = std::numbers::pi / phi_max;
    double s = 1.0 + b1 + b2 * square_ratio(phi);
    double ds = 2.0 * b2 * phi / (phi_max * phi_max);
    double dds = 2.0 * b2 / (phi_max * phi_max);
    for (std::size_t j = 0; j < coefficients.size(); ++j) {
      const double f = (static_cast<double>(j) + 1.0) * w;
      const double c = epsilon * coefficients[j];
      s += c * std::cos(f * phi);
      ds -= c * f * std::sin(f * phi);
      dds -= c * f * f * std::cos(f * phi);
    }
    R = rho * s;
    dR = rho * ds;
    ddR = rho * dds;
  }

 private:
  double square_ratio(double phi) const { return (phi / phi_max) * (phi / phi_max); }
};

/// Polar curve X(phi) = centre a + R(phi) (sin phi e - cos phi a), phi = phi_max t.
class PolarProfile final : public ProfileCurve {
 public:
  PolarProfile(double centre, RadialSeries series, bool closed)
      : centre_(centre), series_(std::move(series)), closed_(closed) {}

  ProfilePoint at(double t) const override {
    const double pm = series_.phi_max;
    const double phi = pm * t;
    double R, dR, ddR;
    series_.eval(phi, R, dR, ddR);
    const double s = std::sin(phi), c = std::cos(phi);
    ProfilePoint p;
    p.r = R * s;
    p.dr = pm * (dR * s + R * c);
    p.ddr = pm * pm * (ddR * s + 2.0 * dR * c - R * s);
    p.z = centre_ - R * c;
    p.dz = pm * (-dR * c + R * s);
    p.ddz = pm * pm * (-ddR * c + 2.0 * dR * s + R * c);
    return p;
  }
  bool closed() const override { return closed_; }

  double centre() const { return centre_; }
  const RadialSeries& series() const { return series_; }

 private:
  double centre_;
  RadialSeries series_;
  bool closed_;
};

}  // namespace freeform
