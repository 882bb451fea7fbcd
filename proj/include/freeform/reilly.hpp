#pragma once

// Weighted Reilly identity on a hypersurface, the Neumann problem with a
// Robin condition on profile shapes, and the inequality chain built from them.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include "freeform/diagnostics.hpp"
#include "freeform/functionals.hpp"
#include "freeform/immersion.hpp"
#include "freeform/profile_immersion.hpp"
#include "freeform/shapes.hpp"
#include "freeform/symalg.hpp"

namespace freeform {

/// Terms of the weighted Reilly identity
///   int V (A^2 - |A_ij|^2) = int P(Y, Y) + boundary_h + boundary_HN,
/// A_ij = f_ij - (V_ij / V) f, Y = grad f - (grad V / V) f, P = (Delta V) g - Hess V + V Ric.
struct ReillyLedger {
  double bulk_lhs = 0.0;
  double bulk_substatic = 0.0;
  double boundary_h = 0.0;
  double boundary_HN = 0.0;
  double residual = 0.0;  // bulk_lhs - (bulk_substatic + boundary_h + boundary_HN)
  double scale = 0.0;     // max of the absolute terms

  double discarded() const { return bulk_substatic + boundary_h + boundary_HN; }
  double relative() const { return scale > 0.0 ? std::abs(residual) / scale : std::abs(residual); }
};

namespace detail {

inline void require_positive(double V) {
  if (!(V > 0.0)) throw DomainError("weight V must be positive on the hypersurface");
}

inline Eigen::MatrixXd weighted_hessian(const LocalJet& f, const LocalJet& V) {
  return f.hess - (f.value / V.value) * V.hess;
}

}  // namespace detail

inline ReillyLedger reilly_residual(const Immersion& immersion, const Field& V, const Field& f,
                                    const QuadratureSpec& spec = {}) {
  const int K = immersion.space().K();
  std::vector<double> lhs, sub;
  for (const PointFrame& node : immersion.nodes(spec)) {
    const LocalJet v = immersion.local_jet(V, node);
    const LocalJet u = immersion.local_jet(f, node);
    detail::require_positive(v.value);
    const Eigen::MatrixXd Aij = detail::weighted_hessian(u, v);
    const double A = Aij.trace();
    lhs.push_back(node.weight * v.value * (A * A - Aij.squaredNorm()));
    const Eigen::MatrixXd P = v.laplacian() * Eigen::MatrixXd::Identity(node.n, node.n) - v.hess +
                              v.value * gauss_ricci_orthonormal(node.shape, K);
    const Eigen::VectorXd Y = u.grad - (u.value / v.value) * v.grad;
    sub.push_back(node.weight * Y.dot(P * Y));
  }
  ReillyLedger ledger;
  ledger.bulk_lhs = pairwise_sum(lhs);
  ledger.bulk_substatic = pairwise_sum(sub);
  if (immersion.has_boundary()) {
    std::vector<double> bh, bHN;
    for (const BoundaryFrame& b : immersion.boundary_nodes(spec)) {
      const BoundaryJet v = immersion.boundary_jet(V, b);
      const BoundaryJet u = immersion.boundary_jet(f, b);
      detail::require_positive(v.value);
      const double ratio = u.value / v.value;
      const Eigen::VectorXd Yt = u.grad - ratio * v.grad;
      const Eigen::MatrixXd form =
          b.shape - (v.conormal / v.value) * Eigen::MatrixXd::Identity(b.shape.rows(), b.shape.cols());
      bh.push_back(b.weight * v.value * Yt.dot(form * Yt));
      const double Z = u.conormal - (v.conormal / v.value) * u.value;
      bHN.push_back(b.weight * (v.value * b.mean_curvature * Z * Z +
                                2.0 * v.value * Z * (u.laplacian - (v.laplacian / v.value) * u.value)));
    }
    ledger.boundary_h = pairwise_sum(bh);
    ledger.boundary_HN = pairwise_sum(bHN);
  }
  ledger.residual = ledger.bulk_lhs - ledger.discarded();
  ledger.scale = std::max({std::abs(ledger.bulk_lhs), std::abs(ledger.bulk_substatic), std::abs(ledger.boundary_h),
                           std::abs(ledger.boundary_HN)});
  return ledger;
}

/// Relative Reilly residuals under quadrature refinement and the observed order.
struct ReillyConvergence {
  std::vector<double> residuals;  // relative residual at each level
  double order = std::numeric_limits<double>::infinity();  // infinite once the residual sits at roundoff
};

inline ReillyConvergence reilly_convergence(const Immersion& immersion, const Field& V, const Field& f,
                                            int order = 2, std::vector<int> levels = {1, 2, 3}) {
  constexpr double roundoff = 1e-13;
  ReillyConvergence c;
  for (int level : levels) c.residuals.push_back(reilly_residual(immersion, V, f, QuadratureSpec{order, level, 0}).relative());
  for (std::size_t i = 0; i + 1 < c.residuals.size(); ++i) {
    const double coarse = c.residuals[i], fine = c.residuals[i + 1];
    if (coarse <= roundoff) break;
    const double rate = std::log2(coarse / std::max(fine, roundoff)) / (levels[i + 1] - levels[i]);
    c.order = std::min(c.order, rate);
  }
  return c;
}

/// Even Chebyshev expansion f(t) = sum_j c_j T_{2j}(t) on the profile interval.
class ChebyshevProfileField final : public ProfileField {
 public:
  explicit ChebyshevProfileField(Eigen::VectorXd coefficients) : c_(std::move(coefficients)) {}

  Jet<1> at(double t) const override {
    const Eigen::Matrix3Xd B = basis(t, c_.size());
    Jet<1> j(B.row(0).dot(c_));
    j.d(0) = B.row(1).dot(c_);
    j.dd(0, 0) = B.row(2).dot(c_);
    return j;
  }

  const Eigen::VectorXd& coefficients() const { return c_; }

  /// Rows: T_{2j}(t), T_{2j}'(t), T_{2j}''(t) for j < count.
  static Eigen::Matrix3Xd basis(double t, Eigen::Index count) {
    const Eigen::Index top = 2 * count;
    Eigen::Matrix3Xd all(3, top + 1);
    all.col(0) << 1.0, 0.0, 0.0;
    if (top >= 1) all.col(1) << t, 1.0, 0.0;
    for (Eigen::Index m = 1; m < top; ++m) {
      all(0, m + 1) = 2.0 * t * all(0, m) - all(0, m - 1);
      all(1, m + 1) = 2.0 * all(0, m) + 2.0 * t * all(1, m) - all(1, m - 1);
      all(2, m + 1) = 4.0 * all(1, m) + 2.0 * t * all(2, m) - all(2, m - 1);
    }
    Eigen::Matrix3Xd even(3, count);
    for (Eigen::Index j = 0; j < count; ++j) even.col(j) = all.col(2 * j);
    return even;
  }

 private:
  Eigen::VectorXd c_;
};

struct NeumannSolution {
  std::shared_ptr<const ChebyshevProfileField> field;
  int k = 1;
  int modes = 0;
  double mean = 0.0;      // weighted average of H_k
  double residual = 0.0;  // max PDE residual between collocation nodes, relative to `scale`
  double scale = 0.0;     // max |H_k - mean| with a small floor
  double robin = 0.0;     // |f_mu - (V_mu / V) f| at the contact
};

/// Solves  Delta f - (Delta V / V) f = H_k - avg_V H_k  with  f_mu = (V_mu / V) f  on the boundary
/// and  int V f = 0,  for V = 1 or an axis-aligned V_a on a rotational free-boundary shape.
///
/// Even Chebyshev collocation in the profile parameter keeps f smooth across the axis.
/// The discrete system is overdetermined by the Robin and normalisation rows and solved
/// in the least-squares sense; the expansion is enlarged until the residual drops below 1e-9.
inline NeumannSolution solve_neumann(const Immersion& immersion, int k, const std::optional<Potential>& weight = std::nullopt,
                                     const QuadratureSpec& spec = {}) {
  const auto* profile = dynamic_cast<const ProfileImmersion*>(&immersion);
  if (profile == nullptr) throw UnsupportedError("Neumann solve needs a rotational profile shape");
  if (!immersion.has_boundary()) throw UnsupportedError("Neumann solve needs a free-boundary hypersurface");
  const int n = immersion.dim();
  if (k < 0 || k > n) throw DomainError("order k must lie in [0, n]");
  if (weight && std::abs(std::abs(weight->direction().dot(profile->axis())) - 1.0) > 1e-12)
    throw AsymmetryError("potential must be aligned with the rotation axis");
  const Field V = weight ? Field(potential_field(*weight)) : Field(constant_field(1.0));

  const double mean = average_hk(immersion, k, weight, spec);
  const std::vector<PointFrame> quad = immersion.nodes(spec);
  std::vector<double> quad_weight;
  double mass = 0.0;
  for (const PointFrame& node : quad) {
    const double v = immersion.local_jet(V, node).value;
    detail::require_positive(v);
    quad_weight.push_back(node.weight * v);
    mass += node.weight * v;
  }

  struct Row {
    double t, a2, a1, a0, rhs;
  };
  // Coefficients of f'', f', f in the reduced operator at parameter t.
  const auto operator_row = [&](double t) {
    const ProfileImmersion::Metric m = profile->metric(t);
    const PointFrame node = immersion.frame_at(Eigen::VectorXd::Constant(1, t));
    const LocalJet v = immersion.local_jet(V, node);
    Row r;
    r.t = t;
    r.a2 = 1.0 / (m.sigma * m.sigma);
    r.a1 = -m.dsigma / (m.sigma * m.sigma * m.sigma) + (n - 1) * m.drho / (m.sigma * m.sigma * m.rho);
    r.a0 = -v.laplacian() / v.value;
    r.rhs = mean_curvatures(node.kappa)(k) - mean;
    return r;
  };

  const BoundaryFrame boundary = immersion.boundary_frame(0.0);
  const BoundaryJet vb = immersion.boundary_jet(V, boundary);
  const double sigma1 = profile->metric(1.0).sigma;
  const double robin_ratio = vb.conormal / vb.value;

  NeumannSolution best;
  best.k = k;
  best.mean = mean;
  best.residual = std::numeric_limits<double>::infinity();
  for (int N : {12, 16, 24, 32, 48, 64, 96}) {
    std::vector<Row> rows;
    double rhs_max = 0.0;
    for (int i = 0; i < N; ++i) {
      rows.push_back(operator_row(std::cos(std::numbers::pi * (2 * i + 1) / (4.0 * N))));
      rhs_max = std::max(rhs_max, std::abs(rows.back().rhs));
    }
    Eigen::MatrixXd M(N + 2, N);
    Eigen::VectorXd b(N + 2);
    double row_scale = 0.0;
    for (int i = 0; i < N; ++i) {
      const Row& r = rows[static_cast<std::size_t>(i)];
      const Eigen::Matrix3Xd B = ChebyshevProfileField::basis(r.t, N);
      M.row(i) = r.a2 * B.row(2) + r.a1 * B.row(1) + r.a0 * B.row(0);
      b(i) = r.rhs;
      row_scale = std::max(row_scale, M.row(i).cwiseAbs().maxCoeff());
    }
    const Eigen::Matrix3Xd B1 = ChebyshevProfileField::basis(1.0, N);
    Eigen::RowVectorXd robin = B1.row(1) / sigma1 - robin_ratio * B1.row(0);
    Eigen::RowVectorXd normal = Eigen::RowVectorXd::Zero(N);
    for (std::size_t q = 0; q < quad.size(); ++q)
      normal += (quad_weight[q] / mass) * ChebyshevProfileField::basis(quad[q].chart(0), N).row(0);
    M.row(N) = robin * (row_scale / std::max(robin.cwiseAbs().maxCoeff(), 1e-300));
    b(N) = 0.0;
    M.row(N + 1) = normal * (row_scale / std::max(normal.cwiseAbs().maxCoeff(), 1e-300));
    b(N + 1) = 0.0;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    if (qr.rank() < N) throw SolverError("reduced Neumann system is rank deficient");
    const Eigen::VectorXd c = qr.solve(b);

    auto field = std::make_shared<const ChebyshevProfileField>(c);
    const double scale = std::max(rhs_max, 1e-10 * (1.0 + std::abs(mean)));
    double residual = 0.0;
    for (int i = 0; i < 4 * N; ++i) {
      const double t = (i + 0.5) / (4.0 * N);
      const Row r = operator_row(t);
      const Jet<1> fj = field->at(t);
      residual = std::max(residual, std::abs(r.a2 * fj.dd(0, 0) + r.a1 * fj.d(0) + r.a0 * fj.v - r.rhs));
    }
    residual /= scale;
    if (residual < best.residual) {
      const Jet<1> f1 = field->at(1.0);
      best.field = field;
      best.modes = N;
      best.residual = residual;
      best.scale = scale;
      best.robin = std::abs(f1.d(0) / sigma1 - robin_ratio * f1.v);
    }
    if (best.residual <= 1e-9) break;
  }
  return best;
}

/// Replay of the estimates that lead from the Neumann solution to the main inequality.
///   (a) int V (H_k - avg)^2 = -(n / (n-k)) int V <T°_k, A°>
///   (b) slack = (n-1)/n int V A^2 - int V |A°|^2 equals the discarded Reilly terms, and is >= 0
///   (c) combining both with Cauchy-Schwarz yields  int V A^2 <= n(n-1)/(n-k)^2 int V |T°_k|^2
struct ProofChainLedger {
  double identity_lhs = 0.0, identity_rhs = 0.0, identity_residual = 0.0;
  double slack = 0.0, discarded = 0.0, slack_residual = 0.0;
  double chain_lhs = 0.0, chain_rhs = 0.0;
  double main_lhs = 0.0, main_rhs = 0.0, lhs_mismatch = 0.0, rhs_mismatch = 0.0;
  ReillyLedger reilly;
  bool slack_nonnegative = true;
  bool chain_holds = true;
};

namespace detail {

inline double relative_gap(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace detail

inline ProofChainLedger proof_chain_check(const Immersion& immersion, int k, const std::optional<Potential>& weight,
                                          const NeumannSolution& solution, const QuadratureSpec& spec = {},
                                          const Tolerances& tol = {}) {
  const int n = immersion.dim();
  detail::require_order(n, k);
  const Field V = weight ? Field(potential_field(*weight)) : Field(constant_field(1.0));
  const Field f = std::shared_ptr<const ProfileField>(solution.field);
  std::vector<double> id_lhs, id_rhs, A2, A0, T2;
  for (const PointFrame& node : immersion.nodes(spec)) {
    const LocalJet v = immersion.local_jet(V, node);
    const LocalJet u = immersion.local_jet(f, node);
    detail::require_positive(v.value);
    const Eigen::MatrixXd Aij = detail::weighted_hessian(u, v);
    const double A = Aij.trace();
    const Eigen::MatrixXd Ac = traceless_part(Aij);
    const Eigen::VectorXd H = mean_curvatures(node.kappa);
    const Eigen::MatrixXd Tc = traceless_part(newton_tensors_orthonormal(node.shape, H)[static_cast<std::size_t>(k)], H(k), k);
    const double w = node.weight * v.value;
    const double d = H(k) - solution.mean;
    id_lhs.push_back(w * d * d);
    id_rhs.push_back(w * (Tc.array() * Ac.array()).sum());
    A2.push_back(w * A * A);
    A0.push_back(w * Ac.squaredNorm());
    T2.push_back(w * Tc.squaredNorm());
  }
  ProofChainLedger L;
  L.identity_lhs = pairwise_sum(id_lhs);
  L.identity_rhs = -(double(n) / (n - k)) * pairwise_sum(id_rhs);
  const double a2 = pairwise_sum(A2), a0 = pairwise_sum(A0), t2 = pairwise_sum(T2);
  L.slack = (n - 1.0) / n * a2 - a0;
  L.reilly = reilly_residual(immersion, V, f, spec);
  L.discarded = L.reilly.discarded();
  L.chain_lhs = a2;
  L.chain_rhs = double(n) * (n - 1) / double((n - k) * (n - k)) * t2;

  const InequalityCheck main = check_main_inequality(immersion, k, weight, spec, tol);
  L.main_lhs = main.lhs;
  L.main_rhs = main.rhs;
  // Quantities that vanish on umbilic shapes are compared against a curvature-scale floor.
  const double floor = 1e-10 * std::max(1.0, std::abs(main.details.at("weight_mass")));
  L.identity_residual = detail::relative_gap(L.identity_lhs, L.identity_rhs, floor);
  L.slack_residual = detail::relative_gap(L.slack, L.discarded, floor);
  L.lhs_mismatch = detail::relative_gap(L.chain_lhs, L.main_lhs, floor);
  L.rhs_mismatch = detail::relative_gap(L.chain_rhs, L.main_rhs, floor);
  L.slack_nonnegative = L.slack >= -tol.abs - tol.rel * std::abs(a2);
  L.chain_holds = L.chain_lhs <= L.chain_rhs * (1.0 + tol.rel) + tol.abs;
  return L;
}

/// Sub-static tensor of (Sigma, g, V_a) three ways: from the intrinsic Hessian of V_a,
/// from the ambient relations for its Hessian and Laplacian, and from the factorisation
///   (V h - V_nu g)(H g - h).
struct SubstaticReport {
  double residual = 0.0;         // max entry |intrinsic - factorised| / (1 + |factorised|)
  double hessian_residual = 0.0;  // max entry of the intrinsic Hessian vs  -K V g - V_nu h
  double min_eigenvalue = std::numeric_limits<double>::infinity();
};

inline SubstaticReport substatic_consistency(const Immersion& immersion, const Potential& potential,
                                             const QuadratureSpec& spec = {}) {
  const int K = immersion.space().K();
  const Field V = potential_field(potential);
  SubstaticReport r;
  for (const PointFrame& node : immersion.nodes(spec)) {
    const LocalJet v = immersion.local_jet(V, node);
    const double Vn = detail::potential_normal_derivative(potential, node);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(node.n, node.n);
    const Eigen::MatrixXd ambient_hess = -K * v.value * I - Vn * node.shape;
    const double ambient_lap = -node.n * K * v.value - node.mean_curvature() * Vn;
    const Eigen::MatrixXd left = v.laplacian() * I - v.hess + v.value * gauss_ricci_orthonormal(node.shape, K);
    const Eigen::MatrixXd right = substatic_tensor_orthonormal(node.shape, v.value, Vn);
    const double hscale = 1.0 + ambient_hess.cwiseAbs().maxCoeff();
    r.hessian_residual = std::max({r.hessian_residual, (v.hess - ambient_hess).cwiseAbs().maxCoeff() / hscale,
                                  std::abs(v.laplacian() - ambient_lap) / (1.0 + std::abs(ambient_lap))});
    r.residual = std::max(r.residual, (left - right).cwiseAbs().maxCoeff() / (1.0 + right.cwiseAbs().maxCoeff()));
    r.min_eigenvalue = std::min(r.min_eigenvalue, symmetric_eigenvalues(right).minCoeff());
  }
  return r;
}

/// Compares the shape operator of the ball boundary sphere at the model point
/// R_model * direction, computed as a hypersurface, with (V_a)_N / V_a.
/// Returns max entry |h - ratio g| in an orthonormal frame.
inline double boundary_identity_residual(const Ball& ball, const Potential& potential, const Eigen::VectorXd& direction) {
  const auto patch = make_boundary_patch(ball, direction);
  const PointFrame f = patch->frame_at(Eigen::Vector2d::Zero());
  const double ratio = boundary_potential_ratio(potential, ball, f.position);
  return (f.shape - ratio * Eigen::MatrixXd::Identity(f.n, f.n)).cwiseAbs().maxCoeff();
}

}  // namespace freeform
