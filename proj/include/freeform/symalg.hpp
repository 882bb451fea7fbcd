#pragma once

// Pointwise algebra of principal curvatures.
//
// H_k is the k-th elementary symmetric polynomial of kappa (no binomial
// normalisation), T_m the m-th Newton tensor of the Weingarten map W = g^{-1} h
// and T°_m = T_m - (tr T_m / n) I its traceless part. All tensors here are
// mixed (1,1) unless stated otherwise.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "freeform/error.hpp"

namespace freeform {

/// (H_0, ..., H_n) by expanding prod_i (1 + kappa_i t).
inline Eigen::VectorXd mean_curvatures(const Eigen::VectorXd& kappa) {
  const Eigen::Index n = kappa.size();
  Eigen::VectorXd H = Eigen::VectorXd::Zero(n + 1);
  H(0) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j >= 1; --j) H(j) += kappa(i) * H(j - 1);
  return H;
}

/// kappa = c I up to max_i |kappa_i - mean| <= tol (1 + |mean|).
inline bool is_umbilic(const Eigen::VectorXd& kappa, double tol = 1e-9) {
  if (kappa.size() == 0) return true;
  const double mean = kappa.mean();
  return (kappa.array() - mean).abs().maxCoeff() <= tol * (1.0 + std::abs(mean));
}

/// Throws unless g W is symmetric to `tol` (relative to the size of g W).
inline void require_self_adjoint(const Eigen::MatrixXd& W, const Eigen::MatrixXd& g, double tol = 1e-10) {
  if (W.rows() != W.cols() || g.rows() != g.cols() || W.rows() != g.rows())
    throw DomainError("shape operator and metric must be square of equal size");
  const Eigen::MatrixXd gW = g * W;
  const double scale = std::max(1.0, gW.cwiseAbs().maxCoeff());
  if ((gW - gW.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw AsymmetryError("shape operator is not self-adjoint with respect to the metric");
}

/// Orthonormal-frame conjugate of a g-self-adjoint W: with g = L L^T this is L^T W L^{-T},
/// which equals L^{-1} h L^{-T} for h = g W.
inline Eigen::MatrixXd orthonormal_shape(const Eigen::MatrixXd& W, const Eigen::MatrixXd& g) {
  require_self_adjoint(W, g);
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw DegenerateError("metric is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd S = L.transpose() * W * L.transpose().inverse();
  return 0.5 * (S + S.transpose());
}

/// Eigenvalues of W (ascending); W is assumed g-self-adjoint.
inline Eigen::VectorXd principal_curvatures(const Eigen::MatrixXd& W, const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(orthonormal_shape(W, g), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Eigenvalues of a symmetric matrix (ascending).
inline Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// T_0, ..., T_{n-1} by T_m = H_m I - T_{m-1} W, with H taken from the
/// eigenvalues of W.
inline std::vector<Eigen::MatrixXd> newton_tensors(const Eigen::MatrixXd& W, const Eigen::MatrixXd& g) {
  const Eigen::VectorXd H = mean_curvatures(principal_curvatures(W, g));
  const Eigen::Index n = W.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  std::vector<Eigen::MatrixXd> T;
  T.reserve(static_cast<std::size_t>(n));
  T.push_back(I);
  for (Eigen::Index m = 1; m < n; ++m) T.push_back(H(m) * I - T.back() * W);
  return T;
}

/// Newton tensors of a symmetric matrix in an orthonormal frame, given its mean curvatures.
inline std::vector<Eigen::MatrixXd> newton_tensors_orthonormal(const Eigen::MatrixXd& S, const Eigen::VectorXd& H) {
  const Eigen::Index n = S.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  std::vector<Eigen::MatrixXd> T;
  T.reserve(static_cast<std::size_t>(n));
  T.push_back(I);
  for (Eigen::Index m = 1; m < n; ++m) T.push_back(H(m) * I - T.back() * S);
  return T;
}

/// T - (tr T / n) I.
inline Eigen::MatrixXd traceless_part(const Eigen::MatrixXd& T) {
  const Eigen::Index n = T.rows();
  return T - (T.trace() / static_cast<double>(n)) * Eigen::MatrixXd::Identity(n, n);
}

/// T_m - ((n - m) H_m / n) I.
inline Eigen::MatrixXd traceless_part(const Eigen::MatrixXd& T, double Hm, int m) {
  const Eigen::Index n = T.rows();
  return T - ((static_cast<double>(n - m) * Hm) / static_cast<double>(n)) * Eigen::MatrixXd::Identity(n, n);
}

struct ConeReport {
  int max_k = 0;                 // largest k with H_1..H_k > 0
  std::vector<bool> in_cone;     // in_cone[k-1] for k = 1..n
};

inline ConeReport cone_report(const Eigen::VectorXd& kappa) {
  const Eigen::VectorXd H = mean_curvatures(kappa);
  ConeReport report;
  const int n = static_cast<int>(kappa.size());
  report.in_cone.assign(static_cast<std::size_t>(n), false);
  bool inside = true;
  for (int k = 1; k <= n; ++k) {
    inside = inside && H(k) > 0.0;
    report.in_cone[static_cast<std::size_t>(k - 1)] = inside;
    if (inside) report.max_k = k;
  }
  return report;
}

struct MaclaurinCheck {
  double lhs = 0.0;    // (n-k)/n H_1 H_k
  double rhs = 0.0;    // (k+1) H_{k+1}
  double slack = 0.0;  // lhs - rhs
  bool umbilic = false;
};

/// Newton-MacLaurin inequality (n-k)/n H_1 H_k >= (k+1) H_{k+1} on the cone Gamma_k^+.
inline MaclaurinCheck newton_maclaurin_check(const Eigen::VectorXd& kappa, int k) {
  const int n = static_cast<int>(kappa.size());
  if (k < 1 || k > n - 1) throw DomainError("Newton-MacLaurin order must lie in [1, n-1]");
  if (cone_report(kappa).max_k < k) throw ConeError("curvature vector is outside the Garding cone");
  const Eigen::VectorXd H = mean_curvatures(kappa);
  MaclaurinCheck c;
  c.lhs = (static_cast<double>(n - k) / n) * H(1) * H(k);
  c.rhs = (k + 1.0) * H(k + 1);
  c.slack = c.lhs - c.rhs;
  c.umbilic = is_umbilic(kappa);
  return c;
}

/// (V S - V_nu I)(H I - S) in an orthonormal frame, S the symmetric shape matrix.
/// Equals Delta V g - Hess V + V Ric for potentials with Hess_ambient V = -K V g.
inline Eigen::MatrixXd substatic_tensor_orthonormal(const Eigen::MatrixXd& S, double V, double V_nu) {
  const Eigen::Index n = S.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd P = (V * S - V_nu * I) * (S.trace() * I - S);
  return 0.5 * (P + P.transpose());
}

/// Same tensor with lowered indices in a chart: (V h - V_nu g) g^{-1} (H g - h), h = g W.
inline Eigen::MatrixXd substatic_tensor(const Eigen::MatrixXd& W, const Eigen::MatrixXd& g, double V, double V_nu) {
  require_self_adjoint(W, g);
  const Eigen::MatrixXd h = g * W;
  const double H = W.trace();
  const Eigen::MatrixXd P = (V * h - V_nu * g) * g.inverse() * (H * g - h);
  return 0.5 * (P + P.transpose());
}

/// Ricci tensor of a hypersurface in a space form from the Gauss equation, orthonormal frame.
inline Eigen::MatrixXd gauss_ricci_orthonormal(const Eigen::MatrixXd& S, int K) {
  const Eigen::Index n = S.rows();
  return S.trace() * S - S * S + static_cast<double>((n - 1) * K) * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace freeform
