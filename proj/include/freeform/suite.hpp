#pragma once

// Verification suites over shape families, run with shape-level parallelism
// and an ordered reducer so that reports do not depend on the thread count.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "freeform/diagnostics.hpp"
#include "freeform/functionals.hpp"
#include "freeform/reilly.hpp"
#include "freeform/report.hpp"
#include "freeform/shapes.hpp"
#include "freeform/symalg.hpp"

namespace freeform {

inline constexpr const char* kVersion = "0.1.0";

/// A shape description could not be turned into a valid immersion.
class ShapeBuildError : public Error {
 public:
  using Error::Error;
};

/// Portable uniform draws from a 64-bit Mersenne twister.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double a = 0.0, double b = 1.0) {
    return a + (b - a) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
  }

  Eigen::VectorXd unit_vector(int dim) {
    for (;;) {
      Eigen::VectorXd v(dim);
      for (int i = 0; i < dim; ++i) v(i) = uniform(-1.0, 1.0);
      const double len = v.norm();
      if (len > 0.1 && len <= 1.0) return v / len;
    }
  }

 private:
  std::mt19937_64 engine_;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"thm1",  "thm4",  "cor-convex", "cor-lowdim",
                                                 "perez", "kwong", "reilly",     "identities"};
  return names;
}

inline const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names = {"caps", "disks", "perturbed", "closed", "file"};
  return names;
}

struct SuiteConfig {
  std::string suite = "thm1";
  std::string family;             // empty selects the suite default
  std::vector<ShapeSpec> shapes;  // family "file"
  std::vector<int> Ks = {-1, 0, 1};
  std::vector<int> ks;            // empty selects every admissible order
  std::vector<int> ns;            // empty selects the suite default
  int count = 10;
  std::uint64_t seed = 1;
  double R = 1.0;                 // geodesic radius of the ball (radius 1 is forced where the suite needs it)
  std::optional<Route> route;
  int which = 1;                  // corollary case (i) = 1, (ii) = 2
  QuadratureSpec quadrature;
  Tolerances tolerances;
  int threads = 0;                // 0 reads FREEFORM_THREADS, then the hardware

  bool euclidean_only() const { return suite == "cor-convex" || suite == "cor-lowdim" || suite == "perez"; }

  std::string effective_family() const {
    if (!family.empty()) return family;
    if (suite == "perez" || suite == "kwong") return "closed";
    if (suite == "reilly") return "perturbed";
    return "caps";
  }

  std::vector<int> effective_ns() const {
    if (!ns.empty()) return ns;
    if (suite == "cor-lowdim") return {which + 1};
    if (suite == "identities") return {2};
    return {2, 3};
  }

  std::vector<int> effective_Ks() const { return euclidean_only() ? std::vector<int>{0} : Ks; }

  void validate() const {
    if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
      throw ConfigError("unknown suite '" + suite + "'");
    const std::string fam = effective_family();
    if (std::find(family_names().begin(), family_names().end(), fam) == family_names().end())
      throw ConfigError("unknown family '" + fam + "'");
    if (fam == "file" && shapes.empty()) throw ConfigError("family 'file' needs at least one shape");
    if (Ks.empty()) throw ConfigError("curvature list is empty");
    for (int K : Ks)
      if (K < -1 || K > 1) throw ConfigError("curvature must be -1, 0 or 1");
    if (euclidean_only() && std::find(Ks.begin(), Ks.end(), 0) == Ks.end())
      throw ConfigError("suite '" + suite + "' is stated in Euclidean space");
    for (int n : effective_ns())
      if (n < 2 || n > 8) throw ConfigError("dimension n must lie in [2, 8]");
    for (int k : ks)
      if (k < 1) throw ConfigError("order k must be positive");
    if (count < 1) throw ConfigError("count must be positive");
    if (!(R > 0.0) || !std::isfinite(R)) throw ConfigError("ball radius must be positive");
    if (which != 1 && which != 2) throw ConfigError("corollary case must be i or ii");
    if (suite == "cor-lowdim")
      for (int n : effective_ns())
        if (n != which + 1) throw ConfigError("corollary case and dimension do not match");
    if (threads < 0) throw ConfigError("thread count must be nonnegative");
    quadrature.validate();
    tolerances.validate();
  }
};

inline int thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FREEFORM_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) throw ConfigError("FREEFORM_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// out[i] = fn(i) evaluated on up to `threads` workers; the first exception by index is rethrown.
template <class T>
std::vector<T> ordered_map(std::size_t count, int threads, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline std::shared_ptr<const Immersion> build_checked(const ShapeSpec& spec) {
  try {
    return build_shape(spec);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ShapeBuildError(std::string("shape construction failed: ") + e.what());
  }
}

inline std::vector<int> orders_for(const SuiteConfig& config, int n) {
  std::vector<int> out;
  if (config.ks.empty()) {
    for (int k = 1; k <= n - 1; ++k) out.push_back(k);
  } else {
    for (int k : config.ks)
      if (k <= n - 1) out.push_back(k);
  }
  return out;
}

namespace detail {

inline Route route_for(const SuiteConfig& config, int n) {
  if (config.route) return *config.route;
  return n == 2 ? Route::chart : Route::profile;
}

inline double ball_radius(const SuiteConfig& config) {
  return config.suite == "cor-lowdim" ? 1.0 : config.R;
}

/// Hypothesis gate a drawn perturbed shape must pass for the suite.
inline bool admissible_draw(const SuiteConfig& config, const Immersion& shape) {
  const std::vector<PointFrame> nodes = shape.nodes(config.quadrature);
  const Tolerances& tol = config.tolerances;
  std::optional<Potential> weight;
  if (config.suite == "thm4") weight = Potential(shape.space(), shape.axis());
  const Hypotheses h = evaluate_hypotheses(shape, nodes, weight, config.quadrature, tol);
  if (!h.satisfied) return false;
  if (config.suite == "thm4") return h.half_ball && h.substatic_min >= -tol.gate;
  if (config.suite == "cor-convex" || config.suite == "cor-lowdim") return h.convexity_min >= -tol.gate;
  return h.ricci_min >= -tol.gate;
}

inline std::vector<double> random_coefficients(Rng& rng) {
  std::vector<double> c(3);
  for (double& v : c) v = rng.uniform(-1.0, 1.0);
  return c;
}

}  // namespace detail

/// Seeded convex perturbations of caps (or of geodesic spheres when closed) passing the suite's gates.
inline std::vector<ShapeSpec> perturbed_family(const SuiteConfig& config, bool closed) {
  Rng rng(config.seed);
  const std::vector<int> Ks = config.effective_Ks();
  const std::vector<int> ns = config.effective_ns();
  std::vector<ShapeSpec> out;
  for (int i = 0; i < config.count; ++i) {
    const int K = Ks[static_cast<std::size_t>(i) % Ks.size()];
    const int n = ns[(static_cast<std::size_t>(i) / Ks.size()) % ns.size()];
    bool accepted = false;
    for (int attempt = 0; attempt < 500 && !accepted; ++attempt) {
      ShapeSpec s;
      s.K = K;
      s.n = n;
      s.coefficients = detail::random_coefficients(rng);
      double amplitude = 0.0;
      for (double c : s.coefficients) amplitude += std::abs(c);
      if (closed) {
        s.kind = "closed";
        s.R = rng.uniform(0.3, 1.5);
        s.epsilon = rng.uniform(0.005, 0.08) / amplitude;
      } else {
        s.kind = "profile";
        s.R = detail::ball_radius(config);
        const double Rm = radius_to_model(SpaceForm(K), s.R);
        s.rho = Rm * std::exp(rng.uniform(std::log(0.3), std::log(3.0)));
        s.epsilon = rng.uniform(0.0005, 0.012) / amplitude;
      }
      s.route = Route::profile;
      try {
        const auto shape = build_shape(s);
        accepted = detail::admissible_draw(config, *shape);
      } catch (const Error&) {
        accepted = false;
      }
      if (accepted) {
        if (!closed) s.route = detail::route_for(config, n);
        out.push_back(s);
      }
    }
    if (!accepted) throw ShapeBuildError("could not draw an admissible perturbed shape");
  }
  return out;
}

/// Shape list of a family; caps use ten radii from 0.2 to 5 times the model ball radius.
inline std::vector<ShapeSpec> family_shapes(const SuiteConfig& config) {
  const std::string fam = config.effective_family();
  if (fam == "file") return config.shapes;
  if (fam == "perturbed") return perturbed_family(config, false);
  std::vector<ShapeSpec> out;
  for (int K : config.effective_Ks()) {
    for (int n : config.effective_ns()) {
      ShapeSpec base;
      base.K = K;
      base.n = n;
      base.R = detail::ball_radius(config);
      base.route = detail::route_for(config, n);
      if (fam == "caps") {
        const double Rm = radius_to_model(SpaceForm(K), base.R);
        for (int i = 0; i < 10; ++i) {
          ShapeSpec s = base;
          s.kind = "cap";
          s.rho = Rm * std::exp(std::log(0.2) + i * std::log(25.0) / 9.0);
          out.push_back(s);
        }
      } else if (fam == "disks") {
        ShapeSpec s = base;
        s.kind = "disk";
        out.push_back(s);
      } else if (fam == "closed") {
        for (double r : {0.5, 1.0, 1.5}) {
          ShapeSpec s = base;
          s.kind = "closed";
          s.R = r;
          s.route = Route::profile;
          out.push_back(s);
        }
      }
    }
  }
  if (fam == "closed") {
    const std::vector<ShapeSpec> extra = perturbed_family(config, true);
    out.insert(out.end(), extra.begin(), extra.end());
  }
  return out;
}

/// Inequality records of one shape for the inequality suites.
inline std::vector<InequalityCheck> shape_checks(const SuiteConfig& config, const Immersion& shape) {
  const QuadratureSpec& q = config.quadrature;
  const Tolerances& tol = config.tolerances;
  const int n = shape.dim();
  std::vector<InequalityCheck> out;
  if (config.suite == "perez") {
    out.push_back(check_perez(shape, 1, q, tol));
    out.push_back(check_perez(shape, 2, q, tol));
    return out;
  }
  if (config.suite == "cor-lowdim") {
    out.push_back(check_corollary_low_dim(shape, config.which, q, tol));
    return out;
  }
  for (int k : orders_for(config, n)) {
    if (config.suite == "thm4") {
      Eigen::VectorXd a;
      try {
        a = shape.axis();
      } catch (const UnsupportedError&) {
        a = default_axis(n);
      }
      out.push_back(check_main_inequality(shape, k, Potential(shape.space(), a), q, tol));
    } else if (config.suite == "cor-convex") {
      out.push_back(check_convex_corollary(shape, k, q, tol));
    } else {
      out.push_back(check_main_inequality(shape, k, std::nullopt, q, tol));
    }
  }
  return out;
}

namespace detail {

/// Record reporting a residual against a tolerance: lhs = residual, rhs = tolerance.
inline InequalityCheck residual_check(const std::string& name, int n, int K, int k, double residual, double tolerance) {
  InequalityCheck c;
  c.name = name;
  c.n = n;
  c.K = K;
  c.k = k;
  c.lhs = residual;
  c.rhs = tolerance;
  c.ratio = residual / tolerance;
  c.status = residual <= tolerance ? Status::pass : Status::fail;
  return c;
}

}  // namespace detail

/// A random (shape, V, f) triple for the Reilly identity.
struct ReillyTriple {
  ShapeSpec shape;
  Field V;
  Field f;
  std::string weight_kind;
};

/// Rotationally symmetric fields are used on profile shapes, general cubic fields on charts.
inline ReillyTriple random_reilly_triple(Rng& rng, int K, int n, double R) {
  ReillyTriple t;
  ShapeSpec& s = t.shape;
  s.K = K;
  s.n = n;
  s.R = R;
  const double Rm = radius_to_model(SpaceForm(K), R);
  const int kind = static_cast<int>(rng.uniform(0.0, 3.0));
  s.kind = kind == 0 ? "cap" : (kind == 1 ? "disk" : "profile");
  s.rho = Rm * std::exp(rng.uniform(std::log(0.3), std::log(3.0)));
  s.coefficients = detail::random_coefficients(rng);
  double amplitude = 0.0;
  for (double c : s.coefficients) amplitude += std::abs(c);
  s.epsilon = rng.uniform(0.0005, 0.006) / amplitude;
  s.route = n == 2 && rng.uniform() < 0.5 ? Route::chart : Route::profile;
  const Eigen::VectorXd a = default_axis(n);
  std::array<double, 5> c{};
  for (double& v : c) v = rng.uniform(-1.0, 1.0);
  const double w1 = rng.uniform(-0.3, 0.3), w2 = rng.uniform(0.0, 0.2);
  const int vkind = static_cast<int>(rng.uniform(0.0, 3.0));
  if (s.route == Route::profile) {
    t.f = make_field([c, a](auto x) {
      using T = std::remove_cvref_t<decltype(x[0])>;
      T z(0.0), r2(0.0);
      for (std::size_t i = 0; i < x.size(); ++i) {
        z += a(static_cast<Eigen::Index>(i)) * x[i];
        r2 += x[i] * x[i];
      }
      return c[0] + c[1] * z + c[2] * z * z + c[3] * r2 + c[4] * z * r2;
    });
    t.V = make_field([w1, w2, a](auto x) {
      using T = std::remove_cvref_t<decltype(x[0])>;
      T z(0.0), r2(0.0);
      for (std::size_t i = 0; i < x.size(); ++i) {
        z += a(static_cast<Eigen::Index>(i)) * x[i];
        r2 += x[i] * x[i];
      }
      return 1.0 + w1 * z + w2 * r2;
    });
    t.weight_kind = "quadratic";
  } else {
    const Eigen::VectorXd b = rng.unit_vector(n + 1);
    Eigen::MatrixXd Q(n + 1, n + 1);
    for (Eigen::Index i = 0; i < Q.size(); ++i) Q.data()[i] = rng.uniform(-1.0, 1.0);
    t.f = make_field([c, b, Q](auto x) {
      using T = std::remove_cvref_t<decltype(x[0])>;
      T lin(0.0), quad(0.0);
      for (std::size_t i = 0; i < x.size(); ++i) {
        lin += b(static_cast<Eigen::Index>(i)) * x[i];
        for (std::size_t j = 0; j < x.size(); ++j)
          quad += Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[i] * x[j];
      }
      return c[0] + c[1] * lin + c[2] * quad + c[3] * lin * quad + c[4] * x[0] * x[1] * x[x.size() - 1];
    });
    const Eigen::VectorXd d = rng.unit_vector(n + 1);
    t.V = make_field([w1, w2, d](auto x) {
      using T = std::remove_cvref_t<decltype(x[0])>;
      T lin(0.0), r2(0.0);
      for (std::size_t i = 0; i < x.size(); ++i) {
        lin += d(static_cast<Eigen::Index>(i)) * x[i];
        r2 += x[i] * x[i];
      }
      return 1.0 + w1 * lin + w2 * r2;
    });
    t.weight_kind = "quadratic";
  }
  if (vkind == 0) {
    t.V = constant_field(1.0);
    t.weight_kind = "one";
  } else if (vkind == 1 && s.kind != "disk") {
    t.V = potential_field(Potential(SpaceForm(K), a));
    t.weight_kind = "potential";
  }
  return t;
}

namespace detail {

inline void apply_ledger(InequalityCheck& c, const ReillyLedger& L) {
  c.details["bulk_lhs"] = L.bulk_lhs;
  c.details["bulk_substatic"] = L.bulk_substatic;
  c.details["boundary_h"] = L.boundary_h;
  c.details["boundary_HN"] = L.boundary_HN;
  c.details["scale"] = L.scale;
}

inline std::vector<Record> reilly_witness(const SuiteConfig& config) {
  ShapeSpec s;
  s.kind = "disk";
  s.K = 0;
  s.n = 2;
  s.R = 1.0;
  s.route = Route::chart;
  const auto disk = build_checked(s);
  const auto f = make_field([](auto x) { return x[0] * x[0] + x[1] * x[1]; });
  const ReillyLedger L = reilly_residual(*disk, constant_field(1.0), f, config.quadrature);
  InequalityCheck c = residual_check("reilly-witness", 2, 0, 0, L.relative(), 1e-6);
  apply_ledger(c, L);
  c.details["expected"] = 8.0 * std::numbers::pi;
  return {Record{config.suite, s, c, config.quadrature}};
}

inline std::vector<Record> reilly_triple_record(const SuiteConfig& config, const ReillyTriple& t) {
  const auto shape = build_checked(t.shape);
  const ReillyLedger L = reilly_residual(*shape, t.V, t.f, config.quadrature);
  const ReillyConvergence conv = reilly_convergence(*shape, t.V, t.f);
  InequalityCheck c = residual_check("reilly", t.shape.n, t.shape.K, 0, L.relative(), 1e-6);
  apply_ledger(c, L);
  c.details["order"] = conv.order;
  c.details["coarse_residual"] = conv.residuals.front();
  c.details["fine_residual"] = conv.residuals.back();
  c.details["weight_is_potential"] = t.weight_kind == "potential" ? 1.0 : 0.0;
  if (conv.order < 2.0) c.status = Status::fail;
  return {Record{config.suite, t.shape, c, config.quadrature}};
}

inline std::vector<Record> proof_chain_records(const SuiteConfig& config, const ShapeSpec& spec, bool weighted) {
  ShapeSpec s = spec;
  s.route = Route::profile;
  const auto shape = build_checked(s);
  std::optional<Potential> weight;
  if (weighted) weight = Potential(shape->space(), shape->axis());
  std::vector<Record> out;
  for (int k : orders_for(config, s.n)) {
    const NeumannSolution sol = solve_neumann(*shape, k, weight, config.quadrature);
    const ProofChainLedger L = proof_chain_check(*shape, k, weight, sol, config.quadrature, config.tolerances);
    const InequalityCheck main = check_main_inequality(*shape, k, weight, config.quadrature, config.tolerances);
    InequalityCheck c = main;
    c.name = weighted ? "proof-chain-weighted" : "proof-chain";
    c.lhs = L.chain_lhs;
    c.rhs = L.chain_rhs;
    c.details["neumann_residual"] = sol.residual;
    c.details["neumann_modes"] = sol.modes;
    c.details["identity_lhs"] = L.identity_lhs;
    c.details["identity_rhs"] = L.identity_rhs;
    c.details["identity_residual"] = L.identity_residual;
    c.details["slack"] = L.slack;
    c.details["discarded"] = L.discarded;
    c.details["slack_residual"] = L.slack_residual;
    c.details["lhs_mismatch"] = L.lhs_mismatch;
    c.details["rhs_mismatch"] = L.rhs_mismatch;
    c.finalize(config.tolerances);
    const bool ledger_ok = sol.residual <= 1e-7 && L.identity_residual <= 1e-6 && L.slack_residual <= 1e-5 &&
                           L.lhs_mismatch <= 1e-6 && L.rhs_mismatch <= 1e-6;
    if (c.status == Status::pass && (!ledger_ok || !L.slack_nonnegative)) c.status = Status::fail;
    out.push_back(Record{config.suite, s, c, config.quadrature});
  }
  return out;
}

/// Shape-free algebra checks on seeded random curvature vectors.
inline std::vector<Record> algebra_records(const SuiteConfig& config) {
  Rng rng(config.seed);
  double trace = 0.0, traceless = 0.0, maclaurin = 0.0;
  for (int s = 0; s < 200; ++s) {
    const int n = 2 + s % 5;
    Eigen::VectorXd kappa(n);
    for (int i = 0; i < n; ++i) kappa(i) = rng.uniform(-2.0, 2.0);
    const Eigen::VectorXd H = mean_curvatures(kappa);
    const Eigen::MatrixXd S = kappa.asDiagonal();
    const auto T = newton_tensors_orthonormal(S, H);
    for (int m = 0; m < n; ++m)
      trace = std::max(trace, std::abs(T[static_cast<std::size_t>(m)].trace() - (n - m) * H(m)) / (1.0 + std::abs(H(m))));
    const Eigen::MatrixXd h0 = traceless_part(S);
    traceless = std::max(traceless, (traceless_part(T[1], H(1), 1) + h0).cwiseAbs().maxCoeff());
    const double c = rng.uniform(0.1, 3.0);
    for (int k = 1; k < n; ++k)
      maclaurin = std::max(maclaurin, std::abs(newton_maclaurin_check(Eigen::VectorXd::Constant(n, c), k).slack) /
                                          (1.0 + std::pow(c, k + 1)));
  }
  return {Record{config.suite, std::nullopt, residual_check("newton-trace", 0, 0, 0, trace, 1e-12), config.quadrature},
          Record{config.suite, std::nullopt, residual_check("traceless-first", 0, 0, 1, traceless, 1e-12), config.quadrature},
          Record{config.suite, std::nullopt, residual_check("maclaurin-umbilic", 0, 0, 0, maclaurin, 1e-12),
                 config.quadrature}};
}

inline std::vector<Record> boundary_identity_records(const SuiteConfig& config, int K) {
  Rng rng(config.seed + 1000u + static_cast<std::uint64_t>(K + 1));
  const SpaceForm space(K);
  const Ball ball(space, detail::ball_radius(config));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd a = rng.unit_vector(3);
    Eigen::VectorXd d = rng.unit_vector(3);
    if (d.dot(a) < 0.0) d = -d;
    if (d.dot(a) < 0.05) d = (d + 0.1 * a).normalized();
    worst = std::max(worst, boundary_identity_residual(ball, Potential(space, a), d));
  }
  return {Record{config.suite, std::nullopt, residual_check("boundary-identity", 2, K, 0, worst, 1e-10),
                 config.quadrature}};
}

/// Pointwise and integral identities on one shape.
inline std::vector<Record> shape_identity_records(const SuiteConfig& config, const ShapeSpec& spec) {
  const auto shape = build_checked(spec);
  const QuadratureSpec& q = config.quadrature;
  const int n = shape->dim(), K = shape->space().K();
  std::vector<Record> out;
  const auto add = [&](InequalityCheck c) { out.push_back(Record{config.suite, spec, std::move(c), q}); };
  const bool umbilic = spec.kind == "cap" || spec.kind == "disk";
  if (shape->has_boundary()) {
    const FreeBoundaryResidual fb = free_boundary_residual(*shape, q);
    add(residual_check("free-boundary-position", n, K, 0, fb.position, config.tolerances.position));
    add(residual_check("free-boundary-angle", n, K, 0, fb.angle, config.tolerances.angle));
    add(residual_check("principal-conormal", n, K, 0, principal_conormal_check(*shape, q), 1e-8));
  }
  if (spec.kind != "disk") {
    const SubstaticReport sub = substatic_consistency(*shape, Potential(shape->space(), shape->axis()), q);
    InequalityCheck c = residual_check("substatic", n, K, 0, std::max(sub.residual, sub.hessian_residual), 1e-8);
    c.details["min_eigenvalue"] = sub.min_eigenvalue;
    add(c);
  }
  for (int m = 0; m < n; ++m) {
    const DivergenceResidual d = divergence_free_check(*shape, m, q);
    InequalityCheck c = residual_check("divergence-free", n, K, m, d.residual, umbilic ? 1e-10 : 1e-8);
    c.details["scale"] = d.scale;
    add(c);
  }
  if (K == 0 && n == 2 && shape->has_boundary() && std::abs(spec.R - 1.0) < 1e-15 && shape->rotational()) {
    const double target = 2.0 * std::numbers::pi / 3.0;
    const Quermass W = quermassintegrals(*shape, q, config.tolerances);
    InequalityCheck c = residual_check("quermass-top", n, K, 3, std::abs(W.at(3) - target) / target, 1e-8);
    c.details["W3"] = W.at(3);
    add(c);
  }
  return out;
}

}  // namespace detail

struct ReportEnvelope {
  std::string version = kVersion;
  std::string suite;
  std::vector<Record> records;
  int pass = 0, fail = 0, inapplicable = 0;
  double wall_clock = 0.0;

  void count() {
    pass = fail = inapplicable = 0;
    for (const Record& r : records) {
      if (r.check.status == Status::pass) ++pass;
      else if (r.check.status == Status::fail) ++fail;
      else ++inapplicable;
    }
  }

  int exit_code() const { return fail > 0 ? 1 : 0; }

  json to_json(bool timing = true) const {
    json j;
    j["tool"] = "freeform";
    j["version"] = version;
    j["suite"] = suite;
    j["counts"] = {{"pass", pass}, {"fail", fail}, {"inapplicable", inapplicable}};
    if (timing) j["wall_clock"] = wall_clock;
    json recs = json::array();
    for (const Record& r : records) recs.push_back(record_to_json(r));
    j["records"] = recs;
    return j;
  }

  std::string to_csv() const {
    std::string out = "suite,check,n,K,k,lhs,rhs,ratio,status\n";
    for (const Record& r : records)
      out += r.suite + "," + r.check.name + "," + std::to_string(r.check.n) + "," + std::to_string(r.check.K) + "," +
             std::to_string(r.check.k) + "," + format_double(r.check.lhs) + "," + format_double(r.check.rhs) + "," +
             format_double(r.check.ratio) + "," + to_string(r.check.status) + "\n";
    return out;
  }
};

inline ReportEnvelope run_suite(const SuiteConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const int threads = thread_count(config.threads);
  std::vector<std::function<std::vector<Record>()>> tasks;

  if (config.suite == "reilly") {
    tasks.push_back([&config] { return detail::reilly_witness(config); });
    Rng rng(config.seed);
    const std::vector<int> Ks = config.effective_Ks();
    const std::vector<int> ns = config.effective_ns();
    for (int i = 0; i < config.count; ++i) {
      const int K = Ks[static_cast<std::size_t>(i) % Ks.size()];
      const int n = ns[(static_cast<std::size_t>(i) / Ks.size()) % ns.size()];
      ReillyTriple t = random_reilly_triple(rng, K, n, detail::ball_radius(config));
      tasks.push_back([&config, t] { return detail::reilly_triple_record(config, t); });
    }
    for (bool weighted : {false, true}) {
      SuiteConfig draw = config;
      draw.suite = weighted ? "thm4" : "thm1";
      draw.count = static_cast<int>(Ks.size() * ns.size());
      draw.seed = config.seed + (weighted ? 2u : 1u);
      draw.route = Route::profile;
      for (const ShapeSpec& s : perturbed_family(draw, false))
        tasks.push_back([&config, s, weighted] { return detail::proof_chain_records(config, s, weighted); });
    }
  } else if (config.suite == "identities") {
    tasks.push_back([&config] { return detail::algebra_records(config); });
    for (int K : config.effective_Ks()) tasks.push_back([&config, K] { return detail::boundary_identity_records(config, K); });
    SuiteConfig caps = config;
    caps.family = "caps";
    std::vector<ShapeSpec> shapes = family_shapes(caps);
    caps.family = "disks";
    for (const ShapeSpec& s : family_shapes(caps)) shapes.push_back(s);
    SuiteConfig draw = config;
    draw.suite = "thm1";
    draw.count = static_cast<int>(config.effective_Ks().size());
    for (const ShapeSpec& s : perturbed_family(draw, false)) shapes.push_back(s);
    for (const ShapeSpec& s : shapes) tasks.push_back([&config, s] { return detail::shape_identity_records(config, s); });
  } else {
    for (const ShapeSpec& s : family_shapes(config)) {
      tasks.push_back([&config, s] {
        const auto shape = build_checked(s);
        std::vector<Record> out;
        for (InequalityCheck& c : shape_checks(config, *shape)) out.push_back(Record{config.suite, s, std::move(c), config.quadrature});
        return out;
      });
    }
  }

  const auto chunks = ordered_map<std::vector<Record>>(tasks.size(), threads, [&](std::size_t i) { return tasks[i](); });
  ReportEnvelope env;
  env.suite = config.suite;
  for (const auto& chunk : chunks) env.records.insert(env.records.end(), chunk.begin(), chunk.end());
  env.count();
  env.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return env;
}

/// Parses "start:end:step" into the list start, start + step, ... up to end.
inline std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t colon = text.find(':', pos);
    const std::string piece = text.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos);
    char* end = nullptr;
    const double v = std::strtod(piece.c_str(), &end);
    if (piece.empty() || *end != '\0' || !std::isfinite(v)) throw ConfigError("malformed range '" + text + "'");
    parts.push_back(v);
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
    throw ConfigError("range must be start:end:step with step > 0 and end >= start");
  const long steps = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  if (steps > 100000) throw ConfigError("range has too many points");
  std::vector<double> out;
  for (long i = 0; i <= steps; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  return out;
}

/// Default base shape of a sweep: a Euclidean unit-ball profile with two gentle modes.
inline ShapeSpec default_sweep_shape(const std::string& kind, int n) {
  ShapeSpec s;
  s.kind = kind;
  s.n = n;
  s.K = 0;
  s.R = 1.0;
  s.rho = 1.0;
  s.coefficients = {0.03, -0.01};
  return s;
}

/// One record per epsilon, with the perturbation amplitude of `base` scaled by epsilon.
inline std::vector<SweepRow> sweep(const SuiteConfig& config, const ShapeSpec& base, const std::vector<double>& epsilons) {
  config.validate();
  if (config.suite == "reilly" || config.suite == "identities")
    throw ConfigError("sweeps run the inequality suites only");
  if (epsilons.empty()) throw ConfigError("epsilon range is empty");
  return ordered_map<SweepRow>(epsilons.size(), thread_count(config.threads), [&](std::size_t i) {
    ShapeSpec s = base;
    s.epsilon = epsilons[i];
    const auto shape = build_checked(s);
    SweepRow row;
    row.epsilon = epsilons[i];
    row.check = shape_checks(config, *shape).front();
    return row;
  });
}

/// Geometry summary of a shape.
inline json describe_shape(const ShapeSpec& spec, const QuadratureSpec& q = {}, const Tolerances& tol = {}) {
  q.validate();
  const auto shape = build_checked(spec);
  const std::vector<PointFrame> nodes = shape->nodes(q);
  const int n = shape->dim();
  const double area = integrate(nodes, [](const PointFrame&) { return 1.0; });
  json averages = json::array();
  for (int k = 0; k <= n; ++k) averages.push_back(number(average_hk(*shape, k, std::nullopt, q)));
  double kmin = std::numeric_limits<double>::infinity(), kmax = -kmin;
  for (const PointFrame& f : nodes) {
    kmin = std::min(kmin, f.kappa.minCoeff());
    kmax = std::max(kmax, f.kappa.maxCoeff());
  }
  std::optional<Potential> weight;
  try {
    weight = Potential(shape->space(), shape->axis());
  } catch (const UnsupportedError&) {
  }
  const Hypotheses h = evaluate_hypotheses(*shape, nodes, weight, q, tol);
  json j;
  j["shape"] = shape_to_json(spec);
  j["n"] = n;
  j["K"] = shape->space().K();
  j["route"] = shape->route();
  j["closed"] = shape->closed();
  j["finite_difference"] = shape->finite_difference();
  j["area"] = area;
  j["boundary_length"] = boundary_integrate(*shape, q, [](const BoundaryFrame&) { return 1.0; });
  j["average_H"] = averages;
  j["kappa_min"] = kmin;
  j["kappa_max"] = kmax;
  j["non_umbilicity"] = non_umbilicity(nodes);
  j["hypotheses"] = {{"ricci_min", number(h.ricci_min)},
                     {"convexity_min", number(h.convexity_min)},
                     {"free_boundary_pos", number(h.free_boundary_pos)},
                     {"free_boundary_angle", number(h.free_boundary_angle)},
                     {"half_ball", weight ? json(h.half_ball) : json(nullptr)},
                     {"substatic_min", number(h.substatic_min)}};
  j["quadrature"] = {{"order", q.order}, {"level", q.level}};
  return j;
}

}  // namespace freeform
