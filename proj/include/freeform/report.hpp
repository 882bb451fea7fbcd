#pragma once

// JSON and CSV serialisation of shapes and check records.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "freeform/functionals.hpp"
#include "freeform/shapes.hpp"

namespace freeform {

using json = nlohmann::ordered_json;

inline json shape_to_json(const ShapeSpec& s) {
  json params = json::object();
  params["n"] = s.n;
  if (s.kind != "disk" && s.kind != "closed") params["rho"] = s.rho;
  if (s.axis.size() > 0) params["axis"] = std::vector<double>(s.axis.data(), s.axis.data() + s.axis.size());
  if (s.kind == "profile" || s.kind == "closed") {
    params["epsilon"] = s.epsilon;
    params["coefficients"] = s.coefficients;
  }
  if (s.kind != "closed") params["route"] = s.route == Route::chart ? "chart" : "profile";
  return json{{"kind", s.kind}, {"K", s.K}, {"R", s.R}, {"params", params}};
}

inline ShapeSpec shape_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ConfigError("shape document must be an object");
    ShapeSpec s;
    s.kind = j.at("kind").get<std::string>();
    if (s.kind != "cap" && s.kind != "disk" && s.kind != "profile" && s.kind != "closed")
      throw ConfigError("unknown shape kind '" + s.kind + "'");
    s.K = j.at("K").get<int>();
    s.R = j.at("R").get<double>();
    const json params = j.value("params", json::object());
    s.n = params.value("n", 2);
    s.rho = params.value("rho", 1.0);
    if (params.contains("axis")) {
      const auto axis = params.at("axis").get<std::vector<double>>();
      s.axis = Eigen::Map<const Eigen::VectorXd>(axis.data(), static_cast<Eigen::Index>(axis.size()));
    }
    s.epsilon = params.value("epsilon", 0.0);
    s.coefficients = params.value("coefficients", std::vector<double>{});
    s.route = route_from_string(params.value("route", std::string("profile")));
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed shape document: ") + e.what());
  }
}

/// NaN and infinities become null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

/// One verification record.
struct Record {
  std::string suite;
  std::optional<ShapeSpec> shape;  // empty for shape-free algebraic checks
  InequalityCheck check;
  QuadratureSpec quadrature;
};

inline json record_to_json(const Record& r) {
  const InequalityCheck& c = r.check;
  json hyp = {{"ricci_min", number(c.hypotheses.ricci_min)},
              {"convexity_min", number(c.hypotheses.convexity_min)},
              {"free_boundary_pos", number(c.hypotheses.free_boundary_pos)},
              {"free_boundary_angle", number(c.hypotheses.free_boundary_angle)},
              {"half_ball", c.hypotheses.half_ball}};
  json details = json::object();
  if (std::isfinite(c.hypotheses.substatic_min)) details["substatic_min"] = c.hypotheses.substatic_min;
  details["equality_expected"] = c.equality_expected;
  if (!c.hypotheses.violations.empty()) details["violations"] = c.hypotheses.violations;
  for (const auto& [key, value] : c.details) details[key] = number(value);
  return json{{"suite", r.suite},
              {"check", c.name},
              {"shape", r.shape ? shape_to_json(*r.shape) : json(nullptr)},
              {"n", c.n},
              {"K", c.K},
              {"k", c.k},
              {"lhs", number(c.lhs)},
              {"rhs", number(c.rhs)},
              {"ratio", number(c.ratio)},
              {"status", to_string(c.status)},
              {"hypotheses", hyp},
              {"quadrature", {{"order", r.quadrature.order}, {"level", r.quadrature.level}}},
              {"details", details}};
}

/// Shortest round-trip formatting; the tool never changes the C locale.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

struct SweepRow {
  double epsilon = 0.0;
  InequalityCheck check;
};

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "epsilon,lhs,rhs,ratio,status\n";
  for (const SweepRow& r : rows)
    out += format_double(r.epsilon) + "," + format_double(r.check.lhs) + "," + format_double(r.check.rhs) + "," +
           format_double(r.check.ratio) + "," + to_string(r.check.status) + "\n";
  return out;
}

}  // namespace freeform
