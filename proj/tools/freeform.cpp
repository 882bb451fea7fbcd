// freeform: verification suites, parameter sweeps and shape summaries.
//
//   freeform verify thm1 --family caps --K all --k all
//   freeform verify cor-lowdim --case i --family perturbed --count 50 --seed 7
//   freeform sweep thm1 --shape profile --epsilon 0:0.3:0.01 --out sweep.csv
//   freeform describe --shape cap --K 0 --R 1 --rho 1
//
// Exit codes: 0 all pass, 1 some check failed, 2 configuration, 3 shape construction, 4 numerical.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "freeform/suite.hpp"

namespace {

using namespace freeform;

struct Options {
  std::string suite;
  std::string family;
  std::string shape;
  std::string K = "all";
  std::string k = "all";
  std::vector<int> n;
  int count = 10;
  std::uint64_t seed = 1;
  std::string epsilon = "0:0.3:0.01";
  int quad_order = 8;
  int quad_level = 3;
  double rel_tol = 1e-8;
  double R = 1.0;
  double rho = 1.0;
  std::string route;
  std::string which = "i";
  std::string out;
  std::string format;
  bool no_timing = false;
};

std::vector<int> parse_curvatures(const std::string& text) {
  if (text == "all") return {-1, 0, 1};
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item == "-1" || item == "0" || item == "1" || item == "+1")
      out.push_back(std::stoi(item));
    else
      throw ConfigError("curvature must be -1, 0, 1 or all");
  }
  if (out.empty()) throw ConfigError("curvature list is empty");
  return out;
}

std::vector<int> parse_orders(const std::string& text) {
  if (text == "all") return {};
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    char* end = nullptr;
    const long v = std::strtol(item.c_str(), &end, 10);
    if (item.empty() || *end != '\0' || v < 1 || v > 64) throw ConfigError("order k must be a positive integer or all");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open shape file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("cannot parse shape file: ") + e.what());
  }
}

bool is_builtin_kind(const std::string& s) { return s == "cap" || s == "disk" || s == "profile" || s == "closed"; }

/// Shape from a JSON file, or a built-in kind assembled from the flags.
std::vector<ShapeSpec> shapes_from(const Options& o) {
  if (is_builtin_kind(o.shape) && !std::filesystem::exists(o.shape)) {
    ShapeSpec s = default_sweep_shape(o.shape, o.n.empty() ? 2 : o.n.front());
    const std::vector<int> Ks = parse_curvatures(o.K == "all" ? "0" : o.K);
    s.K = Ks.front();
    s.R = o.R;
    s.rho = o.rho;
    if (!o.route.empty()) s.route = route_from_string(o.route);
    return {s};
  }
  const json doc = read_json_file(o.shape);
  std::vector<ShapeSpec> out;
  if (doc.is_array()) {
    for (const json& item : doc) out.push_back(shape_from_json(item));
  } else {
    out.push_back(shape_from_json(doc));
  }
  if (out.empty()) throw ConfigError("shape file holds no shapes");
  return out;
}

SuiteConfig config_from(const Options& o) {
  SuiteConfig c;
  c.suite = o.suite;
  c.family = o.family;
  c.Ks = parse_curvatures(o.K);
  c.ks = parse_orders(o.k);
  c.ns = o.n;
  c.count = o.count;
  c.seed = o.seed;
  c.R = o.R;
  if (!o.route.empty()) c.route = route_from_string(o.route);
  if (o.which == "i" || o.which == "1")
    c.which = 1;
  else if (o.which == "ii" || o.which == "2")
    c.which = 2;
  else
    throw ConfigError("case must be i or ii");
  c.quadrature.order = o.quad_order;
  c.quadrature.level = o.quad_level;
  c.tolerances.rel = o.rel_tol;
  if (!o.shape.empty()) {
    c.family = "file";
    c.shapes = shapes_from(o);
  }
  return c;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.out, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + o.out + "'");
  out << text;
}

int run_verify(const Options& o) {
  const SuiteConfig config = config_from(o);
  const ReportEnvelope env = run_suite(config);
  const std::string format = o.format.empty() ? "json" : o.format;
  emit(o, format == "csv" ? env.to_csv() : env.to_json(!o.no_timing).dump(2) + "\n");
  std::fprintf(stderr, "%s: %d pass, %d fail, %d inapplicable\n", config.suite.c_str(), env.pass, env.fail,
               env.inapplicable);
  return env.exit_code();
}

int run_sweep(const Options& o) {
  Options base = o;
  if (base.shape.empty()) base.shape = "profile";
  SuiteConfig config = config_from(base);
  config.family.clear();
  config.shapes.clear();
  const ShapeSpec shape = shapes_from(base).front();
  config.Ks = {shape.K};
  config.ns = {shape.n};
  const std::vector<SweepRow> rows = sweep(config, shape, parse_range(o.epsilon));
  const std::string format = o.format.empty() ? "csv" : o.format;
  if (format == "csv") {
    emit(o, sweep_to_csv(rows));
  } else {
    json arr = json::array();
    for (const SweepRow& r : rows) {
      Record rec{config.suite, shape, r.check, config.quadrature};
      rec.shape->epsilon = r.epsilon;
      arr.push_back(record_to_json(rec));
    }
    emit(o, arr.dump(2) + "\n");
  }
  int fails = 0;
  for (const SweepRow& r : rows) fails += r.check.status == Status::fail;
  return fails > 0 ? 1 : 0;
}

int run_describe(const Options& o) {
  if (o.shape.empty()) throw ConfigError("describe needs --shape");
  QuadratureSpec q;
  q.order = o.quad_order;
  q.level = o.quad_level;
  json out = json::array();
  for (const ShapeSpec& s : shapes_from(o)) out.push_back(describe_shape(s, q));
  emit(o, (out.size() == 1 ? out.front() : out).dump(2) + "\n");
  return 0;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--shape", o.shape, "shape JSON file, or a built-in kind (cap, disk, profile, closed)");
  cmd->add_option("--K", o.K, "curvature: -1, 0, 1, a comma list, or all");
  cmd->add_option("--n", o.n, "hypersurface dimensions")->delimiter(',');
  cmd->add_option("--R", o.R, "geodesic radius of the ball");
  cmd->add_option("--rho", o.rho, "model radius of a built-in cap");
  cmd->add_option("--route", o.route, "profile or chart")->check(CLI::IsMember({"profile", "chart"}));
  cmd->add_option("--quad-order", o.quad_order, "Gauss-Legendre points per panel");
  cmd->add_option("--quad-level", o.quad_level, "refinement level (2^level panels)");
  cmd->add_option("--rel-tol", o.rel_tol, "relative tolerance of inequality checks");
  cmd->add_option("--out", o.out, "output path (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of curvature inequalities for free-boundary hypersurfaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(freeform::kVersion));
  Options o;

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", o.suite, "suite name")->required()->check(CLI::IsMember(freeform::suite_names()));
  verify->add_option("--family", o.family, "caps, disks, perturbed, closed")
      ->check(CLI::IsMember({"caps", "disks", "perturbed", "closed"}));
  verify->add_option("--k", o.k, "order k, a comma list, or all");
  verify->add_option("--count", o.count, "number of random shapes");
  verify->add_option("--seed", o.seed, "random seed");
  verify->add_option("--case", o.which, "corollary case: i or ii");
  verify->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  verify->add_flag("--no-timing", o.no_timing, "omit the wall-clock field for byte-stable reports");
  add_common(verify, o);

  auto* sweep_cmd = app.add_subcommand("sweep", "sweep the perturbation amplitude of one shape");
  sweep_cmd->add_option("suite", o.suite, "suite name")->required()->check(CLI::IsMember(freeform::suite_names()));
  sweep_cmd->add_option("--epsilon", o.epsilon, "start:end:step");
  sweep_cmd->add_option("--k", o.k, "order k");
  sweep_cmd->add_option("--case", o.which, "corollary case: i or ii");
  sweep_cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"json", "csv"}));
  add_common(sweep_cmd, o);

  auto* describe = app.add_subcommand("describe", "summarise the geometry of a shape");
  add_common(describe, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*verify) return run_verify(o);
    if (*sweep_cmd) return run_sweep(o);
    return run_describe(o);
  } catch (const freeform::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const freeform::ShapeBuildError& e) {
    std::fprintf(stderr, "shape error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 4;
  }
}
