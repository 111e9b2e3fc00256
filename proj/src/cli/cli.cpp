#include "qreduce/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "qreduce/brackets.hpp"
#include "qreduce/spectral.hpp"

namespace qreduce::cli {

namespace {

const std::vector<std::string> kSubcommands{"vq", "brackets", "spectrum", "recipes", "layersim"};

void add_common(CLI::App& sub, RunConfig& cfg) {
  sub.add_option_function<std::string>(
         "--format",
         [&cfg](const std::string& name) {
           if (name == "text") {
             cfg.format = Format::text;
           } else if (name == "csv") {
             cfg.format = Format::csv;
           } else if (name == "json") {
             cfg.format = Format::json;
           } else {
             throw CLI::ValidationError("--format", "'" + name + "' is not one of text, csv, json");
           }
         },
         "Output format (default text)")
      ->option_text("{text,csv,json}");
  sub.add_option("--output", cfg.output, "Write the result to this file instead of stdout");
  sub.add_option("--config", cfg.config, "key = value file; command-line flags win");
  sub.add_option("--hbar", cfg.physics.hbar, "Reduced Planck constant (default 1)");
  sub.add_flag("--timing", cfg.timing, "Include the wall-clock duration in json output");
}

void add_curve_shape(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--radius", cfg.radius, "Circle or sphere radius (default 1)");
  sub.add_option("--semi-a", cfg.semi_a, "Ellipse semi-axis along x (default 1.5)");
  sub.add_option("--semi-b", cfg.semi_b, "Ellipse semi-axis along y (default 1)");
}

/// Builds the parser bound to `cfg`. The returned app owns the subcommands.
std::unique_ptr<CLI::App> build_app(RunConfig& cfg) {
  auto app = std::make_unique<CLI::App>(
      "Quantum potentials of constrained motion on curves and surfaces: closed forms, "
      "profile operators, constraint brackets, recipe spectra and thin-layer simulations.",
      "qreduce");
  app->require_subcommand(1);
  app->fallthrough(false);

  auto* vq = app->add_subcommand("vq", "Quantum potential at one point of a curve, surface or latitude circle");
  vq->add_option("target", cfg.target, "curve, surface or latitude")->required();
  vq->add_option("--shape", cfg.shape,
                 "Catalog shape: line, circle, ellipse, parabola (curve); plane, sphere, cylinder, torus (surface)");
  add_curve_shape(*vq, cfg);
  vq->add_option("--coef", cfg.coef, "Parabola coefficient c in y = c x^2 (default 1)");
  vq->add_option("--big-r", cfg.big_r, "Torus center-circle radius (default 3)");
  vq->add_option("--small-r", cfg.small_r, "Torus tube radius (default 1)");
  vq->add_option("--t", cfg.t, "Curve parameter (default 0.3)");
  vq->add_option("--u", cfg.u, "First surface parameter (default 0.7)");
  vq->add_option("--v", cfg.v, "Second surface parameter (default 0.4)");
  vq->add_option("--theta", cfg.theta, "Polar angle of the latitude circle (default pi/3)");
  vq->add_option("--method", cfg.method, "closed, profile or both (default closed)");
  add_common(*vq, cfg);

  auto* br = app->add_subcommand("brackets", "Constraint bracket table and classification");
  br->add_option("name", cfg.target, "sphere or sphere-abelian");
  br->add_option("--system", cfg.system, "sphere or sphere-abelian (default sphere)");
  br->add_option("--n", cfg.n, "Ambient dimension (default 3)");
  br->add_option("--radius", cfg.radius, "Sphere radius (default 1)");
  add_common(*br, cfg);

  auto* sp = app->add_subcommand("spectrum", "Finite-difference spectrum of the reduced curve Hamiltonian");
  sp->add_option("target", cfg.target, "circle or ellipse")->required();
  add_curve_shape(*sp, cfg);
  sp->add_option("--n-grid", cfg.n_grid, "Periodic grid points (default 256)");
  sp->add_option("--modes", cfg.modes, "Eigenvalues to report (default 8)");
  sp->add_flag("--with-vq", cfg.with_vq, "Add the curvature potential -hbar^2 k^2 / 8");
  add_common(*sp, cfg);

  auto* rc = app->add_subcommand("recipes", "Level tables of the four quantization recipes");
  rc->add_option("action", cfg.target, "compare")->required();
  rc->add_option("--geometry", cfg.geometry, "sphere or circle (default sphere)");
  rc->add_option("--radius", cfg.radius, "Radius (default 1)");
  rc->add_option("--lmax", cfg.lmax, "Highest level index (default 4)");
  rc->add_option("--n", cfg.n, "Ambient dimension of the sphere (default 3)");
  add_common(*rc, cfg);

  auto* ls = app->add_subcommand("layersim", "Thin-layer band simulation and eps -> 0 extrapolation");
  ls->add_option("target", cfg.target, "circle, latitude or curve2d")->required();
  ls->add_option("--eps", cfg.eps, "Comma-separated layer thicknesses (default 0.1,0.05,0.025)")->delimiter(',');
  ls->add_option("--mmax", cfg.mmax, "Highest angular mode (default 3)");
  ls->add_option("--ntrans", cfg.ntrans, "Transverse grid points (default 128; 32 for curve2d)");
  ls->add_option("--confinement", cfg.confinement, "dirichlet or harmonic (default dirichlet)");
  ls->add_flag("--extrapolate,!--no-extrapolate", cfg.extrapolate, "Fit E(eps) = E0 + c1 eps + c2 eps^2 (default on)");
  ls->add_option("--shape", cfg.shape, "Closed curve for curve2d: circle or ellipse (default ellipse)");
  add_curve_shape(*ls, cfg);
  ls->add_option("--theta", cfg.theta, "Latitude polar angle (default pi/3)");
  ls->add_option("--ntang", cfg.ntang, "Tangential grid points for curve2d (default 128)");
  ls->add_option("--bands", cfg.bands, "Bands reported by curve2d (default 4)");
  ls->add_option("--angular-grid", cfg.angular_grid,
                 "Use the periodic second-difference symbol on this many points for m (default 0: exact m^2)");
  add_common(*ls, cfg);
  return app;
}

std::vector<CLI::App*> subcommands(CLI::App& app) {
  return app.get_subcommands([](CLI::App*) { return true; });
}

CLI::App* find_subcommand(CLI::App& app, const std::string& name) {
  for (auto* sub : subcommands(app)) {
    if (sub->get_name() == name) return sub;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string flag_key(const std::string& token) {
  if (token.rfind("--", 0) != 0) return "";
  return token.substr(2, token.find('=') - 2);
}

/// Reads `key = value` lines and returns --key=value tokens for every key
/// the command line does not already set.
std::vector<std::string> config_tokens(const std::string& path, const CLI::App& sub,
                                       const std::set<std::string>& given) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot read '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("--config: line " + std::to_string(line_no) + " of '" + path + "' is not key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key == "config") throw UsageError("--config: nested config files are not supported");
    const CLI::Option* opt = nullptr;
    try {
      opt = sub.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("--config: unknown key '" + key + "' for " + sub.get_name());
    }
    bool overridden = false;
    for (const auto& name : opt->get_lnames()) overridden = overridden || given.count(name) > 0;
    for (const auto& name : opt->get_fnames()) overridden = overridden || given.count(name) > 0;
    if (!overridden) tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

std::string subcommand_help(CLI::App& sub) { return sub.help(); }

}  // namespace

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["subcommand"] = cfg.subcommand;
  j["target"] = cfg.target;
  j["shape"] = cfg.shape;
  j["radius"] = cfg.radius;
  j["semi_a"] = cfg.semi_a;
  j["semi_b"] = cfg.semi_b;
  j["coef"] = cfg.coef;
  j["big_r"] = cfg.big_r;
  j["small_r"] = cfg.small_r;
  j["t"] = cfg.t;
  j["u"] = cfg.u;
  j["v"] = cfg.v;
  j["theta"] = cfg.theta;
  j["hbar"] = cfg.physics.hbar;
  j["method"] = cfg.method;
  j["system"] = cfg.system;
  j["n"] = cfg.n;
  j["n_grid"] = cfg.n_grid;
  j["modes"] = cfg.modes;
  j["with_vq"] = cfg.with_vq;
  j["geometry"] = cfg.geometry;
  j["lmax"] = cfg.lmax;
  j["eps"] = cfg.eps;
  j["mmax"] = cfg.mmax;
  j["ntrans"] = cfg.ntrans ? nlohmann::ordered_json(*cfg.ntrans) : nlohmann::ordered_json(nullptr);
  j["confinement"] = cfg.confinement;
  j["extrapolate"] = cfg.extrapolate;
  j["ntang"] = cfg.ntang;
  j["bands"] = cfg.bands;
  j["angular_grid"] = cfg.angular_grid;
  j["format"] = to_string(cfg.format);
  return j;
}

std::string help_text() {
  RunConfig scratch;
  auto app = build_app(scratch);
  std::ostringstream out;
  out << app->help();
  for (auto* sub : subcommands(*app)) out << "\n" << subcommand_help(*sub);
  out << "\nExit status: 0 success, 2 usage error, 3 numeric failure.\n";
  return out.str();
}

std::vector<std::string> accepted_flags() {
  RunConfig scratch;
  auto app = build_app(scratch);
  std::set<std::string> flags{"--help"};
  for (auto* sub : subcommands(*app)) {
    for (const auto* opt : sub->get_options()) {
      for (const auto& name : opt->get_lnames()) flags.insert("--" + name);
      for (const auto& name : opt->get_fnames()) flags.insert("--" + name);
    }
  }
  return {flags.begin(), flags.end()};
}

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  auto app = build_app(cfg);

  std::vector<std::string> tokens = args;
  // Merge the config file below the command line before parsing.
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    if (path.empty()) continue;
    CLI::App* sub = nullptr;
    for (const auto& a : args) {
      if ((sub = find_subcommand(*app, a))) break;
    }
    if (!sub) throw UsageError("--config needs a subcommand");
    std::set<std::string> given;
    for (const auto& a : args) {
      if (auto key = flag_key(a); !key.empty()) given.insert(key);
    }
    const auto extra = config_tokens(path, *sub, given);
    tokens.insert(tokens.end(), extra.begin(), extra.end());
    break;
  }

  const int given_extrapolate = int(std::count(args.begin(), args.end(), "--extrapolate"));
  const int given_no_extrapolate = int(std::count(args.begin(), args.end(), "--no-extrapolate"));
  if (given_extrapolate && given_no_extrapolate) {
    throw UsageError("conflicting flags --extrapolate and --no-extrapolate");
  }

  std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
  try {
    app->parse(reversed);
  } catch (const CLI::CallForHelp&) {
    for (auto* sub : app->get_subcommands()) throw HelpRequested{subcommand_help(*sub)};
    throw HelpRequested{help_text()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{help_text()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  cfg.subcommand = app->get_subcommands().front()->get_name();

  if (cfg.subcommand == "brackets") {
    auto* sub = find_subcommand(*app, "brackets");
    const bool flag_given = sub->get_option("--system")->count() > 0;
    if (!cfg.target.empty() && flag_given && cfg.target != cfg.system) {
      throw UsageError("conflicting flags: positional system '" + cfg.target + "' and --system " + cfg.system);
    }
    if (!cfg.target.empty()) cfg.system = cfg.target;
    cfg.target = cfg.system;
  }
  if (cfg.shape.empty()) {
    if (cfg.subcommand == "vq") {
      cfg.shape = cfg.target == "surface" ? "sphere" : cfg.target == "curve" ? "circle" : "";
    } else if (cfg.subcommand == "spectrum") {
      cfg.shape = cfg.target;
    } else if (cfg.subcommand == "layersim" && cfg.target == "curve2d") {
      cfg.shape = "ellipse";
    }
  }
  validate(cfg);
  return cfg;
}

void validate(const RunConfig& cfg) {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw UsageError(message);
  };
  auto one_of = [&](const std::string& value, std::initializer_list<const char*> allowed,
                    const std::string& what) {
    for (const char* a : allowed) {
      if (value == a) return;
    }
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw UsageError(what + ": '" + value + "' is not one of " + list);
  };

  require(std::find(kSubcommands.begin(), kSubcommands.end(), cfg.subcommand) != kSubcommands.end(),
          "unknown subcommand '" + cfg.subcommand + "'");
  require(std::isfinite(cfg.physics.hbar) && cfg.physics.hbar > 0.0, "--hbar must be positive");
  require(std::isfinite(cfg.radius) && cfg.radius > 0.0, "--radius must be positive");
  require(std::isfinite(cfg.semi_a) && cfg.semi_a > 0.0, "--semi-a must be positive");
  require(std::isfinite(cfg.semi_b) && cfg.semi_b > 0.0, "--semi-b must be positive");

  if (cfg.subcommand == "vq") {
    one_of(cfg.target, {"curve", "surface", "latitude"}, "vq target");
    one_of(cfg.method, {"closed", "profile", "both"}, "--method");
    require(std::isfinite(cfg.coef) && cfg.coef != 0.0, "--coef must be non-zero");
    require(std::isfinite(cfg.small_r) && cfg.small_r > 0.0, "--small-r must be positive");
    require(std::isfinite(cfg.big_r) && cfg.big_r > cfg.small_r, "--big-r must exceed --small-r");
    require(std::isfinite(cfg.t) && std::isfinite(cfg.u) && std::isfinite(cfg.v), "--t, --u and --v must be finite");
    if (cfg.target == "curve") one_of(cfg.shape, {"line", "circle", "ellipse", "parabola"}, "--shape");
    if (cfg.target == "surface") one_of(cfg.shape, {"plane", "sphere", "cylinder", "torus"}, "--shape");
    if (cfg.target == "latitude") {
      require(cfg.shape.empty() || cfg.shape == "sphere", "--shape: latitude circles live on the sphere");
      require(cfg.theta > 0.0 && cfg.theta < std::numbers::pi, "--theta must lie in (0, pi)");
    }
  } else if (cfg.subcommand == "brackets") {
    one_of(cfg.system, {"sphere", "sphere-abelian"}, "--system");
    require(cfg.n >= 2 && cfg.n <= 12, "--n must lie in [2, 12]");
  } else if (cfg.subcommand == "spectrum") {
    one_of(cfg.target, {"circle", "ellipse"}, "spectrum target");
    require(cfg.n_grid >= 8 && cfg.n_grid <= 2500, "--n-grid must lie in [8, 2500]");
    require(cfg.modes >= 1 && cfg.modes <= cfg.n_grid, "--modes must lie in [1, n-grid]");
  } else if (cfg.subcommand == "recipes") {
    one_of(cfg.target, {"compare"}, "recipes action");
    one_of(cfg.geometry, {"sphere", "circle"}, "--geometry");
    require(cfg.lmax >= 0 && cfg.lmax <= 1000, "--lmax must lie in [0, 1000]");
    require(cfg.n >= 3 && cfg.n <= 64, "--n must lie in [3, 64]");
  } else if (cfg.subcommand == "layersim") {
    one_of(cfg.target, {"circle", "latitude", "curve2d"}, "layersim target");
    one_of(cfg.confinement, {"dirichlet", "harmonic"}, "--confinement");
    require(!cfg.eps.empty(), "--eps needs at least one value");
    for (double e : cfg.eps) require(std::isfinite(e) && e > 0.0, "--eps values must be positive");
    require(cfg.mmax >= 0 && cfg.mmax <= 64, "--mmax must lie in [0, 64]");
    require(!cfg.ntrans || (*cfg.ntrans >= 32 && *cfg.ntrans <= 2048), "--ntrans must lie in [32, 2048]");
    require(cfg.ntang >= 8, "--ntang must be at least 8");
    require(cfg.bands >= 1 && cfg.bands <= 32, "--bands must lie in [1, 32]");
    require(cfg.angular_grid >= 0, "--angular-grid must be non-negative");
    require(cfg.theta > 0.0 && cfg.theta < std::numbers::pi, "--theta must lie in (0, pi)");
    if (cfg.target == "curve2d") {
      one_of(cfg.shape, {"circle", "ellipse"}, "--shape");
      const int ntrans = cfg.ntrans.value_or(32);
      require(std::int64_t(cfg.ntang) * ntrans <= 4096, "--ntang x --ntrans must not exceed 4096 grid points");
    }
  }
}

namespace {

CurveSpec curve_from(const RunConfig& cfg) {
  if (cfg.shape == "line") return CurveSpec::line(-1.0, 1.0);
  if (cfg.shape == "circle") return CurveSpec::circle(cfg.radius);
  if (cfg.shape == "ellipse") return CurveSpec::ellipse(cfg.semi_a, cfg.semi_b);
  if (cfg.shape == "parabola") return CurveSpec::parabola(cfg.coef);
  throw UsageError("--shape: '" + cfg.shape + "' is not a curve");
}

SurfaceSpec surface_from(const RunConfig& cfg) {
  if (cfg.shape == "plane") return SurfaceSpec::plane();
  if (cfg.shape == "sphere") return SurfaceSpec::sphere(cfg.radius);
  if (cfg.shape == "cylinder") return SurfaceSpec::cylinder(cfg.radius);
  if (cfg.shape == "torus") return SurfaceSpec::torus(cfg.big_r, cfg.small_r);
  throw UsageError("--shape: '" + cfg.shape + "' is not a surface");
}

void run_vq(const RunConfig& cfg, ResultRecord& rec) {
  std::optional<QuantumPotentialValue> closed, profile, plane_circle;
  if (cfg.target == "curve") {
    const CurveSpec curve = curve_from(cfg);
    const double k = plane_curvature(curve_jet(curve, cfg.t));
    if (cfg.method != "profile") closed = vq_curve(k, cfg.physics);
    if (cfg.method != "closed") {
      profile = vq_normal_profile(numeric_layer_profile(curve, Eigen::Vector2d(cfg.t, 0.0)), cfg.physics);
    }
  } else if (cfg.target == "surface") {
    const SurfaceSpec surface = surface_from(cfg);
    if (cfg.method != "profile") closed = vq_surface(surface_curvatures(surface, cfg.u, cfg.v), cfg.physics);
    if (cfg.method != "closed") {
      profile = vq_normal_profile(numeric_layer_profile(surface, Eigen::Vector2d(cfg.u, cfg.v)), cfg.physics);
    }
  } else {
    const auto lat = vq_latitude_on_sphere(cfg.radius, cfg.theta, cfg.physics);
    if (cfg.method != "profile") closed = lat.on_sphere;
    if (cfg.method != "closed") {
      profile = vq_normal_profile(
          numeric_layer_profile(LatitudeCircle{cfg.radius, cfg.theta}, Eigen::Vector2d::Zero()), cfg.physics);
    }
    plane_circle = lat.plane_circle;
  }
  if (closed && profile) {
    rec.add_result("vq_closed", closed->value);
    rec.add_result("vq_profile", profile->value);
    rec.add_result("difference", profile->value - closed->value);
    rec.provenance.emplace_back("vq_closed", to_string(closed->provenance));
    rec.provenance.emplace_back("vq_profile", to_string(profile->provenance));
  } else {
    const auto& value = closed ? *closed : *profile;
    rec.add_result("vq", value.value);
    rec.provenance.emplace_back("vq", to_string(value.provenance));
  }
  if (plane_circle) {
    rec.add_result("vq_plane_circle", plane_circle->value);
    rec.provenance.emplace_back("vq_plane_circle", to_string(plane_circle->provenance));
    if (closed) rec.add_result("embedding_shift", closed->value - plane_circle->value);
  }
}

void run_brackets(const RunConfig& cfg, ResultRecord& rec) {
  const ConstraintSystem system = constraint_system(cfg.system, cfg.n, cfg.radius);
  const auto samples = on_shell_samples(system, 100, 1);
  const auto report = classify_constraints(system.constraints, samples);
  rec.columns = {"bracket", "value"};
  const auto& c = system.constraints;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const std::string label = "{" + system.labels[i] + "," + system.labels[j] + "}";
      const PhasePoly bracket = poisson_bracket(c[i], c[j]);
      rec.messages.push_back(label + " = " + bracket.to_string() + ", " + to_string(report.verdict));
      rec.add_row({label, bracket.to_string()});
    }
  }
  for (std::size_t i = 0; i < c.size(); ++i) rec.add_row({system.labels[i], c[i].to_string()});
  rec.add_result("min_abs_determinant", report.min_abs_determinant);
  rec.add_result("max_abs_entry", report.max_abs_entry);
  rec.add_result("samples", double(samples.size()));
  rec.provenance.emplace_back("classification", to_string(report.verdict));
}

void run_spectrum(const RunConfig& cfg, ResultRecord& rec) {
  const CurveSpec curve = curve_from(cfg);
  const auto op = build_curve_hamiltonian(curve, cfg.n_grid, cfg.physics, cfg.with_vq);
  const Spectrum s = eigensolve_symmetric(op, cfg.modes);
  rec.columns = {"recipe", "level", "degeneracy", "energy"};
  // Group numerically degenerate eigenvalues into levels.
  int level = 0;
  for (Eigen::Index i = 0; i < s.values.size();) {
    Eigen::Index j = i + 1;
    const double tol = 1e-8 * std::max(1.0, std::abs(s.values[i]));
    while (j < s.values.size() && std::abs(s.values[j] - s.values[i]) <= tol) ++j;
    rec.add_row({"finite-difference", double(level++), double(j - i), s.values.segment(i, j - i).mean()});
    i = j;
  }
  if (cfg.shape == "circle") {
    const double vq = cfg.with_vq ? vq_curve(1.0 / cfg.radius, cfg.physics).value : 0.0;
    const Spectrum exact = circle_spectrum_analytic(cfg.radius, vq, level - 1, cfg.physics);
    for (Eigen::Index m = 0; m < exact.values.size(); ++m) {
      rec.add_row({"analytic", double(m), double(exact.degeneracy[std::size_t(m)]), exact.values[m]});
    }
  }
  rec.add_result("length", op.length);
  rec.add_result("residual", s.residual);
  rec.add_result("operator_norm", s.operator_norm);
  rec.provenance.emplace_back("energy", cfg.with_vq ? "finite-difference with curvature potential"
                                                    : "finite-difference, free");
}

void run_recipes(const RunConfig& cfg, ResultRecord& rec) {
  const RecipeTable table = recipe_table(parse_recipe_geometry(cfg.geometry), cfg.radius, cfg.lmax, cfg.physics, cfg.n);
  rec.columns = {"recipe", "level", "degeneracy", "energy"};
  for (const auto& column : table.columns) {
    const std::string name = to_string(column.recipe);
    if (!column.constant) {
      rec.messages.push_back(name + ": no constant for " + table.geometry);
      continue;
    }
    rec.add_result("constant_" + name, *column.constant);
    for (const auto& l : column.levels) rec.add_row({name, double(l.index), double(l.degeneracy), l.energy});
  }
}

void run_layersim(const RunConfig& cfg, ResultRecord& rec) {
  LayerConfig layer;
  layer.eps = cfg.eps;
  layer.confinement = parse_confinement(cfg.confinement);
  layer.m_max = cfg.mmax;
  layer.n_tangential = cfg.ntang;
  layer.bands = cfg.bands;
  layer.angular_grid = cfg.angular_grid;
  layer.extrapolate = cfg.extrapolate && std::set<double>(cfg.eps.begin(), cfg.eps.end()).size() >= 3;
  if (cfg.extrapolate && !layer.extrapolate) {
    rec.messages.push_back("extrapolation skipped: needs at least 3 distinct eps values");
  }
  layer.n_transverse = cfg.ntrans.value_or(cfg.target == "curve2d" ? 32 : 128);

  BandResult result;
  if (cfg.target == "circle") {
    result = circle_band_spectrum(cfg.radius, layer, cfg.physics);
  } else if (cfg.target == "latitude") {
    result = latitude_band_spectrum(cfg.radius, cfg.theta, layer, cfg.physics);
  } else {
    const CurveSpec curve = curve_from(cfg);
    result = curve_band_spectrum_2d(curve, layer, cfg.physics);
    const auto reduced = eigensolve_symmetric(build_curve_hamiltonian(curve, cfg.ntang, cfg.physics, true), cfg.bands);
    for (int b = 0; b < cfg.bands; ++b) rec.add_result("reduced_band_" + std::to_string(b), reduced.values[b]);
  }

  rec.columns = {"geometry", "m", "eps", "E_raw", "E_perp", "E_renormalized", "E_extrapolated", "fit_residual"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : result.samples) {
    double limit = nan, residual = nan;
    if (layer.extrapolate) {
      limit = result.limit_for(s.mode).limit;
      residual = result.limit_for(s.mode).fit_residual;
    }
    rec.add_row({result.geometry, double(s.mode), s.eps, s.raw, s.perp, s.renormalized, limit, residual});
  }
  for (const auto& l : result.limits) {
    rec.add_result("limit_m" + std::to_string(l.mode), l.limit);
    rec.add_result("order_m" + std::to_string(l.mode), l.observed_order);
  }
  rec.add_result("first_transverse_band", result.first_transverse_band ? 1.0 : 0.0);
  rec.provenance.emplace_back("E_perp", "discrete flat-layer ground energy on the same transverse grid");
  rec.provenance.emplace_back("E_extrapolated", "least squares E0 + c1 eps + c2 eps^2");
}

}  // namespace

ResultRecord run(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ResultRecord rec;
  rec.config = to_json(cfg);
  if (cfg.subcommand == "vq") {
    run_vq(cfg, rec);
  } else if (cfg.subcommand == "brackets") {
    run_brackets(cfg, rec);
  } else if (cfg.subcommand == "spectrum") {
    run_spectrum(cfg, rec);
  } else if (cfg.subcommand == "recipes") {
    run_recipes(cfg, rec);
  } else if (cfg.subcommand == "layersim") {
    run_layersim(cfg, rec);
  } else {
    throw UsageError("unknown subcommand '" + cfg.subcommand + "'");
  }
  rec.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.text;
    return exit_success;
  } catch (const UsageError& e) {
    err << "qreduce: usage error: " << e.what() << "\n";
    err << "Run 'qreduce --help' for the list of flags.\n";
    return exit_usage;
  }

  try {
    const ResultRecord rec = run(cfg);
    std::string text;
    switch (cfg.format) {
      case Format::text:
        text = render_text(rec);
        break;
      case Format::csv:
        text = render_csv(rec);
        break;
      case Format::json:
        text = render_json(rec, cfg.timing);
        break;
    }
    if (cfg.output.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.output, std::ios::binary);
      if (!file) {
        err << "qreduce: usage error: --output: cannot write '" << cfg.output << "'\n";
        return exit_usage;
      }
      file << text;
    }
    return exit_success;
  } catch (const UsageError& e) {
    err << "qreduce: usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "qreduce: numeric failure: " << e.what() << "\n";
    return exit_numeric;
  }
}

}  // namespace qreduce::cli
