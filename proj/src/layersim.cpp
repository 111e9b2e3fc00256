#include "qreduce/layersim.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace qreduce {

std::string to_string(Confinement c) {
  return c == Confinement::dirichlet ? "dirichlet" : "harmonic";
}

Confinement parse_confinement(const std::string& name) {
  if (name == "dirichlet") return Confinement::dirichlet;
  if (name == "harmonic") return Confinement::harmonic;
  throw UsageError("unknown confinement '" + name + "' (expected dirichlet or harmonic)");
}

void validate(const LayerConfig& cfg) {
  if (cfg.eps.empty()) throw UsageError("layer config: empty eps list");
  for (double e : cfg.eps) {
    if (!(e > 0.0)) throw UsageError("layer config: eps values must be positive");
  }
  if (cfg.n_transverse < 32) throw UsageError("layer config: n_transverse must be at least 32");
  if (cfg.m_max < 0) throw UsageError("layer config: m_max must be non-negative");
  if (cfg.n_tangential < 8) throw UsageError("layer config: n_tangential must be at least 8");
  if (cfg.bands < 1) throw UsageError("layer config: bands must be at least 1");
  if (cfg.angular_grid < 0) throw UsageError("layer config: angular_grid must be non-negative");
}

const BandLimit& BandResult::limit_for(int mode) const {
  for (const auto& l : limits) {
    if (l.mode == mode) return l;
  }
  throw UsageError("no extrapolated limit for mode " + std::to_string(mode));
}

std::vector<BandSample> BandResult::samples_for(int mode) const {
  std::vector<BandSample> out;
  for (const auto& s : samples) {
    if (s.mode == mode) out.push_back(s);
  }
  return out;
}

Extrapolation band_extrapolate(std::span<const double> eps, std::span<const double> energy) {
  if (eps.size() != energy.size()) throw UsageError("band_extrapolate: size mismatch");
  std::vector<double> distinct(eps.begin(), eps.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw UsageError("band_extrapolate: need at least 3 distinct eps values");

  const auto n = Eigen::Index(eps.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = eps[std::size_t(i)];
    design(i, 2) = eps[std::size_t(i)] * eps[std::size_t(i)];
    rhs[i] = energy[std::size_t(i)];
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  return {coef[0], coef[1], coef[2], (design * coef - rhs).norm()};
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHarmonicBoxHalfWidth = 5.0;  // in oscillator lengths

struct TransverseGrid {
  double half_width;
  int n;
  double h;
  double node(int j) const { return -half_width + (j + 1) * h; }
};

TransverseGrid transverse_grid(double eps, const LayerConfig& cfg) {
  const double half = cfg.confinement == Confinement::dirichlet ? 0.5 * eps : kHarmonicBoxHalfWidth * eps;
  return {half, cfg.n_transverse, 2.0 * half / (cfg.n_transverse + 1)};
}

double confinement_potential(double q, double eps, const LayerConfig& cfg, const PhysicsParams& params) {
  if (cfg.confinement == Confinement::dirichlet) return 0.0;
  const double gamma = params.hbar * params.hbar / std::pow(eps, 4);
  return 0.5 * gamma * q * q;
}

/// -(hbar^2/2) J^-1 d_q (J d_q) + V on the grid with walls at both ends,
/// symmetrized by J^(1/2): flux weights J at half nodes, mass J at nodes.
Eigen::MatrixXd radial_operator(const TransverseGrid& grid, const std::function<double(double)>& jacobian,
                                const std::function<double(double)>& potential, const PhysicsParams& params) {
  const int n = grid.n;
  const double stiff = 0.5 * params.hbar * params.hbar / (grid.h * grid.h);
  Eigen::VectorXd mass(n), flux(n + 1);
  for (int j = 0; j < n; ++j) mass[j] = jacobian(grid.node(j));
  for (int j = 0; j <= n; ++j) flux[j] = jacobian(grid.node(j) - 0.5 * grid.h);
  if ((mass.array() <= 0.0).any() || (flux.array() <= 0.0).any()) {
    throw BreakdownError("layer simulation: metric factor non-positive inside the layer");
  }
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    op(j, j) = stiff * (flux[j] + flux[j + 1]) / mass[j] + potential(grid.node(j));
    if (j + 1 < n) {
      const double off = -stiff * flux[j + 1] / std::sqrt(mass[j] * mass[j + 1]);
      op(j, j + 1) = off;
      op(j + 1, j) = off;
    }
  }
  return op;
}

double lowest_eigenvalue(const Eigen::MatrixXd& op, int level = 0) {
  return eigensolve_dense(op, level + 1).values[level];
}

/// Angular symbol: m^2, or the periodic second-difference symbol on N points
/// in units of the angle.
double angular_symbol(int m, int angular_grid) {
  if (angular_grid <= 0) return double(m) * m;
  const double h = 2.0 * kPi / angular_grid;
  return 2.0 * (1.0 - std::cos(m * h)) / (h * h);
}

double continuum_perp(double eps, const LayerConfig& cfg, const PhysicsParams& params) {
  const double h2 = params.hbar * params.hbar;
  return cfg.confinement == Confinement::dirichlet ? h2 * kPi * kPi / (2.0 * eps * eps)
                                                   : h2 / (2.0 * eps * eps);
}

double observed_order(const std::vector<double>& eps, const std::vector<double>& energy) {
  const std::size_t n = eps.size();
  if (n < 3) return std::numeric_limits<double>::quiet_NaN();
  const double ratio = eps[n - 3] / eps[n - 2];
  if (!(std::abs(eps[n - 2] / eps[n - 1] - ratio) <= 1e-9 * ratio) || ratio == 1.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double d1 = energy[n - 3] - energy[n - 2];
  const double d2 = energy[n - 2] - energy[n - 1];
  if (d1 == 0.0 || d2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::log(std::abs(d1 / d2)) / std::log(ratio);
}

void finish(BandResult& result, const LayerConfig& cfg, int modes, const PhysicsParams& params) {
  for (double e : cfg.eps) result.perp_continuum.push_back(continuum_perp(e, cfg, params));
  if (!cfg.extrapolate) return;
  for (int m = 0; m < modes; ++m) {
    std::vector<double> eps, energy;
    for (const auto& s : result.samples) {
      if (s.mode != m) continue;
      eps.push_back(s.eps);
      energy.push_back(s.renormalized);
    }
    const auto fit = band_extrapolate(eps, energy);
    result.limits.push_back({m, fit.limit, fit.c1, fit.c2, fit.residual, observed_order(eps, energy)});
  }
}

/// Shared driver for the mode-decoupled layers. `jacobian(q)` is the normal
/// metric factor, `angular_radius(q)` the proper radius of the parallel
/// circle at offset q divided by the symbol's angle unit.
BandResult modal_bands(std::string name, const LayerConfig& cfg, const PhysicsParams& params,
                       const std::function<double(double)>& jacobian,
                       const std::function<double(double)>& angular_radius) {
  BandResult result;
  result.geometry = std::move(name);
  result.confinement = cfg.confinement;
  const double h2 = params.hbar * params.hbar;
  for (int m = 0; m <= cfg.m_max; ++m) {
    const double symbol = angular_symbol(m, cfg.angular_grid);
    for (double eps : cfg.eps) {
      const auto grid = transverse_grid(eps, cfg);
      auto potential = [&](double q) {
        const double rho = angular_radius(q);
        return 0.5 * h2 * symbol / (rho * rho) + confinement_potential(q, eps, cfg, params);
      };
      const double raw = lowest_eigenvalue(radial_operator(grid, jacobian, potential, params));
      const double perp = transverse_ground_energy(eps, cfg, params);
      if (!(raw < transverse_ground_energy(eps, cfg, params, 1))) result.first_transverse_band = false;
      result.samples.push_back({m, eps, raw, perp, raw - perp});
    }
  }
  finish(result, cfg, cfg.m_max + 1, params);
  return result;
}

}  // namespace

double transverse_ground_energy(double eps, const LayerConfig& cfg, const PhysicsParams& params, int level) {
  validate(params);
  const auto grid = transverse_grid(eps, cfg);
  auto flat = [](double) { return 1.0; };
  auto potential = [&](double q) { return confinement_potential(q, eps, cfg, params); };
  return lowest_eigenvalue(radial_operator(grid, flat, potential, params), level);
}

BandResult circle_band_spectrum(double radius, const LayerConfig& cfg, const PhysicsParams& params) {
  validate(cfg);
  validate(params);
  if (!(radius > 0.0)) throw UsageError("circle_band_spectrum: radius must be positive");
  for (double eps : cfg.eps) {
    if (!(eps / radius < 0.5) || !(transverse_grid(eps, cfg).half_width < radius)) {
      throw BreakdownError("circle_band_spectrum: layer too thick for radius " + std::to_string(radius));
    }
  }
  // Offset q along the inward normal: parallel circle of radius R - q.
  auto jacobian = [radius](double q) { return 1.0 - q / radius; };
  auto angular = [radius](double q) { return radius - q; };
  return modal_bands(CurveSpec::circle(radius).name(), cfg, params, jacobian, angular);
}

BandResult strip_band_spectrum(double length, const LayerConfig& cfg, const PhysicsParams& params) {
  validate(cfg);
  validate(params);
  if (!(length > 0.0)) throw UsageError("strip_band_spectrum: length must be positive");
  const double unit = length / (2.0 * kPi);
  auto jacobian = [](double) { return 1.0; };
  auto angular = [unit](double) { return unit; };
  return modal_bands("strip", cfg, params, jacobian, angular);
}

BandResult latitude_band_spectrum(double sphere_radius, double theta0, const LayerConfig& cfg,
                                  const PhysicsParams& params) {
  validate(cfg);
  validate(params);
  if (!(sphere_radius > 0.0)) throw UsageError("latitude_band_spectrum: radius must be positive");
  for (double eps : cfg.eps) {
    const double window = transverse_grid(eps, cfg).half_width / sphere_radius;
    if (!(theta0 - window > 0.0 && theta0 + window < kPi)) {
      throw DegenerateError("latitude_band_spectrum: polar window touches a pole");
    }
  }
  // Proper distance q = R (theta - theta0); parallel circles have radius R sin(theta).
  auto jacobian = [=](double q) { return std::sin(theta0 + q / sphere_radius); };
  auto angular = [=](double q) { return sphere_radius * std::sin(theta0 + q / sphere_radius); };
  return modal_bands(geometry_name(GeometrySpec{LatitudeCircle{sphere_radius, theta0}}), cfg, params, jacobian, angular);
}

BandResult curve_band_spectrum_2d(const CurveSpec& curve, const LayerConfig& cfg, const PhysicsParams& params) {
  validate(cfg);
  validate(params);
  if (!curve.closed) throw UsageError("curve_band_spectrum_2d: " + curve.name() + " is not closed");
  const int n1 = cfg.n_tangential;
  const int n2 = cfg.n_transverse;
  if (std::int64_t(n1) * n2 > 4096) {
    throw UsageError("curve_band_spectrum_2d: grid " + std::to_string(n1) + " x " + std::to_string(n2) +
                     " exceeds the 4096-point budget");
  }
  if (cfg.bands > n1 * n2) throw UsageError("curve_band_spectrum_2d: more bands than grid points");

  const ArcLengthMap map(curve);
  const double length = map.length();
  const double hs = length / n1;
  std::vector<double> k_node(n1), k_mid(n1);
  double kmax = 0.0;
  for (int i = 0; i < n1; ++i) {
    k_node[i] = plane_curvature(curve_jet(curve, map.parameter(i * hs)));
    k_mid[i] = plane_curvature(curve_jet(curve, map.parameter((i + 0.5) * hs)));
    kmax = std::max({kmax, std::abs(k_node[i]), std::abs(k_mid[i])});
  }
  for (double eps : cfg.eps) {
    if (!(eps * kmax < 0.5) || !(transverse_grid(eps, cfg).half_width * kmax < 1.0)) {
      throw BreakdownError("curve_band_spectrum_2d: layer too thick for the curvature of " + curve.name());
    }
  }

  BandResult result;
  result.geometry = curve.name();
  result.confinement = cfg.confinement;
  const double h2 = params.hbar * params.hbar;
  auto index = [n2](int i, int j) { return i * n2 + j; };

  std::vector<std::vector<BandSample>> per_band(std::size_t(cfg.bands));
  for (double eps : cfg.eps) {
    const auto grid = transverse_grid(eps, cfg);
    const double ws = 0.5 * h2 / (hs * hs);
    const double wq = 0.5 * h2 / (grid.h * grid.h);
    const int n = n1 * n2;
    Eigen::VectorXd mass(n);
    std::vector<Eigen::Triplet<double>> stiffness;
    stiffness.reserve(std::size_t(n) * 5);
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j) {
        const double q = grid.node(j);
        const int a = index(i, j);
        mass[a] = 1.0 - q * k_node[i];
        // Tangential edge (i, i+1): weight 1/J at the midpoint.
        const int b = index((i + 1) % n1, j);
        const double w_s = ws / (1.0 - q * k_mid[i]);
        stiffness.emplace_back(a, a, w_s);
        stiffness.emplace_back(b, b, w_s);
        stiffness.emplace_back(a, b, -w_s);
        stiffness.emplace_back(b, a, -w_s);
        // Normal edges: weight J at half nodes; walls beyond the end nodes.
        const double w_below = wq * (1.0 - (q - 0.5 * grid.h) * k_node[i]);
        const double w_above = wq * (1.0 - (q + 0.5 * grid.h) * k_node[i]);
        stiffness.emplace_back(a, a, w_below);
        stiffness.emplace_back(a, a, w_above);
        if (j + 1 < n2) {
          stiffness.emplace_back(a, index(i, j + 1), -w_above);
          stiffness.emplace_back(index(i, j + 1), a, -w_above);
        }
        stiffness.emplace_back(a, a, mass[a] * confinement_potential(q, eps, cfg, params));
      }
    }
    if ((mass.array() <= 0.0).any()) throw BreakdownError("curve_band_spectrum_2d: metric factor non-positive");
    Eigen::SparseMatrix<double> op(n, n);
    op.setFromTriplets(stiffness.begin(), stiffness.end());
    const Eigen::VectorXd scale = mass.cwiseSqrt().cwiseInverse();
    op = scale.asDiagonal() * op * scale.asDiagonal();

    const double perp = transverse_ground_energy(eps, cfg, params);
    const double perp2 = transverse_ground_energy(eps, cfg, params, 1);
    const double shift = perp - (0.5 * h2 * kmax * kmax + 1.0);
    const Spectrum spectrum = eigensolve_sparse_lowest(op, cfg.bands, shift);
    for (int band = 0; band < cfg.bands; ++band) {
      const double raw = spectrum.values[band];
      if (!(raw < perp2)) result.first_transverse_band = false;
      per_band[std::size_t(band)].push_back({band, eps, raw, perp, raw - perp});
    }
  }
  for (const auto& samples : per_band) result.samples.insert(result.samples.end(), samples.begin(), samples.end());
  finish(result, cfg, cfg.bands, params);
  return result;
}

}  // namespace qreduce
