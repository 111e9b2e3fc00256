#include "qreduce/potential.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace qreduce {

void validate(const PhysicsParams& params) {
  if (!(params.hbar > 0.0)) throw UsageError("hbar must be positive");
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::closed_form_curve:
      return "closed-form curve";
    case Provenance::closed_form_surface:
      return "closed-form surface";
    case Provenance::normal_profile_numeric:
      return "normal-profile numeric";
    case Provenance::latitude_formula:
      return "latitude formula";
  }
  return "unknown";
}

NormalProfile curve_layer_profile(double k) {
  NormalProfile p;
  p.determinant = [k](double q) {
    const double f = 1.0 - q * k;
    return f * f;
  };
  p.validity_radius = k != 0.0 ? 1.0 / std::abs(k) : 1.0;
  return p;
}

NormalProfile surface_layer_profile(double H, double K) {
  NormalProfile p;
  p.determinant = [H, K](double q) {
    const double s = 1.0 - 2.0 * q * H + K * q * q;
    return s * s;
  };
  const double kmax = std::abs(H) + std::sqrt(std::max(H * H - K, 0.0));
  p.validity_radius = kmax > 0.0 ? 1.0 / kmax : 1.0;
  return p;
}

NormalProfile latitude_profile(double sphere_radius, double theta0) {
  if (!(sphere_radius > 0.0)) throw UsageError("latitude_profile: radius must be positive");
  if (!(theta0 > 0.0 && theta0 < std::numbers::pi)) {
    throw DegenerateError("latitude_profile: theta must lie strictly between the poles");
  }
  NormalProfile p;
  const double r4 = std::pow(sphere_radius, 4);
  p.determinant = [r4, theta0](double q) {
    const double s = std::sin(theta0 + q);
    return r4 * s * s;
  };
  p.lapse = [sphere_radius](double) { return sphere_radius; };
  p.validity_radius = std::min(theta0, std::numbers::pi - theta0);
  return p;
}

NormalProfile numeric_layer_profile(const GeometrySpec& spec, const Eigen::Vector2d& tangential) {
  NormalProfile p;
  p.determinant = [spec, tangential](double q) {
    return layer_metric_numeric(spec, LayerPoint{tangential, q});
  };
  if (const auto* lat = std::get_if<LatitudeCircle>(&spec)) {
    const double R = lat->sphere_radius;
    p.lapse = [R](double) { return R; };
    p.validity_radius = std::min(lat->theta0, std::numbers::pi - lat->theta0);
  } else {
    const double radius = curvature_radius(spec, tangential);
    p.validity_radius = std::isfinite(radius) ? radius : 1.0;
  }
  return p;
}

QuantumPotentialValue vq_curve(double k, const PhysicsParams& params) {
  validate(params);
  return {-params.hbar * params.hbar * k * k / 8.0, Provenance::closed_form_curve};
}

QuantumPotentialValue vq_surface(const Curvatures<double>& c, const PhysicsParams& params) {
  validate(params);
  const double split = c.k1 - c.k2;
  return {-params.hbar * params.hbar * split * split / 8.0, Provenance::closed_form_surface};
}

namespace {

struct Derivatives {
  double value, first, second;
};

/// Central first and second differences with one Richardson step.
template <typename F>
Derivatives differentiate(F&& f, double x, double h) {
  const double f0 = f(x);
  auto at = [&](double step) {
    const double fp = f(x + step), fm = f(x - step);
    return std::pair{(fp - fm) / (2.0 * step), (fp - 2.0 * f0 + fm) / (step * step)};
  };
  const auto [d1h, d2h] = at(h);
  const auto [d1half, d2half] = at(0.5 * h);
  return {f0, (4.0 * d1half - d1h) / 3.0, (4.0 * d2half - d2h) / 3.0};
}

}  // namespace

QuantumPotentialValue vq_normal_profile(const NormalProfile& profile, const PhysicsParams& params,
                                        std::optional<double> step) {
  validate(params);
  const double h = step.value_or(1e-2 * profile.validity_radius);
  if (!(h > 0.0)) throw UsageError("vq_normal_profile: step must be positive");
  const double q0 = profile.q0;

  auto root_det = [&](double q) {
    const double g = profile.determinant(q);
    if (!(g > 0.0)) throw BreakdownError("vq_normal_profile: metric determinant non-positive in stencil");
    return std::sqrt(g);
  };
  auto inverse_lapse2 = [&](double q) {
    const double hn = profile.lapse(q);
    if (!(hn > 0.0)) throw BreakdownError("vq_normal_profile: lapse non-positive in stencil");
    return 1.0 / (hn * hn);
  };

  const Derivatives s = differentiate(root_det, q0, h);
  const Derivatives a = differentiate(inverse_lapse2, q0, h);
  const double ds = s.first / s.value;
  const double bracket = a.value * s.second / s.value + a.first * ds - 0.5 * a.value * ds * ds;
  return {0.25 * params.hbar * params.hbar * bracket, Provenance::normal_profile_numeric};
}

LatitudePotential vq_latitude_on_sphere(double sphere_radius, double theta,
                                        const PhysicsParams& params) {
  validate(params);
  if (!(sphere_radius > 0.0)) throw UsageError("vq_latitude_on_sphere: radius must be positive");
  if (!(theta > 0.0 && theta < std::numbers::pi)) {
    throw DegenerateError("vq_latitude_on_sphere: theta must lie strictly between the poles");
  }
  const double s = std::sin(theta);
  const double h2 = params.hbar * params.hbar;
  const double r2 = sphere_radius * sphere_radius;
  LatitudePotential out;
  out.on_sphere = {-h2 / (8.0 * r2) * (1.0 + 1.0 / (s * s)), Provenance::latitude_formula};
  out.plane_circle = {-h2 / (8.0 * r2 * s * s), Provenance::closed_form_curve};
  return out;
}

double normal_momentum_residual(const NormalProfile& profile, const std::function<double(double)>& psi,
                                int points, const PhysicsParams& params, double half_width) {
  validate(params);
  if (points < 3) throw UsageError("factorization_residual: need at least 3 grid points");
  if (!(half_width > 0.0)) half_width = 0.1 * profile.validity_radius;
  const double h = 2.0 * half_width / (points - 1);
  std::vector<double> root4(points), state(points), lifted(points);
  for (int j = 0; j < points; ++j) {
    const double q = profile.q0 - half_width + j * h;
    const double g = profile.determinant(q);
    if (!(g > 0.0)) throw BreakdownError("factorization_residual: metric determinant non-positive");
    root4[j] = std::pow(g, 0.25);
    state[j] = psi(q);
    lifted[j] = root4[j] * state[j];
  }
  double num = 0.0, den = 0.0;
  for (int j = 0; j < points; ++j) {
    double d;
    if (j == 0) {
      d = (-3.0 * lifted[0] + 4.0 * lifted[1] - lifted[2]) / (2.0 * h);
    } else if (j == points - 1) {
      d = (3.0 * lifted[j] - 4.0 * lifted[j - 1] + lifted[j - 2]) / (2.0 * h);
    } else {
      d = (lifted[j + 1] - lifted[j - 1]) / (2.0 * h);
    }
    const double applied = params.hbar * d / root4[j];
    num += applied * applied;
    den += state[j] * state[j];
  }
  return std::sqrt(num / den);
}

double factorization_residual(const NormalProfile& profile, int points, const PhysicsParams& params,
                              double half_width) {
  auto factorized = [&](double q) { return std::pow(profile.determinant(q), -0.25); };
  return normal_momentum_residual(profile, factorized, points, params, half_width);
}

}  // namespace qreduce
