#include "qreduce/geometry.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <limits>
#include <sstream>

namespace qreduce {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double value, const char* what) {
  if (!(value > 0.0)) {
    throw DomainError(std::string(what) + " must be positive");
  }
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Curves

CurveSpec CurveSpec::line(double t0, double t1) {
  if (!(t1 > t0)) throw DomainError("line: empty parameter interval");
  CurveSpec c;
  c.kind = CurveKind::line;
  c.t0 = t0;
  c.t1 = t1;
  return c;
}

CurveSpec CurveSpec::circle(double radius) {
  require_positive(radius, "circle radius");
  CurveSpec c;
  c.kind = CurveKind::circle;
  c.radius = radius;
  c.t0 = 0.0;
  c.t1 = 2.0 * kPi;
  c.closed = true;
  return c;
}

CurveSpec CurveSpec::ellipse(double a, double b) {
  require_positive(a, "ellipse semi-axis a");
  require_positive(b, "ellipse semi-axis b");
  CurveSpec c;
  c.kind = CurveKind::ellipse;
  c.semi_a = a;
  c.semi_b = b;
  c.t0 = 0.0;
  c.t1 = 2.0 * kPi;
  c.closed = true;
  return c;
}

CurveSpec CurveSpec::parabola(double coef, double t0, double t1) {
  if (!(t1 > t0)) throw DomainError("parabola: empty parameter interval");
  CurveSpec c;
  c.kind = CurveKind::parabola;
  c.coef = coef;
  c.t0 = t0;
  c.t1 = t1;
  return c;
}

std::string CurveSpec::name() const {
  switch (kind) {
    case CurveKind::line:
      return "line";
    case CurveKind::circle:
      return "circle(R=" + format_number(radius) + ")";
    case CurveKind::ellipse:
      return "ellipse(a=" + format_number(semi_a) + ",b=" + format_number(semi_b) + ")";
    case CurveKind::parabola:
      return "parabola(c=" + format_number(coef) + ")";
  }
  return "curve";
}

// ---------------------------------------------------------------------------
// Arc length

ArcLengthMap::ArcLengthMap(const CurveSpec& curve, double tol) : curve_(curve), tol_(tol) {
  if (!(tol > 0.0)) throw UsageError("arc_length_reparam: tolerance must be positive");

  constexpr int kInitialSegments = 32;
  constexpr std::size_t kMaxKnots = 1 << 16;
  const double span = curve.t1 - curve.t0;

  t_.resize(kInitialSegments + 1);
  for (int i = 0; i <= kInitialSegments; ++i) {
    t_[i] = curve.t0 + span * i / kInitialSegments;
  }
  t_.back() = curve.t1;

  double speed_scale = 0.0;
  for (double t : t_) speed_scale = std::max(speed_scale, speed(t));
  const double singular_floor = 1e-12 * std::max(speed_scale, 1e-300);
  auto check_regular = [&](double t, double v) {
    if (!(v > singular_floor)) {
      throw SingularPointError("arc_length_reparam: non-regular point at t = " +
                               std::to_string(t));
    }
  };

  auto rebuild = [&] {
    speed_.resize(t_.size());
    s_.resize(t_.size());
    s_[0] = 0.0;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      speed_[i] = speed(t_[i]);
      check_regular(t_[i], speed_[i]);
      if (i > 0) s_[i] = s_[i - 1] + segment_integral(t_[i - 1], t_[i]);
    }
  };
  rebuild();

  for (;;) {
    std::vector<double> inserted;
    for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
      const double tm = 0.5 * (t_[i] + t_[i + 1]);
      check_regular(tm, speed(tm));
      const double sm = s_[i] + segment_integral(t_[i], tm);
      if (std::abs(hermite_parameter(sm) - tm) > tol_ * span) inserted.push_back(tm);
    }
    if (inserted.empty()) break;
    if (t_.size() + inserted.size() > kMaxKnots) {
      throw SingularPointError("arc_length_reparam: knot budget exhausted");
    }
    t_.insert(t_.end(), inserted.begin(), inserted.end());
    std::sort(t_.begin(), t_.end());
    rebuild();
  }
}

ArcLengthMap arc_length_reparam(const CurveSpec& curve, double tol) { return ArcLengthMap(curve, tol); }

double ArcLengthMap::speed(double t) const {
  return detail::evaluate_curve(curve_, t).d1.norm();
}

double ArcLengthMap::segment_integral(double a, double b) const {
  if (a == b) return 0.0;
  auto f = [this](double t) { return speed(t); };
  return boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
}

double ArcLengthMap::hermite_parameter(double s) const {
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t i = it == s_.begin() ? 0 : std::size_t(it - s_.begin()) - 1;
  i = std::min(i, s_.size() - 2);
  const double h = s_[i + 1] - s_[i];
  const double x = (s - s_[i]) / h;
  const double x2 = x * x, x3 = x2 * x;
  const double h00 = 2 * x3 - 3 * x2 + 1;
  const double h10 = x3 - 2 * x2 + x;
  const double h01 = -2 * x3 + 3 * x2;
  const double h11 = x3 - x2;
  return h00 * t_[i] + h10 * h / speed_[i] + h01 * t_[i + 1] + h11 * h / speed_[i + 1];
}

double ArcLengthMap::arc_length(double t) const {
  double offset = 0.0;
  if (curve_.closed) {
    const double period = curve_.period();
    const double turns = std::floor((t - curve_.t0) / period);
    t -= turns * period;
    offset = turns * length();
  } else if (t < curve_.t0 || t > curve_.t1) {
    throw DomainError("arc_length: parameter outside the curve domain");
  }
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = it == t_.begin() ? 0 : std::size_t(it - t_.begin()) - 1;
  i = std::min(i, t_.size() - 2);
  return offset + s_[i] + segment_integral(t_[i], t);
}

double ArcLengthMap::parameter(double s) const {
  double offset = 0.0;
  if (curve_.closed) {
    const double turns = std::floor(s / length());
    s -= turns * length();
    offset = turns * curve_.period();
  } else if (s < 0.0 || s > length()) {
    throw DomainError("arc_length: arc length outside [0, L]");
  }
  double t = hermite_parameter(s);
  const double span = curve_.t1 - curve_.t0;
  for (int iter = 0; iter < 6; ++iter) {
    const double step = (arc_length(std::clamp(t, curve_.t0, curve_.t1)) - s) / speed(t);
    t = std::clamp(t - step, curve_.t0, curve_.t1);
    if (std::abs(step) <= 1e-15 * span) break;
  }
  return offset + t;
}

// ---------------------------------------------------------------------------
// Surfaces

SurfaceSpec SurfaceSpec::plane() {
  SurfaceSpec s;
  s.kind = SurfaceKind::plane;
  return s;
}

SurfaceSpec SurfaceSpec::sphere(double radius) {
  require_positive(radius, "sphere radius");
  SurfaceSpec s;
  s.kind = SurfaceKind::sphere;
  s.radius = radius;
  s.u0 = 0.0;
  s.u1 = kPi;
  s.v0 = 0.0;
  s.v1 = 2.0 * kPi;
  return s;
}

SurfaceSpec SurfaceSpec::cylinder(double radius) {
  require_positive(radius, "cylinder radius");
  SurfaceSpec s;
  s.kind = SurfaceKind::cylinder;
  s.radius = radius;
  s.u0 = 0.0;
  s.u1 = 2.0 * kPi;
  s.v0 = -1.0;
  s.v1 = 1.0;
  return s;
}

SurfaceSpec SurfaceSpec::torus(double big_radius, double small_radius) {
  require_positive(small_radius, "torus tube radius");
  if (!(big_radius > small_radius)) {
    throw DomainError("torus: center radius must exceed tube radius");
  }
  SurfaceSpec s;
  s.kind = SurfaceKind::torus;
  s.radius = big_radius;
  s.tube_radius = small_radius;
  s.u0 = 0.0;
  s.u1 = 2.0 * kPi;
  s.v0 = 0.0;
  s.v1 = 2.0 * kPi;
  return s;
}

std::string SurfaceSpec::name() const {
  switch (kind) {
    case SurfaceKind::plane:
      return "plane";
    case SurfaceKind::sphere:
      return "sphere(R=" + format_number(radius) + ")";
    case SurfaceKind::cylinder:
      return "cylinder(R=" + format_number(radius) + ")";
    case SurfaceKind::torus:
      return "torus(R=" + format_number(radius) + ",r=" + format_number(tube_radius) + ")";
  }
  return "surface";
}

Curvatures<double> surface_curvatures(const SurfaceSpec& surface, double u, double v) {
  return curvatures(fundamental_forms(surface_jet(surface, u, v)));
}

double integrate_gauss_curvature(const SurfaceSpec& surface, int nv) {
  if (nv < 4) throw UsageError("integrate_gauss_curvature: nv must be at least 4");
  const double hv = (surface.v1 - surface.v0) / nv;
  auto row = [&](double u) {
    double sum = 0.0;
    for (int j = 0; j < nv; ++j) {
      const double v = surface.v0 + (j + 0.5) * hv;
      const auto forms = fundamental_forms(detail::evaluate_surface(surface, u, v));
      const double area = std::sqrt(forms.E * forms.G - forms.F * forms.F);
      sum += curvatures(forms).K * area;
    }
    return sum * hv;
  };
  return boost::math::quadrature::gauss<double, 64>::integrate(row, surface.u0, surface.u1);
}

// ---------------------------------------------------------------------------
// Thin layer

std::string LatitudeCircle::name() const {
  return "latitude(R=" + format_number(sphere_radius) + ",theta=" + format_number(theta0) + ")";
}

std::string geometry_name(const GeometrySpec& spec) {
  return std::visit([](const auto& g) { return g.name(); }, spec);
}

double layer_metric_curve(const ArcLengthMap& map, double s, double q2) {
  const double t = map.parameter(s);
  const double k = plane_curvature(curve_jet(map.curve(), t));
  const double factor = 1.0 - q2 * k;
  if (!(std::abs(q2 * k) < 1.0)) {
    throw BreakdownError("layer_metric_curve: |q2 k| >= 1, layer coordinates break down");
  }
  return factor * factor;
}

double layer_metric_curve(const CurveSpec& curve, double s, double q2) {
  return layer_metric_curve(ArcLengthMap(curve), s, q2);
}

double layer_metric_surface(const SurfaceSpec& surface, double u, double v, double q3) {
  const auto c = surface_curvatures(surface, u, v);
  const double kmax = std::max(std::abs(c.k1), std::abs(c.k2));
  if (!(std::abs(q3) * kmax < 1.0)) {
    throw BreakdownError("layer_metric_surface: |q3| max|k| >= 1, layer coordinates break down");
  }
  return (1.0 - q3 * c.k1) * (1.0 - q3 * c.k2);
}

namespace {

double radius_from_curvature(double kmax) {
  return kmax > 0.0 ? 1.0 / kmax : std::numeric_limits<double>::infinity();
}

/// Central difference with one Richardson refinement.
template <typename F>
auto richardson_derivative(F&& f, double x, double h) {
  auto d = [&](double step) { return ((f(x + step) - f(x - step)) / (2.0 * step)).eval(); };
  return ((4.0 * d(0.5 * h) - d(h)) / 3.0).eval();
}

double gram_determinant(const Eigen::MatrixXd& jac) {
  const double det = (jac.transpose() * jac).determinant();
  double scale = 1.0;
  for (Eigen::Index c = 0; c < jac.cols(); ++c) scale *= jac.col(c).squaredNorm();
  if (!(det > 1e-14 * scale)) {
    throw BreakdownError("layer_metric_numeric: Jacobian numerically singular");
  }
  return det;
}

}  // namespace

double curvature_radius(const GeometrySpec& spec, const Eigen::Vector2d& tangential) {
  if (const auto* curve = std::get_if<CurveSpec>(&spec)) {
    const double k = plane_curvature(detail::evaluate_curve(*curve, tangential.x()));
    return radius_from_curvature(std::abs(k));
  }
  if (const auto* surface = std::get_if<SurfaceSpec>(&spec)) {
    const auto c = curvatures(fundamental_forms(
        detail::evaluate_surface(*surface, tangential.x(), tangential.y())));
    return radius_from_curvature(std::max(std::abs(c.k1), std::abs(c.k2)));
  }
  const auto& lat = std::get<LatitudeCircle>(spec);
  return lat.sphere_radius * std::sin(lat.theta0);
}

double layer_metric_numeric(const GeometrySpec& spec, const LayerPoint& point, double step) {
  const double radius = curvature_radius(spec, point.tangential);
  if (!(step > 0.0)) step = 1e-4 * (std::isfinite(radius) ? radius : 1.0);
  const double q = point.normal_offset;

  if (const auto* curve = std::get_if<CurveSpec>(&spec)) {
    const double t = point.tangential.x();
    if (!curve->closed && (t < curve->t0 || t > curve->t1)) {
      throw DomainError("layer_metric_numeric: parameter outside the curve domain");
    }
    if (!(std::abs(q) < radius)) {
      throw BreakdownError("layer_metric_numeric: |q| |k| >= 1, layer coordinates break down");
    }
    auto base = [&](double s) { return detail::evaluate_curve(*curve, s).position; };
    auto normal = [&](double s) { return curve_normal(detail::evaluate_curve(*curve, s)); };
    const double ht = step / detail::evaluate_curve(*curve, t).d1.norm();
    Eigen::MatrixXd jac(2, 2);
    jac.col(0) = richardson_derivative(base, t, ht) + q * richardson_derivative(normal, t, ht);
    jac.col(1) = normal(t);
    return gram_determinant(jac);
  }

  if (const auto* surface = std::get_if<SurfaceSpec>(&spec)) {
    const double u = point.tangential.x(), v = point.tangential.y();
    if (u < surface->u0 || u > surface->u1 || v < surface->v0 || v > surface->v1) {
      throw DomainError("layer_metric_numeric: (u, v) outside the surface parameter box");
    }
    if (!(std::abs(q) < radius)) {
      throw BreakdownError("layer_metric_numeric: |q| max|k| >= 1, layer coordinates break down");
    }
    const auto jet = detail::evaluate_surface(*surface, u, v);
    auto base_u = [&](double s) { return detail::evaluate_surface(*surface, s, v).position; };
    auto base_v = [&](double s) { return detail::evaluate_surface(*surface, u, s).position; };
    auto unit_normal = [&](double a, double b) {
      const auto j = detail::evaluate_surface(*surface, a, b);
      return Vec3<double>(j.r_u.cross(j.r_v).normalized());
    };
    auto normal_u = [&](double s) { return unit_normal(s, v); };
    auto normal_v = [&](double s) { return unit_normal(u, s); };
    const double hu = step / jet.r_u.norm();
    const double hv = step / jet.r_v.norm();
    Eigen::MatrixXd jac(3, 3);
    jac.col(0) = richardson_derivative(base_u, u, hu) + q * richardson_derivative(normal_u, u, hu);
    jac.col(1) = richardson_derivative(base_v, v, hv) + q * richardson_derivative(normal_v, v, hv);
    jac.col(2) = unit_normal(u, v);
    return gram_determinant(jac);
  }

  const auto& lat = std::get<LatitudeCircle>(spec);
  const double theta = lat.theta0 + q;
  if (!(theta > 0.0 && theta < kPi)) {
    throw BreakdownError("layer_metric_numeric: polar angle leaves (0, pi)");
  }
  const double R = lat.sphere_radius;
  const double phi = point.tangential.x();
  auto embed = [R](double ph, double th) {
    return Vec3<double>(R * std::sin(th) * std::cos(ph), R * std::sin(th) * std::sin(ph),
                        R * std::cos(th));
  };
  auto along_phi = [&](double s) { return embed(s, theta); };
  auto along_theta = [&](double s) { return embed(phi, s); };
  Eigen::MatrixXd jac(3, 2);
  jac.col(0) = richardson_derivative(along_phi, phi, step / (R * std::sin(theta)));
  jac.col(1) = richardson_derivative(along_theta, theta, step / R);
  return gram_determinant(jac);
}

}  // namespace qreduce
