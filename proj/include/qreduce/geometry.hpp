#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "qreduce/error.hpp"

namespace qreduce {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

// ---------------------------------------------------------------------------
// Plane curves
// ---------------------------------------------------------------------------

enum class CurveKind { line, circle, ellipse, parabola };

/// Catalog plane curve. Closed curves are periodic in t with period t1 - t0.
struct CurveSpec {
  CurveKind kind = CurveKind::line;
  double radius = 1.0;  // circle
  double semi_a = 1.0;  // ellipse, along x
  double semi_b = 1.0;  // ellipse, along y
  double coef = 1.0;    // parabola y = coef * x^2
  double t0 = 0.0;
  double t1 = 1.0;
  bool closed = false;

  /// (t, 0) over [t0, t1], unit speed.
  static CurveSpec line(double t0, double t1);
  /// R (cos t, sin t), counterclockwise.
  static CurveSpec circle(double radius);
  /// (a cos t, b sin t), counterclockwise.
  static CurveSpec ellipse(double a, double b);
  /// (t, c t^2) over [t0, t1]; curvature 2c at the vertex.
  static CurveSpec parabola(double coef, double t0 = -1.0, double t1 = 1.0);

  std::string name() const;
  double period() const { return t1 - t0; }
};

template <typename Scalar>
struct CurveJet {
  Vec2<Scalar> position;
  Vec2<Scalar> d1;
  Vec2<Scalar> d2;
  Vec2<Scalar> d3;
};

namespace detail {

/// Closed-form jet without the domain check. Used by finite-difference
/// stencils that step slightly past an open end.
template <typename Scalar>
CurveJet<Scalar> evaluate_curve(const CurveSpec& curve, Scalar t) {
  using std::cos;
  using std::sin;
  CurveJet<Scalar> jet;
  switch (curve.kind) {
    case CurveKind::line:
      jet.position = Vec2<Scalar>(t, Scalar(0));
      jet.d1 = Vec2<Scalar>(Scalar(1), Scalar(0));
      jet.d2 = Vec2<Scalar>::Zero();
      jet.d3 = Vec2<Scalar>::Zero();
      break;
    case CurveKind::circle: {
      const Scalar r(curve.radius);
      const Scalar c = cos(t), s = sin(t);
      jet.position = Vec2<Scalar>(r * c, r * s);
      jet.d1 = Vec2<Scalar>(-r * s, r * c);
      jet.d2 = Vec2<Scalar>(-r * c, -r * s);
      jet.d3 = Vec2<Scalar>(r * s, -r * c);
      break;
    }
    case CurveKind::ellipse: {
      const Scalar a(curve.semi_a), b(curve.semi_b);
      const Scalar c = cos(t), s = sin(t);
      jet.position = Vec2<Scalar>(a * c, b * s);
      jet.d1 = Vec2<Scalar>(-a * s, b * c);
      jet.d2 = Vec2<Scalar>(-a * c, -b * s);
      jet.d3 = Vec2<Scalar>(a * s, -b * c);
      break;
    }
    case CurveKind::parabola: {
      const Scalar c(curve.coef);
      jet.position = Vec2<Scalar>(t, c * t * t);
      jet.d1 = Vec2<Scalar>(Scalar(1), Scalar(2) * c * t);
      jet.d2 = Vec2<Scalar>(Scalar(0), Scalar(2) * c);
      jet.d3 = Vec2<Scalar>::Zero();
      break;
    }
  }
  return jet;
}

}  // namespace detail

/// Exact derivatives of the catalog parametrization at t. Closed curves accept
/// any t (periodic); open curves throw DomainError outside [t0, t1].
template <typename Scalar = double>
CurveJet<Scalar> curve_jet(const CurveSpec& curve, Scalar t) {
  if (!curve.closed && (t < Scalar(curve.t0) || t > Scalar(curve.t1))) {
    throw DomainError("curve_jet: parameter " + std::to_string(double(t)) +
                      " outside [" + std::to_string(curve.t0) + ", " +
                      std::to_string(curve.t1) + "] of " + curve.name());
  }
  return detail::evaluate_curve(curve, t);
}

/// Signed curvature (x'y'' - y'x'') / |d1|^3, counterclockwise positive.
template <typename Scalar>
Scalar plane_curvature(const CurveJet<Scalar>& jet) {
  using std::sqrt;
  const Scalar speed2 = jet.d1.squaredNorm();
  if (!(speed2 > Scalar(0))) {
    throw SingularPointError("plane_curvature: vanishing tangent");
  }
  const Scalar cross = jet.d1.x() * jet.d2.y() - jet.d1.y() * jet.d2.x();
  return cross / (speed2 * sqrt(speed2));
}

/// Unit normal obtained by rotating the tangent a quarter turn counterclockwise.
/// For a counterclockwise circle it points at the center, so offsets along it
/// shrink the parallel curve when k > 0.
template <typename Scalar>
Vec2<Scalar> curve_normal(const CurveJet<Scalar>& jet) {
  const Scalar speed = jet.d1.norm();
  if (!(speed > Scalar(0))) {
    throw SingularPointError("curve_normal: vanishing tangent");
  }
  return Vec2<Scalar>(-jet.d1.y(), jet.d1.x()) / speed;
}

/// Monotone arc-length map s <-> t for a regular curve.
///
/// Forward evaluation integrates |d1| with 30-point Gauss-Legendre on the knot interval
/// containing t. The inverse starts from a cubic Hermite interpolant through
/// the knots (slopes dt/ds = 1/|d1|) and is
/// polished by Newton steps on s(t) - s. Knots are bisected until the
/// interpolant alone is within tol * (t1 - t0) at every interval midpoint.
class ArcLengthMap {
 public:
  ArcLengthMap(const CurveSpec& curve, double tol = 1e-9);

  double length() const { return s_.back(); }
  double arc_length(double t) const;
  double parameter(double s) const;
  const CurveSpec& curve() const { return curve_; }
  std::size_t knot_count() const { return t_.size(); }

 private:
  double speed(double t) const;
  double segment_integral(double a, double b) const;
  double hermite_parameter(double s) const;

  CurveSpec curve_;
  double tol_;
  std::vector<double> t_;
  std::vector<double> s_;
  std::vector<double> speed_;
};

/// Builds the arc-length map of a regular curve; |s(t) error| <= tol * L.
ArcLengthMap arc_length_reparam(const CurveSpec& curve, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Surfaces in 3-space
// ---------------------------------------------------------------------------

enum class SurfaceKind { plane, sphere, cylinder, torus };

/// Catalog surface. Azimuthal angles run clockwise (seen from +z) so that
/// r_u x r_v points toward the centers of curvature on the sphere, cylinder
/// and torus; their principal curvatures are then positive.
///
///   plane     (u, v, 0)
///   sphere    R (sin u cos v, -sin u sin v, cos u), u polar angle
///   cylinder  (R cos u, -R sin u, v)
///   torus     ((R + r cos v) cos u, -(R + r cos v) sin u, r sin v), v tube angle
struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::plane;
  double radius = 1.0;       // sphere, cylinder, torus center circle
  double tube_radius = 0.5;  // torus
  double u0 = -1.0, u1 = 1.0;
  double v0 = -1.0, v1 = 1.0;

  static SurfaceSpec plane();
  static SurfaceSpec sphere(double radius);
  static SurfaceSpec cylinder(double radius);
  static SurfaceSpec torus(double big_radius, double small_radius);

  std::string name() const;
};

template <typename Scalar>
struct SurfaceJet {
  Vec3<Scalar> position;
  Vec3<Scalar> r_u, r_v;
  Vec3<Scalar> r_uu, r_uv, r_vv;
};

namespace detail {

template <typename Scalar>
SurfaceJet<Scalar> evaluate_surface(const SurfaceSpec& surface, Scalar u, Scalar v) {
  using std::cos;
  using std::sin;
  SurfaceJet<Scalar> j;
  const Scalar R(surface.radius);
  switch (surface.kind) {
    case SurfaceKind::plane:
      j.position = Vec3<Scalar>(u, v, Scalar(0));
      j.r_u = Vec3<Scalar>(1, 0, 0);
      j.r_v = Vec3<Scalar>(0, 1, 0);
      j.r_uu = j.r_uv = j.r_vv = Vec3<Scalar>::Zero();
      break;
    case SurfaceKind::sphere: {
      const Scalar cu = cos(u), su = sin(u), cv = cos(v), sv = sin(v);
      j.position = R * Vec3<Scalar>(su * cv, -su * sv, cu);
      j.r_u = R * Vec3<Scalar>(cu * cv, -cu * sv, -su);
      j.r_v = R * Vec3<Scalar>(-su * sv, -su * cv, Scalar(0));
      j.r_uu = R * Vec3<Scalar>(-su * cv, su * sv, -cu);
      j.r_uv = R * Vec3<Scalar>(-cu * sv, -cu * cv, Scalar(0));
      j.r_vv = R * Vec3<Scalar>(-su * cv, su * sv, Scalar(0));
      break;
    }
    case SurfaceKind::cylinder: {
      const Scalar cu = cos(u), su = sin(u);
      j.position = Vec3<Scalar>(R * cu, -R * su, v);
      j.r_u = R * Vec3<Scalar>(-su, -cu, Scalar(0));
      j.r_v = Vec3<Scalar>(0, 0, 1);
      j.r_uu = R * Vec3<Scalar>(-cu, su, Scalar(0));
      j.r_uv = j.r_vv = Vec3<Scalar>::Zero();
      break;
    }
    case SurfaceKind::torus: {
      const Scalar r(surface.tube_radius);
      const Scalar cu = cos(u), su = sin(u), cv = cos(v), sv = sin(v);
      const Scalar rho = R + r * cv;
      j.position = Vec3<Scalar>(rho * cu, -rho * su, r * sv);
      j.r_u = rho * Vec3<Scalar>(-su, -cu, Scalar(0));
      j.r_v = r * Vec3<Scalar>(-sv * cu, sv * su, cv);
      j.r_uu = rho * Vec3<Scalar>(-cu, su, Scalar(0));
      j.r_uv = r * sv * Vec3<Scalar>(su, cu, Scalar(0));
      j.r_vv = r * Vec3<Scalar>(-cv * cu, cv * su, -sv);
      break;
    }
  }
  return j;
}

}  // namespace detail

/// Closed-form first and second partials; DomainError outside the (u, v) box.
template <typename Scalar = double>
SurfaceJet<Scalar> surface_jet(const SurfaceSpec& surface, Scalar u, Scalar v) {
  if (u < Scalar(surface.u0) || u > Scalar(surface.u1) || v < Scalar(surface.v0) ||
      v > Scalar(surface.v1)) {
    throw DomainError("surface_jet: (u, v) outside the parameter box of " + surface.name());
  }
  return detail::evaluate_surface(surface, u, v);
}

/// First (E, F, G) and second (L, M, N) fundamental forms. The second form is
/// taken against normal = r_u x r_v / |r_u x r_v|.
template <typename Scalar>
struct Forms {
  Scalar E, F, G;
  Scalar L, M, N;
  Vec3<Scalar> normal;
};

template <typename Scalar>
Forms<Scalar> fundamental_forms(const SurfaceJet<Scalar>& jet) {
  const Vec3<Scalar> cross = jet.r_u.cross(jet.r_v);
  const Scalar area = cross.norm();
  const Scalar scale = jet.r_u.norm() * jet.r_v.norm();
  if (!(area > Scalar(1e-14) * scale) || !(scale > Scalar(0))) {
    throw DegenerateError("fundamental_forms: r_u x r_v vanishes");
  }
  Forms<Scalar> f;
  f.normal = cross / area;
  f.E = jet.r_u.dot(jet.r_u);
  f.F = jet.r_u.dot(jet.r_v);
  f.G = jet.r_v.dot(jet.r_v);
  f.L = f.normal.dot(jet.r_uu);
  f.M = f.normal.dot(jet.r_uv);
  f.N = f.normal.dot(jet.r_vv);
  return f;
}

/// Mean, Gauss and principal curvatures, k1 >= k2.
template <typename Scalar>
struct Curvatures {
  Scalar H, K;
  Scalar k1, k2;
};

template <typename Scalar>
Curvatures<Scalar> curvatures(const Forms<Scalar>& f) {
  using std::abs;
  using std::sqrt;
  const Scalar det = f.E * f.G - f.F * f.F;
  if (!(det > Scalar(0))) {
    throw DegenerateError("curvatures: EG - F^2 <= 0");
  }
  Curvatures<Scalar> c;
  c.K = (f.L * f.N - f.M * f.M) / det;
  c.H = (f.E * f.N + f.G * f.L - Scalar(2) * f.F * f.M) / (Scalar(2) * det);
  Scalar disc = c.H * c.H - c.K;
  // Umbilics round to tiny negative discriminants.
  if (disc < Scalar(0)) disc = Scalar(0);
  const Scalar root = sqrt(disc);
  c.k1 = c.H + root;
  c.k2 = c.H - root;
  return c;
}

/// Convenience: curvatures straight from a catalog point.
Curvatures<double> surface_curvatures(const SurfaceSpec& surface, double u, double v);

/// Integral of K dA over the whole parameter box (64-point Gauss-Legendre in
/// u, nv-point trapezoid in v, which is periodic for the closed surfaces).
double integrate_gauss_curvature(const SurfaceSpec& surface, int nv = 128);

// ---------------------------------------------------------------------------
// Thin-layer coordinates
// ---------------------------------------------------------------------------

/// Latitude circle theta = theta0 on a sphere of radius R. The layer
/// coordinate is the polar-angle offset theta - theta0 (lapse R).
struct LatitudeCircle {
  double sphere_radius = 1.0;
  double theta0 = std::numbers::pi / 2;

  std::string name() const;
};

using GeometrySpec = std::variant<CurveSpec, SurfaceSpec, LatitudeCircle>;

std::string geometry_name(const GeometrySpec& spec);

/// Tangential parameters plus normal offset. Curves and latitude circles use
/// only tangential.x().
struct LayerPoint {
  Eigen::Vector2d tangential = Eigen::Vector2d::Zero();
  double normal_offset = 0.0;
};

/// g = (1 - q2 k(s))^2 at arc length s; BreakdownError when |q2 k| >= 1.
double layer_metric_curve(const ArcLengthMap& map, double s, double q2);
double layer_metric_curve(const CurveSpec& curve, double s, double q2);

/// (1 - q3 k1)(1 - q3 k2) = 1 - 2 q3 H + K q3^2 at the offset point
/// r + q3 n; BreakdownError when q3 max|k_i| >= 1.
double layer_metric_surface(const SurfaceSpec& surface, double u, double v, double q3);

/// Smallest radius of curvature at the base point (infinite when flat).
double curvature_radius(const GeometrySpec& spec, const Eigen::Vector2d& tangential);

/// Determinant of J^T J for the layer embedding (tangential, q) -> ambient,
/// J by central differences with step `step` (a length; parameter steps are
/// step / |partial|) and one Richardson refinement. For curves and surfaces
/// the embedding is base(t) + q normal(t) and the differences are taken on the
/// base and normal separately. Non-positive `step` picks
/// 1e-4 * curvature_radius (1e-4 when flat).
double layer_metric_numeric(const GeometrySpec& spec, const LayerPoint& point, double step = 0.0);

}  // namespace qreduce
