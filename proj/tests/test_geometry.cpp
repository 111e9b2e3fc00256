#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qreduce/geometry.hpp"

using namespace qreduce;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("catalog curves have their textbook curvature") {
  for (double r : {0.5, 1.0, 2.0}) {
    for (double t : {0.0, 0.7, 2.5, 5.9}) {
      CHECK(plane_curvature(curve_jet(CurveSpec::circle(r), t)) == doctest::Approx(1.0 / r).epsilon(1e-14));
    }
  }
  // a b / (a^2 sin^2 t + b^2 cos^2 t)^(3/2), evaluated independently
  CHECK(plane_curvature(curve_jet(CurveSpec::ellipse(1.5, 1.0), 0.3)) ==
        doctest::Approx(1.2840941943153186).epsilon(1e-14));
  CHECK(plane_curvature(curve_jet(CurveSpec::parabola(0.75), 0.0)) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(plane_curvature(curve_jet(CurveSpec::line(-1, 1), 0.2)) == 0.0);
}

TEST_CASE("curve jets work in extended precision") {
  const auto jet = curve_jet<long double>(CurveSpec::circle(2.0), 0.4L);
  CHECK(std::abs(plane_curvature(jet) - 0.5L) < 1e-17L);
  CHECK(std::abs(curve_normal(jet).norm() - 1.0L) < 1e-17L);
}

TEST_CASE("open curves reject parameters outside their domain") {
  CHECK_THROWS_AS(curve_jet(CurveSpec::parabola(1.0), 1.5), DomainError);
  CHECK_THROWS_AS(curve_jet(CurveSpec::line(0, 1), -0.1), DomainError);
  CHECK_NOTHROW(curve_jet(CurveSpec::circle(1.0), 9.0));
  CHECK_THROWS_AS(CurveSpec::circle(-1.0), Error);
}

TEST_CASE("arc length matches the complete elliptic integral") {
  const ArcLengthMap map(CurveSpec::ellipse(1.5, 1.0));
  CHECK(map.length() == doctest::Approx(7.9327197946452948).epsilon(1e-12));
  CHECK(map.arc_length(1.0) == doctest::Approx(1.1518214959698443).epsilon(1e-12));
  CHECK(ArcLengthMap(CurveSpec::circle(2.0)).length() == doctest::Approx(4.0 * pi).epsilon(1e-14));
  CHECK(std::abs(arc_length_reparam(CurveSpec::circle(1.0)).length() - 2 * pi) <= 1e-10);
  const auto line = arc_length_reparam(CurveSpec::line(0.0, 3.0));
  CHECK(line.length() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(line.arc_length(1.7) == doctest::Approx(1.7).epsilon(1e-15));
  CHECK_THROWS_AS(arc_length_reparam(CurveSpec::circle(1.0), 0.0), UsageError);
}

TEST_CASE("arc length round trip and unit speed") {
  std::mt19937_64 rng(11);
  for (const auto& curve : {CurveSpec::circle(0.5), CurveSpec::ellipse(1.5, 1.0), CurveSpec::ellipse(3.0, 0.5),
                            CurveSpec::parabola(1.0), CurveSpec::parabola(-2.0, -0.5, 2.0)}) {
    CAPTURE(curve.name());
    const ArcLengthMap map(curve);
    std::uniform_real_distribution<double> pick(0.0, map.length());
    for (int i = 0; i < 50; ++i) {
      const double s = pick(rng);
      const double t = map.parameter(s);
      CHECK(std::abs(map.arc_length(t) - s) <= 1e-9 * map.length());
      // |dr/ds| = |r'(t)| dt/ds = 1, dt/ds by central differences
      const double h = 1e-6 * map.length();
      if (s - h < 0 || s + h > map.length()) continue;
      const double dtds = (map.parameter(s + h) - map.parameter(s - h)) / (2 * h);
      CHECK(curve_jet(curve, t).d1.norm() * dtds == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("surface curvatures of the catalog") {
  for (double r : {0.5, 1.0, 3.0}) {
    const auto c = surface_curvatures(SurfaceSpec::sphere(r), 1.1, 0.3);
    CHECK(c.H == doctest::Approx(1.0 / r).epsilon(1e-13));
    CHECK(c.K == doctest::Approx(1.0 / (r * r)).epsilon(1e-13));
    const auto cyl = surface_curvatures(SurfaceSpec::cylinder(r), 2.0, 0.5);
    CHECK(cyl.H == doctest::Approx(0.5 / r).epsilon(1e-13));
    CHECK(std::abs(cyl.K) < 1e-14);
  }
  const auto outer = surface_curvatures(SurfaceSpec::torus(3.0, 1.0), 0.0, 0.0);
  CHECK(outer.k1 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(outer.k2 == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(outer.H == doctest::Approx(0.625).epsilon(1e-13));
  // cos v / (R + r cos v) and 1 / r at v = 0.4
  const auto t = surface_curvatures(SurfaceSpec::torus(3.0, 1.0), 0.7, 0.4);
  CHECK(t.H == doctest::Approx(0.6174504802924021).epsilon(1e-13));
  CHECK(t.K == doctest::Approx(0.23490096058480425).epsilon(1e-13));
  const auto flat = surface_curvatures(SurfaceSpec::plane(), 0.1, 0.2);
  CHECK(flat.H == 0.0);
  CHECK(flat.K == 0.0);
}

TEST_CASE("curvature invariants at random points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& s : {SurfaceSpec::sphere(1.3), SurfaceSpec::cylinder(0.7), SurfaceSpec::torus(2.0, 0.5)}) {
    CAPTURE(s.name());
    for (int i = 0; i < 40; ++i) {
      const double u = s.u0 + (0.05 + 0.9 * unit(rng)) * (s.u1 - s.u0);
      const double v = s.v0 + unit(rng) * (s.v1 - s.v0);
      const auto jet = surface_jet(s, u, v);
      const auto f = fundamental_forms(jet);
      const auto c = curvatures(f);
      CHECK(c.H * c.H - c.K >= -1e-14);
      CHECK(c.k1 >= c.k2);
      CHECK(c.k1 * c.k2 == doctest::Approx(c.K).epsilon(1e-12).scale(1.0));
      CHECK(0.5 * (c.k1 + c.k2) == doctest::Approx(c.H).epsilon(1e-12).scale(1.0));
      CHECK(f.normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::abs(f.normal.dot(jet.r_u)) < 1e-13);
      CHECK(std::abs(f.normal.dot(jet.r_v)) < 1e-13);
    }
  }
}

TEST_CASE("Gauss-Bonnet on closed surfaces") {
  CHECK(integrate_gauss_curvature(SurfaceSpec::sphere(1.7)) == doctest::Approx(4.0 * pi).epsilon(1e-11));
  CHECK(std::abs(integrate_gauss_curvature(SurfaceSpec::torus(3.0, 1.0))) < 1e-10);
  CHECK(std::abs(integrate_gauss_curvature(SurfaceSpec::torus(1.5, 1.0))) < 1e-10);
}

TEST_CASE("degenerate charts and layer breakdown") {
  CHECK_THROWS_AS(fundamental_forms(surface_jet(SurfaceSpec::sphere(1.0), 0.0, 0.3)), DegenerateError);
  CHECK_THROWS_AS(surface_jet(SurfaceSpec::sphere(1.0), -0.1, 0.3), DomainError);
  CHECK_THROWS_AS(SurfaceSpec::torus(1.0, 2.0), DomainError);
  CHECK_THROWS_AS(layer_metric_curve(CurveSpec::circle(1.0), 0.3, 1.0), BreakdownError);
  CHECK_THROWS_AS(layer_metric_surface(SurfaceSpec::sphere(1.0), 1.0, 0.2, 1.2), BreakdownError);
}

TEST_CASE("layer metric: closed forms against the numeric embedding") {
  const CurveSpec ellipse = CurveSpec::ellipse(1.5, 1.0);
  const ArcLengthMap map(ellipse);
  for (double s : {0.0, 1.0, 3.3, 6.0}) {
    const double k = plane_curvature(curve_jet(ellipse, map.parameter(s)));
    for (double q : {-0.2, 0.0, 0.1}) {
      CHECK(layer_metric_curve(map, s, q) == doctest::Approx((1 - q * k) * (1 - q * k)).epsilon(1e-13));
      const double numeric = layer_metric_numeric(ellipse, {Eigen::Vector2d(map.parameter(s), 0.0), q});
      const double speed = curve_jet(ellipse, map.parameter(s)).d1.norm();
      // the numeric chart uses t, so its determinant carries |r'(t)|^2
      CHECK(numeric == doctest::Approx(speed * speed * (1 - q * k) * (1 - q * k)).epsilon(1e-8));
    }
  }
  const SurfaceSpec torus = SurfaceSpec::torus(3.0, 1.0);
  for (double q : {-0.3, 0.0, 0.2}) {
    const auto c = surface_curvatures(torus, 0.7, 0.4);
    const double factor = 1 - 2 * q * c.H + c.K * q * q;
    CHECK(layer_metric_surface(torus, 0.7, 0.4, q) == doctest::Approx(factor).epsilon(1e-13));
    const auto f = fundamental_forms(surface_jet(torus, 0.7, 0.4));
    const double area2 = f.E * f.G - f.F * f.F;
    const double numeric = layer_metric_numeric(torus, {Eigen::Vector2d(0.7, 0.4), q});
    CHECK(numeric == doctest::Approx(area2 * factor * factor).epsilon(1e-8));
  }
  const LatitudeCircle lat{2.0, 1.0};
  for (double q : {-0.1, 0.0, 0.2}) {
    const double expected = std::pow(2.0, 4) * std::pow(std::sin(1.0 + q), 2);
    CHECK(layer_metric_numeric(lat, {Eigen::Vector2d(0.3, 0.0), q}) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("layer metric examples") {
  CHECK(layer_metric_curve(CurveSpec::circle(1.0), 0.4, 0.1) == doctest::Approx(0.81).epsilon(1e-14));
  CHECK(layer_metric_curve(CurveSpec::ellipse(1.5, 1.0), 2.0, 0.0) == 1.0);
  CHECK(layer_metric_surface(SurfaceSpec::sphere(1.0), 1.0, 0.5, 0.1) == doctest::Approx(0.81).epsilon(1e-14));
  CHECK(layer_metric_surface(SurfaceSpec::plane(), 0.2, 0.3, 5.0) == 1.0);
  CHECK(std::abs(layer_metric_numeric(CurveSpec::circle(1.0), {Eigen::Vector2d(0.4, 0.0), 0.1}, 1e-4) - 0.81) <= 1e-6);
  CHECK(std::abs(layer_metric_numeric(SurfaceSpec::plane(), {Eigen::Vector2d(0.2, 0.3), 7.0}) - 1.0) <= 1e-8);
}
