#include <doctest.h>

#include <Eigen/Sparse>

#include <cmath>
#include <numbers>
#include <random>

#include "qreduce/spectral.hpp"

using namespace qreduce;

namespace {

constexpr double pi = std::numbers::pi;

Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) a(i, j) = a(j, i) = normal(rng);
  return a;
}

/// Eigenvalues of -(1/2) times the periodic second difference: (1 - cos(2 pi m / N)) / h^2.
double discrete_circle_level(double radius, int n, int m) {
  const double h = 2 * pi * radius / n;
  return (1 - std::cos(2 * pi * m / n)) / (h * h);
}

}  // namespace

TEST_CASE("Jacobi agrees with a reference symmetric eigensolver") {
  std::mt19937_64 rng(42);
  for (int n : {1, 2, 5, 17, 40}) {
    const Eigen::MatrixXd a = random_symmetric(n, rng);
    const auto dec = jacobi_eigen(a);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> reference(a);
    CHECK((dec.values - reference.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12 * a.norm());
    CHECK((dec.vectors.transpose() * dec.vectors - Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-12 * n);
    CHECK((a * dec.vectors - dec.vectors * dec.values.asDiagonal()).norm() <= 1e-10 * a.norm());
    for (int k = 1; k < n; ++k) CHECK(dec.values[k - 1] <= dec.values[k]);
  }
}

TEST_CASE("Jacobi is generic in the scalar") {
  Eigen::Matrix3f a;
  a << 2, 1, 0, 1, 2, 1, 0, 1, 2;
  const auto dec = jacobi_eigen(a, 1e-6);
  CHECK(dec.values[0] == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-5));
  CHECK(dec.values[2] == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-5));
  CHECK_THROWS_AS(jacobi_eigen(Eigen::MatrixXd::Zero(2, 3)), SolverError);
}

TEST_CASE("sparse shift-invert matches the dense solver") {
  const int nx = 12, ny = 9, n = nx * ny;
  std::vector<Eigen::Triplet<double>> entries;
  auto id = [&](int i, int j) { return i * ny + j; };
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      entries.emplace_back(id(i, j), id(i, j), 4.0 + 0.1 * j);
      entries.emplace_back(id(i, j), id((i + 1) % nx, j), -1.0);
      entries.emplace_back(id((i + 1) % nx, j), id(i, j), -1.0);
      if (j + 1 < ny) {
        entries.emplace_back(id(i, j), id(i, j + 1), -1.0);
        entries.emplace_back(id(i, j + 1), id(i, j), -1.0);
      }
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  const Eigen::MatrixXd dense(a);
  const auto ref = eigensolve_dense(dense, 6);
  // deliberately place the shift inside the spectrum to exercise the retry
  const auto sparse = eigensolve_sparse_lowest(a, 6, 1.5);
  CHECK((sparse.values - ref.values).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(sparse.residual <= 1e-9 * sparse.operator_norm);
}

TEST_CASE("circle Hamiltonian reproduces the discrete symbol") {
  for (double r : {0.5, 1.0, 2.0}) {
    const int n = 64;
    const auto op = build_curve_hamiltonian(CurveSpec::circle(r), n, {}, true);
    const auto s = eigensolve_symmetric(op, 7);
    CHECK(op.length == doctest::Approx(2 * pi * r));
    const double vq = -1.0 / (8 * r * r);
    CHECK(s.values[0] == doctest::Approx(vq).epsilon(1e-10));
    for (int m = 1; m <= 3; ++m) {
      const double expected = discrete_circle_level(r, n, m) + vq;
      CHECK(s.values[2 * m - 1] == doctest::Approx(expected).epsilon(1e-10));
      CHECK(s.values[2 * m] == doctest::Approx(expected).epsilon(1e-10));
    }
    CHECK(s.residual <= 1e-10 * s.operator_norm);
  }
}

TEST_CASE("circle spectrum converges at second order") {
  std::vector<double> errors;
  for (int n : {32, 64, 128, 256}) {
    const auto s = eigensolve_symmetric(build_curve_hamiltonian(CurveSpec::circle(1.0), n, {}, true), 7);
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m) worst = std::max(worst, std::abs(s.values[2 * m] - (m * m / 2.0 - 0.125)));
    errors.push_back(worst);
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    CHECK(std::log2(errors[i - 1] / errors[i]) == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("ellipse reduced spectrum against an independent assembly") {
  // numpy eigvalsh of the same stencil on an arc-length grid from scipy quadrature
  const auto s = eigensolve_symmetric(build_curve_hamiltonian(CurveSpec::ellipse(1.5, 1.0), 128, {}, true), 4);
  const double expected[] = {-0.0982676953891542, 0.166259281630611, 0.270819520018974, 1.13901488312032};
  for (int k = 0; k < 4; ++k) CHECK(s.values[k] == doctest::Approx(expected[k]).epsilon(1e-9));
  CHECK_THROWS_AS(build_curve_hamiltonian(CurveSpec::parabola(1.0), 64, {}, true), UsageError);
  CHECK_THROWS_AS(build_curve_hamiltonian(CurveSpec::circle(1.0), 4, {}, true), UsageError);
}

TEST_CASE("analytic sphere and circle levels") {
  const auto s2 = sphere_spectrum_analytic(2.0, 0.0, 4);
  for (int l = 0; l <= 4; ++l) {
    CHECK(s2.values[l] == doctest::Approx(l * (l + 1) / 8.0));
    CHECK(s2.degeneracy[std::size_t(l)] == 2 * l + 1);
  }
  const auto s3 = sphere_spectrum_analytic(1.0, 0.0, 3, {}, 4);
  for (int l = 0; l <= 3; ++l) {
    CHECK(s3.values[l] == doctest::Approx(l * (l + 2) / 2.0));
    CHECK(s3.degeneracy[std::size_t(l)] == (l + 1) * (l + 1));
  }
  const auto c = circle_spectrum_analytic(1.0, -0.125, 2);
  CHECK(c.values[2] == doctest::Approx(1.875));
  CHECK(c.degeneracy == std::vector<int>{1, 2, 2});
}

TEST_CASE("recipe table on the unit sphere") {
  const auto table = recipe_table(RecipeGeometry::sphere, 1.0, 4);
  REQUIRE(table.columns.size() == 4);
  const double constants[] = {9.0 / 8, 0.0, 0.0, 1.0 / 6};
  const Recipe order[] = {Recipe::dirac, Recipe::abelian_conversion, Recipe::thin_layer, Recipe::dewitt};
  for (int i = 0; i < 4; ++i) {
    const auto& col = table.columns[std::size_t(i)];
    CHECK(col.recipe == order[i]);
    REQUIRE(col.constant.has_value());
    CHECK(std::abs(*col.constant - constants[i]) <= 1e-12);
    for (const auto& level : col.levels) {
      CHECK(std::abs(level.energy - (level.index * (level.index + 1) / 2.0 + constants[i])) <= 1e-12);
      CHECK(level.degeneracy == 2 * level.index + 1);
    }
  }
  CHECK(to_string(Recipe::abelian_conversion) == "abelian-conversion");
}

TEST_CASE("recipe table elsewhere") {
  const auto circle = recipe_table(RecipeGeometry::circle, 2.0, 2);
  CHECK_FALSE(circle.columns[0].constant.has_value());
  CHECK(circle.columns[0].levels.empty());
  CHECK(*circle.columns[2].constant == doctest::Approx(-1.0 / 32));
  const auto s3 = recipe_table(RecipeGeometry::sphere, 1.0, 2, {}, 4);
  CHECK(*s3.columns[0].constant == doctest::Approx(2.0));
  CHECK_FALSE(s3.columns[2].constant.has_value());
  CHECK(*s3.columns[3].constant == doctest::Approx(0.5));
  CHECK_THROWS_AS(parse_recipe_geometry("torus"), UsageError);
}
