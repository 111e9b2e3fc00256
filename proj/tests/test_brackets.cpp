#include <doctest.h>

#include <random>

#include "qreduce/brackets.hpp"

using namespace qreduce;

namespace {

/// Random polynomial of total degree <= max_degree with small rational
/// coefficients, seeded for reproducibility.
PhasePoly random_poly(const PhaseSpace& space, int max_degree, int terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> var(0, space.size() - 1);
  std::uniform_int_distribution<int> degree(0, max_degree);
  std::uniform_int_distribution<int> numer(-5, 5);
  std::uniform_int_distribution<int> denom(1, 4);
  PhasePoly out(space);
  for (int k = 0; k < terms; ++k) {
    Monomial m(std::size_t(space.size()), 0);
    const int d = degree(rng);
    for (int i = 0; i < d; ++i) ++m[std::size_t(var(rng))];
    out.add_term(m, Rational(numer(rng), denom(rng)));
  }
  return out;
}

PhasePoly sum_of_squares(const PhaseSpace& space, int scale) {
  PhasePoly out(space);
  for (int i = 1; i <= space.dimension(); ++i) {
    const auto x = PhasePoly::variable(space, space.x(i));
    out += Rational(scale) * (x * x);
  }
  return out;
}

}  // namespace

TEST_CASE("canonical brackets") {
  const PhaseSpace space(3, true);
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      const auto b = poisson_bracket(PhasePoly::variable(space, space.x(i)), PhasePoly::variable(space, space.p(j)));
      CHECK(b == PhasePoly::constant(space, i == j ? 1 : 0));
      CHECK(poisson_bracket(PhasePoly::variable(space, space.x(i)), PhasePoly::variable(space, space.x(j))).is_zero());
    }
  }
  CHECK(poisson_bracket(PhasePoly::variable(space, space.Q()), PhasePoly::variable(space, space.P())) ==
        PhasePoly::constant(space, 1));
}

TEST_CASE("sphere constraint bracket is 2 x^2 exactly") {
  for (int n = 2; n <= 5; ++n) {
    const auto sys = sphere_constraints(n, 1.0);
    const auto b = poisson_bracket(sys.constraints[0], sys.constraints[1]);
    CHECK(b == sum_of_squares(sys.space, 2));
  }
  CHECK(poisson_bracket(sphere_constraints(3, 1.0).constraints[0], sphere_constraints(3, 1.0).constraints[1])
            .to_string() == "2*x1^2 + 2*x2^2 + 2*x3^2");
}

TEST_CASE("abelian conversion: sigma constraints are in involution") {
  for (int n = 2; n <= 5; ++n) {
    const auto sys = sphere_abelian_constraints(n, 1.5);
    CHECK(poisson_bracket(sys.constraints[0], sys.constraints[1]).is_zero());
    CHECK(sys.labels == std::vector<std::string>{"σ₁", "σ₂"});
  }
}

TEST_CASE("property: antisymmetry, Leibniz and Jacobi hold exactly") {
  std::mt19937_64 rng(2024);
  const PhaseSpace space(2, true);
  for (int trial = 0; trial < 25; ++trial) {
    const auto f = random_poly(space, 3, 4, rng);
    const auto g = random_poly(space, 3, 4, rng);
    const auto h = random_poly(space, 2, 3, rng);
    CHECK(poisson_bracket(f, g) == -poisson_bracket(g, f));
    CHECK(poisson_bracket(f, g * h) == poisson_bracket(f, g) * h + g * poisson_bracket(f, h));
    const auto jacobi = poisson_bracket(f, poisson_bracket(g, h)) + poisson_bracket(g, poisson_bracket(h, f)) +
                        poisson_bracket(h, poisson_bracket(f, g));
    CHECK(jacobi.is_zero());
    CHECK(poisson_bracket(f, f).is_zero());
  }
}

TEST_CASE("on-shell samples satisfy the constraints") {
  for (const char* name : {"sphere", "sphere-abelian"}) {
    const auto sys = constraint_system(name, 3, 1.3);
    for (const auto& pt : on_shell_samples(sys, 50, 7)) {
      for (const auto& c : sys.constraints) CHECK(std::abs(c.evaluate(pt.values)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(constraint_system("torus", 3, 1.0), UsageError);
}

TEST_CASE("classification of the built-in systems") {
  const auto sphere = sphere_constraints(3, 1.0);
  const auto second = classify_constraints(sphere.constraints, on_shell_samples(sphere, 100, 3));
  CHECK(second.verdict == ConstraintClass::second_class);
  CHECK(second.min_abs_determinant == doctest::Approx(4.0));
  CHECK(second.witnesses.empty());
  const auto abelian = sphere_abelian_constraints(3, 1.0);
  const auto first = classify_constraints(abelian.constraints, on_shell_samples(abelian, 100, 3));
  CHECK(first.verdict == ConstraintClass::first_class);
  CHECK(first.max_abs_entry == 0.0);
  CHECK(to_string(ConstraintClass::first_class) == "first class");
  CHECK(to_string(ConstraintClass::second_class) == "second class");
}

TEST_CASE("Dirac brackets of the constraints vanish on shell") {
  std::mt19937_64 rng(99);
  const auto sys = sphere_constraints(3, 1.0);
  const auto points = on_shell_samples(sys, 100, 17);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto g = random_poly(sys.space, 3, 6, rng);
    for (const auto& pt : points) {
      for (const auto& phi : sys.constraints) {
        worst = std::max(worst, std::abs(dirac_bracket_at(phi, g, sys.constraints, pt)));
      }
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("Dirac bracket needs an invertible constraint matrix") {
  const auto sys = sphere_abelian_constraints(3, 1.0);
  const auto pts = on_shell_samples(sys, 1, 1);
  CHECK_THROWS_AS(dirac_bracket_at(sys.constraints[0], sys.constraints[1], sys.constraints, pts[0]),
                  NotSecondClassError);
}

TEST_CASE("polynomial printing is deterministic") {
  const PhaseSpace space(2);
  PhasePoly f(space);
  f.add_term({1, 0, 1, 0}, Rational(-1, 2));
  f.add_term({0, 0, 0, 0}, Rational(3));
  f.add_term({2, 0, 0, 0}, Rational(1));
  CHECK(f.to_string() == "x1^2 - 1/2*x1*p1 + 3");
  CHECK(PhasePoly(space).to_string() == "0");
}

TEST_CASE("Dirac bracket differs from the Poisson bracket off the constraints") {
  const auto sys = sphere_constraints(3, 1.0);
  const auto pts = on_shell_samples(sys, 5, 2);
  const auto x1 = PhasePoly::variable(sys.space, sys.space.x(1));
  const auto p1 = PhasePoly::variable(sys.space, sys.space.p(1));
  for (const auto& pt : pts) {
    // {x1, p1}_D = 1 - x1^2 / R^2 on the unit sphere
    const double x = pt.values[sys.space.x(1)];
    CHECK(dirac_bracket_at(x1, p1, sys.constraints, pt) == doctest::Approx(1 - x * x).epsilon(1e-12));
  }
}
