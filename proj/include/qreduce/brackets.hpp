#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qreduce/error.hpp"

namespace qreduce {

using Rational = boost::multiprecision::cpp_rational;

/// Canonical phase space (x_1..x_n, p_1..p_n), optionally extended by one
/// auxiliary pair (Q, P). x(i) and p(i) take 1-based i and return flat indices:
/// x_i -> i - 1, p_i -> n + i - 1, Q -> 2n, P -> 2n + 1.
class PhaseSpace {
 public:
  explicit PhaseSpace(int n, bool auxiliary_pair = false);

  int dimension() const { return n_; }
  bool has_auxiliary() const { return aux_; }
  int size() const { return 2 * n_ + (aux_ ? 2 : 0); }

  int x(int i) const;
  int p(int i) const;
  int Q() const;
  int P() const;

  /// Index of the canonical partner.
  int conjugate(int var) const;
  /// +1 for coordinates (x_i, Q), -1 for momenta (p_i, P).
  int orientation(int var) const;
  std::string name(int var) const;

  bool operator==(const PhaseSpace&) const = default;

 private:
  int n_;
  bool aux_;
};

using Monomial = std::vector<int>;

/// Sparse polynomial with exact rational coefficients. Zero coefficients are
/// never stored; terms iterate in lexicographic exponent order, so printing is
/// deterministic.
class PhasePoly {
 public:
  explicit PhasePoly(PhaseSpace space);

  static PhasePoly constant(const PhaseSpace& space, const Rational& c);
  static PhasePoly variable(const PhaseSpace& space, int var);

  const PhaseSpace& space() const { return space_; }
  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  void add_term(const Monomial& m, const Rational& c);

  PhasePoly derivative(int var) const;
  double evaluate(const Eigen::VectorXd& values) const;
  std::string to_string() const;

  PhasePoly& operator+=(const PhasePoly& other);
  PhasePoly& operator-=(const PhasePoly& other);
  PhasePoly& operator*=(const Rational& c);

  friend PhasePoly operator+(PhasePoly a, const PhasePoly& b) { return a += b; }
  friend PhasePoly operator-(PhasePoly a, const PhasePoly& b) { return a -= b; }
  friend PhasePoly operator-(PhasePoly a) { return a *= Rational(-1); }
  friend PhasePoly operator*(PhasePoly a, const Rational& c) { return a *= c; }
  friend PhasePoly operator*(const Rational& c, PhasePoly a) { return a *= c; }
  friend PhasePoly operator*(const PhasePoly& a, const PhasePoly& b);

  friend bool operator==(const PhasePoly& a, const PhasePoly& b) {
    return a.space_ == b.space_ && a.terms_ == b.terms_;
  }

 private:
  void require_same_space(const PhasePoly& other) const;

  PhaseSpace space_;
  std::map<Monomial, Rational> terms_;
};

/// Values for every variable of a phase space.
struct PhasePoint {
  PhaseSpace space;
  Eigen::VectorXd values;

  PhasePoint(PhaseSpace s, Eigen::VectorXd v);
};

/// {f, g} = sum_i (df/dx_i dg/dp_i - df/dp_i dg/dx_i) + (df/dQ dg/dP - df/dP dg/dQ).
PhasePoly poisson_bracket(const PhasePoly& f, const PhasePoly& g);

struct ConstraintMatrix {
  Eigen::MatrixXd matrix;  // C_ij = {phi_i, phi_j}(pt)
  double determinant = 0.0;
};

ConstraintMatrix constraint_matrix(std::span<const PhasePoly> constraints, const PhasePoint& pt);

/// {f, g}_D = {f, g} - {f, phi_i} (C^-1)_ij {phi_j, g}, evaluated at pt.
/// Throws NotSecondClassError when C is singular there (|det C| <= 1e-10).
double dirac_bracket_at(const PhasePoly& f, const PhasePoly& g,
                        std::span<const PhasePoly> constraints, const PhasePoint& pt);

enum class ConstraintClass { first_class, second_class, mixed };

std::string to_string(ConstraintClass c);

struct ClassificationReport {
  ConstraintClass verdict = ConstraintClass::mixed;
  /// Sample indices that were neither cleanly first nor second class, or that
  /// disagreed with the majority verdict.
  std::vector<std::size_t> witnesses;
  double min_abs_determinant = 0.0;
  double max_abs_entry = 0.0;
};

/// Second class iff |det C| > tol at every sample; first class iff every
/// bracket vanishes (|C_ij| <= tol) at every sample; mixed otherwise.
ClassificationReport classify_constraints(std::span<const PhasePoly> constraints,
                                          std::span<const PhasePoint> samples,
                                          double tol = 1e-10);

/// Named constraint sets used by the CLI and the tests.
struct ConstraintSystem {
  std::string name;
  PhaseSpace space;
  std::vector<std::string> labels;
  std::vector<PhasePoly> constraints;
  double radius = 1.0;
};

/// phi_1 = x^2 - R^2, phi_2 = (p, x) on R^n.
ConstraintSystem sphere_constraints(int n, double radius);
/// sigma_1 = phi_1 + P, sigma_2 = phi_2 + 2 x^2 Q on R^n x (Q, P).
ConstraintSystem sphere_abelian_constraints(int n, double radius);
/// Looks up "sphere" or "sphere-abelian".
ConstraintSystem constraint_system(const std::string& name, int n, double radius);

/// Deterministic random points on the constraint surface of a built-in system.
std::vector<PhasePoint> on_shell_samples(const ConstraintSystem& system, int count,
                                         std::uint64_t seed);

}  // namespace qreduce
