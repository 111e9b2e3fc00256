#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qreduce/eigensolver.hpp"
#include "qreduce/geometry.hpp"
#include "qreduce/potential.hpp"

namespace qreduce {

enum class GridDomain { periodic, interval };

/// Dense symmetric discretization of a 1D Hamiltonian.
struct SymmetricOperator {
  Eigen::MatrixXd matrix;
  double spacing = 0.0;
  GridDomain domain = GridDomain::periodic;
  double length = 0.0;

  Eigen::Index order() const { return matrix.rows(); }
};

/// -(hbar^2/2) d^2/ds^2 on an N-point periodic arc-length grid of a closed
/// curve, plus diag(-hbar^2 k(s)^2 / 8) when with_vq is set.
SymmetricOperator build_curve_hamiltonian(const CurveSpec& curve, int n, const PhysicsParams& params,
                                          bool with_vq);

/// Lowest `count` eigenpairs (cyclic Jacobi).
Spectrum eigensolve_symmetric(const SymmetricOperator& op, int count);

/// Free levels on S^(n-1) of radius R shifted by vq:
/// E_l = hbar^2 l (l + n - 2) / (2 R^2) + vq, l = 0..l_max, with the
/// multiplicity of degree-l spherical harmonics (2l + 1 on S^2).
Spectrum sphere_spectrum_analytic(double radius, double vq, int l_max,
                                  const PhysicsParams& params = {}, int n = 3);

/// Free levels on a circle of radius R shifted by vq: hbar^2 m^2 / (2 R^2) + vq,
/// m = 0..m_max, degeneracy 1 for m = 0 and 2 otherwise.
Spectrum circle_spectrum_analytic(double radius, double vq, int m_max,
                                  const PhysicsParams& params = {});

enum class Recipe { dirac, abelian_conversion, thin_layer, dewitt };

std::string to_string(Recipe r);

enum class RecipeGeometry { sphere, circle };

RecipeGeometry parse_recipe_geometry(const std::string& name);

struct RecipeLevel {
  int index = 0;
  int degeneracy = 1;
  double energy = 0.0;
};

struct RecipeColumn {
  Recipe recipe = Recipe::dirac;
  /// Quantum-potential constant; empty when the recipe gives no value for this
  /// geometry (the Dirac constant is only known for the sphere).
  std::optional<double> constant;
  std::vector<RecipeLevel> levels;
};

struct RecipeTable {
  std::string geometry;
  std::vector<RecipeColumn> columns;
};

/// Constants of the four quantization recipes, each added to the analytic
/// kinetic levels:
///   Dirac               +hbar^2 n^2 / (8 R^2)        (sphere only)
///   abelian conversion  0
///   thin layer          -(hbar^2/2)(H^2 - K) on S^2, -hbar^2 k^2 / 8 on the circle
///   DeWitt              hbar^2 R_scalar / 12, R_scalar = (n-1)(n-2)/R^2 on S^(n-1)
/// The thin-layer constant is reported only for n = 3 on the sphere.
RecipeTable recipe_table(RecipeGeometry geometry, double radius, int l_max,
                         const PhysicsParams& params = {}, int n = 3);

}  // namespace qreduce
