#include "qreduce/spectral.hpp"

namespace qreduce {

SymmetricOperator build_curve_hamiltonian(const CurveSpec& curve, int n, const PhysicsParams& params,
                                          bool with_vq) {
  validate(params);
  if (!curve.closed) throw UsageError("build_curve_hamiltonian: " + curve.name() + " is not closed");
  if (n < 8) throw UsageError("build_curve_hamiltonian: grid size must be at least 8");

  const ArcLengthMap map(curve);
  SymmetricOperator op;
  op.domain = GridDomain::periodic;
  op.length = map.length();
  op.spacing = op.length / n;

  const double kinetic = 0.5 * params.hbar * params.hbar / (op.spacing * op.spacing);
  op.matrix = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    op.matrix(i, i) = 2.0 * kinetic;
    op.matrix(i, (i + 1) % n) = -kinetic;
    op.matrix(i, (i + n - 1) % n) = -kinetic;
    if (with_vq) {
      const double k = plane_curvature(curve_jet(curve, map.parameter(i * op.spacing)));
      op.matrix(i, i) += vq_curve(k, params).value;
    }
  }
  return op;
}

Spectrum eigensolve_symmetric(const SymmetricOperator& op, int count) {
  return eigensolve_dense(op.matrix, count);
}

namespace {

double binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

/// Number of independent degree-l harmonics on S^d.
int harmonic_multiplicity(int l, int d) {
  return int(std::lround(binomial(l + d, d) - binomial(l + d - 2, d)));
}

}  // namespace

Spectrum sphere_spectrum_analytic(double radius, double vq, int l_max, const PhysicsParams& params,
                                  int n) {
  validate(params);
  if (!(radius > 0.0)) throw UsageError("sphere_spectrum_analytic: radius must be positive");
  if (l_max < 0) throw UsageError("sphere_spectrum_analytic: l_max must be non-negative");
  if (n < 3) throw UsageError("sphere_spectrum_analytic: ambient dimension must be at least 3");
  Spectrum out;
  out.values.resize(l_max + 1);
  const double scale = params.hbar * params.hbar / (2.0 * radius * radius);
  for (int l = 0; l <= l_max; ++l) {
    out.values[l] = scale * l * (l + n - 2) + vq;
    out.degeneracy.push_back(harmonic_multiplicity(l, n - 1));
  }
  return out;
}

Spectrum circle_spectrum_analytic(double radius, double vq, int m_max, const PhysicsParams& params) {
  validate(params);
  if (!(radius > 0.0)) throw UsageError("circle_spectrum_analytic: radius must be positive");
  if (m_max < 0) throw UsageError("circle_spectrum_analytic: m_max must be non-negative");
  Spectrum out;
  out.values.resize(m_max + 1);
  const double scale = params.hbar * params.hbar / (2.0 * radius * radius);
  for (int m = 0; m <= m_max; ++m) {
    out.values[m] = scale * m * m + vq;
    out.degeneracy.push_back(m == 0 ? 1 : 2);
  }
  return out;
}

std::string to_string(Recipe r) {
  switch (r) {
    case Recipe::dirac:
      return "dirac";
    case Recipe::abelian_conversion:
      return "abelian-conversion";
    case Recipe::thin_layer:
      return "thin-layer";
    case Recipe::dewitt:
      return "dewitt";
  }
  return "unknown";
}

RecipeGeometry parse_recipe_geometry(const std::string& name) {
  if (name == "sphere") return RecipeGeometry::sphere;
  if (name == "circle") return RecipeGeometry::circle;
  throw UsageError("recipe_table: unsupported geometry '" + name + "' (expected sphere or circle)");
}

RecipeTable recipe_table(RecipeGeometry geometry, double radius, int l_max,
                         const PhysicsParams& params, int n) {
  validate(params);
  if (!(radius > 0.0)) throw UsageError("recipe_table: radius must be positive");
  if (l_max < 0) throw UsageError("recipe_table: l_max must be non-negative");
  const double h2 = params.hbar * params.hbar;
  const double r2 = radius * radius;

  RecipeTable table;
  std::optional<double> dirac, thin_layer, dewitt;
  const double abelian = 0.0;
  if (geometry == RecipeGeometry::sphere) {
    if (n < 3) throw UsageError("recipe_table: sphere needs ambient dimension n >= 3");
    table.geometry = "sphere(n=" + std::to_string(n) + ")";
    dirac = h2 * n * n / (8.0 * r2);
    if (n == 3) {
      thin_layer = vq_surface(surface_curvatures(SurfaceSpec::sphere(radius), 1.0, 0.0), params).value;
    }
    dewitt = h2 * ((n - 1.0) * (n - 2.0) / r2) / 12.0;
  } else {
    table.geometry = "circle";
    thin_layer = vq_curve(1.0 / radius, params).value;
    dewitt = 0.0;
  }

  auto levels_for = [&](double constant) {
    const Spectrum s = geometry == RecipeGeometry::sphere
                           ? sphere_spectrum_analytic(radius, constant, l_max, params, n)
                           : circle_spectrum_analytic(radius, constant, l_max, params);
    std::vector<RecipeLevel> levels;
    for (Eigen::Index l = 0; l < s.values.size(); ++l) {
      levels.push_back({int(l), s.degeneracy[std::size_t(l)], s.values[l]});
    }
    return levels;
  };
  auto add = [&](Recipe recipe, std::optional<double> constant) {
    RecipeColumn column{recipe, constant, {}};
    if (constant) column.levels = levels_for(*constant);
    table.columns.push_back(std::move(column));
  };
  add(Recipe::dirac, dirac);
  add(Recipe::abelian_conversion, abelian);
  add(Recipe::thin_layer, thin_layer);
  add(Recipe::dewitt, dewitt);
  return table;
}

}  // namespace qreduce
