#include "qreduce/brackets.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace qreduce {

// ---------------------------------------------------------------------------
// PhaseSpace

PhaseSpace::PhaseSpace(int n, bool auxiliary_pair) : n_(n), aux_(auxiliary_pair) {
  if (n < 1) throw UsageError("phase space dimension must be at least 1");
}

int PhaseSpace::x(int i) const {
  if (i < 1 || i > n_) throw UsageError("x index out of range");
  return i - 1;
}

int PhaseSpace::p(int i) const {
  if (i < 1 || i > n_) throw UsageError("p index out of range");
  return n_ + i - 1;
}

int PhaseSpace::Q() const {
  if (!aux_) throw UsageError("phase space has no auxiliary pair");
  return 2 * n_;
}

int PhaseSpace::P() const {
  if (!aux_) throw UsageError("phase space has no auxiliary pair");
  return 2 * n_ + 1;
}

int PhaseSpace::conjugate(int var) const {
  if (var < n_) return var + n_;
  if (var < 2 * n_) return var - n_;
  return var == 2 * n_ ? var + 1 : var - 1;
}

int PhaseSpace::orientation(int var) const {
  if (var < n_) return 1;
  if (var < 2 * n_) return -1;
  return var == 2 * n_ ? 1 : -1;
}

std::string PhaseSpace::name(int var) const {
  if (var < n_) return "x" + std::to_string(var + 1);
  if (var < 2 * n_) return "p" + std::to_string(var - n_ + 1);
  return var == 2 * n_ ? "Q" : "P";
}

// ---------------------------------------------------------------------------
// PhasePoly

PhasePoly::PhasePoly(PhaseSpace space) : space_(space) {}

PhasePoly PhasePoly::constant(const PhaseSpace& space, const Rational& c) {
  PhasePoly poly(space);
  poly.add_term(Monomial(space.size(), 0), c);
  return poly;
}

PhasePoly PhasePoly::variable(const PhaseSpace& space, int var) {
  if (var < 0 || var >= space.size()) throw UsageError("variable index out of range");
  PhasePoly poly(space);
  Monomial m(space.size(), 0);
  m[var] = 1;
  poly.add_term(m, Rational(1));
  return poly;
}

int PhasePoly::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int total = 0;
    for (int e : m) total += e;
    d = std::max(d, total);
  }
  return d;
}

void PhasePoly::add_term(const Monomial& m, const Rational& c) {
  if (static_cast<int>(m.size()) != space_.size()) {
    throw UsageError("monomial length does not match the phase space");
  }
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void PhasePoly::require_same_space(const PhasePoly& other) const {
  if (!(space_ == other.space_)) throw UsageError("polynomials live on different phase spaces");
}

PhasePoly& PhasePoly::operator+=(const PhasePoly& other) {
  require_same_space(other);
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

PhasePoly& PhasePoly::operator-=(const PhasePoly& other) {
  require_same_space(other);
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

PhasePoly& PhasePoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, coef] : terms_) coef *= c;
  return *this;
}

PhasePoly operator*(const PhasePoly& a, const PhasePoly& b) {
  a.require_same_space(b);
  PhasePoly out(a.space_);
  Monomial m(a.space_.size());
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

PhasePoly PhasePoly::derivative(int var) const {
  PhasePoly out(space_);
  for (const auto& [m, c] : terms_) {
    if (m[var] == 0) continue;
    Monomial d = m;
    d[var] -= 1;
    out.add_term(d, c * m[var]);
  }
  return out;
}

double PhasePoly::evaluate(const Eigen::VectorXd& values) const {
  if (values.size() != space_.size()) {
    throw UsageError("phase point dimension does not match the polynomial");
  }
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double term = static_cast<double>(c);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] != 0) term *= std::pow(values[Eigen::Index(i)], m[i]);
    }
    sum += term;
  }
  return sum;
}

std::string PhasePoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest-degree terms first, lexicographic within a degree.
  std::vector<std::pair<const Monomial*, const Rational*>> ordered;
  for (const auto& [m, c] : terms_) ordered.emplace_back(&m, &c);
  auto total = [](const Monomial& m) {
    int t = 0;
    for (int e : m) t += e;
    return t;
  };
  std::stable_sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
    const int da = total(*a.first), db = total(*b.first);
    if (da != db) return da > db;
    return *a.first > *b.first;
  });
  for (const auto& [mp, cp] : ordered) {
    const Monomial& m = *mp;
    Rational c = *cp;
    const bool negative = c < 0;
    if (negative) c = -c;
    if (first) {
      if (negative) os << "-";
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    const bool unit = c == 1;
    bool wrote = false;
    if (!unit || total(m) == 0) {
      os << c;
      wrote = true;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (wrote) os << "*";
      os << space_.name(int(i));
      if (m[i] > 1) os << "^" << m[i];
      wrote = true;
    }
  }
  return os.str();
}

PhasePoint::PhasePoint(PhaseSpace s, Eigen::VectorXd v) : space(s), values(std::move(v)) {
  if (values.size() != space.size()) throw UsageError("phase point has the wrong dimension");
}

// ---------------------------------------------------------------------------
// Brackets

PhasePoly poisson_bracket(const PhasePoly& f, const PhasePoly& g) {
  if (!(f.space() == g.space())) throw UsageError("poisson_bracket: different phase spaces");
  const PhaseSpace& space = f.space();
  PhasePoly out(space);
  for (int var = 0; var < space.size(); ++var) {
    if (space.orientation(var) < 0) continue;
    const int mom = space.conjugate(var);
    out += f.derivative(var) * g.derivative(mom);
    out -= f.derivative(mom) * g.derivative(var);
  }
  return out;
}

ConstraintMatrix constraint_matrix(std::span<const PhasePoly> constraints, const PhasePoint& pt) {
  const auto m = Eigen::Index(constraints.size());
  ConstraintMatrix out;
  out.matrix = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double c = poisson_bracket(constraints[i], constraints[j]).evaluate(pt.values);
      out.matrix(i, j) = c;
      out.matrix(j, i) = -c;
    }
  }
  out.determinant = m == 0 ? 1.0 : out.matrix.determinant();
  return out;
}

double dirac_bracket_at(const PhasePoly& f, const PhasePoly& g,
                        std::span<const PhasePoly> constraints, const PhasePoint& pt) {
  const auto cm = constraint_matrix(constraints, pt);
  if (!(std::abs(cm.determinant) > 1e-10)) {
    throw NotSecondClassError("dirac_bracket_at: constraint matrix singular at this point");
  }
  const auto m = Eigen::Index(constraints.size());
  Eigen::VectorXd f_phi(m), phi_g(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    f_phi[i] = poisson_bracket(f, constraints[i]).evaluate(pt.values);
    phi_g[i] = poisson_bracket(constraints[i], g).evaluate(pt.values);
  }
  const Eigen::VectorXd solved = cm.matrix.fullPivLu().solve(phi_g);
  return poisson_bracket(f, g).evaluate(pt.values) - f_phi.dot(solved);
}

std::string to_string(ConstraintClass c) {
  switch (c) {
    case ConstraintClass::first_class:
      return "first class";
    case ConstraintClass::second_class:
      return "second class";
    case ConstraintClass::mixed:
      return "mixed/degenerate";
  }
  return "unknown";
}

ClassificationReport classify_constraints(std::span<const PhasePoly> constraints,
                                          std::span<const PhasePoint> samples, double tol) {
  if (samples.empty()) throw UsageError("classify_constraints: empty sample set");
  if (constraints.empty()) throw UsageError("classify_constraints: no constraints");
  ClassificationReport report;
  report.min_abs_determinant = std::numeric_limits<double>::infinity();
  bool all_second = true, all_first = true;
  std::vector<bool> second(samples.size()), first(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto cm = constraint_matrix(constraints, samples[s]);
    const double det = std::abs(cm.determinant);
    const double entry = cm.matrix.size() ? cm.matrix.cwiseAbs().maxCoeff() : 0.0;
    report.min_abs_determinant = std::min(report.min_abs_determinant, det);
    report.max_abs_entry = std::max(report.max_abs_entry, entry);
    second[s] = det > tol;
    first[s] = entry <= tol;
    all_second = all_second && second[s];
    all_first = all_first && first[s];
  }
  if (all_second) {
    report.verdict = ConstraintClass::second_class;
  } else if (all_first) {
    report.verdict = ConstraintClass::first_class;
  } else {
    report.verdict = ConstraintClass::mixed;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      if (!second[s] && !first[s]) report.witnesses.push_back(s);
    }
    if (report.witnesses.empty()) {
      // Every sample is clean but they disagree: list the minority.
      const auto n_second = std::count(second.begin(), second.end(), true);
      const bool minority_second = 2 * std::size_t(n_second) < samples.size();
      for (std::size_t s = 0; s < samples.size(); ++s) {
        if (second[s] == minority_second) report.witnesses.push_back(s);
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Built-in systems

namespace {

PhasePoly squared_radius(const PhaseSpace& space) {
  PhasePoly r2(space);
  for (int i = 1; i <= space.dimension(); ++i) {
    const auto x = PhasePoly::variable(space, space.x(i));
    r2 += x * x;
  }
  return r2;
}

PhasePoly radial_momentum(const PhaseSpace& space) {
  PhasePoly out(space);
  for (int i = 1; i <= space.dimension(); ++i) {
    out += PhasePoly::variable(space, space.p(i)) * PhasePoly::variable(space, space.x(i));
  }
  return out;
}

void require_sphere_args(int n, double radius) {
  if (n < 2) throw UsageError("sphere constraints need n >= 2");
  if (!(radius > 0.0)) throw UsageError("sphere radius must be positive");
}

}  // namespace

ConstraintSystem sphere_constraints(int n, double radius) {
  require_sphere_args(n, radius);
  const PhaseSpace space(n);
  const Rational r(radius);
  ConstraintSystem sys{"sphere", space, {"Φ₁", "Φ₂"}, {}, radius};
  sys.constraints.push_back(squared_radius(space) - PhasePoly::constant(space, r * r));
  sys.constraints.push_back(radial_momentum(space));
  return sys;
}

ConstraintSystem sphere_abelian_constraints(int n, double radius) {
  require_sphere_args(n, radius);
  const PhaseSpace space(n, true);
  const Rational r(radius);
  const PhasePoly phi1 = squared_radius(space) - PhasePoly::constant(space, r * r);
  const PhasePoly phi2 = radial_momentum(space);
  ConstraintSystem sys{"sphere-abelian", space, {"σ₁", "σ₂"}, {}, radius};
  sys.constraints.push_back(phi1 + PhasePoly::variable(space, space.P()));
  sys.constraints.push_back(phi2 + Rational(2) * squared_radius(space) *
                                       PhasePoly::variable(space, space.Q()));
  return sys;
}

ConstraintSystem constraint_system(const std::string& name, int n, double radius) {
  if (name == "sphere") return sphere_constraints(n, radius);
  if (name == "sphere-abelian") return sphere_abelian_constraints(n, radius);
  throw UsageError("unknown constraint system '" + name + "' (expected sphere or sphere-abelian)");
}

std::vector<PhasePoint> on_shell_samples(const ConstraintSystem& system, int count,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const PhaseSpace& space = system.space;
  const int n = space.dimension();
  std::vector<PhasePoint> out;
  out.reserve(std::size_t(std::max(count, 0)));
  for (int s = 0; s < count; ++s) {
    Eigen::VectorXd x(n), p(n);
    for (int i = 0; i < n; ++i) x[i] = normal(rng);
    for (int i = 0; i < n; ++i) p[i] = normal(rng);
    Eigen::VectorXd values = Eigen::VectorXd::Zero(space.size());
    if (system.name == "sphere") {
      x *= system.radius / x.norm();
      p -= x * (p.dot(x) / x.squaredNorm());
      values << x, p;
    } else {
      // Any (x, p); Q and P are then fixed by sigma_1 = sigma_2 = 0.
      const double r2 = x.squaredNorm();
      const double phi1 = r2 - system.radius * system.radius;
      const double phi2 = p.dot(x);
      values << x, p, -phi2 / (2.0 * r2), -phi1;
    }
    out.emplace_back(space, values);
  }
  return out;
}

}  // namespace qreduce
