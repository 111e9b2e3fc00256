#pragma once

#include <functional>
#include <optional>
#include <string>

#include "qreduce/geometry.hpp"

namespace qreduce {

/// Mass is fixed at 1; the free Hamiltonian is -(hbar^2 / 2) Laplacian.
struct PhysicsParams {
  double hbar = 1.0;
};

void validate(const PhysicsParams& params);

enum class Provenance { closed_form_curve, closed_form_surface, normal_profile_numeric, latitude_formula };

std::string to_string(Provenance p);

struct QuantumPotentialValue {
  double value = 0.0;
  Provenance provenance = Provenance::closed_form_curve;
};

/// Normal-direction data at a fixed tangential point: the full metric
/// determinant G(q) and the lapse H_n(q) (metric coefficient of the normal
/// coordinate), sampled around the constraint value q0.
struct NormalProfile {
  std::function<double(double)> determinant;
  std::function<double(double)> lapse = [](double) { return 1.0; };
  double q0 = 0.0;
  /// Distance from q0 over which the profile stays positive and smooth.
  double validity_radius = 1.0;
};

/// G = (1 - q k)^2, the layer around a plane curve of curvature k.
NormalProfile curve_layer_profile(double k);
/// G^(1/2) = 1 - 2 q H + K q^2, the layer around a surface.
NormalProfile surface_layer_profile(double H, double K);
/// G = R^4 sin^2(theta0 + q), lapse R: the polar angle around a latitude circle.
NormalProfile latitude_profile(double sphere_radius, double theta0);
/// G sampled from layer_metric_numeric at a fixed tangential point.
NormalProfile numeric_layer_profile(const GeometrySpec& spec, const Eigen::Vector2d& tangential);

/// -hbar^2 k^2 / 8.
QuantumPotentialValue vq_curve(double k, const PhysicsParams& params = {});

/// -(hbar^2 / 2)(H^2 - K), written as -(hbar^2 / 8)(k1 - k2)^2 so it is
/// exactly non-positive.
QuantumPotentialValue vq_surface(const Curvatures<double>& c, const PhysicsParams& params = {});

/// The reduced-Hamiltonian potential left over after factoring the physical
/// state as G^(-1/4) Phi and moving the normal momentum to the right:
///
///   V = -(hbar^2 / 2) G^(-1/4) d_n( G^(1/2) H_n^(-2) d_n G^(-1/4) )  at q0.
///
/// Evaluated through S = G^(1/2) and a = H_n^(-2) as
///   V = (hbar^2 / 4) [ a S''/S + a' S'/S - (a/2) (S'/S)^2 ],
/// with derivatives from central differences plus one Richardson step.
/// `step` defaults to 1e-2 * validity_radius.
QuantumPotentialValue vq_normal_profile(const NormalProfile& profile,
                                        const PhysicsParams& params = {},
                                        std::optional<double> step = std::nullopt);

struct LatitudePotential {
  QuantumPotentialValue on_sphere;     // -(hbar^2 / 8R^2)(1 + 1/sin^2 theta)
  QuantumPotentialValue plane_circle;  // -hbar^2 / (8 (R sin theta)^2)
};

LatitudePotential vq_latitude_on_sphere(double sphere_radius, double theta,
                                        const PhysicsParams& params = {});

/// Applies the discretized normal momentum P_n = (hbar/i) G^(-1/4) d_n G^(1/4)
/// to the factorized state Psi = G^(-1/4) on `points` equispaced nodes over
/// [q0 - half_width, q0 + half_width] and returns ||P_n Psi|| / ||Psi||.
/// Non-positive `half_width` picks 0.1 * validity_radius.
double factorization_residual(const NormalProfile& profile, int points,
                              const PhysicsParams& params = {}, double half_width = 0.0);

/// Same operator applied to an arbitrary sampled state (used to show the
/// residual is not identically zero for non-factorized states).
double normal_momentum_residual(const NormalProfile& profile, const std::function<double(double)>& psi,
                                int points, const PhysicsParams& params = {}, double half_width = 0.0);

}  // namespace qreduce
