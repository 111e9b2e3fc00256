#pragma once

#include <span>
#include <string>
#include <vector>

#include "qreduce/geometry.hpp"
#include "qreduce/potential.hpp"
#include "qreduce/spectral.hpp"

namespace qreduce {

enum class Confinement { dirichlet, harmonic };

std::string to_string(Confinement c);
Confinement parse_confinement(const std::string& name);

/// Thin-layer simulation knobs. `eps` is the full layer thickness for
/// Dirichlet walls (walls at +-eps/2 in proper distance). For harmonic
/// confinement V = gamma q^2 / 2 with gamma = hbar^2 / eps^4, so the
/// oscillator length equals eps; the transverse box then spans +-5 eps.
struct LayerConfig {
  std::vector<double> eps{0.1, 0.05, 0.025};
  Confinement confinement = Confinement::dirichlet;
  int n_transverse = 128;
  int m_max = 3;
  /// Tangential grid of the 2D solver.
  int n_tangential = 128;
  /// Number of bands reported by the 2D solver.
  int bands = 4;
  /// When positive, the decoupled solvers replace the angular wavenumber
  /// m / R by the symbol of the periodic second difference on this many
  /// points, reproducing the 2D discretization mode by mode.
  int angular_grid = 0;
  bool extrapolate = true;
};

void validate(const LayerConfig& cfg);

struct BandSample {
  int mode = 0;         // angular mode m, or band index for the 2D solver
  double eps = 0.0;
  double raw = 0.0;     // lowest eigenvalue in this mode
  double perp = 0.0;    // transverse ground energy subtracted
  double renormalized = 0.0;
};

struct BandLimit {
  int mode = 0;
  double limit = 0.0;          // extrapolated eps -> 0 value
  double c1 = 0.0, c2 = 0.0;   // E(eps) = limit + c1 eps + c2 eps^2
  double fit_residual = 0.0;
  /// Observed convergence exponent from successive samples (NaN when the eps
  /// list is not a geometric sequence of at least three values).
  double observed_order = 0.0;
};

struct BandResult {
  std::string geometry;
  Confinement confinement = Confinement::dirichlet;
  std::vector<BandSample> samples;  // ordered by mode, then by eps as given
  std::vector<BandLimit> limits;    // one per mode when extrapolated
  /// Continuum transverse ground energy per eps (hbar^2 pi^2 / (2 eps^2) for
  /// walls, hbar^2 / (2 eps^2) for the oscillator), for reference.
  std::vector<double> perp_continuum;
  /// True when every reported raw eigenvalue lies below the second transverse
  /// level, i.e. all bands belong to the transverse ground state.
  bool first_transverse_band = true;

  const BandLimit& limit_for(int mode) const;
  std::vector<BandSample> samples_for(int mode) const;
};

struct Extrapolation {
  double limit = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double residual = 0.0;
};

/// Least-squares fit E(eps) = E0 + c1 eps + c2 eps^2; needs >= 3 distinct eps.
Extrapolation band_extrapolate(std::span<const double> eps, std::span<const double> energy);

/// Ground energy of the flat transverse problem discretized exactly as the
/// curved ones (same nodes, walls or oscillator). This is the renormalization
/// constant; subtracting it cancels the O(h^2) error of the divergent term.
double transverse_ground_energy(double eps, const LayerConfig& cfg, const PhysicsParams& params,
                                int level = 0);

/// Layer around a circle of radius R in the plane, one radial solve per m.
BandResult circle_band_spectrum(double radius, const LayerConfig& cfg, const PhysicsParams& params = {});

/// Flat strip of tangential period `length` (zero curvature reference).
BandResult strip_band_spectrum(double length, const LayerConfig& cfg, const PhysicsParams& params = {});

/// Layer around the latitude theta0 on a sphere of radius R, polar-angle
/// window of proper width eps, one solve per azimuthal mode m.
BandResult latitude_band_spectrum(double sphere_radius, double theta0, const LayerConfig& cfg,
                                  const PhysicsParams& params = {});

/// Full 2D solve in (arc length, normal distance) around a closed curve; no
/// mode decoupling. Bands are indexed 0..bands-1 in ascending order.
BandResult curve_band_spectrum_2d(const CurveSpec& curve, const LayerConfig& cfg,
                                  const PhysicsParams& params = {});

}  // namespace qreduce
