#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace palzone {

/// A point in the Oxz plane, metres. The array lies on z = 0; the field region is z > 0.
struct Point2 {
  double x = 0.0;
  double z = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Thrown by validate_config with every violated invariant, each prefixed by its field path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Thrown when a numerical routine cannot produce a finite, trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MediumParams {
  double rho0 = 1.21;           // kg/m^3
  double c0 = 343.0;            // m/s
  double beta = 1.2;            // nonlinearity coefficient
  double temperature_c = 20.0;  // deg C
  double humidity_pct = 70.0;   // relative humidity, %
  double pressure_kpa = 101.325;
  // Np/m applied at every frequency when set (0 disables absorption).
  std::optional<double> alpha_override;

  friend bool operator==(const MediumParams&, const MediumParams&) = default;
};

/// Two ultrasonic carriers placed symmetrically about f_center so that their
/// difference is the audio frequency.
struct FrequencyPlan {
  double f_center = 40000.0;
  double f_audio = 1000.0;

  double f1() const { return f_center - 0.5 * f_audio; }
  double f2() const { return f1() + f_audio; }
  double omega1() const;
  double omega2() const;
  double omega_audio() const;
  /// Lossless audio wavenumber omega_a / c0.
  double k_audio(double c0) const { return omega_audio() / c0; }

  friend bool operator==(const FrequencyPlan&, const FrequencyPlan&) = default;
};

/// Elements of identical width on the x-axis, surface velocity scale v0 (m/s).
struct ArrayGeometry {
  std::size_t n_elements = 0;
  double element_width = 0.0;
  std::vector<double> element_centers;
  double v0 = 1.0;

  /// Centered array with `gap` metres between adjacent element edges.
  static ArrayGeometry uniform(std::size_t n, double width, double gap = 0.0, double v0 = 1.0);

  double aperture_min() const { return element_centers.front() - 0.5 * element_width; }
  double aperture_max() const { return element_centers.back() + 0.5 * element_width; }

  friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;
};

/// Rectangular control region sampled on an nx-by-nz grid that includes the
/// rectangle edges (a single sample along an axis sits at the midpoint).
struct Zone {
  double x_min = 0.0;
  double x_max = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
  std::size_t nx = 1;
  std::size_t nz = 1;

  std::vector<Point2> control_points() const;
  bool contains(Point2 p) const {
    return p.x >= x_min && p.x <= x_max && p.z >= z_min && p.z <= z_max;
  }

  friend bool operator==(const Zone&, const Zone&) = default;
};

/// Truncated virtual-source domain for the audio radiation integral, tiled by
/// cells of exactly dx by dz starting at (x_min, z_min). The cell count per
/// axis is rounded up so the tiling covers at least the requested box.
struct QuadratureSpec {
  double x_min = -0.75;
  double x_max = 0.75;
  double z_min = 0.001;
  double z_max = 1.2;
  double dx = 0.0025;
  double dz = 0.0025;

  std::size_t cells_x() const;
  std::size_t cells_z() const;

  friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

/// Cell-centred grid for SPL maps.
struct RenderGridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  double z_min = 0.0;
  double z_max = 1.2;
  double step = 0.005;

  std::size_t cells_x() const;
  std::size_t cells_z() const;
  /// Row-major (z outer, x inner) list of cell centres.
  std::vector<Point2> points() const;

  friend bool operator==(const RenderGridSpec&, const RenderGridSpec&) = default;
};

struct ArraySpec {
  std::size_t n_elements = 24;
  double element_width = 0.01;
  double gap = 0.0;
  double v0 = 1.0;

  friend bool operator==(const ArraySpec&, const ArraySpec&) = default;
};

struct OptimizerSpec {
  int n_itr = 200;
  std::uint64_t seed = 1;
  double ridge_scale = 1e-10;
  int multi_start = 1;

  friend bool operator==(const OptimizerSpec&, const OptimizerSpec&) = default;
};

struct PerturbationConfig {
  double snr_db = 30.0;  // +inf disables amplitude noise
  double phase_range_deg = 15.0;
  std::uint64_t seed = 2024;
  int n_trials = 100;
  std::vector<double> snr_grid{20, 25, 30, 35, 40, 45, 50};
  std::vector<double> phase_grid{5, 10, 15, 20, 25, 30, 35, 40, 45};
  // Sweep cells: SNR sweep at this phase range, phase sweep at this SNR.
  double sweep_phase_deg = 15.0;
  double sweep_snr_db = 30.0;
  bool evaluate_on_clean = false;

  friend bool operator==(const PerturbationConfig&, const PerturbationConfig&) = default;
};

/// Full experiment description as read from a configuration file.
struct ExperimentConfig {
  MediumParams medium;
  double f_center = 40000.0;
  std::vector<double> audio_frequencies{1000, 2000, 4000, 8000};
  ArraySpec array;
  Zone bright{-0.6, -0.3, 0.6, 0.9, 10, 10};
  Zone dark{0.3, 0.6, 0.6, 0.9, 10, 10};
  QuadratureSpec quadrature;
  RenderGridSpec render;
  OptimizerSpec optimizer;
  PerturbationConfig perturbation;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Validated configuration with every derived quantity populated.
struct Model {
  ExperimentConfig config;
  ArrayGeometry geometry;
  std::vector<FrequencyPlan> plans;
  std::vector<Point2> bright_points;
  std::vector<Point2> dark_points;

  friend bool operator==(const Model&, const Model&) = default;
};

/// Checks every invariant and derives the model. Throws ConfigError listing
/// all violations; no partially-built model is returned.
Model validate_config(const ExperimentConfig& config);

/// Atmospheric absorption in Np/m at frequency f (Hz). Uses
/// medium.alpha_override when set, otherwise ISO 9613-1 pure-tone absorption.
double absorption_coefficient(const MediumParams& medium, double f);

}  // namespace palzone
