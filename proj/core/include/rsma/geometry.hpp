#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "rsma/noise_params.hpp"

namespace rsma {

// Indoor downlink geometry: LED fixtures on the ceiling, photodetector
// users below. Coordinates are meters; the room spans
// x,y in [-dims/2, +dims/2] and z in [0, dims.z] with z up.
// Angles cross the API in degrees and are converted to radians internally.

/// A ceiling luminaire of `led_count` co-located LEDs treated as one
/// emitter with a Lambertian pattern set by `semi_angle_deg`.
struct LedFixture {
  Eigen::Vector3d position{0.0, 0.0, 0.0};
  int led_count = 3600;                              // Q
  double semi_angle_deg = 60.0;                      // half-power semi-angle
  Eigen::Vector3d orientation{0.0, 0.0, -1.0};       // unit emission axis
};

/// A single-photodiode receiver. `area_m2` is the active area, `fov_deg`
/// the half-angle field of view; light beyond it contributes exactly zero.
struct PhotoDetector {
  Eigen::Vector3d position{0.0, 0.0, 0.0};
  double area_m2 = 1e-4;
  double refractive_index = 1.5;                     // concentrator index n
  double fov_deg = 60.0;
  double filter_gain = 1.0;                          // optical filter T_s
  double responsivity = 1.0;                         // A/W
  Eigen::Vector3d orientation{0.0, 0.0, 1.0};        // unit facing axis
};

enum class NoiseMode { Unit, Physical };

/// Full description of one simulated room: geometry plus the
/// electro-optical conversion factor and the receiver noise model.
struct RoomScenario {
  Eigen::Vector3d room_dims{5.0, 5.0, 4.0};
  std::vector<LedFixture> fixtures;
  std::vector<PhotoDetector> users;
  double conversion_factor = 1.0;                    // LED W per drive unit
  NoiseMode noise_mode = NoiseMode::Unit;
  std::optional<NoiseParams> noise_params;           // required for Physical

  /// Throws ScenarioError naming the failing field if any invariant is
  /// violated (positions outside the room, empty fixture/user lists,
  /// out-of-range optics, non-unit orientations).
  void validate() const;
};

/// DC channel gains, one row per user, one column per fixture.
struct ChannelMatrix {
  Eigen::MatrixXd gains;

  int user_count() const { return static_cast<int>(gains.rows()); }
  int fixture_count() const { return static_cast<int>(gains.cols()); }
};

/// Lambertian mode number m for a half-power semi-angle in (0, 90) degrees.
/// m = -ln 2 / ln(cos semi_angle); 60 degrees gives m = 1.
/// Throws std::domain_error outside (0, 90).
double lambertian_order(double semi_angle_deg);

/// Non-imaging concentrator gain: n^2 / sin^2(fov) inside the field of
/// view, exactly 0 beyond it. Throws std::domain_error for negative
/// incidence or fov outside (0, 90].
double concentrator_gain(double incidence_deg, double fov_deg,
                         double refractive_index);

/// Normalized Lambertian radiant intensity (m+1)/(2 pi) * cos^m(angle).
/// Throws std::domain_error for angles outside [0, 90].
double radiant_intensity(double lambertian_m, double emission_angle_deg);

/// DC gain of a whole fixture at one photodetector: the single-LED
/// line-of-sight gain scaled by the fixture's LED count. Emission angle is
/// measured from the fixture axis, incidence from the detector axis;
/// the gain is exactly 0 once incidence exceeds the detector field of view
/// or either angle passes 90 degrees.
double fixture_gain(const LedFixture& fixture, const PhotoDetector& pd);

/// Gain matrix for every (user, fixture) pair of a validated scenario.
ChannelMatrix channel_matrix(const RoomScenario& scenario);

}  // namespace rsma
