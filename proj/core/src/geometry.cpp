#include "rsma/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rsma/errors.hpp"

namespace rsma {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kUnitNormTol = 1e-9;

void check_unit(const Eigen::Vector3d& v, const std::string& field) {
  if (std::abs(v.norm() - 1.0) > kUnitNormTol) {
    throw ScenarioError(field + ": orientation must have unit norm");
  }
}

bool inside_room(const Eigen::Vector3d& p, const Eigen::Vector3d& dims) {
  return std::abs(p.x()) <= dims.x() / 2.0 && std::abs(p.y()) <= dims.y() / 2.0 &&
         p.z() >= 0.0 && p.z() <= dims.z();
}

void check_fixture(const LedFixture& f, const std::string& field) {
  if (f.led_count < 1) {
    throw ScenarioError(field + ".led_count: must be >= 1");
  }
  if (!(f.semi_angle_deg > 0.0 && f.semi_angle_deg < 90.0)) {
    throw ScenarioError(field + ".semi_angle_deg: must lie in (0, 90)");
  }
  check_unit(f.orientation, field + ".orientation");
}

void check_user(const PhotoDetector& u, const std::string& field) {
  if (!(u.area_m2 > 0.0)) {
    throw ScenarioError(field + ".area_m2: must be > 0");
  }
  if (!(u.refractive_index >= 1.0)) {
    throw ScenarioError(field + ".refractive_index: must be >= 1");
  }
  if (!(u.fov_deg > 0.0 && u.fov_deg <= 90.0)) {
    throw ScenarioError(field + ".fov_deg: must lie in (0, 90]");
  }
  if (!(u.filter_gain > 0.0)) {
    throw ScenarioError(field + ".filter_gain: must be > 0");
  }
  if (!(u.responsivity > 0.0)) {
    throw ScenarioError(field + ".responsivity: must be > 0");
  }
  check_unit(u.orientation, field + ".orientation");
}

}  // namespace

void RoomScenario::validate() const {
  if (!(room_dims.array() > 0.0).all()) {
    throw ScenarioError("room_dims: all dimensions must be > 0");
  }
  if (fixtures.empty()) {
    throw ScenarioError("fixtures: at least one fixture required");
  }
  if (users.empty()) {
    throw ScenarioError("users: at least one user required");
  }
  if (!(conversion_factor > 0.0)) {
    throw ScenarioError("conversion_factor: must be > 0");
  }
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    const std::string field = "fixtures[" + std::to_string(i) + "]";
    check_fixture(fixtures[i], field);
    if (!inside_room(fixtures[i].position, room_dims)) {
      throw ScenarioError(field + ".position: outside room_dims");
    }
  }
  for (std::size_t i = 0; i < users.size(); ++i) {
    const std::string field = "users[" + std::to_string(i) + "]";
    check_user(users[i], field);
    if (!inside_room(users[i].position, room_dims)) {
      throw ScenarioError(field + ".position: outside room_dims");
    }
  }
  if (noise_mode == NoiseMode::Physical && !noise_params.has_value()) {
    throw ScenarioError("noise_mode: physical mode requires noise parameters");
  }
}

double lambertian_order(double semi_angle_deg) {
  if (!(semi_angle_deg > 0.0 && semi_angle_deg < 90.0)) {
    throw std::domain_error("lambertian_order: semi-angle must lie in (0, 90) degrees");
  }
  return -std::log(2.0) / std::log(std::cos(semi_angle_deg * kDegToRad));
}

double concentrator_gain(double incidence_deg, double fov_deg,
                         double refractive_index) {
  if (incidence_deg < 0.0) {
    throw std::domain_error("concentrator_gain: incidence must be >= 0 degrees");
  }
  if (!(fov_deg > 0.0 && fov_deg <= 90.0)) {
    throw std::domain_error("concentrator_gain: fov must lie in (0, 90] degrees");
  }
  if (!(refractive_index >= 1.0)) {
    throw std::domain_error("concentrator_gain: refractive index must be >= 1");
  }
  if (incidence_deg > fov_deg) {
    return 0.0;
  }
  const double s = std::sin(fov_deg * kDegToRad);
  return refractive_index * refractive_index / (s * s);
}

double radiant_intensity(double lambertian_m, double emission_angle_deg) {
  if (!(lambertian_m > 0.0)) {
    throw std::domain_error("radiant_intensity: Lambertian order must be > 0");
  }
  if (emission_angle_deg < 0.0 || emission_angle_deg > 90.0) {
    throw std::domain_error("radiant_intensity: emission angle must lie in [0, 90] degrees");
  }
  const double c = std::cos(emission_angle_deg * kDegToRad);
  return (lambertian_m + 1.0) / (2.0 * M_PI) * std::pow(c, lambertian_m);
}

double fixture_gain(const LedFixture& fixture, const PhotoDetector& pd) {
  const Eigen::Vector3d delta = pd.position - fixture.position;
  const double dist2 = delta.squaredNorm();
  if (dist2 == 0.0) {
    throw std::domain_error("fixture_gain: fixture and detector positions coincide");
  }
  const double dist = std::sqrt(dist2);

  // cos of emission angle off the fixture axis and of incidence onto the
  // detector axis. Either behind its plane -> no line of sight.
  const double cos_emission = fixture.orientation.dot(delta) / dist;
  const double cos_incidence = pd.orientation.dot(-delta) / dist;
  if (cos_emission <= 0.0 || cos_incidence <= 0.0) {
    return 0.0;
  }

  const double fov_rad = pd.fov_deg * kDegToRad;
  // Hard field-of-view cutoff: incidence beyond fov contributes exactly 0.
  if (cos_incidence < std::cos(fov_rad)) {
    return 0.0;
  }

  const double m = lambertian_order(fixture.semi_angle_deg);
  const double radiant =
      (m + 1.0) / (2.0 * M_PI) * std::pow(cos_emission, m);
  const double sin_fov = std::sin(fov_rad);
  const double concentrator =
      pd.refractive_index * pd.refractive_index / (sin_fov * sin_fov);

  const double single_led = pd.area_m2 / dist2 * radiant * pd.filter_gain *
                            concentrator * cos_incidence;
  return static_cast<double>(fixture.led_count) * single_led;
}

ChannelMatrix channel_matrix(const RoomScenario& scenario) {
  scenario.validate();
  const int n_users = static_cast<int>(scenario.users.size());
  const int n_fixtures = static_cast<int>(scenario.fixtures.size());
  ChannelMatrix out;
  out.gains.resize(n_users, n_fixtures);
  for (int k = 0; k < n_users; ++k) {
    for (int j = 0; j < n_fixtures; ++j) {
      out.gains(k, j) = fixture_gain(scenario.fixtures[j], scenario.users[k]);
    }
  }
  return out;
}

}  // namespace rsma
