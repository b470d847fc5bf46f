#include "rsma/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace rsma {

double shot_variance(const NoiseParams& np, const PhotoDetector& pd,
                     double received_optical_power_w) {
  if (received_optical_power_w < 0.0) {
    throw std::domain_error("shot_variance: received power must be >= 0");
  }
  const double signal_current = pd.responsivity * received_optical_power_w;
  const double background = np.background_current_a * np.noise_bw_factor_i2;
  return 2.0 * np.electron_charge_c * np.bandwidth_hz *
         (signal_current + background);
}

double thermal_variance(const NoiseParams& np, const PhotoDetector& pd) {
  if (np.temperature_k == 0.0 || np.bandwidth_hz == 0.0) {
    return 0.0;
  }
  if (!(np.open_loop_gain > 0.0)) {
    throw std::domain_error("thermal_variance: open_loop_gain must be > 0");
  }
  if (!(np.fet_transconductance_s > 0.0)) {
    throw std::domain_error("thermal_variance: fet_transconductance must be > 0");
  }
  const double kt = np.boltzmann_j_per_k * np.temperature_k;
  const double eta_a = np.capacitance_per_area_f_m2 * pd.area_m2;
  const double b2 = np.bandwidth_hz * np.bandwidth_hz;
  const double feedback = 8.0 * M_PI * kt / np.open_loop_gain * eta_a *
                          np.noise_bw_factor_i2 * b2;
  const double fet = 16.0 * M_PI * M_PI * kt * np.fet_noise_factor /
                     np.fet_transconductance_s * eta_a * eta_a *
                     np.noise_bw_factor_i3 * b2 * np.bandwidth_hz;
  return feedback + fet;
}

double total_variance(const RoomScenario& scenario, int user_index,
                      double received_optical_power_w) {
  if (user_index < 0 ||
      user_index >= static_cast<int>(scenario.users.size())) {
    throw std::out_of_range("total_variance: user index out of range");
  }
  if (scenario.noise_mode == NoiseMode::Unit) {
    return 1.0;
  }
  if (!scenario.noise_params.has_value()) {
    throw std::domain_error("total_variance: physical mode requires noise parameters");
  }
  const PhotoDetector& pd = scenario.users[user_index];
  return shot_variance(*scenario.noise_params, pd, received_optical_power_w) +
         thermal_variance(*scenario.noise_params, pd);
}

double normalized_variance(const RoomScenario& scenario, int user_index,
                           double received_optical_power_w) {
  const double raw =
      total_variance(scenario, user_index, received_optical_power_w);
  if (scenario.noise_mode == NoiseMode::Unit) {
    return raw;
  }
  const double scale =
      scenario.conversion_factor * scenario.users[user_index].responsivity;
  return raw / (scale * scale);
}

}  // namespace rsma
