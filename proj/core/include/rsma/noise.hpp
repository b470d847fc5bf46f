#pragma once

#include "rsma/geometry.hpp"
#include "rsma/noise_params.hpp"

namespace rsma {

/// Shot-noise variance 2 q B (responsivity * P_rx + I_bg * I_2) in A^2.
/// `received_optical_power_w` must be >= 0.
double shot_variance(const NoiseParams& params, const PhotoDetector& pd,
                     double received_optical_power_w);

/// Thermal-noise variance of the transimpedance front end in A^2:
/// (8 pi K T / G) eta A I_2 B^2 + (16 pi^2 K T gamma / g_m) eta^2 A^2 I_3 B^3.
double thermal_variance(const NoiseParams& params, const PhotoDetector& pd);

/// Receiver noise variance for one user. Unit mode returns exactly 1.0;
/// physical mode returns shot + thermal at the given mean received optical
/// power. A degenerate all-zero physical result is returned as 0 and will
/// be rejected by the SINR layer, which requires positive noise.
double total_variance(const RoomScenario& scenario, int user_index,
                      double received_optical_power_w);

/// Noise variance on the normalized signal scale used by the SINR
/// expressions: total variance divided by (conversion_factor *
/// responsivity)^2 in physical mode, exactly 1.0 in unit mode.
double normalized_variance(const RoomScenario& scenario, int user_index,
                           double received_optical_power_w);

}  // namespace rsma
