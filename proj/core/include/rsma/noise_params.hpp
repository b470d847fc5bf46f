#pragma once

namespace rsma {

/// Receiver-circuit parameters for the physical shot/thermal noise model.
/// All values must be strictly positive. The two universal constants and
/// the noise-bandwidth factors default to their standard values; everything
/// else is equipment-specific and comes from the scenario file.
struct NoiseParams {
  double bandwidth_hz = 0.0;              // B
  double background_current_a = 0.0;      // I_bg
  double noise_bw_factor_i2 = 0.562;      // I_2
  double noise_bw_factor_i3 = 0.0868;     // I_3
  double electron_charge_c = 1.602176634e-19;
  double boltzmann_j_per_k = 1.380649e-23;
  double temperature_k = 0.0;             // T_k
  double open_loop_gain = 0.0;            // G
  double capacitance_per_area_f_m2 = 0.0; // eta
  double fet_noise_factor = 0.0;          // gamma
  double fet_transconductance_s = 0.0;    // g_m
};

}  // namespace rsma
