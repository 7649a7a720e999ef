#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace fdnoma {

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watts(double dbm);

/// Log-distance pathloss constants, PL(dB) = intercept + slope * log10(d / 1 km),
/// per link kind. Defaults follow the 3GPP multi-cell pico outdoor set.
struct PathlossModel {
  double sbs_user_intercept = 140.7;
  double sbs_user_slope = 36.7;
  double user_user_intercept = 145.4;
  double user_user_slope = 37.5;
  double sbs_sbs_intercept = 169.36;
  double sbs_sbs_slope = 41.1;
};

/// Scenario parameters for one simulated network. Powers in watts, rates in
/// bits/second, sizes in bits, times in seconds, ratios linear unless the field
/// name says otherwise.
struct ScenarioConfig {
  double area_side = 500.0;
  int num_sbs = 4;
  double mean_users_per_sbs = 5.0;
  double cell_radius = 40.0;
  double bandwidth = 10e6;
  double p_max_ul = 0.1;             // 20 dBm
  double p_max_dl = 0.15848931924611134;  // 22 dBm
  double si_cancellation = 1e11;     // 110 dB
  int noma_quota = 5;
  double lyapunov_v = 5e7;
  double delta_ul = 0.05;
  double delta_dl = 0.9 * 0.15848931924611134;
  double nu1 = 0.1;
  double nu2 = 0.1;
  double lambda_ul = 5.0;
  double lambda_dl = 5.0;
  double mean_packet_size = 100e3;
  double subframe_duration = 1e-3;
  int num_subframes = 500;
  std::uint64_t rng_seed = 1;

  // Channel and receiver model.
  PathlossModel pathloss;
  double shadowing_std_db = 4.0;
  bool fast_fading = true;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 9.0;

  // Queue bounds.
  double sinr_cap_db = 30.0;
  double arrival_cap_factor = 20.0;

  // Baseline knobs.
  double noma_gain_ratio = 2.0;
  double fd_pair_gain_threshold = 1e-7;
  bool fd_pair_above_threshold = false;

  // Power optimizer.
  int ccp_max_iterations = 50;
  double ccp_relative_tolerance = 1e-3;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  double noise_power() const;
  /// Per-subframe service bound r_max in bits.
  double max_service_bits() const;
  /// Per-subframe arrival bound A_max in bits.
  double max_arrival_bits() const;
};

/// Parses a flat `key = value` file. Blank lines and `#` comments are ignored.
/// Keys match the field names above; `p_max_ul_dbm`, `p_max_dl_dbm` and
/// `si_cancellation_db` are accepted as unit-converting aliases. When the power
/// thresholds are not given they follow the maximum powers (0.5 and 0.9 of
/// P_max). Unknown keys throw.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Full-size scenario: 10 SBSs, 10 users per SBS on average, 4000 subframes.
void apply_full_scale(ScenarioConfig& config);

/// Sets a single key on `config` with the same semantics as the file loader.
void set_config_value(ScenarioConfig& config, const std::string& key,
                      const std::string& value);

}  // namespace fdnoma
