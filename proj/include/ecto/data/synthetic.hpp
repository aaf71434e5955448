#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ecto/data/dataset.hpp"

namespace ecto::data {

enum class ChannelKind { WindSpeed, WindDirection, Temperature, Pressure, Humidity, Noise };

struct ChannelSpec {
  std::string name;
  ChannelKind kind = ChannelKind::Noise;
  double height_m = 0.0;  // wind speed only
  std::string group;      // empty: default grouping
};

/// Where the regime id of each step comes from.
enum class RegimeSource {
  Schedule,   // SyntheticConfig::regime_schedule verbatim
  Sector,     // regime 1 while the hub wind direction is inside the wake sector
  Markov,     // two-state Markov chain with the given mean dwell time
};

/// Synthetic wind farm. Power follows a saturating cubic power curve of an
/// "effective wind" built from the informative channels only, observed
/// `lead_steps` earlier (an upstream mast), and is derated by
/// `regime_derating` while regime 1 is active. Non-informative speed heights
/// follow the hub speed through the shear power law; the noise channels are
/// i.i.d. Gaussian.
struct SyntheticConfig {
  std::size_t length = 20000;
  int resolution_minutes = 15;
  std::vector<ChannelSpec> channels;           // D channels
  std::vector<std::size_t> informative;        // indices into channels
  double hub_height_m = 100.0;
  double shear_exponent = 0.14;
  double rated_capacity = 99.0;                // MW
  std::uint64_t seed = 42;

  double mean_wind = 7.5;                      // m/s at hub height
  double slow_wind_std = 2.2;
  double fast_wind_std = 1.6;
  double slow_time_steps = 192.0;
  double fast_time_steps = 24.0;
  double wind_measurement_noise = 0.15;        // m/s
  double power_noise = 0.01;                   // fraction of rated capacity
  std::size_t lead_steps = 8;

  double cut_in = 3.0;
  double rated_speed = 13.0;
  double cut_out = 25.0;

  RegimeSource regime_source = RegimeSource::Sector;
  std::vector<int> regime_schedule;            // used with RegimeSource::Schedule
  double regime_derating = 0.7;
  double wake_center_deg = 270.0;
  double wake_half_width_deg = 45.0;
  double markov_dwell_steps = 96.0;

  double temperature_noise = 0.3;
  double pressure_noise = 0.2;
  double humidity_noise = 1.5;
};

/// Eight channels: ws_10m and ws_hub (informative), wd_hub, temperature,
/// pressure, humidity, noise_1, noise_2.
SyntheticConfig default_synthetic_config();

struct SyntheticSeries {
  SeriesDataset dataset;
  std::vector<int> regime;          // per step
  std::vector<double> effective_wind;  // lead-aligned with the power series
};

SyntheticSeries synthesize_with_truth(const SyntheticConfig& config);
SeriesDataset synthesize(const SyntheticConfig& config);

/// Power-curve value in [0, 1] for a hub-height wind speed.
double power_curve(double wind, const SyntheticConfig& config);

nlohmann::json to_json(const SyntheticConfig& config);
SyntheticConfig synthetic_config_from_json(const nlohmann::json& doc);

}  // namespace ecto::data
