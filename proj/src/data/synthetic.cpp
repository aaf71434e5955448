#include "ecto/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ecto/autodiff/init.hpp"

namespace ecto::data {

namespace {

constexpr const char* kind_name(ChannelKind k) {
  switch (k) {
    case ChannelKind::WindSpeed: return "wind_speed";
    case ChannelKind::WindDirection: return "wind_direction";
    case ChannelKind::Temperature: return "temperature";
    case ChannelKind::Pressure: return "pressure";
    case ChannelKind::Humidity: return "humidity";
    case ChannelKind::Noise: return "noise";
  }
  return "noise";
}

ChannelKind kind_from(const std::string& s) {
  for (auto k : {ChannelKind::WindSpeed, ChannelKind::WindDirection, ChannelKind::Temperature, ChannelKind::Pressure,
                 ChannelKind::Humidity, ChannelKind::Noise}) {
    if (s == kind_name(k)) return k;
  }
  throw DataError("unknown synthetic channel kind '" + s + "'");
}

constexpr const char* regime_source_name(RegimeSource r) {
  switch (r) {
    case RegimeSource::Schedule: return "schedule";
    case RegimeSource::Sector: return "sector";
    case RegimeSource::Markov: return "markov";
  }
  return "sector";
}

RegimeSource regime_source_from(const std::string& s) {
  for (auto r : {RegimeSource::Schedule, RegimeSource::Sector, RegimeSource::Markov})
    if (s == regime_source_name(r)) return r;
  throw DataError("unknown regime source '" + s + "'");
}

/// Unit-variance AR(1) with the given correlation time in steps.
std::vector<double> ar1(std::size_t n, double time_steps, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  const double phi = std::exp(-1.0 / time_steps);
  const double innovation = std::sqrt(1.0 - phi * phi);
  std::vector<double> out(n);
  double x = noise(rng);
  for (std::size_t t = 0; t < n; ++t) {
    out[t] = x;
    x = phi * x + innovation * noise(rng);
  }
  return out;
}

double angular_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

void check_config(const SyntheticConfig& c) {
  if (c.channels.empty()) throw DataError("synthetic config needs at least one channel");
  if (c.length == 0) throw DataError("synthetic length must be positive");
  if (c.resolution_minutes <= 0) throw DataError("synthetic resolution must be positive");
  if (!(c.rated_capacity > 0.0)) throw DataError("rated capacity must be positive");
  if (c.informative.empty()) throw DataError("synthetic config needs at least one informative channel");
  for (auto i : c.informative)
    if (i >= c.channels.size()) throw DataError("informative index " + std::to_string(i) + " out of range");
  for (const auto& ch : c.channels)
    if (ch.kind == ChannelKind::WindSpeed && !(ch.height_m > 0.0))
      throw DataError("wind speed channel '" + ch.name + "' needs a positive height");
  if (!(c.cut_in < c.rated_speed && c.rated_speed < c.cut_out)) throw DataError("power curve speeds out of order");
  if (c.regime_source == RegimeSource::Schedule) {
    if (c.regime_schedule.size() != c.length) throw DataError("regime schedule length must equal series length");
    for (int r : c.regime_schedule)
      if (r != 0 && r != 1) throw DataError("regime ids must be 0 or 1");
  }
}

}  // namespace

SyntheticConfig default_synthetic_config() {
  SyntheticConfig c;
  c.channels = {
      {"ws_10m", ChannelKind::WindSpeed, 10.0, "wind"},
      {"ws_hub", ChannelKind::WindSpeed, 100.0, "wind"},
      {"wd_hub", ChannelKind::WindDirection, 0.0, "atmospheric"},
      {"temperature", ChannelKind::Temperature, 0.0, "atmospheric"},
      {"pressure", ChannelKind::Pressure, 0.0, "atmospheric"},
      {"humidity", ChannelKind::Humidity, 0.0, "atmospheric"},
      {"noise_1", ChannelKind::Noise, 0.0, "atmospheric"},
      {"noise_2", ChannelKind::Noise, 0.0, "atmospheric"},
  };
  c.informative = {0, 1};
  return c;
}

double power_curve(double v, const SyntheticConfig& c) {
  if (v <= c.cut_in || v >= c.cut_out) return 0.0;
  if (v >= c.rated_speed) return 1.0;
  const double lo = c.cut_in * c.cut_in * c.cut_in;
  const double hi = c.rated_speed * c.rated_speed * c.rated_speed;
  return (v * v * v - lo) / (hi - lo);
}

SyntheticSeries synthesize_with_truth(const SyntheticConfig& c) {
  check_config(c);
  const std::size_t n = c.length;
  const std::size_t D = c.channels.size();
  const double steps_per_hour = 60.0 / c.resolution_minutes;

  auto wind_rng = ad::derive_stream(c.seed, "synthetic/wind");
  const auto slow = ar1(n, c.slow_time_steps, wind_rng);
  const auto fast = ar1(n, c.fast_time_steps, wind_rng);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> hub(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double v = c.mean_wind + c.slow_wind_std * slow[t] + c.fast_wind_std * fast[t];
    hub[t] = std::max(0.0, v + c.wind_measurement_noise * unit(wind_rng));
  }

  auto dir_rng = ad::derive_stream(c.seed, "synthetic/direction");
  const auto dir_slow = ar1(n, 4.0 * c.slow_time_steps, dir_rng);
  const auto dir_fast = ar1(n, c.fast_time_steps, dir_rng);
  std::vector<double> direction(n);
  for (std::size_t t = 0; t < n; ++t) {
    double deg = 240.0 + 70.0 * dir_slow[t] + 25.0 * dir_fast[t];
    deg = std::fmod(deg, 360.0);
    direction[t] = deg < 0.0 ? deg + 360.0 : deg;
  }

  SyntheticSeries out;
  SeriesDataset& ds = out.dataset;
  ds.resolution_minutes = c.resolution_minutes;
  ds.rated_capacity = c.rated_capacity;
  ds.target_name = "power";
  ds.timestamp_name = "timestamp";
  const Timestamp origin = std::chrono::sys_days{std::chrono::year{2021} / 1 / 1};
  const std::chrono::seconds step{static_cast<long long>(c.resolution_minutes) * 60};
  ds.timestamps.resize(n);
  for (std::size_t t = 0; t < n; ++t) ds.timestamps[t] = origin + step * static_cast<long long>(t);

  std::vector<std::string> labels;
  for (std::size_t d = 0; d < D; ++d) {
    const auto& ch = c.channels[d];
    auto rng = ad::derive_stream(c.seed, "synthetic/channel/" + ch.name);
    std::vector<double> col(n);
    switch (ch.kind) {
      case ChannelKind::WindSpeed: {
        const double factor = std::pow(ch.height_m / c.hub_height_m, c.shear_exponent);
        for (std::size_t t = 0; t < n; ++t) col[t] = hub[t] * factor;
        break;
      }
      case ChannelKind::WindDirection:
        col = direction;
        break;
      case ChannelKind::Temperature: {
        const auto ar = ar1(n, c.slow_time_steps, rng);
        for (std::size_t t = 0; t < n; ++t) {
          const double hour = static_cast<double>(t) / steps_per_hour;
          col[t] = 12.0 + 6.0 * std::sin(2.0 * std::numbers::pi * (hour - 9.0) / 24.0) + 2.0 * ar[t] +
                   c.temperature_noise * unit(rng);
        }
        break;
      }
      case ChannelKind::Pressure: {
        const auto ar = ar1(n, 4.0 * c.slow_time_steps, rng);
        for (std::size_t t = 0; t < n; ++t) {
          const double hour = static_cast<double>(t) / steps_per_hour;
          col[t] = 1013.0 + 6.0 * ar[t] + 0.6 * std::sin(2.0 * std::numbers::pi * hour / 12.0) +
                   c.pressure_noise * unit(rng);
        }
        break;
      }
      case ChannelKind::Humidity: {
        const auto ar = ar1(n, c.slow_time_steps, rng);
        for (std::size_t t = 0; t < n; ++t) {
          const double hour = static_cast<double>(t) / steps_per_hour;
          const double h = 65.0 - 12.0 * std::sin(2.0 * std::numbers::pi * (hour - 9.0) / 24.0) + 6.0 * ar[t] +
                           c.humidity_noise * unit(rng);
          col[t] = std::clamp(h, 5.0, 100.0);
        }
        break;
      }
      case ChannelKind::Noise:
        for (auto& v : col) v = unit(rng);
        break;
    }
    ds.exogenous_names.push_back(ch.name);
    ds.exogenous.push_back(std::move(col));
    labels.push_back(ch.group);
  }
  ds.groups = groups_from_labels(ds.exogenous_names, labels);

  // Effective hub-height wind seen by the turbines: informative channels
  // mapped to hub height, averaged.
  std::vector<double> mixed(n, 0.0);
  for (auto i : c.informative) {
    const auto& ch = c.channels[i];
    const auto& col = ds.exogenous[i];
    if (ch.kind == ChannelKind::WindSpeed) {
      const double to_hub = std::pow(c.hub_height_m / ch.height_m, c.shear_exponent);
      for (std::size_t t = 0; t < n; ++t) mixed[t] += col[t] * to_hub;
    } else {
      const auto st = [&] {
        double m = 0.0, s = 0.0;
        for (double v : col) m += v;
        m /= static_cast<double>(n);
        for (double v : col) s += (v - m) * (v - m);
        return std::pair{m, std::sqrt(s / static_cast<double>(n)) + 1e-12};
      }();
      for (std::size_t t = 0; t < n; ++t) mixed[t] += c.mean_wind + c.slow_wind_std * (col[t] - st.first) / st.second;
    }
  }
  for (auto& v : mixed) v /= static_cast<double>(c.informative.size());

  out.regime.assign(n, 0);
  switch (c.regime_source) {
    case RegimeSource::Schedule:
      out.regime = c.regime_schedule;
      break;
    case RegimeSource::Sector:
      for (std::size_t t = 0; t < n; ++t) {
        const std::size_t src = t >= c.lead_steps ? t - c.lead_steps : 0;
        out.regime[t] = angular_distance(direction[src], c.wake_center_deg) <= c.wake_half_width_deg ? 1 : 0;
      }
      break;
    case RegimeSource::Markov: {
      auto rng = ad::derive_stream(c.seed, "synthetic/regime");
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double p_switch = 1.0 / std::max(1.0, c.markov_dwell_steps);
      int state = 0;
      for (std::size_t t = 0; t < n; ++t) {
        if (u(rng) < p_switch) state = 1 - state;
        out.regime[t] = state;
      }
      break;
    }
  }

  auto power_rng = ad::derive_stream(c.seed, "synthetic/power");
  out.effective_wind.resize(n);
  ds.target.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t src = t >= c.lead_steps ? t - c.lead_steps : 0;
    out.effective_wind[t] = mixed[src];
    double u = power_curve(mixed[src], c);
    if (out.regime[t] == 1) u *= c.regime_derating;
    u += c.power_noise * unit(power_rng);
    ds.target[t] = c.rated_capacity * std::clamp(u, 0.0, 1.0);
  }
  ds.validate();
  return out;
}

SeriesDataset synthesize(const SyntheticConfig& config) { return synthesize_with_truth(config).dataset; }

nlohmann::json to_json(const SyntheticConfig& c) {
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& ch : c.channels) {
    nlohmann::json j{{"name", ch.name}, {"kind", kind_name(ch.kind)}, {"group", ch.group}};
    if (ch.kind == ChannelKind::WindSpeed) j["height_m"] = ch.height_m;
    channels.push_back(j);
  }
  return {{"length", c.length},
          {"resolution_minutes", c.resolution_minutes},
          {"channels", channels},
          {"informative", c.informative},
          {"hub_height_m", c.hub_height_m},
          {"shear_exponent", c.shear_exponent},
          {"rated_capacity", c.rated_capacity},
          {"seed", c.seed},
          {"mean_wind", c.mean_wind},
          {"slow_wind_std", c.slow_wind_std},
          {"fast_wind_std", c.fast_wind_std},
          {"slow_time_steps", c.slow_time_steps},
          {"fast_time_steps", c.fast_time_steps},
          {"wind_measurement_noise", c.wind_measurement_noise},
          {"power_noise", c.power_noise},
          {"lead_steps", c.lead_steps},
          {"cut_in", c.cut_in},
          {"rated_speed", c.rated_speed},
          {"cut_out", c.cut_out},
          {"regime_source", regime_source_name(c.regime_source)},
          {"regime_schedule", c.regime_schedule},
          {"regime_derating", c.regime_derating},
          {"wake_center_deg", c.wake_center_deg},
          {"wake_half_width_deg", c.wake_half_width_deg},
          {"markov_dwell_steps", c.markov_dwell_steps},
          {"temperature_noise", c.temperature_noise},
          {"pressure_noise", c.pressure_noise},
          {"humidity_noise", c.humidity_noise}};
}

SyntheticConfig synthetic_config_from_json(const nlohmann::json& doc) {
  SyntheticConfig c = default_synthetic_config();
  try {
    if (doc.contains("channels")) {
      c.channels.clear();
      for (const auto& j : doc.at("channels")) {
        ChannelSpec ch;
        ch.name = j.at("name").get<std::string>();
        ch.kind = kind_from(j.value("kind", std::string("noise")));
        ch.height_m = j.value("height_m", 0.0);
        ch.group = j.value("group", std::string{});
        c.channels.push_back(ch);
      }
    }
    c.length = doc.value("length", c.length);
    c.resolution_minutes = doc.value("resolution_minutes", c.resolution_minutes);
    c.informative = doc.value("informative", c.informative);
    c.hub_height_m = doc.value("hub_height_m", c.hub_height_m);
    c.shear_exponent = doc.value("shear_exponent", c.shear_exponent);
    c.rated_capacity = doc.value("rated_capacity", c.rated_capacity);
    c.seed = doc.value("seed", c.seed);
    c.mean_wind = doc.value("mean_wind", c.mean_wind);
    c.slow_wind_std = doc.value("slow_wind_std", c.slow_wind_std);
    c.fast_wind_std = doc.value("fast_wind_std", c.fast_wind_std);
    c.slow_time_steps = doc.value("slow_time_steps", c.slow_time_steps);
    c.fast_time_steps = doc.value("fast_time_steps", c.fast_time_steps);
    c.wind_measurement_noise = doc.value("wind_measurement_noise", c.wind_measurement_noise);
    c.power_noise = doc.value("power_noise", c.power_noise);
    c.lead_steps = doc.value("lead_steps", c.lead_steps);
    c.cut_in = doc.value("cut_in", c.cut_in);
    c.rated_speed = doc.value("rated_speed", c.rated_speed);
    c.cut_out = doc.value("cut_out", c.cut_out);
    if (doc.contains("regime_source")) c.regime_source = regime_source_from(doc.at("regime_source").get<std::string>());
    c.regime_schedule = doc.value("regime_schedule", c.regime_schedule);
    c.regime_derating = doc.value("regime_derating", c.regime_derating);
    c.wake_center_deg = doc.value("wake_center_deg", c.wake_center_deg);
    c.wake_half_width_deg = doc.value("wake_half_width_deg", c.wake_half_width_deg);
    c.markov_dwell_steps = doc.value("markov_dwell_steps", c.markov_dwell_steps);
    c.temperature_noise = doc.value("temperature_noise", c.temperature_noise);
    c.pressure_noise = doc.value("pressure_noise", c.pressure_noise);
    c.humidity_noise = doc.value("humidity_noise", c.humidity_noise);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed synthetic config: ") + e.what());
  }
  check_config(c);
  return c;
}

}  // namespace ecto::data
