#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "ecto/data/dataset.hpp"
#include "ecto/data/preprocess.hpp"
#include "ecto/data/synthetic.hpp"
#include "support/temp_dir.hpp"

using namespace ecto::data;

namespace {

const double NaN = kMissing;

SeriesDataset toy_dataset(std::vector<double> target, std::size_t channels = 1) {
  SeriesDataset ds;
  ds.resolution_minutes = 15;
  const Timestamp t0 = parse_timestamp("2022-03-01 00:00:00");
  for (std::size_t i = 0; i < target.size(); ++i) ds.timestamps.push_back(t0 + std::chrono::minutes(15 * i));
  ds.target = std::move(target);
  for (std::size_t d = 0; d < channels; ++d) {
    ds.exogenous_names.push_back("x" + std::to_string(d));
    std::vector<double> col(ds.target.size());
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = static_cast<double>(i * (d + 1));
    ds.exogenous.push_back(std::move(col));
  }
  ds.groups = {{"all", {}}};
  for (std::size_t d = 0; d < channels; ++d) ds.groups[0].members.push_back(d);
  return ds;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::string write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_CASE("repair_series: interpolation and bounded filling") {
  std::vector<double> mid{1, NaN, 3};
  repair_series(mid);
  CHECK(mid == std::vector<double>{1, 2, 3});

  std::vector<double> lead{NaN, NaN, 5, 6};
  repair_series(lead);
  CHECK(lead == std::vector<double>{5, 5, 5, 6});

  std::vector<double> tail{4, NaN, NaN};
  repair_series(tail);
  CHECK(tail == std::vector<double>{4, 4, 4});

  SUBCASE("a gap of exactly 32 steps is interpolated") {
    std::vector<double> s(40, 0.0);
    for (std::size_t i = 0; i < 40; ++i) s[i] = static_cast<double>(i);
    for (std::size_t i = 4; i < 36; ++i) s[i] = NaN;
    const auto r = repair_series(s);
    CHECK(r.interpolated == 32);
    for (std::size_t i = 0; i < 40; ++i) CHECK(s[i] == doctest::Approx(static_cast<double>(i)).epsilon(1e-12));
  }
}

TEST_CASE("repair_gaps: 33-step gap keeps 8+8 filled rows and drops the middle 17") {
  std::vector<double> target;
  for (int i = 0; i < 10; ++i) target.push_back(1.0);
  for (int i = 0; i < 33; ++i) target.push_back(NaN);
  for (int i = 0; i < 10; ++i) target.push_back(9.0);
  auto ds = toy_dataset(target);
  const auto original_ts = ds.timestamps;

  const auto report = repair_gaps(ds);
  CHECK(report.interpolated == 0);
  CHECK(report.forward_filled == 8);
  CHECK(report.backward_filled == 8);
  CHECK(report.rows_dropped == 17);
  REQUIRE(ds.length() == 53 - 17);
  // Rows 0..17 are the 10 observed + 8 forward-filled ones at value 1.
  for (std::size_t i = 0; i < 18; ++i) CHECK(ds.target[i] == 1.0);
  for (std::size_t i = 18; i < ds.length(); ++i) CHECK(ds.target[i] == 9.0);
  CHECK(ds.timestamps[17] == original_ts[17]);
  CHECK(ds.timestamps[18] == original_ts[35]);
  CHECK_FALSE(ds.has_missing());
}

TEST_CASE("repair_gaps: idempotent on random missing patterns") {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution miss(0.3);
  std::geometric_distribution<int> burst(0.08);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> target(300);
    for (std::size_t i = 0; i < target.size(); ++i) target[i] = std::sin(0.1 * static_cast<double>(i));
    auto ds = toy_dataset(target, 2);
    for (std::size_t i = 0; i < ds.length();) {
      if (miss(rng)) {
        const std::size_t len = 1 + static_cast<std::size_t>(burst(rng));
        for (std::size_t k = i; k < std::min(ds.length(), i + len); ++k) ds.target[k] = NaN;
        i += len;
      } else {
        i += 7;
      }
    }
    if (std::all_of(ds.target.begin(), ds.target.end(), [](double v) { return std::isnan(v); })) continue;
    repair_gaps(ds);
    auto again = ds;
    const auto second = repair_gaps(again);
    CHECK(second.interpolated + second.forward_filled + second.backward_filled + second.rows_dropped == 0);
    CHECK(again.target == ds.target);
    CHECK(again.timestamps == ds.timestamps);
  }
}

TEST_CASE("repair_gaps: an entirely missing column is an ingestion error") {
  auto ds = toy_dataset({NaN, NaN, NaN});
  CHECK_THROWS_AS(repair_gaps(ds), DataError);
}

TEST_CASE("chronological_split: boundaries and ordering") {
  std::vector<double> target(100);
  std::iota(target.begin(), target.end(), 0.0);
  const auto ds = toy_dataset(target);
  const auto splits = chronological_split(ds);
  CHECK(splits.train.length() == 70);
  CHECK(splits.val.length() == 10);
  CHECK(splits.test.length() == 20);
  CHECK(splits.train.target.front() == 0.0);
  CHECK(splits.val.target.front() == 70.0);
  CHECK(splits.test.target.front() == 80.0);
  CHECK(splits.train.timestamps.back() < splits.val.timestamps.front());
  CHECK(splits.val.timestamps.back() < splits.test.timestamps.front());
  CHECK_THROWS_AS(chronological_split(ds, {}, 11), DataError);
  CHECK_THROWS_AS(chronological_split(ds, {0.5, 0.1, 0.1}), DataError);
}

TEST_CASE("window_starts: count equals len - T - H + 1 and never leaves the split") {
  std::vector<double> target(200);
  std::iota(target.begin(), target.end(), 0.0);
  const auto ds = toy_dataset(target);
  const std::size_t T = 24, H = 8;
  CHECK(window_starts(ds, T, H).size() == 200 - T - H + 1);

  const std::size_t Ts = 12, Hs = 4;
  const auto splits = chronological_split(ds, {}, Ts + Hs);
  for (const auto* part : {&splits.train, &splits.val, &splits.test}) {
    const auto starts = window_starts(*part, Ts, Hs);
    CHECK(starts.size() == part->length() - Ts - Hs + 1);
    for (auto s : starts) CHECK(s + Ts + Hs <= part->length());
    // Every future value of every window lies inside this split.
    const auto b = make_batch(*part, starts, Ts, Hs, ExoScaler::identity(1));
    for (std::size_t i = 0; i < b.size; ++i) {
      for (std::size_t h = 0; h < Hs; ++h) {
        CHECK(b.y_mw[i * Hs + h] >= part->target.front());
        CHECK(b.y_mw[i * Hs + h] <= part->target.back());
      }
    }
  }
}

TEST_CASE("window_starts: windows do not straddle dropped rows") {
  std::vector<double> target(60, 1.0);
  for (int i = 20; i < 20 + 40 && i < 60; ++i) target[static_cast<std::size_t>(i)] = NaN;
  target.resize(100, 2.0);
  auto ds = toy_dataset(target);
  repair_gaps(ds);  // 40-step gap: 8 + 8 filled, 24 dropped
  const std::size_t T = 10, H = 4;
  const auto starts = window_starts(ds, T, H);
  // Runs are rows [0, 28) and [28, 76) after compaction.
  CHECK(ds.length() == 76);
  CHECK(starts.size() == (28 - T - H + 1) + (48 - T - H + 1));
  for (auto s : starts) CHECK((s + T + H <= 28 || s >= 28));
}

TEST_CASE("instance normalization") {
  SUBCASE("constant window") {
    const std::vector<double> w(8, 5.0);
    const auto st = window_stats(w);
    CHECK(st.mean == 5.0);
    CHECK(st.std == kStdFloor);
    CHECK(st.floored);
    for (double v : normalize_window(w, st)) CHECK(v == 0.0);
  }
  SUBCASE("hand-computed window") {
    const std::vector<double> w{0, 1, 2, 3};
    const auto st = window_stats(w);
    CHECK(st.mean == 1.5);
    CHECK(st.std == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
    const auto z = normalize_window(w, st);
    const double s = std::sqrt(1.25);
    CHECK(z[0] == doctest::Approx(-1.5 / s));
    CHECK(z[1] == doctest::Approx(-0.5 / s));
    CHECK(z[0] == doctest::Approx(-1.342).epsilon(1e-3));
    CHECK(z[3] == doctest::Approx(1.342).epsilon(1e-3));
  }
  SUBCASE("round trip") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> dist(40.0, 12.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> w(96);
      for (auto& v : w) v = dist(rng);
      const auto st = window_stats(w);
      const auto back = denormalize_forecast(normalize_window(w, st), st);
      for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(back[i] - w[i]) < 1e-10);
      const auto z = normalize_window(w, st);
      const auto zs = window_stats(z);
      CHECK(std::abs(zs.mean) < 1e-12);
      CHECK(zs.std == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("make_batch: layout and statistics come from the input window only") {
  std::vector<double> target(40);
  for (std::size_t i = 0; i < 40; ++i) target[i] = static_cast<double>(i % 7) + 0.5 * static_cast<double>(i);
  auto ds = toy_dataset(target, 3);
  const auto scaler = ExoScaler::fit(ds);
  const std::vector<std::size_t> starts{0, 5, 17};
  const std::size_t T = 12, H = 4;
  const auto b = make_batch(ds, starts, T, H, scaler);
  CHECK(b.x_target.size() == 3 * T);
  CHECK(b.x_exogenous.size() == 3 * T * 3);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const auto st = window_stats(std::span<const double>(target.data() + starts[i], T));
    CHECK(b.stats[i].mean == st.mean);
    CHECK(b.stats[i].std == st.std);
    CHECK(b.last_mw[i] == target[starts[i] + T - 1]);
    for (std::size_t h = 0; h < H; ++h) {
      CHECK(b.y_mw[i * H + h] == target[starts[i] + T + h]);
      CHECK(b.y[i * H + h] == doctest::Approx((target[starts[i] + T + h] - st.mean) / st.std));
    }
    const double raw = ds.exogenous[2][starts[i] + 3];
    CHECK(b.x_exogenous[(i * T + 3) * 3 + 2] == doctest::Approx((raw - scaler.mean[2]) / scaler.std[2]));
  }
  const auto pw = make_batch(ds, starts, T, H, scaler, ExoNormalization::PerWindow);
  double m = 0.0;
  for (std::size_t t = 0; t < T; ++t) m += pw.x_exogenous[(1 * T + t) * 3 + 1];
  CHECK(std::abs(m) < 1e-9);
}

TEST_CASE("schema default grouping follows the wind-speed / atmospheric split") {
  SUBCASE("11-variable layout") {
    const std::vector<std::string> names{"ws_10m", "ws_30m", "ws_50m", "ws_hub", "wd_10m", "wd_30m",
                                         "wd_50m", "wd_hub", "temperature", "pressure", "humidity"};
    const auto g = default_groups(names);
    REQUIRE(g.size() == 2);
    CHECK(g[0].members.size() == 4);
    CHECK(g[1].members.size() == 7);
  }
  SUBCASE("13-variable layout") {
    const std::vector<std::string> names{"Wind Speed 10m", "Wind Speed 30m", "Wind Speed 50m", "Wind Speed 70m",
                                         "Wind Speed hub", "Wind Direction 10m", "Wind Direction 30m",
                                         "Wind Direction 50m", "Wind Direction 70m", "Wind Direction hub",
                                         "Air Temperature", "Atmosphere Pressure", "Relative Humidity"};
    const auto g = default_groups(names);
    REQUIRE(g.size() == 2);
    CHECK(g[0].members.size() == 5);
    CHECK(g[1].members.size() == 8);
  }
}

TEST_CASE("load_csv: parsing, gap rows and validation errors") {
  ecto::testing::TempDir dir;
  const auto schema = Schema::from_json(nlohmann::json::parse(R"({
    "timestamp": "time", "target": "power", "resolution_minutes": 15, "rated_capacity": 50,
    "exogenous": ["ws_hub", {"column": "temp", "group": "atm"}, {"column": "pres", "group": "atm"}]
  })"));
  CHECK(schema.exogenous.size() == 3);

  SUBCASE("labels must be all-or-nothing") {
    const auto path = write_text(dir / "a.csv", "time,ws_hub,temp,pres,power\n2022-01-01 00:00,1,2,3,4\n");
    CHECK_THROWS_AS(load_csv(path, schema), DataError);
  }

  auto full = schema;
  full.exogenous[0].group = "wind";
  SUBCASE("skipped grid points and missing cells") {
    const auto path = write_text(dir / "b.csv",
                                 "time,power,ws_hub,temp,pres\n"
                                 "2022-01-01 00:00,4,1,2,3\n"
                                 "2022-01-01T00:15:00,,1,2,3\n"
                                 "2022-01-01 01:00,6,NaN,2,3\n");
    const auto ds = load_csv(path, full);
    REQUIRE(ds.length() == 5);
    CHECK(std::isnan(ds.target[1]));
    CHECK(std::isnan(ds.target[2]));
    CHECK(std::isnan(ds.exogenous[0][3]));
    CHECK(std::isnan(ds.exogenous[0][4]));
    CHECK(ds.target[4] == 6.0);
    CHECK(ds.rated_capacity == 50.0);
    CHECK(ds.groups.size() == 2);
  }
  SUBCASE("duplicate timestamp names the row") {
    const auto path = write_text(dir / "c.csv",
                                 "time,power,ws_hub,temp,pres\n"
                                 "2022-01-01 00:00,4,1,2,3\n"
                                 "2022-01-01 00:15,4,1,2,3\n"
                                 "2022-01-01 00:15,4,1,2,3\n");
    try {
      load_csv(path, full);
      FAIL("expected a DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("row 4") != std::string::npos);
    }
  }
  SUBCASE("missing declared column") {
    const auto path = write_text(dir / "d.csv", "time,power,ws_hub,temp\n2022-01-01 00:00,4,1,2\n");
    CHECK_THROWS_WITH_AS(load_csv(path, full), doctest::Contains("pres"), DataError);
  }
  SUBCASE("off-grid timestamp") {
    const auto path = write_text(dir / "e.csv",
                                 "time,power,ws_hub,temp,pres\n"
                                 "2022-01-01 00:00,4,1,2,3\n"
                                 "2022-01-01 00:20,4,1,2,3\n");
    CHECK_THROWS_AS(load_csv(path, full), DataError);
  }
  SUBCASE("backwards timestamps") {
    const auto path = write_text(dir / "f.csv",
                                 "time,power,ws_hub,temp,pres\n"
                                 "2022-01-01 00:15,4,1,2,3\n"
                                 "2022-01-01 00:00,4,1,2,3\n");
    CHECK_THROWS_AS(load_csv(path, full), DataError);
  }
}

TEST_CASE("canonical CSV round trip is exact") {
  auto cfg = default_synthetic_config();
  cfg.length = 500;
  const auto ds = synthesize(cfg);
  ecto::testing::TempDir dir;
  write_csv(ds, dir / "syn.csv");
  schema_of(ds).save(dir / "syn.schema.json");
  const auto back = load_csv(dir / "syn.csv", Schema::load(dir / "syn.schema.json"));
  CHECK(back.target == ds.target);
  CHECK(back.exogenous == ds.exogenous);
  CHECK(back.timestamps == ds.timestamps);
  CHECK(back.groups.size() == ds.groups.size());
  CHECK(fingerprint(back) == fingerprint(ds));
}

TEST_CASE("synthesize: structural properties") {
  auto cfg = default_synthetic_config();
  cfg.length = 2000;

  SUBCASE("schema: timestamp + D exogenous + power") {
    const auto ds = synthesize(cfg);
    CHECK(ds.num_exogenous() == 8);
    const auto header = to_csv(ds).substr(0, to_csv(ds).find('\n'));
    CHECK(std::count(header.begin(), header.end(), ',') + 1 == 1 + 8 + 1);
    CHECK(ds.groups.size() == 2);
    CHECK(ds.groups[0].members == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("zero shear makes all heights identical") {
    cfg.shear_exponent = 0.0;
    const auto ds = synthesize(cfg);
    CHECK(ds.exogenous[0] == ds.exogenous[1]);
  }
  SUBCASE("doubling rated capacity doubles power exactly") {
    const auto a = synthesize(cfg);
    cfg.rated_capacity *= 2.0;
    const auto b = synthesize(cfg);
    for (std::size_t t = 0; t < a.length(); ++t) CHECK(b.target[t] == 2.0 * a.target[t]);
    CHECK(b.exogenous == a.exogenous);
  }
  SUBCASE("same seed gives identical bytes, another seed differs") {
    CHECK(to_csv(synthesize(cfg)) == to_csv(synthesize(cfg)));
    auto other = cfg;
    other.seed += 1;
    CHECK(to_csv(synthesize(other)) != to_csv(synthesize(cfg)));
  }
  SUBCASE("power stays within [0, rated] and both regimes occur") {
    const auto s = synthesize_with_truth(cfg);
    for (double p : s.dataset.target) {
      CHECK(p >= 0.0);
      CHECK(p <= cfg.rated_capacity);
    }
    const auto ones = std::count(s.regime.begin(), s.regime.end(), 1);
    CHECK(ones > 0);
    CHECK(ones < static_cast<long>(s.regime.size()));
  }
  SUBCASE("config JSON round trip") {
    const auto back = synthetic_config_from_json(to_json(cfg));
    CHECK(to_csv(synthesize(back)) == to_csv(synthesize(cfg)));
  }
}

TEST_CASE("synthesize: power tracks informative wind and ignores noise channels") {
  auto cfg = default_synthetic_config();
  cfg.length = 10000;
  const auto s = synthesize_with_truth(cfg);
  std::vector<double> cube(cfg.length);
  for (std::size_t t = 0; t < cfg.length; ++t) cube[t] = std::pow(s.effective_wind[t], 3.0);
  const double informative = correlation(s.dataset.target, cube);
  MESSAGE("corr(power, informative wind^3) = " << informative);
  CHECK(informative > 0.9);
  for (std::size_t d : {6u, 7u}) {
    const double noise = correlation(s.dataset.target, s.dataset.exogenous[d]);
    CHECK(std::abs(noise) < 0.1);
  }
}
