#include <doctest.h>

#include <cmath>
#include <sstream>

#include "edgeview/config_io.hpp"
#include "edgeview/error.hpp"
#include "edgeview/harness.hpp"

using namespace edgeview;
using namespace edgeview::harness;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.base = config_io::preset("fig3-3bs");
  spec.base.N = 300;
  spec.methods = {Method::Gcca3, Method::Cca2, Method::Mmse, Method::MmseSicRacmaPerfect};
  spec.trials = 6;
  spec.master_seed = 17;
  return spec;
}

std::string csv_of(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("trial seeds are distinct and stable") {
  CHECK(trial_seed(1, 0) == trial_seed(1, 0));
  CHECK(trial_seed(1, 0) != trial_seed(1, 1));
  CHECK(trial_seed(1, 0) != trial_seed(2, 0));
}

TEST_CASE("a trial is a pure function of config and seed") {
  const auto c = config_io::preset("fig3-3bs");
  const auto a = simulate_trial(c, 5, 3);
  const auto b = simulate_trial(c, 5, 3);
  CHECK(a.frames.X == b.frames.X);
  for (std::size_t l = 0; l < 3; ++l) {
    CHECK(a.views.views[l] == b.views.views[l]);
    CHECK(a.pilot_rx[l] == b.pilot_rx[l]);
  }
  CHECK(a.sigma2 == b.sigma2);
  const auto r1 = run_methods(a, c, {Method::Gcca3, Method::Zf});
  const auto r2 = run_methods(b, c, {Method::Gcca3, Method::Zf});
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].ber == r2[i].ber);
}

TEST_CASE("moving one edge user leaves the other draws untouched") {
  auto c = config_io::preset("fig3-3bs");
  c.edge_positions = {{-50.0, 10.0}};
  const auto a = simulate_trial(c, 5, 0);
  c.edge_positions = {{60.0, -20.0}};
  const auto b = simulate_trial(c, 5, 0);
  CHECK(a.frames.X == b.frames.X);
  for (std::size_t u = 1; u < a.channels.users.size(); ++u) {
    CHECK(a.channels.users[u].position.x == b.channels.users[u].position.x);
  }
}

TEST_CASE("parallel Monte Carlo equals the serial reference") {
  auto spec = small_spec();
  spec.workers = 4;
  const auto par = run_monte_carlo(spec);
  const auto ser = run_monte_carlo_serial(spec);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].method == ser[i].method);
    CHECK(par[i].per_trial == ser[i].per_trial);
    CHECK(par[i].ber_mean == ser[i].ber_mean);
  }
  CHECK(csv_of(par) == csv_of(ser));
}

TEST_CASE("row statistics") {
  const auto rows = run_monte_carlo_serial(small_spec());
  for (const auto& r : rows) {
    REQUIRE(r.per_trial.size() == 6);
    double mean = 0.0;
    for (double v : r.per_trial) mean += v;
    mean /= 6.0;
    double var = 0.0;
    for (double v : r.per_trial) var += (v - mean) * (v - mean);
    var /= 5.0;
    CHECK(r.ber_mean == doctest::Approx(mean));
    CHECK(r.ber_stderr == doctest::Approx(std::sqrt(var / 6.0)));
    CHECK_FALSE(r.runtime_ms_mean.has_value());
    CHECK(r.ber_mean >= 0.0);
    CHECK(r.ber_mean <= 1.0);
  }
}

TEST_CASE("CSV round trip") {
  auto spec = small_spec();
  spec.trials = 2;
  spec.options.timing = true;
  const auto rows = run_monte_carlo_serial(spec);
  const std::string text = csv_of(rows);
  CHECK(text.rfind(std::string(kCsvHeader), 0) == 0);
  std::istringstream is(text);
  const auto back = read_csv(is);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].method == rows[i].method);
    CHECK(back[i].trials == rows[i].trials);
    CHECK(back[i].runtime_ms_mean.has_value());
  }
  CHECK(csv_of(back) == text);
  std::istringstream bad("nope\n");
  CHECK_THROWS_AS(read_csv(bad), Error);
}

TEST_CASE("SVG rendering") {
  auto spec = small_spec();
  spec.trials = 2;
  spec.sweep = SweepParam::TargetSnr;
  spec.values = {1.0, 3.0};
  const auto svg = render_svg(run_monte_carlo_serial(spec), "demo");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("gcca3") != std::string::npos);
}

TEST_CASE("sweeps rewrite the swept field") {
  auto c = config_io::preset("fig3-3bs");
  CHECK(apply_sweep(c, SweepParam::ScatterFraction, 0.7).scatter_fraction == 0.7);
  CHECK(apply_sweep(c, SweepParam::TargetSnr, 5.0).target_snr_dB == 5.0);
  const auto k = apply_sweep(c, SweepParam::KPerCell, 12.0);
  CHECK(k.K == std::vector<int>{12, 12, 12});
  CHECK(parse_sweep(sweep_name(SweepParam::EdgeUserX)) == SweepParam::EdgeUserX);
  CHECK_THROWS_AS(parse_sweep("bogus"), Error);
  for (auto m : all_methods()) CHECK(parse_method(method_name(m)) == m);
  for (const char* p : {"fig4", "fig5", "fig6", "fig7", "fig8"}) CHECK_NOTHROW(sweep_preset(p));
  CHECK_THROWS_AS(sweep_preset("fig9"), Error);
}

TEST_CASE("TOML round trip and hashing") {
  for (const auto& name : config_io::preset_names()) {
    const auto c = config_io::preset(name);
    const auto back = config_io::parse_config(config_io::to_toml(c));
    CHECK(config_io::to_toml(back) == config_io::to_toml(c));
    CHECK(config_hash(back) == config_hash(c));
  }
  auto c = config_io::preset("fig3-3bs");
  const auto h = config_hash(c);
  c.seed = 2;
  CHECK(config_hash(c) != h);
  CHECK_THROWS_AS(config_io::parse_config("unknown_key = 3\n"), Error);
  CHECK_THROWS_AS(config_io::parse_config("scatter_fraction = 1.5\n"), Error);
  const auto parsed = config_io::parse_config("layout = \"triple\"\nM = [16, 16, 16]\nscatter_fraction = 0.7\n");
  CHECK(parsed.M == std::vector<int>{16, 16, 16});
  CHECK(parsed.scatter_fraction == 0.7);
}

TEST_CASE("failing methods are scored and reported") {
  auto c = config_io::preset("fig3-3bs");
  c.M = {4, 4, 4};  // too few antennas for zero-forcing at the serving BS
  const auto trial = simulate_trial(c, 1, 0);
  const auto reps = run_methods(trial, c, {Method::Zf});
  REQUIRE(reps.size() == 1);
  CHECK_FALSE(reps[0].ok());
  CHECK(reps[0].mean_ber() == 0.5);
}

}  // TEST_SUITE
