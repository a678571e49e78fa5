#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgeview/airlink.hpp"
#include "edgeview/detectors.hpp"
#include "edgeview/scenario.hpp"

namespace edgeview::harness {

enum class Method {
  Gcca3,
  GccaAll,
  Cca2,
  Zf,
  Mmse,
  ZfSicRacma,
  MmseSicRacma,
  ZfSicRacmaPerfect,
  MmseSicRacmaPerfect,
};

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
std::vector<Method> all_methods();

// Which BSs feed the residual stage of the SIC + RACMA baselines.
enum class SicViews { Cooperative, Best };

enum class SweepParam { None, EdgeUserX, TargetSnr, ScatterFraction, KPerCell };
std::string_view sweep_name(SweepParam p);
SweepParam parse_sweep(std::string_view name);

struct RunOptions {
  SicViews sic_views = SicViews::Cooperative;
  bool estimate_kc = false;
  bool timing = false;
};

struct ExperimentSpec {
  scenario::ScenarioConfig base;
  SweepParam sweep = SweepParam::None;
  std::vector<double> values;
  std::vector<Method> methods = all_methods();
  int trials = 100;
  std::uint64_t master_seed = 1;
  RunOptions options;
  int workers = 0;  // 0: EDGEVIEW_WORKERS or the OpenMP default
};

struct ResultRow {
  std::string sweep_param;
  double sweep_value = 0.0;
  std::string method;
  double ber_mean = 0.0;
  double ber_stderr = 0.0;
  int trials = 0;
  std::optional<double> runtime_ms_mean;
  std::vector<double> per_trial;  // mean edge-user BER of each trial, in trial order
  int failures = 0;
};

// Everything one trial draws, before any detector runs.
struct TrialData {
  std::uint64_t seed = 0;
  scenario::ChannelSet channels;
  airlink::FrameSet frames;
  airlink::ViewSet views;
  Matrix pilots;                 // pilot_len x K_s
  std::vector<CMatrix> pilot_rx;  // per BS, M_l x pilot_len
  double sigma2 = 0.0;
};

std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index);

// Noise power for the trial: pinned to config.noise_reference_position when
// set, otherwise calibrated against the placed edge users.
double noise_power(const scenario::ScenarioConfig& config, const scenario::ChannelSet& channels);

TrialData simulate_trial(const scenario::ScenarioConfig& config, std::uint64_t master_seed, int trial_index);

std::vector<detectors::DetectionReport> run_methods(const TrialData& trial, const scenario::ScenarioConfig& config,
                                                    const std::vector<Method>& methods,
                                                    const RunOptions& options = {});

std::vector<detectors::DetectionReport> run_trial(const scenario::ScenarioConfig& config,
                                                  const std::vector<Method>& methods, std::uint64_t master_seed,
                                                  int trial_index, const RunOptions& options = {});

scenario::ScenarioConfig apply_sweep(scenario::ScenarioConfig config, SweepParam param, double value);

// Trials run on up to `workers` OpenMP threads; aggregation folds in trial
// order so the rows do not depend on the worker count.
std::vector<ResultRow> run_monte_carlo(const ExperimentSpec& spec);

// Reference path for tests: same rows from a plain loop.
std::vector<ResultRow> run_monte_carlo_serial(const ExperimentSpec& spec);

// Presets fig4..fig8 and the experiments behind them.
ExperimentSpec sweep_preset(std::string_view name);
std::vector<ResultRow> sweep_location(ExperimentSpec spec);
std::vector<ResultRow> sweep_snr(ExperimentSpec spec);
std::vector<ResultRow> sweep_density(ExperimentSpec spec);

// Per-trial average correlation profile over all extractable components of
// the gcca3 view selection: trials x min(2 M_l).
Matrix correlation_profile(const ExperimentSpec& spec);

inline constexpr std::string_view kCsvHeader =
    "sweep_param,sweep_value,method,ber_mean,ber_stderr,trials,runtime_ms_mean";
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& is);

// Static SVG of ber_mean against sweep_value, one line per method, log BER axis.
std::string render_svg(const std::vector<ResultRow>& rows, std::string_view title = "");

std::uint64_t config_hash(const scenario::ScenarioConfig& config);

}  // namespace edgeview::harness
