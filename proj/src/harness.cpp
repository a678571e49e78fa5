#include "edgeview/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <omp.h>
#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "edgeview/config_io.hpp"
#include "edgeview/error.hpp"
#include "edgeview/gcca.hpp"
#include "edgeview/kernels.hpp"
#include "edgeview/racma.hpp"

namespace edgeview::harness {

namespace {

using detectors::DetectionReport;
using scenario::ScenarioConfig;

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::Gcca3, "gcca3"},
    {Method::GccaAll, "gcca_all"},
    {Method::Cca2, "cca2"},
    {Method::Zf, "zf"},
    {Method::Mmse, "mmse"},
    {Method::ZfSicRacma, "zf_sic_racma"},
    {Method::MmseSicRacma, "mmse_sic_racma"},
    {Method::ZfSicRacmaPerfect, "zf_sic_racma_perfect"},
    {Method::MmseSicRacmaPerfect, "mmse_sic_racma_perfect"},
};

constexpr std::pair<SweepParam, std::string_view> kSweepNames[] = {
    {SweepParam::None, "none"},
    {SweepParam::EdgeUserX, "edge_user_x"},
    {SweepParam::TargetSnr, "target_snr_dB"},
    {SweepParam::ScatterFraction, "scatter_fraction"},
    {SweepParam::KPerCell, "K_per_cell"},
};

CMatrix select_users(const CMatrix& h, const std::vector<int>& users) {
  CMatrix out(h.rows(), static_cast<Index>(users.size()));
  for (std::size_t i = 0; i < users.size(); ++i) out.col(static_cast<Index>(i)) = h.col(users[i]);
  return out;
}

Matrix select_columns(const Matrix& m, const std::vector<int>& cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Index>(i)) = m.col(cols[i]);
  return out;
}

std::vector<int> leading(std::vector<int> order, std::size_t count) {
  order.resize(std::min(order.size(), count));
  return order;
}

struct TrialView {
  const TrialData& trial;
  const ScenarioConfig& config;
  const RunOptions& options;
  std::vector<int> edges;
  Matrix edge_preambles;
  std::vector<int> bs_rank;
};

DetectionReport gcca_method(const TrialView& tv, std::size_t views_used) {
  const auto bs = leading(tv.bs_rank, views_used);
  const airlink::ViewSet sub = tv.trial.views.subset(bs);
  Index kc = static_cast<Index>(tv.edges.size());
  Matrix g;
  if (tv.options.estimate_kc) {
    Index full = sub.frame_length();
    for (const auto& v : sub.views) full = std::min(full, v.rows());
    const auto sol = gcca::maxvar(sub, full);
    kc = gcca::estimate_common_dim(sol.rho_avg);
    spdlog::debug("estimated Kc = {} (true {})", kc, tv.edges.size());
    g = sol.G.leftCols(kc);
  } else {
    g = gcca::maxvar(sub, kc).G;
  }
  if (kc == 0) {
    DetectionReport rep;
    rep.users = tv.edges;
    rep.ber = Vector::Constant(static_cast<Index>(tv.edges.size()), 0.5);
    rep.error = "estimated common dimension is zero";
    return rep;
  }
  const auto sep = racma::match_preambles(racma::solve_mixture(g, kc), tv.edge_preambles, tv.edges);
  return detectors::score_separation(sep, tv.trial.frames.X, tv.trial.frames.preamble_len, tv.edges);
}

std::vector<CMatrix> estimated_channels(const TrialView& tv) {
  std::vector<CMatrix> out;
  const double amp = airlink::symbol_amplitude(tv.trial.frames.frame_length());
  for (const auto& y : tv.trial.pilot_rx) {
    out.push_back(detectors::estimate_channels_ls(y, tv.trial.pilots, amp).H_hat);
  }
  return out;
}

// Each edge user is decoded at its serving BS together with that BS's other
// users; inter-cell signals count as noise.
DetectionReport linear_method(const TrialView& tv, detectors::Equalizer eq) {
  const auto h_hat = estimated_channels(tv);
  const auto& frames = tv.trial.frames;
  DetectionReport rep;
  rep.users = tv.edges;
  rep.ber = Vector::Constant(static_cast<Index>(tv.edges.size()), 0.5);
  rep.decisions = Matrix::Zero(frames.payload_rows(), static_cast<Index>(tv.edges.size()));
  const auto& ch = tv.trial.channels;
  for (int b = 0; b < ch.num_bs(); ++b) {
    const auto users = ch.users_of(b);
    const CMatrix h = select_users(h_hat[static_cast<std::size_t>(b)], users);
    const CMatrix& y = tv.trial.views.complex_views[static_cast<std::size_t>(b)];
    Matrix d;
    bool decoded = false;
    for (std::size_t e = 0; e < tv.edges.size(); ++e) {
      const auto it = std::find(users.begin(), users.end(), tv.edges[e]);
      if (it == users.end()) continue;
      if (!decoded) {
        d = eq == detectors::Equalizer::Zf ? detectors::zf_detect(y, h) : detectors::mmse_detect(y, h, tv.trial.sigma2);
        decoded = true;
      }
      const auto col = static_cast<Index>(it - users.begin());
      const auto idx = static_cast<Index>(e);
      rep.decisions.col(idx) = d.col(col).tail(frames.payload_rows());
      rep.ber(idx) = detectors::bit_error_rate(d.col(col), frames.X.col(tv.edges[e]), frames.preamble_len)(0);
    }
  }
  return rep;
}

DetectionReport sic_racma_method(const TrialView& tv, detectors::Equalizer eq, bool perfect) {
  const auto& ch = tv.trial.channels;
  const auto bs = leading(tv.bs_rank, tv.options.sic_views == SicViews::Best ? 1 : 3);
  const auto h_hat = perfect ? ch.H : estimated_channels(tv);
  const double amp = airlink::symbol_amplitude(tv.trial.frames.frame_length());
  std::vector<CMatrix> residuals;
  for (int b : bs) {
    const auto center = ch.center_users_of(b);
    const CMatrix& y = tv.trial.views.complex_views[static_cast<std::size_t>(b)];
    if (center.empty()) {
      residuals.push_back(y);
      continue;
    }
    const CMatrix h = select_users(h_hat[static_cast<std::size_t>(b)], center);
    residuals.push_back(detectors::sic_detect(y, h, tv.trial.sigma2, eq, amp).residual);
  }
  return detectors::residual_racma(residuals, static_cast<Index>(tv.edges.size()), tv.edge_preambles, tv.edges,
                                   tv.trial.frames.X);
}

DetectionReport dispatch(const TrialView& tv, Method m) {
  const auto l = static_cast<std::size_t>(tv.trial.channels.num_bs());
  switch (m) {
    case Method::Gcca3: return gcca_method(tv, 3);
    case Method::GccaAll: return gcca_method(tv, l);
    case Method::Cca2: return gcca_method(tv, 2);
    case Method::Zf: return linear_method(tv, detectors::Equalizer::Zf);
    case Method::Mmse: return linear_method(tv, detectors::Equalizer::Mmse);
    case Method::ZfSicRacma: return sic_racma_method(tv, detectors::Equalizer::Zf, false);
    case Method::MmseSicRacma: return sic_racma_method(tv, detectors::Equalizer::Mmse, false);
    case Method::ZfSicRacmaPerfect: return sic_racma_method(tv, detectors::Equalizer::Zf, true);
    case Method::MmseSicRacmaPerfect: return sic_racma_method(tv, detectors::Equalizer::Mmse, true);
  }
  throw Error(ErrorKind::InvalidInput, "unknown method");
}

std::vector<double> sweep_values(const ExperimentSpec& spec) {
  if (spec.sweep == SweepParam::None) return {0.0};
  if (spec.values.empty()) throw Error(ErrorKind::Configuration, "sweep has no values");
  return spec.values;
}

using TrialReports = std::vector<std::vector<DetectionReport>>;

std::vector<ResultRow> aggregate(const ExperimentSpec& spec, double value, const TrialReports& reports) {
  std::vector<ResultRow> rows;
  for (std::size_t m = 0; m < spec.methods.size(); ++m) {
    ResultRow row;
    row.sweep_param = std::string(sweep_name(spec.sweep));
    row.sweep_value = value;
    row.method = std::string(method_name(spec.methods[m]));
    row.trials = static_cast<int>(reports.size());
    double runtime = 0.0;
    for (const auto& trial : reports) {
      const auto& rep = trial[m];
      row.per_trial.push_back(rep.mean_ber());
      runtime += rep.runtime_ms;
      if (!rep.ok()) ++row.failures;
    }
    const double t = static_cast<double>(row.per_trial.size());
    double sum = 0.0;
    for (double b : row.per_trial) sum += b;
    row.ber_mean = sum / t;
    if (row.per_trial.size() > 1) {
      double ss = 0.0;
      for (double b : row.per_trial) ss += (b - row.ber_mean) * (b - row.ber_mean);
      row.ber_stderr = std::sqrt(ss / (t - 1.0)) / std::sqrt(t);
    }
    if (spec.options.timing) row.runtime_ms_mean = runtime / t;
    rows.push_back(std::move(row));
  }
  return rows;
}

void check_spec(const ExperimentSpec& spec) {
  if (spec.trials < 1) throw Error(ErrorKind::Configuration, "trials must be at least 1");
}

std::vector<ResultRow> monte_carlo(const ExperimentSpec& spec, bool parallel) {
  check_spec(spec);
  Eigen::setNbThreads(1);
  const int workers = spec.workers > 0 ? spec.workers : kernels::default_workers();
  std::vector<ResultRow> rows;
  for (double value : sweep_values(spec)) {
    const ScenarioConfig cfg = apply_sweep(spec.base, spec.sweep, value);
    for (const auto& w : scenario::validate(cfg)) spdlog::warn("{}", w);
    TrialReports reports(static_cast<std::size_t>(spec.trials));
    if (parallel && workers > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(workers)
      for (int t = 0; t < spec.trials; ++t) {
        reports[static_cast<std::size_t>(t)] = run_trial(cfg, spec.methods, spec.master_seed, t, spec.options);
      }
    } else {
      for (int t = 0; t < spec.trials; ++t) {
        reports[static_cast<std::size_t>(t)] = run_trial(cfg, spec.methods, spec.master_seed, t, spec.options);
      }
    }
    auto part = aggregate(spec, value, reports);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

std::string format_value(double v) { return fmt::format("{:.10g}", v); }

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& [k, v] : kMethodNames)
    if (k == m) return v;
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& [k, v] : kMethodNames)
    if (v == name) return k;
  throw Error(ErrorKind::Configuration, "unknown method '" + std::string(name) + "'");
}

std::vector<Method> all_methods() {
  std::vector<Method> out;
  for (const auto& [k, v] : kMethodNames) out.push_back(k);
  return out;
}

std::string_view sweep_name(SweepParam p) {
  for (const auto& [k, v] : kSweepNames)
    if (k == p) return v;
  return "unknown";
}

SweepParam parse_sweep(std::string_view name) {
  for (const auto& [k, v] : kSweepNames)
    if (v == name) return k;
  throw Error(ErrorKind::Configuration, "unknown sweep parameter '" + std::string(name) + "'");
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index) {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(trial_index)});
}

double noise_power(const ScenarioConfig& config, const scenario::ChannelSet& channels) {
  if (config.noise_reference_position) {
    const double snr = config.reference_snr_dB.value_or(config.target_snr_dB);
    return airlink::reference_edge_power(config, *config.noise_reference_position) / std::pow(10.0, snr / 10.0);
  }
  // Edge users already transmit at the reduced power when a reference SNR is
  // set, so calibrating at the target leaves sigma^2 at the reference level.
  return airlink::calibrate_noise(channels, config.target_snr_dB);
}

TrialData simulate_trial(const ScenarioConfig& config, std::uint64_t master_seed, int trial_index) {
  TrialData t;
  t.seed = trial_seed(master_seed, trial_index);
  const Rng rng(t.seed);
  const auto placements = scenario::place_users(config, rng);
  t.channels = scenario::draw_channels(placements, config, rng);
  t.sigma2 = noise_power(config, t.channels);
  scenario::snr_table(t.channels, t.sigma2);
  t.frames = airlink::generate_frames(config, t.channels.num_users(), rng);
  t.views = airlink::synthesize_rx(t.channels, t.frames, t.sigma2, rng);

  t.pilots = detectors::pilot_codebook(config.pilot_len, t.channels.num_users());
  const double amp = airlink::symbol_amplitude(config.N);
  const CMatrix pt = t.pilots.transpose().cast<Complex>() * amp;
  for (int l = 0; l < t.channels.num_bs(); ++l) {
    const CMatrix& h = t.channels.H[static_cast<std::size_t>(l)];
    Rng noise = rng.substream(Stream::PilotNoise, {static_cast<std::uint64_t>(l)});
    t.pilot_rx.push_back(h * pt + airlink::complex_noise(h.rows(), pt.cols(), t.sigma2 / config.N, noise));
  }
  return t;
}

std::vector<DetectionReport> run_methods(const TrialData& trial, const ScenarioConfig& config,
                                         const std::vector<Method>& methods, const RunOptions& options) {
  TrialView tv{trial, config, options, trial.channels.edge_users(), {}, {}};
  tv.edge_preambles = select_columns(trial.frames.preambles, tv.edges);
  tv.bs_rank = scenario::rank_bs_by_gain(trial.channels, tv.edges);
  const std::uint64_t hash = config_hash(config);

  std::vector<DetectionReport> out;
  out.reserve(methods.size());
  for (Method m : methods) {
    const auto start = std::chrono::steady_clock::now();
    DetectionReport rep;
    try {
      rep = dispatch(tv, m);
    } catch (const std::exception& e) {
      rep = DetectionReport{};
      rep.users = tv.edges;
      rep.ber = Vector::Constant(static_cast<Index>(tv.edges.size()), 0.5);
      rep.error = e.what();
    }
    rep.method = std::string(method_name(m));
    rep.seed = trial.seed;
    rep.config_hash = hash;
    rep.sigma2 = trial.sigma2;
    if (options.timing) {
      rep.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<DetectionReport> run_trial(const ScenarioConfig& config, const std::vector<Method>& methods,
                                       std::uint64_t master_seed, int trial_index, const RunOptions& options) {
  if (methods.empty()) return {};
  const TrialData trial = simulate_trial(config, master_seed, trial_index);
  return run_methods(trial, config, methods, options);
}

ScenarioConfig apply_sweep(ScenarioConfig config, SweepParam param, double value) {
  switch (param) {
    case SweepParam::None:
      break;
    case SweepParam::EdgeUserX:
      if (config.edge_positions.empty()) config.edge_positions.push_back({value, 0.0});
      else config.edge_positions.front() = {value, 0.0};
      break;
    case SweepParam::TargetSnr:
      config.target_snr_dB = value;
      break;
    case SweepParam::ScatterFraction:
      config.scatter_fraction = value;
      break;
    case SweepParam::KPerCell: {
      const int k = static_cast<int>(std::lround(value));
      if (k < 1) throw Error(ErrorKind::Configuration, "K_per_cell must be positive");
      std::fill(config.K.begin(), config.K.end(), k);
      break;
    }
  }
  return config;
}

std::vector<ResultRow> run_monte_carlo(const ExperimentSpec& spec) { return monte_carlo(spec, true); }

std::vector<ResultRow> run_monte_carlo_serial(const ExperimentSpec& spec) { return monte_carlo(spec, false); }

ExperimentSpec sweep_preset(std::string_view name) {
  ExperimentSpec spec;
  spec.trials = 100;
  using enum Method;
  if (name == "fig4") {
    spec.base = config_io::preset("fig2-4bs");
    spec.sweep = SweepParam::EdgeUserX;
    const double r = spec.base.cell_radius_m;
    for (int i = 0; i <= 10; ++i) spec.values.push_back(-r + 0.2 * r * i);
    spec.methods = {Gcca3, GccaAll, Cca2, ZfSicRacmaPerfect};
    spec.options.sic_views = SicViews::Best;
    return spec;
  }
  if (name == "fig5" || name == "fig6" || name == "fig7") {
    spec.base = config_io::preset(name == "fig7" ? "dense-k16" : "fig3-3bs");
    spec.base.reference_snr_dB = 5.0;
    spec.sweep = SweepParam::TargetSnr;
    spec.values = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    spec.methods = {Gcca3, Cca2, Zf, Mmse, ZfSicRacma, MmseSicRacma, ZfSicRacmaPerfect, MmseSicRacmaPerfect};
    return spec;
  }
  if (name == "fig8") {
    spec.base = config_io::preset("fig3-3bs");
    spec.methods = {Gcca3};
    return spec;
  }
  throw Error(ErrorKind::Configuration, "unknown sweep preset '" + std::string(name) + "'");
}

std::vector<ResultRow> sweep_location(ExperimentSpec spec) {
  spec.sweep = SweepParam::EdgeUserX;
  if (spec.values.empty()) spec.values = sweep_preset("fig4").values;
  return run_monte_carlo(spec);
}

std::vector<ResultRow> sweep_snr(ExperimentSpec spec) {
  spec.sweep = SweepParam::TargetSnr;
  if (spec.values.empty()) spec.values = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  return run_monte_carlo(spec);
}

std::vector<ResultRow> sweep_density(ExperimentSpec spec) {
  spec.sweep = SweepParam::KPerCell;
  if (spec.values.empty()) spec.values = {4.0, 8.0, 12.0, 16.0};
  return run_monte_carlo(spec);
}

Matrix correlation_profile(const ExperimentSpec& spec) {
  check_spec(spec);
  Eigen::setNbThreads(1);
  const int workers = spec.workers > 0 ? spec.workers : kernels::default_workers();
  Index comps = spec.base.N;
  for (int m : spec.base.M) comps = std::min<Index>(comps, 2 * m);
  Matrix out = Matrix::Constant(spec.trials, comps, std::nan(""));
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (int t = 0; t < spec.trials; ++t) {
    try {
      const TrialData trial = simulate_trial(spec.base, spec.master_seed, t);
      const auto edges = trial.channels.edge_users();
      const auto bs = leading(scenario::rank_bs_by_gain(trial.channels, edges), 3);
      const auto sub = trial.views.subset(bs);
      Index kc = sub.frame_length();
      for (const auto& v : sub.views) kc = std::min(kc, v.rows());
      const auto sol = gcca::maxvar(sub, std::min(kc, comps));
      out.row(t).head(sol.rho_avg.size()) = sol.rho_avg.transpose();
    } catch (const std::exception& e) {
      spdlog::warn("trial {}: {}", t, e.what());
    }
  }
  return out;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.sweep_param << ',' << format_value(r.sweep_value) << ',' << r.method << ','
       << fmt::format("{:.6e}", r.ber_mean) << ',' << fmt::format("{:.6e}", r.ber_stderr) << ',' << r.trials << ','
       << (r.runtime_ms_mean ? fmt::format("{:.3f}", *r.runtime_ms_mean) : std::string("NA")) << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw Error(ErrorKind::Io, "unexpected CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw Error(ErrorKind::Io, "malformed CSV row: " + line);
    ResultRow r;
    try {
      r.sweep_param = f[0];
      r.sweep_value = std::stod(f[1]);
      r.method = f[2];
      r.ber_mean = std::stod(f[3]);
      r.ber_stderr = std::stod(f[4]);
      r.trials = std::stoi(f[5]);
      if (f[6] != "NA") r.runtime_ms_mean = std::stod(f[6]);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Io, "malformed CSV row: " + line);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string render_svg(const std::vector<ResultRow>& rows, std::string_view title) {
  constexpr double kWidth = 720, kHeight = 480, kLeft = 80, kRight = 190, kTop = 40, kBottom = 60;
  constexpr std::string_view kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                          "#8c564b", "#e377c2", "#7f7f7f", "#17becf"};
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::vector<std::string> order;
  double xmin = 1e300, xmax = -1e300, ymin_pos = 1.0;
  for (const auto& r : rows) {
    if (!series.contains(r.method)) order.push_back(r.method);
    series[r.method].emplace_back(r.sweep_value, r.ber_mean);
    xmin = std::min(xmin, r.sweep_value);
    xmax = std::max(xmax, r.sweep_value);
    if (r.ber_mean > 0.0) ymin_pos = std::min(ymin_pos, r.ber_mean);
  }
  if (rows.empty()) xmin = 0.0, xmax = 1.0;
  if (xmax == xmin) xmax = xmin + 1.0;
  const int dec_lo = static_cast<int>(std::floor(std::log10(ymin_pos))) - (ymin_pos == 1.0 ? 1 : 0);
  const double floor_ber = std::pow(10.0, dec_lo);
  const double ylo = std::log10(floor_ber), yhi = 0.0;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double b) {
    const double lb = std::log10(std::max(b, floor_ber));
    return kTop + (yhi - lb) / (yhi - ylo) * ph;
  };

  std::ostringstream os;
  os << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)",
                    kWidth, kHeight)
     << '\n';
  os << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
  if (!title.empty()) os << fmt::format(R"(<text x="{}" y="22" font-size="14">{}</text>)", kLeft, title) << '\n';
  for (int d = dec_lo; d <= 0; ++d) {
    const double y = py(std::pow(10.0, d));
    os << fmt::format(R"(<line x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="#ddd"/>)", kLeft, y,
                      kLeft + pw, y)
       << '\n';
    os << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" text-anchor="end">1e{}</text>)", kLeft - 6, y + 4, d) << '\n';
  }
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    os << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" text-anchor="middle">{:.4g}</text>)", px(xv),
                      kTop + ph + 18, xv)
       << '\n';
  }
  os << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)", kLeft, kTop, pw, ph)
     << '\n';
  const std::string xlabel = rows.empty() ? "" : rows.front().sweep_param;
  os << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" text-anchor="middle">{}</text>)", kLeft + pw / 2, kHeight - 15,
                    xlabel)
     << '\n';
  os << fmt::format(R"svg(<text x="18" y="{:.1f}" transform="rotate(-90 18 {:.1f})" text-anchor="middle">BER</text>)svg",
                    kTop + ph / 2, kTop + ph / 2)
     << '\n';
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto pts = series[order[i]];
    std::sort(pts.begin(), pts.end());
    const auto color = kColors[i % std::size(kColors)];
    std::string path;
    for (const auto& [x, b] : pts) path += fmt::format("{:.1f},{:.1f} ", px(x), py(b));
    os << fmt::format(R"(<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>)", path, color) << '\n';
    for (const auto& [x, b] : pts) {
      os << fmt::format(R"(<circle cx="{:.1f}" cy="{:.1f}" r="3" fill="{}"/>)", px(x), py(b), color) << '\n';
    }
    const double ly = kTop + 14 + 18 * static_cast<double>(i);
    os << fmt::format(R"(<line x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="{}" stroke-width="2"/>)",
                      kLeft + pw + 12, ly, kLeft + pw + 36, ly, color)
       << '\n';
    os << fmt::format(R"(<text x="{:.1f}" y="{:.1f}">{}</text>)", kLeft + pw + 42, ly + 4, order[i]) << '\n';
  }
  os << "</svg>\n";
  return os.str();
}

std::uint64_t config_hash(const ScenarioConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config_io::to_toml(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace edgeview::harness
