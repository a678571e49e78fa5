#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "edgeview/airlink.hpp"
#include "edgeview/config_io.hpp"
#include "edgeview/error.hpp"
#include "edgeview/gcca.hpp"
#include "edgeview/harness.hpp"
#include "edgeview/racma.hpp"

namespace fs = std::filesystem;
using namespace edgeview;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return os;
}

void write_results(const fs::path& csv, const std::vector<harness::ResultRow>& rows, std::string_view title) {
  {
    auto os = open_out(csv);
    harness::write_csv(os, rows);
  }
  fs::path svg = csv;
  svg.replace_extension(".svg");
  auto os = open_out(svg);
  os << harness::render_svg(rows, title);
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        r.push_back(std::stod(cell));
      } catch (const std::logic_error&) {
        throw Error(ErrorKind::Io, "non-numeric entry '" + cell + "' in " + path.string());
      }
    }
    if (!rows.empty() && r.size() != rows.front().size()) throw Error(ErrorKind::Io, "ragged matrix CSV");
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw Error(ErrorKind::Io, path.string() + " holds no rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

Index max_components(const airlink::ViewSet& views) {
  Index k = views.frame_length();
  for (const auto& v : views.views) k = std::min(k, v.rows());
  return k;
}

struct RunArgs {
  std::string config;
  std::string preset = "fig3-3bs";
  int trials = 100;
  std::uint64_t seed = 1;
  std::string out;
  std::string dump;
  bool timing = false;
  bool estimate_kc = false;
  std::vector<std::string> methods;
  std::string sic_views = "cooperative";
  std::string sweep = "none";
  std::vector<double> values;
  int workers = 0;
};

int cmd_run(const RunArgs& a) {
  harness::ExperimentSpec spec;
  spec.base = a.config.empty() ? config_io::preset(a.preset) : config_io::load_config(a.config);
  spec.trials = a.trials;
  spec.master_seed = a.seed;
  spec.options.timing = a.timing;
  spec.options.estimate_kc = a.estimate_kc;
  spec.options.sic_views = a.sic_views == "best" ? harness::SicViews::Best : harness::SicViews::Cooperative;
  spec.workers = a.workers;
  spec.sweep = harness::parse_sweep(a.sweep);
  spec.values = a.values;
  if (!a.methods.empty()) {
    spec.methods.clear();
    for (const auto& m : a.methods) spec.methods.push_back(harness::parse_method(m));
  }
  if (!a.dump.empty()) {
    const auto cfg = harness::apply_sweep(spec.base, spec.sweep, spec.values.empty() ? 0.0 : spec.values.front());
    const auto trial = harness::simulate_trial(cfg, spec.master_seed, 0);
    airlink::write_dump(a.dump, trial.views, &trial.frames);
  }
  const auto rows = harness::run_monte_carlo(spec);
  auto os = open_out(a.out);
  harness::write_csv(os, rows);
  return 0;
}

int cmd_sweep(const std::string& preset, const fs::path& dir, int trials, std::uint64_t seed, bool timing) {
  auto spec = harness::sweep_preset(preset);
  if (trials > 0) spec.trials = trials;
  spec.master_seed = seed;
  spec.options.timing = timing;
  fs::create_directories(dir);
  if (preset == "fig4") {
    write_results(dir / "fig4.csv", harness::sweep_location(spec), "BER vs edge-user location");
  } else if (preset == "fig5") {
    write_results(dir / "fig5.csv", harness::sweep_snr(spec), "BER vs edge-user SNR");
  } else if (preset == "fig6") {
    for (double d : {0.4, 0.7}) {
      auto s = spec;
      s.base.scatter_fraction = d;
      s.methods = {harness::Method::Gcca3, harness::Method::Cca2, harness::Method::MmseSicRacma};
      write_results(dir / fmt::format("fig6_d{:.1f}.csv", d), harness::sweep_snr(s),
                    fmt::format("BER vs SNR, centre users within {:.1f} R", d));
    }
  } else if (preset == "fig7") {
    write_results(dir / "fig7_k16.csv", harness::sweep_snr(spec), "BER vs SNR, K = 16, M = 30");
    auto base = harness::sweep_preset("fig5");
    base.trials = spec.trials;
    base.master_seed = seed;
    base.options.timing = timing;
    write_results(dir / "fig7_k8.csv", harness::sweep_snr(base), "BER vs SNR, K = 8, M = 12");
  } else if (preset == "fig8") {
    auto os = open_out(dir / "fig8.csv");
    os << "scatter_fraction,component_index,rho_avg_mean,rho_avg_stderr\n";
    for (double d : {0.4, 0.7}) {
      auto s = spec;
      s.base.scatter_fraction = d;
      const Matrix prof = harness::correlation_profile(s);
      for (Index c = 0; c < prof.cols(); ++c) {
        double sum = 0.0, ss = 0.0;
        int n = 0;
        for (Index t = 0; t < prof.rows(); ++t) {
          if (std::isnan(prof(t, c))) continue;
          sum += prof(t, c);
          ++n;
        }
        const double mean = n > 0 ? sum / n : 0.0;
        for (Index t = 0; t < prof.rows(); ++t)
          if (!std::isnan(prof(t, c))) ss += (prof(t, c) - mean) * (prof(t, c) - mean);
        const double se = n > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(n) : 0.0;
        os << fmt::format("{:.1f},{},{:.6f},{:.6f}\n", d, c + 1, mean, se);
      }
    }
  } else {
    throw Error(ErrorKind::Configuration, "unknown sweep preset '" + preset + "'");
  }
  return 0;
}

int cmd_gcca(const fs::path& views_path, int kc_arg, const std::string& out) {
  const auto dump = airlink::read_dump(views_path);
  const Index comps = max_components(dump.views);
  const auto sol = gcca::maxvar(dump.views, comps);
  const Index kc_est = gcca::estimate_common_dim(sol.rho_avg);
  std::cerr << "estimated K_c = " << kc_est << '\n';
  if (kc_arg > 0) std::cerr << "configured K_c = " << kc_arg << '\n';

  std::ostringstream os;
  os << "component_index,eigenvalue";
  for (const auto& [a, b] : sol.pairs) os << ",rho_" << a + 1 << b + 1;
  os << ",rho_avg\n";
  for (Index i = 0; i < comps; ++i) {
    os << i + 1 << ',' << fmt::format("{:.10g}", sol.eigenvalues(i));
    for (Index p = 0; p < sol.rho_pairs.cols(); ++p) os << ',' << fmt::format("{:.10g}", sol.rho_pairs(i, p));
    os << ',' << fmt::format("{:.10g}", sol.rho_avg(i)) << '\n';
  }
  if (out.empty()) {
    std::cout << os.str();
  } else {
    auto f = open_out(out);
    f << os.str();
  }
  return 0;
}

int cmd_racma(const std::string& g_csv, const std::string& views_path, int kc, const std::string& out) {
  Matrix g;
  std::optional<airlink::FrameSet> frames;
  if (!g_csv.empty()) {
    g = read_matrix_csv(g_csv);
    if (kc <= 0) kc = static_cast<int>(g.cols());
    if (kc != g.cols()) throw Error(ErrorKind::Dimension, "--kc disagrees with the column count of G");
  } else {
    auto dump = airlink::read_dump(views_path);
    if (kc <= 0) {
      const auto full = gcca::maxvar(dump.views, max_components(dump.views));
      kc = static_cast<int>(gcca::estimate_common_dim(full.rho_avg));
      std::cerr << "estimated K_c = " << kc << '\n';
      if (kc == 0) throw Error(ErrorKind::Detection, "no common component above the correlation threshold");
    }
    g = gcca::maxvar(dump.views, kc).G;
    frames = std::move(dump.frames);
  }
  auto sep = racma::solve_mixture(g, kc);
  if (frames) {
    std::vector<int> ids(static_cast<std::size_t>(frames->num_users()));
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    sep = racma::match_preambles(std::move(sep), frames->preambles, ids);
  }
  {
    auto os = open_out(out);
    for (Index r = 0; r < sep.X_hat.rows(); ++r) {
      for (Index c = 0; c < sep.X_hat.cols(); ++c) os << (c ? "," : "") << (sep.X_hat(r, c) > 0 ? "1" : "-1");
      os << '\n';
    }
  }
  std::cout << "column,user_id,confidence\n";
  for (std::size_t c = 0; c < sep.assignment.size(); ++c) {
    std::cout << c + 1 << ',' << sep.assignment[c] << ',' << fmt::format("{:.4f}", sep.confidence(static_cast<Index>(c)))
              << '\n';
  }
  std::cout << "# separation residual " << fmt::format("{:.3e}", sep.residual) << '\n';
  return 0;
}

int cmd_plot(const fs::path& csv, const fs::path& out, const std::string& title) {
  std::ifstream in(csv);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + csv.string());
  const auto rows = harness::read_csv(in);
  auto os = open_out(out);
  os << harness::render_svg(rows, title);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-cell uplink simulator with GCCA + RACMA cell-edge detection"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Monte Carlo BER run for one scenario");
  auto* cfg_opt = run_cmd->add_option("--config", run.config, "scenario TOML")->check(CLI::ExistingFile);
  run_cmd->add_option("--preset", run.preset, "fig3-3bs | fig2-4bs | dense-k16")->excludes(cfg_opt);
  run_cmd->add_option("--trials", run.trials)->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed);
  run_cmd->add_option("--out", run.out, "results CSV")->required();
  run_cmd->add_option("--dump-views", run.dump, "write trial 0 views and frames");
  run_cmd->add_flag("--timing", run.timing, "record runtime_ms_mean (not reproducible)");
  run_cmd->add_flag("--estimate-kc", run.estimate_kc, "estimate the common dimension from correlations");
  run_cmd->add_option("--methods", run.methods)->delimiter(',');
  run_cmd->add_option("--sic-views", run.sic_views)->check(CLI::IsMember({"cooperative", "best"}));
  run_cmd->add_option("--sweep", run.sweep, "edge_user_x | target_snr_dB | scatter_fraction | K_per_cell");
  run_cmd->add_option("--values", run.values)->delimiter(',');
  run_cmd->add_option("--workers", run.workers, "overrides EDGEVIEW_WORKERS");

  std::string sweep_preset;
  std::string sweep_dir;
  int sweep_trials = 0;
  std::uint64_t sweep_seed = 1;
  bool sweep_timing = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Reproduce a figure experiment");
  sweep_cmd->add_option("--preset", sweep_preset)->required()->check(CLI::IsMember({"fig4", "fig5", "fig6", "fig7", "fig8"}));
  sweep_cmd->add_option("--out", sweep_dir, "output directory")->required();
  sweep_cmd->add_option("--trials", sweep_trials)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", sweep_seed);
  sweep_cmd->add_flag("--timing", sweep_timing);

  std::string gcca_views, gcca_out;
  int gcca_kc = 0;
  auto* gcca_cmd = app.add_subcommand("gcca", "Eigenvalues and correlation profile of a view dump");
  gcca_cmd->add_option("views", gcca_views, "binary view dump")->required()->check(CLI::ExistingFile);
  gcca_cmd->add_option("--kc", gcca_kc);
  gcca_cmd->add_option("--out", gcca_out, "CSV path (stdout when omitted)");

  std::string racma_g, racma_views, racma_out;
  int racma_kc = 0;
  auto* racma_cmd = app.add_subcommand("racma", "Separate +-1 sources from a mixture");
  auto* g_opt = racma_cmd->add_option("--g", racma_g, "G matrix as CSV")->check(CLI::ExistingFile);
  auto* v_opt = racma_cmd->add_option("--views", racma_views, "binary view dump")->check(CLI::ExistingFile);
  g_opt->excludes(v_opt);
  racma_cmd->add_option("--kc", racma_kc);
  racma_cmd->add_option("--out", racma_out, "X_hat CSV")->required();

  std::string plot_csv, plot_out, plot_title;
  auto* plot_cmd = app.add_subcommand("plot", "Render a results CSV as SVG");
  plot_cmd->add_option("results", plot_csv)->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--out", plot_out)->required();
  plot_cmd->add_option("--title", plot_title);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run_cmd) return cmd_run(run);
    if (*sweep_cmd) return cmd_sweep(sweep_preset, sweep_dir, sweep_trials, sweep_seed, sweep_timing);
    if (*gcca_cmd) return cmd_gcca(gcca_views, gcca_kc, gcca_out);
    if (*racma_cmd) {
      if (racma_g.empty() && racma_views.empty()) throw Error(ErrorKind::InvalidInput, "give --g or --views");
      return cmd_racma(racma_g, racma_views, racma_kc, racma_out);
    }
    if (*plot_cmd) return cmd_plot(plot_csv, plot_out, plot_title);
  } catch (const Error& e) {
    std::cerr << "edgeview: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "edgeview: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
