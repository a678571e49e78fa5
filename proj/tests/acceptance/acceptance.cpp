// Acceptance gate: one PASS/FAIL line per criterion.
//
//   edgeview_acceptance --criterion N [--cli PATH] [--scratch DIR]
//
// Exit status is 0 on PASS, 1 on FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "edgeview/airlink.hpp"
#include "edgeview/config_io.hpp"
#include "edgeview/detectors.hpp"
#include "edgeview/error.hpp"
#include "edgeview/gcca.hpp"
#include "edgeview/harness.hpp"
#include "edgeview/numerics.hpp"
#include "edgeview/racma.hpp"
#include "oracles.hpp"

using namespace edgeview;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets, one block per criterion.
namespace tol {
constexpr double c1_angle = 1e-6;
constexpr double c1_budget_s = 10.0;
constexpr double c2_eig_slack = 1e-8;
constexpr double c2_objective = 1e-6;
constexpr double c2_budget_s = 30.0;
constexpr double c3_eta_gap = 0.15;
constexpr double c3_spectral_gap = 0.25;
constexpr double c3_pass_fraction = 0.90;
constexpr double c3_budget_s = 120.0;
constexpr double c4_pass_fraction = 0.99;
constexpr double c4_budget_s = 60.0;
constexpr double c5_common_min = 0.6;
constexpr double c5_private_max = 0.4;
constexpr double c5_pass_fraction = 0.90;
constexpr double c5_third_rise = 0.1;
constexpr double c5_budget_s = 300.0;
constexpr double c6_gcca_max = 1e-2;
constexpr double c6_sigmas = 2.0;
constexpr double c6_budget_s = 900.0;
constexpr double c7_budget_s = 1800.0;
}  // namespace tol

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  std::string cli;
  fs::path scratch;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Criterion 1: noiseless identifiability through the full scenario pipeline,
// with inter-cell private terms removed.
Outcome noiseless_identifiability(const Context&) {
  scenario::ScenarioConfig c;
  c.M = {10, 10, 10};
  c.K = {4, 4, 4};
  c.Ke = {1, 1, 0};
  c.N = 200;
  int recovered = 0, holds = 0;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    auto trial = harness::simulate_trial(c, 101, t);
    auto& ch = trial.channels;
    for (int l = 0; l < ch.num_bs(); ++l) {
      for (int u = 0; u < ch.num_users(); ++u) {
        const auto& user = ch.users[static_cast<std::size_t>(u)];
        if (user.role == scenario::Role::Center && user.serving_bs != l) ch.H[static_cast<std::size_t>(l)].col(u).setZero();
      }
    }
    const auto views = airlink::synthesize_rx(ch, trial.frames, 0.0, Rng(trial.seed));
    const auto part = gcca::partition_of(ch);
    if (!gcca::check_identifiability(trial.frames, ch, part).holds()) continue;
    ++holds;
    // Noiseless views are rank deficient; compress each to an orthonormal
    // basis of its row space so the unridged solve applies.
    airlink::ViewSet reduced;
    for (const auto& y : views.views) reduced.views.push_back(numerics::orthonormal_basis(y.transpose()).transpose());
    const auto sol = gcca::maxvar(reduced, static_cast<Index>(part.common.size()), 0.0);
    Matrix xc(c.N, static_cast<Index>(part.common.size()));
    for (std::size_t i = 0; i < part.common.size(); ++i) xc.col(static_cast<Index>(i)) = trial.frames.X.col(part.common[i]);
    const double angle = numerics::max_principal_angle(sol.G, xc);
    worst = std::max(worst, angle);
    recovered += angle < tol::c1_angle;
  }
  return {recovered == 50 && holds == 50,
          fmt::format("{}/50 recovered, identifiability held in {}/50, worst angle {:.2e} rad", recovered, holds, worst)};
}

// Criterion 2: spectrum of A and the objective identity on random views.
Outcome projector_spectrum(const Context&) {
  std::mt19937_64 g(202);
  std::uniform_int_distribution<int> views_d(2, 4), rows_d(2, 12), n_d(40, 120);
  int ok = 0;
  double worst_eig = 0.0, worst_obj = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int l = views_d(g);
    const int n = n_d(g);
    airlink::ViewSet vs;
    for (int i = 0; i < l; ++i) vs.views.push_back(oracle::random_gaussian(rows_d(g), n, g));
    const Vector ev = oracle::jacobi_eig(gcca::build_aggregate(vs, 0.0).entries(), 1e-12).values;
    const double lo = -ev.minCoeff();
    const double hi = ev.maxCoeff() - l;
    worst_eig = std::max({worst_eig, lo, hi});
    Index kc_max = n;
    for (const auto& v : vs.views) kc_max = std::min(kc_max, v.rows());
    const Index kc = 1 + static_cast<Index>(g() % static_cast<std::uint64_t>(kc_max));
    const auto sol = gcca::maxvar(vs, kc, 0.0);
    double direct = 0.0;
    for (int i = 0; i < l; ++i) {
      direct += (vs.views[static_cast<std::size_t>(i)].transpose() * sol.Q[static_cast<std::size_t>(i)] - sol.G).squaredNorm();
    }
    const double identity = static_cast<double>(l) * static_cast<double>(kc) - ev.head(kc).sum();
    const double obj_err = std::abs(direct - identity);
    worst_obj = std::max(worst_obj, obj_err);
    ok += lo <= tol::c2_eig_slack && hi <= tol::c2_eig_slack && obj_err <= tol::c2_objective;
  }
  return {ok == 100, fmt::format("{}/100 views ok, worst bound excess {:.2e}, worst objective gap {:.2e}", ok,
                                 worst_eig, worst_obj)};
}

// Criterion 3: eigenvalues of A against the effective SNR of the edge users.
Outcome eigen_snr(const Context&) {
  int ok = 0;
  double med_gap = 0.0;
  std::vector<double> gaps, spectral, real_gaps;
  for (int s = 0; s < 50; ++s) {
    oracle::UplinkSpec spec;
    spec.M = 64;
    spec.kc = 2;
    spec.private_counts = {2, 1, 1};
    spec.N = 800;
    spec.edge_db = 5.0;
    spec.own_db = 25.0;
    spec.other_db = -20.0;
    const auto up = oracle::synthetic_uplink(spec, 3000 + static_cast<std::uint64_t>(s));
    const auto sol = gcca::maxvar(up.views, 2);
    double worst = 0.0, worst_real = 0.0;
    for (Index k = 0; k < 2; ++k) {
      double eta = 0.0, eta_real = 0.0;
      for (const auto& snr : up.snr) {
        eta += snr(k, 0) / (snr(k, 0) + 1.0);
        // Real stacking halves the noise per real dimension of a real source.
        eta_real += 2.0 * snr(k, 0) / (2.0 * snr(k, 0) + 1.0);
      }
      // Both edge users share eta, so pairing by rank is exact.
      worst = std::max(worst, std::abs(sol.eigenvalues(k) - eta));
      worst_real = std::max(worst_real, std::abs(sol.eigenvalues(k) - eta_real));
    }
    real_gaps.push_back(worst_real);
    const double gap = sol.eigenvalues(1) - sol.eigenvalues(2);
    gaps.push_back(worst);
    spectral.push_back(gap);
    ok += worst <= tol::c3_eta_gap && gap >= tol::c3_spectral_gap;
  }
  std::sort(gaps.begin(), gaps.end());
  med_gap = gaps[gaps.size() / 2];
  return {ok >= tol::c3_pass_fraction * 50,
          fmt::format("{}/50 seeds, median |lambda - eta| {:.3f}, median spectral gap {:.3f} (real-stacked eta "
                      "with 2*gamma: median gap {:.3f})",
                      ok, med_gap, median(spectral), median(real_gaps))};
}

// Criterion 4: exact separation of noiseless mixtures.
Outcome racma_exactness(const Context&) {
  std::mt19937_64 g(404);
  int exact = 0;
  std::map<Index, int> misses;
  for (int t = 0; t < 500; ++t) {
    const Index k = 2 + t % 3;
    const Matrix x = oracle::random_signs(200, k, g);
    const Matrix f = oracle::conditioned_mixing(k, 10.0, g);
    try {
      const auto sep = racma::solve_mixture(x * f, k);
      if (oracle::signed_permutation_errors(sep.X_hat, x) == 0) {
        ++exact;
        continue;
      }
    } catch (const Error&) {
    }
    ++misses[k];
  }
  std::string detail = fmt::format("{}/500 exact", exact);
  for (auto [k, m] : misses) detail += fmt::format(", K={} misses {}", k, m);
  return {exact >= tol::c4_pass_fraction * 500, detail};
}

std::vector<double> column(const Matrix& m, Index c) {
  std::vector<double> out;
  for (Index r = 0; r < m.rows(); ++r)
    if (std::isfinite(m(r, c))) out.push_back(m(r, c));
  return out;
}

// Criterion 5: shape of the average canonical correlation profile.
Outcome dimension_estimation(const Context&) {
  harness::ExperimentSpec spec = harness::sweep_preset("fig8");
  spec.trials = 100;
  spec.base.scatter_fraction = 0.4;
  spec.base.target_snr_dB = 3.0;
  const Matrix near = harness::correlation_profile(spec);
  int shaped = 0;
  for (Index t = 0; t < near.rows(); ++t) {
    const auto row = near.row(t);
    if (!row.allFinite()) continue;
    const bool common = row(0) >= tol::c5_common_min && row(1) >= tol::c5_common_min;
    const bool rest = row.tail(row.size() - 2).maxCoeff() <= tol::c5_private_max;
    shaped += common && rest;
  }
  spec.base.scatter_fraction = 0.7;
  const Matrix far = harness::correlation_profile(spec);
  const double rise = median(column(far, 2)) - median(column(near, 2));
  const bool pass = shaped >= tol::c5_pass_fraction * 100 && rise >= tol::c5_third_rise;
  return {pass, fmt::format("{}/100 trials shaped (median rho {:.2f}, {:.2f}, {:.2f}), third coefficient rise {:.3f} "
                            "at d=0.7R",
                            shaped, median(column(near, 0)), median(column(near, 1)), median(column(near, 2)), rise)};
}

const harness::ResultRow& row_of(const std::vector<harness::ResultRow>& rows, std::string_view method,
                                 double value) {
  for (const auto& r : rows)
    if (r.method == method && std::abs(r.sweep_value - value) < 1e-9) return r;
  throw std::runtime_error("missing row for " + std::string(method));
}

bool separated(const harness::ResultRow& better, const harness::ResultRow& worse) {
  const double se = std::hypot(better.ber_stderr, worse.ber_stderr);
  return worse.ber_mean - better.ber_mean > tol::c6_sigmas * se;
}

// Criterion 6: BER ordering at 4 dB.
Outcome ber_ordering(const Context&) {
  using enum harness::Method;
  harness::ExperimentSpec spec = harness::sweep_preset("fig5");
  spec.values = {4.0};
  spec.trials = 100;
  spec.methods = {Gcca3, Cca2, MmseSicRacmaPerfect, Mmse};
  const auto rows = harness::run_monte_carlo(spec);
  const auto& g = row_of(rows, "gcca3", 4.0);
  const auto& c = row_of(rows, "cca2", 4.0);
  const auto& s = row_of(rows, "mmse_sic_racma_perfect", 4.0);
  const auto& m = row_of(rows, "mmse", 4.0);
  const bool pass = separated(g, c) && separated(c, s) && separated(s, m) && g.ber_mean <= tol::c6_gcca_max;
  return {pass, fmt::format("gcca3 {:.3e}+-{:.1e}, cca2 {:.3e}+-{:.1e}, mmse_sic_racma_perfect {:.3e}+-{:.1e}, "
                            "mmse {:.3e}+-{:.1e}",
                            g.ber_mean, g.ber_stderr, c.ber_mean, c.ber_stderr, s.ber_mean, s.ber_stderr, m.ber_mean,
                            m.ber_stderr)};
}

// Criterion 7: location sweep crossover.
Outcome location_crossover(const Context&) {
  harness::ExperimentSpec spec = harness::sweep_preset("fig4");
  spec.trials = 50;
  const auto rows = harness::sweep_location(spec);
  const double r = spec.base.cell_radius_m;
  int inner_ok = 0, inner = 0;
  bool ends_ok = true, all_le = true;
  std::string notes;
  for (double x : spec.values) {
    const auto& g3 = row_of(rows, "gcca3", x);
    const auto& ga = row_of(rows, "gcca_all", x);
    const auto& c2 = row_of(rows, "cca2", x);
    const auto& sic = row_of(rows, "zf_sic_racma_perfect", x);
    if (g3.ber_mean > ga.ber_mean) all_le = false;
    if (std::abs(x) <= r / 2 + 1e-9) {
      ++inner;
      inner_ok += g3.ber_mean < ga.ber_mean && g3.ber_mean < c2.ber_mean && g3.ber_mean < sic.ber_mean;
    }
    if (std::abs(std::abs(x) - r) < 1e-9) {
      ends_ok = ends_ok && sic.ber_mean < g3.ber_mean && sic.ber_mean < ga.ber_mean && sic.ber_mean < c2.ber_mean;
    }
    notes += fmt::format(" x={:+.0f}:{:.2e}/{:.2e}/{:.2e}/{:.2e}", x, g3.ber_mean, ga.ber_mean, c2.ber_mean,
                         sic.ber_mean);
  }
  const bool pass = inner_ok == inner && ends_ok && all_le;
  return {pass, fmt::format("gcca3 strictly best at {}/{} inner points, SIC best at both ends: {}, gcca3 <= gcca_all "
                            "everywhere: {}; BER gcca3/gcca_all/cca2/sic{}",
                            inner_ok, inner, ends_ok ? "yes" : "no", all_le ? "yes" : "no", notes)};
}

// Criterion 8: detector limits.
Outcome detector_sanity(const Context&) {
  scenario::ScenarioConfig c;
  c.M = {32, 32, 32};
  bool zf_exact = true;
  int identical = 0;
  for (int t = 0; t < 20; ++t) {
    const auto trial = harness::simulate_trial(c, 808, t);
    const auto& h = trial.channels.H[0];
    const auto clean = airlink::synthesize_rx(trial.channels, trial.frames, 0.0, Rng(trial.seed));
    const Matrix d = detectors::zf_detect(clean.complex_views[0], h);
    zf_exact = zf_exact && detectors::bit_error_rate(d, trial.frames.X, 0).maxCoeff() == 0.0;
    const CMatrix& y = trial.views.complex_views[0];
    identical += detectors::mmse_detect(y, h, 1e-30) == detectors::zf_detect(y, h);
  }
  return {zf_exact && identical == 20,
          fmt::format("noiseless ZF exact: {}, MMSE==ZF at sigma2->0 on {}/20 instances", zf_exact ? "yes" : "no",
                      identical)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Criterion 9: byte-identical CSV across runs and worker counts.
Outcome reproducibility(const Context& ctx) {
  if (ctx.cli.empty()) return {false, "no --cli given"};
  fs::create_directories(ctx.scratch);
  std::vector<fs::path> outputs;
  for (const char* workers : {"1", "1", "8"}) {
    const fs::path out = ctx.scratch / fmt::format("run{}_w{}.csv", outputs.size(), workers);
    const std::string cmd = fmt::format("EDGEVIEW_WORKERS={} \"{}\" run --preset fig3-3bs --trials 24 --seed 9 "
                                        "--out \"{}\" > /dev/null",
                                        workers, ctx.cli, out.string());
    if (std::system(cmd.c_str()) != 0) return {false, "CLI run failed: " + cmd};
    outputs.push_back(out);
  }
  const std::string a = slurp(outputs[0]);
  const bool same_run = a == slurp(outputs[1]);
  const bool same_workers = a == slurp(outputs[2]);
  return {same_run && same_workers && !a.empty(),
          fmt::format("repeat run identical: {}, workers 1 vs 8 identical: {} ({} bytes)", same_run ? "yes" : "no",
                      same_workers ? "yes" : "no", a.size())};
}

struct Criterion {
  std::string name;
  double budget_s;
  std::function<Outcome(const Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edgeview acceptance gate"};
  int which = 0;
  Context ctx;
  std::string scratch = (fs::temp_directory_path() / "edgeview_acceptance").string();
  app.add_option("--criterion", which, "criterion number")->required()->check(CLI::Range(1, 9));
  app.add_option("--cli", ctx.cli, "path to the edgeview executable");
  app.add_option("--scratch", scratch, "scratch directory");
  CLI11_PARSE(app, argc, argv);
  ctx.scratch = scratch;
  spdlog::set_level(spdlog::level::err);

  const std::vector<Criterion> criteria{
      {"noiseless identifiability", tol::c1_budget_s, noiseless_identifiability},
      {"projector spectrum", tol::c2_budget_s, projector_spectrum},
      {"eigenvalue vs effective SNR", tol::c3_budget_s, eigen_snr},
      {"RACMA exactness", tol::c4_budget_s, racma_exactness},
      {"dimension estimation", tol::c5_budget_s, dimension_estimation},
      {"BER ordering", tol::c6_budget_s, ber_ordering},
      {"location crossover", tol::c7_budget_s, location_crossover},
      {"detector sanity", 0.0, detector_sanity},
      {"reproducibility", 0.0, reproducibility},
  };
  const Criterion& c = criteria[static_cast<std::size_t>(which - 1)];
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = c.run(ctx);
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = seconds_since(t0);
  const bool in_budget = c.budget_s <= 0.0 || elapsed < c.budget_s;
  const bool pass = out.pass && in_budget;
  std::cout << fmt::format("{} C{} {}: {} [{:.1f} s{}]", pass ? "PASS" : "FAIL", which, c.name, out.detail, elapsed,
                           in_budget ? "" : fmt::format(", over the {:.0f} s budget", c.budget_s))
            << std::endl;
  return pass ? 0 : 1;
}
