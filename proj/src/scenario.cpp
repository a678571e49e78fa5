#include "edgeview/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "edgeview/error.hpp"

namespace edgeview::scenario {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kMinDistance2d = 10.0;
constexpr double kMaxDistance2d = 5000.0;

std::atomic<bool> g_clamp_warned{false};

void config_error(const std::string& what) { throw Error(ErrorKind::Configuration, what); }

int expected_cells(Layout layout) { return layout == Layout::Triple ? 3 : 4; }

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

int ScenarioConfig::total_users() const { return std::accumulate(K.begin(), K.end(), 0); }

int ScenarioConfig::total_edge_users() const { return std::accumulate(Ke.begin(), Ke.end(), 0); }

double ScenarioConfig::edge_tx_power_dBm() const {
  if (!reference_snr_dB) return tx_power_dBm;
  return tx_power_dBm - (*reference_snr_dB - target_snr_dB);
}

std::vector<std::string> validate(const ScenarioConfig& c) {
  if (c.L < 2) config_error("L must be at least 2");
  if (c.L != expected_cells(c.layout)) {
    config_error("layout requires L = " + std::to_string(expected_cells(c.layout)));
  }
  const auto n = static_cast<std::size_t>(c.L);
  if (c.M.size() != n || c.K.size() != n || c.Ke.size() != n) {
    config_error("M, K and Ke must each have L entries");
  }
  for (std::size_t l = 0; l < n; ++l) {
    if (c.M[l] < 1) config_error("M entries must be positive");
    if (c.K[l] < 1) config_error("K entries must be positive");
    if (c.Ke[l] < 0 || c.Ke[l] >= c.K[l]) config_error("each Ke must satisfy 0 <= Ke < K");
  }
  if (c.cell_radius_m <= 0.0) config_error("cell_radius_m must be positive");
  if (!(c.scatter_fraction > 0.0 && c.scatter_fraction <= 1.0)) {
    config_error("scatter_fraction must lie in (0, 1]");
  }
  if (!(c.edge_band[0] > 0.0 && c.edge_band[0] <= c.edge_band[1])) config_error("invalid edge_band");
  if (c.Np < 1) config_error("Np must be at least 1");
  if (c.preamble_len < 0) config_error("preamble_len must be non-negative");
  if (c.carrier_GHz <= 0.0) config_error("carrier_GHz must be positive");
  const int ks = c.total_users();
  if (c.N <= ks) config_error("N must exceed the total number of users");
  if (c.N <= ks + c.preamble_len) config_error("N must exceed K_s + preamble_len");
  if (c.edge_positions.size() > static_cast<std::size_t>(c.total_edge_users())) {
    config_error("more edge_positions than edge users");
  }

  std::vector<std::string> warnings;
  const int kc = c.total_edge_users();
  for (std::size_t l = 0; l < n; ++l) {
    if (2 * c.M[l] < kc + c.K[l] - c.Ke[l]) {
      std::ostringstream os;
      os << "BS " << l + 1 << ": 2M = " << 2 * c.M[l] << " < K_c + K - K_e = " << kc + c.K[l] - c.Ke[l]
         << "; the common subspace may not be identifiable";
      warnings.push_back(os.str());
    }
  }
  return warnings;
}

std::vector<Point> bs_positions(const ScenarioConfig& c) {
  const double r = c.cell_radius_m;
  if (c.layout == Layout::Triple) {
    std::vector<Point> out;
    for (double deg : {90.0, 210.0, 330.0}) {
      const double a = deg * kPi / 180.0;
      out.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return out;
  }
  const double h = std::sqrt(3.0) * r / 2.0;
  return {{0.0, h}, {0.0, -h}, {-1.5 * r, 0.0}, {1.5 * r, 0.0}};
}

Point edge_anchor(const ScenarioConfig& c) {
  if (c.layout == Layout::Triple) return {0.0, 0.0};
  return {-c.cell_radius_m / 2.0, 0.0};
}

std::vector<UserPlacement> place_users(const ScenarioConfig& c, const Rng& rng) {
  validate(c);
  const auto bs = bs_positions(c);
  const Point anchor = edge_anchor(c);
  const double r = c.cell_radius_m;
  const double lo = c.edge_band[0] * r;
  const double hi = c.edge_band[1] * r;

  std::vector<UserPlacement> users;
  int id = 0;
  int edge_index = 0;
  for (int l = 0; l < c.L; ++l) {
    if (c.Ke[l] == 0) continue;
    const Point b = bs[static_cast<std::size_t>(l)];
    const double reach = distance(anchor, b);
    if (reach < lo || reach > hi) {
      std::ostringstream os;
      os << "edge band of BS " << l + 1 << " does not reach the cell corner used for edge users";
      config_error(os.str());
    }
    const double heading = std::atan2(anchor.y - b.y, anchor.x - b.x);
    const double spread = c.edge_angle_spread_deg * kPi / 180.0;
    for (int k = 0; k < c.Ke[l]; ++k, ++edge_index) {
      UserPlacement u;
      u.role = Role::Edge;
      u.serving_bs = l;
      u.user_id = id++;
      if (static_cast<std::size_t>(edge_index) < c.edge_positions.size()) {
        u.position = c.edge_positions[static_cast<std::size_t>(edge_index)];
      } else {
        Rng draw = rng.substream(Stream::EdgePlacement, {static_cast<std::uint64_t>(edge_index)});
        const double radius = std::sqrt(draw.uniform(lo * lo, hi * hi));
        const double angle = heading + draw.uniform(-spread, spread);
        u.position = {b.x + radius * std::cos(angle), b.y + radius * std::sin(angle)};
      }
      users.push_back(u);
    }
  }
  for (int l = 0; l < c.L; ++l) {
    const Point b = bs[static_cast<std::size_t>(l)];
    const double dmax = c.scatter_fraction * r;
    for (int k = 0; k < c.K[l] - c.Ke[l]; ++k) {
      Rng draw = rng.substream(Stream::CenterPlacement,
                               {static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(k)});
      const double radius = dmax * std::sqrt(draw.uniform());
      const double angle = draw.uniform(-kPi, kPi);
      UserPlacement u;
      u.role = Role::Center;
      u.serving_bs = l;
      u.user_id = id++;
      u.position = {b.x + radius * std::cos(angle), b.y + radius * std::sin(angle)};
      users.push_back(u);
    }
  }
  return users;
}

double los_probability(double d2d_m) {
  if (d2d_m < 0.0 || !std::isfinite(d2d_m)) {
    throw Error(ErrorKind::InvalidInput, "los_probability: distance must be non-negative");
  }
  if (d2d_m <= 18.0) return 1.0;
  return 18.0 / d2d_m + std::exp(-d2d_m / 63.0) * (1.0 - 18.0 / d2d_m);
}

double path_loss_dB(double d3d_m, bool los, const ScenarioConfig& c) {
  if (!(d3d_m > 0.0)) throw Error(ErrorKind::InvalidInput, "path_loss_dB: distance must be positive");
  const double dh = c.h_bs_m - c.h_ut_m;
  double d2d = std::sqrt(std::max(d3d_m * d3d_m - dh * dh, 0.0));
  if (d2d < kMinDistance2d) {
    if (!g_clamp_warned.exchange(true)) {
      spdlog::warn("2-D distance {:.2f} m below the 10 m UMa validity floor; clamping", d2d);
    }
    d2d = kMinDistance2d;
  } else if (d2d > kMaxDistance2d && !g_clamp_warned.exchange(true)) {
    spdlog::warn("2-D distance {:.1f} m beyond the 5 km UMa validity range", d2d);
  }
  const double d3d = std::hypot(d2d, dh);
  const double fc = c.carrier_GHz;
  // Effective environment height is 1 m for h_UT < 13 m.
  const double he = 1.0;
  const double d_bp = 4.0 * (c.h_bs_m - he) * (c.h_ut_m - he) * fc * 1e9 / kSpeedOfLight;

  double pl_los = 0.0;
  if (d2d <= d_bp) {
    pl_los = 28.0 + 22.0 * std::log10(d3d) + 20.0 * std::log10(fc);
  } else {
    pl_los = 28.0 + 40.0 * std::log10(d3d) + 20.0 * std::log10(fc) -
             9.0 * std::log10(d_bp * d_bp + dh * dh);
  }
  if (los) return pl_los;
  const double pl_nlos = 13.54 + 39.08 * std::log10(d3d) + 20.0 * std::log10(fc) - 0.6 * (c.h_ut_m - 1.5);
  return std::max(pl_los, pl_nlos);
}

CVector array_response(double phi, int m) {
  CVector a(m);
  const double c = std::cos(phi);
  for (int i = 0; i < m; ++i) a(i) = std::polar(1.0, kPi * i * c);
  return a;
}

CVector multipath_channel(double alpha, const std::vector<double>& angles, int m) {
  CVector h = CVector::Zero(m);
  const double amp = std::sqrt(alpha / static_cast<double>(angles.size()));
  for (double phi : angles) h += amp * array_response(phi, m).conjugate();
  return h / std::sqrt(static_cast<double>(m));
}

int ChannelSet::num_common() const {
  return static_cast<int>(std::count_if(users.begin(), users.end(),
                                        [](const UserPlacement& u) { return u.role == Role::Edge; }));
}

std::vector<int> ChannelSet::edge_users() const {
  std::vector<int> out;
  for (const auto& u : users)
    if (u.role == Role::Edge) out.push_back(u.user_id);
  return out;
}

std::vector<int> ChannelSet::center_users_of(int bs) const {
  std::vector<int> out;
  for (const auto& u : users)
    if (u.role == Role::Center && u.serving_bs == bs) out.push_back(u.user_id);
  return out;
}

std::vector<int> ChannelSet::users_of(int bs) const {
  std::vector<int> out;
  for (const auto& u : users)
    if (u.serving_bs == bs) out.push_back(u.user_id);
  return out;
}

ChannelSet draw_channels(const std::vector<UserPlacement>& placements, const ScenarioConfig& c,
                         const Rng& rng) {
  const auto bs = bs_positions(c);
  const int ks = static_cast<int>(placements.size());
  ChannelSet out;
  out.users = placements;
  out.alpha = Matrix::Zero(ks, c.L);
  out.received_power = Matrix::Zero(ks, c.L);
  out.los = Eigen::MatrixXi::Zero(ks, c.L);
  out.H.reserve(static_cast<std::size_t>(c.L));

  for (int l = 0; l < c.L; ++l) {
    const int m = c.M[static_cast<std::size_t>(l)];
    CMatrix h(m, ks);
    for (int k = 0; k < ks; ++k) {
      const UserPlacement& u = placements[static_cast<std::size_t>(k)];
      Rng link = rng.substream(Stream::Channel,
                               {static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(u.user_id)});
      const double d2d = distance(u.position, bs[static_cast<std::size_t>(l)]);
      const double d3d = std::hypot(d2d, c.h_bs_m - c.h_ut_m);
      // Draw order is fixed regardless of role so link streams stay aligned.
      const double los_draw = link.uniform();
      const bool los = u.role == Role::Center && u.serving_bs == l && los_draw < los_probability(d2d);
      double pl = path_loss_dB(d3d, los, c);
      const double sf = link.normal();
      if (c.shadowing) pl += sf * (los ? 4.0 : 6.0);
      const double tx = u.role == Role::Edge ? c.edge_tx_power_dBm() : c.tx_power_dBm;
      const double gain = std::pow(10.0, (tx - pl) / 10.0);
      std::vector<double> angles(static_cast<std::size_t>(c.Np));
      for (auto& a : angles) a = link.uniform(-kPi, kPi);
      h.col(k) = multipath_channel(gain, angles, m);
      out.alpha(k, l) = gain;
      out.received_power(k, l) = h.col(k).squaredNorm();
      out.los(k, l) = los ? 1 : 0;
    }
    out.H.push_back(std::move(h));
  }
  snr_table(out, 1.0);
  return out;
}

void snr_table(ChannelSet& channels, double sigma2) {
  if (!(sigma2 > 0.0)) throw Error(ErrorKind::InvalidInput, "snr_table: sigma2 must be positive");
  channels.sigma2 = sigma2;
  channels.Gamma = channels.alpha / sigma2;
  channels.r = channels.Gamma.array() / (channels.Gamma.array() + 1.0);
  channels.eta = channels.r.rowwise().sum();
}

double closed_form_r(double distance_m, double exponent, double noise_ratio) {
  const double p = std::pow(distance_m, -exponent);
  return p / (p + noise_ratio);
}

std::vector<int> rank_bs_by_gain(const ChannelSet& channels, const std::vector<int>& users) {
  const int l = channels.num_bs();
  std::vector<double> score(static_cast<std::size_t>(l), 0.0);
  for (int b = 0; b < l; ++b) {
    for (int u : users) score[static_cast<std::size_t>(b)] += channels.alpha(u, b);
  }
  std::vector<int> order(static_cast<std::size_t>(l));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
  });
  return order;
}

}  // namespace edgeview::scenario
