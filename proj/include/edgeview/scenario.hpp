#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgeview/linalg.hpp"
#include "edgeview/rng.hpp"

namespace edgeview::scenario {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

// Cell layouts with a well-defined triple point where edge users are dropped.
//   triple  : three cells meeting at the origin (L = 3)
//   diamond : BS1 top, BS2 bottom, BS3 left, BS4 right; BS1/BS2 share the
//             horizontal edge y = 0, x in [-R/2, R/2]          (L = 4)
enum class Layout { Triple, Diamond };

struct ScenarioConfig {
  int L = 3;
  double cell_radius_m = 600.0;
  std::vector<int> M{12, 12, 12};
  std::vector<int> K{8, 8, 8};
  std::vector<int> Ke{1, 1, 0};
  double scatter_fraction = 0.4;
  std::array<double, 2> edge_band{0.95, 1.05};
  double tx_power_dBm = 25.0;
  double carrier_GHz = 2.0;
  int N = 800;
  int Np = 6;  // multipath components per link
  int preamble_len = 16;
  std::uint64_t seed = 1;
  double pathloss_exponent = 3.908;

  Layout layout = Layout::Triple;
  double edge_angle_spread_deg = 30.0;
  double h_bs_m = 25.0;
  double h_ut_m = 1.5;
  bool shadowing = false;
  // Edge-user SNR. When reference_snr_dB is set, noise is calibrated so that
  // edge users at tx_power_dBm would see reference_snr_dB and the edge users'
  // transmit power is lowered by (reference - target) dB instead.
  double target_snr_dB = 3.0;
  std::optional<double> reference_snr_dB;
  int pilot_len = 256;
  // Fixed positions for the first edge users (remaining ones are drawn).
  std::vector<Point> edge_positions;
  // When set, noise is calibrated against an edge user at this position
  // rather than against the users actually placed.
  std::optional<Point> noise_reference_position;

  int total_users() const;
  int total_edge_users() const;
  double edge_tx_power_dBm() const;
};

// Throws Configuration on inconsistent fields; returns human-readable warnings
// for soft conditions (antenna count below the identifiability bound).
std::vector<std::string> validate(const ScenarioConfig& config);

std::vector<Point> bs_positions(const ScenarioConfig& config);
Point edge_anchor(const ScenarioConfig& config);

enum class Role { Center, Edge };

struct UserPlacement {
  Point position;
  Role role = Role::Center;
  int serving_bs = 0;
  int user_id = 0;
};

// Global ordering: edge users first (grouped by serving BS), then cell-center
// users grouped by serving BS.
std::vector<UserPlacement> place_users(const ScenarioConfig& config, const Rng& rng);

// 3GPP TR 38.901 UMa LOS probability for h_UT <= 13 m.
double los_probability(double d2d_m);

// 3GPP TR 38.901 UMa path loss in dB. Two-dimensional distances under 10 m
// are clamped to 10 m with a warning.
double path_loss_dB(double d3d_m, bool los, const ScenarioConfig& config);

// Half-wavelength ULA response [1, e^{i pi cos phi}, ..., e^{i pi (M-1) cos phi}].
CVector array_response(double phi, int m);

// sqrt(1/M) * sum_n sqrt(alpha / Np) * conj(a_r(phi_n)).
CVector multipath_channel(double alpha, const std::vector<double>& angles, int m);

struct ChannelSet {
  std::vector<CMatrix> H;  // per BS, M_l x K_s, transmit power folded in
  Matrix alpha;            // K_s x L large-scale link gain (mW, includes tx power)
  Matrix received_power;   // K_s x L realized ||h||^2
  Matrix Gamma;            // K_s x L
  Matrix r;                // K_s x L
  Vector eta;              // K_s
  Eigen::MatrixXi los;     // K_s x L, 1 where the link has a LOS component
  std::vector<UserPlacement> users;
  double sigma2 = 1.0;

  int num_users() const { return static_cast<int>(users.size()); }
  int num_bs() const { return static_cast<int>(H.size()); }
  int num_common() const;
  std::vector<int> edge_users() const;
  std::vector<int> center_users_of(int bs) const;
  std::vector<int> users_of(int bs) const;
};

ChannelSet draw_channels(const std::vector<UserPlacement>& placements, const ScenarioConfig& config,
                         const Rng& rng);

// Recomputes Gamma, r and eta for noise power sigma2.
void snr_table(ChannelSet& channels, double sigma2);

inline double snr_ratio(double gamma) { return gamma / (gamma + 1.0); }

// Distance-only model of r: d^-lambda / (d^-lambda + noise_ratio).
double closed_form_r(double distance_m, double exponent, double noise_ratio);

// BS indices sorted by decreasing mean large-scale gain over `users`; ties by index.
std::vector<int> rank_bs_by_gain(const ChannelSet& channels, const std::vector<int>& users);

}  // namespace edgeview::scenario
