#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "edgeview/linalg.hpp"
#include "edgeview/rng.hpp"
#include "edgeview/scenario.hpp"

namespace edgeview::airlink {

struct FrameSet {
  Matrix X;          // N x K_s, entries +-1
  Matrix preambles;  // preamble_len x K_s, registered per user
  int preamble_len = 0;

  Index frame_length() const { return X.rows(); }
  Index num_users() const { return X.cols(); }
  // Payload rows exclude the preamble prefix.
  Index payload_rows() const { return X.rows() - preamble_len; }
};

struct ViewSet {
  std::vector<Matrix> views;           // real-stacked, 2 M_l x N
  std::vector<CMatrix> complex_views;  // M_l x N
  double sigma2 = 0.0;

  Index num_views() const { return static_cast<Index>(views.size()); }
  Index frame_length() const { return views.empty() ? 0 : views.front().cols(); }
  ViewSet subset(const std::vector<int>& bs) const;
};

// Per-user preamble, identical for every frame of a given (seed, user_id).
Vector registered_preamble(std::uint64_t seed, int user_id, int length);

FrameSet generate_frames(const scenario::ScenarioConfig& config, int num_users, const Rng& rng);

// sigma^2 = P_e / 10^(snr/10), P_e = mean large-scale gain of edge users over their
// adjacent BSs (the three strongest, or all when L < 3).
double calibrate_noise(const scenario::ChannelSet& channels, double target_snr_dB);

// Large-scale received power of an edge user placed at `position`, averaged over
// its adjacent BSs. Used when noise is pinned to a reference location.
double reference_edge_power(const scenario::ScenarioConfig& config, scenario::Point position);

// Amplitude applied to +-1 symbols so that a user's per-symbol received energy equals
// its channel power: 1/sqrt(N).
double symbol_amplitude(Index frame_length);

// Y_l = H_l X^T / sqrt(N) + N_l, noise i.i.d. CN(0, sigma2 / N).
ViewSet synthesize_rx(const scenario::ChannelSet& channels, const FrameSet& frames, double sigma2,
                      const Rng& rng);

// Complex additive noise with per-entry variance `variance`.
CMatrix complex_noise(Index rows, Index cols, double variance, Rng& rng);

// [Re(Y); Im(Y)]
Matrix stack_real(const CMatrix& y);

// Inverse of stack_real.
CMatrix unstack_real(const Matrix& y);

// Binary dump: magic "EDGV", u64 L, per view (u64 rows, u64 cols), f64 sigma2,
// view data row-major; then the frame block: u64 N, u64 K_s, u64 preamble_len,
// X row-major. All little-endian.
void write_dump(const std::filesystem::path& path, const ViewSet& views, const FrameSet* frames);

struct Dump {
  ViewSet views;
  std::optional<FrameSet> frames;
};
Dump read_dump(const std::filesystem::path& path);

}  // namespace edgeview::airlink
