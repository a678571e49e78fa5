#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "edgeview/airlink.hpp"
#include "edgeview/linalg.hpp"
#include "edgeview/numerics.hpp"
#include "edgeview/scenario.hpp"

namespace edgeview::gcca {

struct GccaSolution {
  Matrix G;                    // N x Kc, orthonormal columns
  std::vector<Matrix> Q;       // per view, 2 M_l x Kc
  Vector eigenvalues;          // descending, min(N, sum 2 M_l) entries
  double objective = 0.0;      // sum_l ||Y_l^T Q_l - G||_F^2
  std::vector<std::pair<int, int>> pairs;  // view pairs (l, j), l < j, 0-based
  Matrix rho_pairs;            // Kc x pairs.size()
  Vector rho_avg;              // Kc

  Index components() const { return G.cols(); }
};

// A = sum_l Y_l^T (Y_l Y_l^T + ridge I)^{-1} Y_l, assembled densely by the
// OpenMP kernel. ridge == nullopt picks numerics::default_ridge per view.
numerics::SymmetricMatrix build_aggregate(const airlink::ViewSet& views, std::optional<double> ridge,
                                          int threads = 0);

// Solves MAXVAR through the eigendecomposition of A. The eigenvectors are
// obtained from the (sum 2 M_l)-order Gram of the stacked projector factors,
// which shares the nonzero spectrum of A; when sum 2 M_l >= N the dense
// aggregate is used directly. Correlation coefficients are filled in.
GccaSolution maxvar(const airlink::ViewSet& views, Index kc, std::optional<double> ridge = std::nullopt);

// Pairwise coefficients between unit-normalized projections Y_l^T Q_l(:, i).
// Signed; averaged over all L(L-1)/2 pairs.
void canonical_correlations(GccaSolution& solution, const airlink::ViewSet& views);

// Number of entries of rho_avg above rho_th.
Index estimate_common_dim(const Vector& rho_avg, double rho_th = 0.5);

// Users split into the common set and each view's private set.
struct Partition {
  std::vector<int> common;
  std::vector<std::vector<int>> private_of;  // indexed by view
};
Partition partition_of(const scenario::ChannelSet& channels);

struct IdentifiabilityReport {
  std::vector<Index> w_rank;  // per view
  std::vector<Index> w_cols;
  Index v_rank = 0;
  Index v_cols = 0;
  bool w_full_rank = false;
  bool v_full_rank = false;
  bool holds() const { return w_full_rank && v_full_rank; }
};

// W_l = [H_lc, H_lpl] (real-stacked) and the block matrix whose null space is
// the part of the view intersection outside span(X_c):
//   block row l-1 (l = 2..L):  [... -X_c at d_{l-1} ...,  X_p1,  ..., -X_pl at b_l ...]
// Ranks use a 1e-8 relative singular-value cutoff.
IdentifiabilityReport check_identifiability(const airlink::FrameSet& frames,
                                            const scenario::ChannelSet& channels,
                                            const Partition& partition);

struct SnrDiagnostic {
  Vector eigenvalues;       // top K_s of A
  Vector predicted;         // eta sorted descending
  std::vector<int> order;   // user ids in the order of `predicted`
  Vector gap;               // |eigenvalue - predicted|
  double spectral_gap = 0.0;  // lambda_Kc - lambda_{Kc+1}
};

// Pairs the top K_s eigenvalues with the sorted effective SNRs. When `bs` is
// non-empty, eta is summed over those BS columns only (the views the solution
// was computed from).
SnrDiagnostic eig_snr_diagnostic(const GccaSolution& solution, const scenario::ChannelSet& channels,
                                 const std::vector<int>& bs = {});

}  // namespace edgeview::gcca
