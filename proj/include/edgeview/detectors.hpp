#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgeview/linalg.hpp"
#include "edgeview/racma.hpp"

namespace edgeview::detectors {

// Sylvester-Hadamard pilot book: `length` x `users`, +-1, mutually orthogonal
// columns. `length` must be a power of two no smaller than `users`.
Matrix pilot_codebook(int length, int users);

struct ChannelEstimate {
  CMatrix H_hat;  // M x K
  int pilot_len = 0;
  Vector mse;     // per user, filled when the true channel is supplied
};

// H_hat = Y_pilot P / (Np * amplitude). Pilots must satisfy P^T P = Np I.
ChannelEstimate estimate_channels_ls(const CMatrix& y_pilot, const Matrix& pilots, double amplitude = 1.0,
                                     const CMatrix* truth = nullptr);

// Decisions are N x K (one column per user), entries +-1.
Matrix zf_detect(const CMatrix& y, const CMatrix& h_hat);
Matrix mmse_detect(const CMatrix& y, const CMatrix& h_hat, double sigma2);

enum class Equalizer { Zf, Mmse };

struct SicResult {
  Matrix decisions;            // N x K, columns in the input user order
  CMatrix residual;            // Y after all subtractions
  std::vector<int> order;      // cancellation order (input column indices)
  std::vector<double> energy;  // ||residual||_F^2 after each stage
};

// Successive cancellation in descending estimated-norm order. Each stage
// equalizes the remaining users, keeps the strongest one's decisions and
// subtracts amplitude * h_k x_k^T.
SicResult sic_detect(const CMatrix& y, const CMatrix& h_hat, double sigma2, Equalizer mode,
                     double amplitude = 1.0);

struct DetectionReport {
  std::string method;
  std::vector<int> users;  // user ids scored
  Matrix decisions;        // payload rows x users.size()
  Vector ber;              // per scored user
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  double sigma2 = 0.0;
  double runtime_ms = 0.0;
  std::string error;       // empty on success

  bool ok() const { return error.empty(); }
  double mean_ber() const;
};

// Fraction of payload rows where decisions and truth differ, per column.
Vector bit_error_rate(const Matrix& decisions, const Matrix& truth, Index preamble_len);

// Scores a separation against the users it was matched to. Users that no
// column was matched to score 0.5.
DetectionReport score_separation(const racma::SeparationResult& sep, const Matrix& x, Index preamble_len,
                                 const std::vector<int>& users);

// Stacks the real-domain residuals, takes the Kc dominant right-singular
// directions as the mixture, separates and matches preambles.
DetectionReport residual_racma(const std::vector<CMatrix>& residuals, Index kc, const Matrix& preambles,
                               const std::vector<int>& user_ids, const Matrix& x);

}  // namespace edgeview::detectors
