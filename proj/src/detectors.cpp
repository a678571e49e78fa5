#include "edgeview/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "edgeview/airlink.hpp"
#include "edgeview/error.hpp"

namespace edgeview::detectors {

namespace {

Matrix sign_of(const Matrix& m) {
  return m.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
}

void require_full_rank(const CMatrix& h) {
  if (h.cols() == 0) throw Error(ErrorKind::Detection, "no users to detect");
  Eigen::ColPivHouseholderQR<CMatrix> qr(h);
  qr.setThreshold(1e-10);
  if (h.cols() > h.rows() || qr.rank() < h.cols()) {
    throw Error(ErrorKind::Detection, "channel matrix is not full column rank");
  }
}

}  // namespace

Matrix pilot_codebook(int length, int users) {
  if (length < 1 || (length & (length - 1)) != 0) {
    throw Error(ErrorKind::PilotDesign, "pilot length " + std::to_string(length) + " is not a power of two");
  }
  if (users > length) {
    throw Error(ErrorKind::PilotDesign,
                std::to_string(users) + " users exceed " + std::to_string(length) + " orthogonal pilots");
  }
  Matrix h = Matrix::Ones(1, 1);
  while (h.rows() < length) {
    const Index n = h.rows();
    Matrix next(2 * n, 2 * n);
    next << h, h, h, -h;
    h = std::move(next);
  }
  return h.leftCols(users);
}

ChannelEstimate estimate_channels_ls(const CMatrix& y_pilot, const Matrix& pilots, double amplitude,
                                     const CMatrix* truth) {
  const Index np = pilots.rows();
  const Index k = pilots.cols();
  if (k > np) {
    throw Error(ErrorKind::PilotDesign,
                std::to_string(k) + " users exceed pilot length " + std::to_string(np));
  }
  if (y_pilot.cols() != np) throw Error(ErrorKind::Dimension, "pilot block length mismatch");
  const Matrix gram = pilots.transpose() * pilots;
  if ((gram - static_cast<double>(np) * Matrix::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-9 * np) {
    throw Error(ErrorKind::PilotDesign, "pilots are not mutually orthogonal with P^T P = Np I");
  }
  ChannelEstimate est;
  est.pilot_len = static_cast<int>(np);
  est.H_hat = y_pilot * pilots.cast<Complex>() / (static_cast<double>(np) * amplitude);
  if (truth != nullptr) {
    if (truth->rows() != est.H_hat.rows() || truth->cols() != k) {
      throw Error(ErrorKind::Dimension, "true channel shape mismatch");
    }
    est.mse = (est.H_hat - *truth).colwise().squaredNorm().transpose() / static_cast<double>(truth->rows());
  }
  return est;
}

Matrix zf_detect(const CMatrix& y, const CMatrix& h_hat) {
  if (y.rows() != h_hat.rows()) throw Error(ErrorKind::Dimension, "zf_detect: antenna count mismatch");
  require_full_rank(h_hat);
  const CMatrix s = h_hat.colPivHouseholderQr().solve(y);
  return sign_of(s.real()).transpose();
}

Matrix mmse_detect(const CMatrix& y, const CMatrix& h_hat, double sigma2) {
  if (y.rows() != h_hat.rows()) throw Error(ErrorKind::Dimension, "mmse_detect: antenna count mismatch");
  if (h_hat.cols() == 0) throw Error(ErrorKind::Detection, "no users to detect");
  CMatrix gram = h_hat.adjoint() * h_hat;
  gram.diagonal().array() += sigma2;
  const CMatrix s = gram.ldlt().solve(h_hat.adjoint() * y);
  return sign_of(s.real()).transpose();
}

SicResult sic_detect(const CMatrix& y, const CMatrix& h_hat, double sigma2, Equalizer mode, double amplitude) {
  if (y.rows() != h_hat.rows()) throw Error(ErrorKind::Dimension, "sic_detect: antenna count mismatch");
  const Index k = h_hat.cols();
  SicResult out;
  out.decisions = Matrix::Zero(y.cols(), k);
  out.residual = y;
  std::vector<int> remaining(static_cast<std::size_t>(k));
  std::iota(remaining.begin(), remaining.end(), 0);
  std::stable_sort(remaining.begin(), remaining.end(),
                   [&](int a, int b) { return h_hat.col(a).squaredNorm() > h_hat.col(b).squaredNorm(); });
  while (!remaining.empty()) {
    CMatrix hr(h_hat.rows(), static_cast<Index>(remaining.size()));
    for (std::size_t i = 0; i < remaining.size(); ++i) hr.col(static_cast<Index>(i)) = h_hat.col(remaining[i]);
    const Matrix d = mode == Equalizer::Zf ? zf_detect(out.residual, hr) : mmse_detect(out.residual, hr, sigma2);
    const int user = remaining.front();
    out.decisions.col(user) = d.col(0);
    out.residual -= amplitude * h_hat.col(user) * d.col(0).transpose().cast<Complex>();
    out.order.push_back(user);
    out.energy.push_back(out.residual.squaredNorm());
    remaining.erase(remaining.begin());
  }
  return out;
}

double DetectionReport::mean_ber() const { return ber.size() == 0 ? 0.0 : ber.mean(); }

Vector bit_error_rate(const Matrix& decisions, const Matrix& truth, Index preamble_len) {
  if (decisions.rows() != truth.rows() || decisions.cols() != truth.cols()) {
    throw Error(ErrorKind::Dimension, "decision and truth shapes differ");
  }
  const Index payload = truth.rows() - preamble_len;
  if (payload < 1) throw Error(ErrorKind::Dimension, "no payload symbols to score");
  Vector ber(truth.cols());
  for (Index c = 0; c < truth.cols(); ++c) {
    const auto d = decisions.col(c).tail(payload);
    const auto t = truth.col(c).tail(payload);
    ber(c) = static_cast<double>((d.array() != t.array()).count()) / static_cast<double>(payload);
  }
  return ber;
}

DetectionReport score_separation(const racma::SeparationResult& sep, const Matrix& x, Index preamble_len,
                                 const std::vector<int>& users) {
  DetectionReport rep;
  rep.users = users;
  const Index payload = x.rows() - preamble_len;
  rep.decisions = Matrix::Zero(payload, static_cast<Index>(users.size()));
  rep.ber = Vector::Constant(static_cast<Index>(users.size()), 0.5);
  for (std::size_t u = 0; u < users.size(); ++u) {
    const auto it = std::find(sep.assignment.begin(), sep.assignment.end(), users[u]);
    if (it == sep.assignment.end()) continue;
    const auto col = static_cast<Index>(it - sep.assignment.begin());
    const auto idx = static_cast<Index>(u);
    rep.decisions.col(idx) = sep.X_hat.col(col).tail(payload);
    const auto t = x.col(users[u]).tail(payload);
    rep.ber(idx) = static_cast<double>((rep.decisions.col(idx).array() != t.array()).count()) /
                   static_cast<double>(payload);
  }
  return rep;
}

DetectionReport residual_racma(const std::vector<CMatrix>& residuals, Index kc, const Matrix& preambles,
                               const std::vector<int>& user_ids, const Matrix& x) {
  const Index plen = preambles.rows();
  if (kc == 0) {
    DetectionReport rep;
    rep.decisions = Matrix::Zero(x.rows() - plen, 0);
    rep.ber = Vector::Zero(0);
    return rep;
  }
  if (residuals.empty()) throw Error(ErrorKind::InvalidInput, "no residual views");
  Index rows = 0;
  const Index n = residuals.front().cols();
  for (const auto& r : residuals) {
    if (r.cols() != n) throw Error(ErrorKind::Dimension, "residual views must share the frame length");
    rows += 2 * r.rows();
  }
  Matrix stacked(rows, n);
  Index offset = 0;
  for (const auto& r : residuals) {
    stacked.middleRows(offset, 2 * r.rows()) = airlink::stack_real(r);
    offset += 2 * r.rows();
  }
  if (kc > std::min(rows, n)) throw Error(ErrorKind::Dimension, "Kc exceeds the residual rank bound");
  Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeThinV);
  const Matrix g = svd.matrixV().leftCols(kc);
  auto sep = racma::match_preambles(racma::solve_mixture(g, kc), preambles, user_ids);
  return score_separation(sep, x, plen, user_ids);
}

}  // namespace edgeview::detectors
