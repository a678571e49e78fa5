#include "edgeview/gcca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <spdlog/spdlog.h>

#include "edgeview/error.hpp"
#include "edgeview/kernels.hpp"

namespace edgeview::gcca {

namespace {

constexpr double kTieTolerance = 1e-6;
constexpr double kRankTolerance = 1e-8;

void check_views(const airlink::ViewSet& views) {
  if (views.views.empty()) throw Error(ErrorKind::InvalidInput, "no views supplied");
  const Index n = views.frame_length();
  for (const auto& v : views.views) {
    if (v.cols() != n) throw Error(ErrorKind::Dimension, "views must share the frame length");
  }
}

std::string view_label(std::size_t i) { return "view " + std::to_string(i + 1); }

double ridge_for(const Matrix& y, std::optional<double> ridge) {
  return ridge.value_or(numerics::default_ridge(y));
}

Matrix stack_columns(const std::vector<Matrix>& blocks, Index rows) {
  Index width = 0;
  for (const auto& b : blocks) width += b.cols();
  Matrix out(rows, width);
  Index offset = 0;
  for (const auto& b : blocks) {
    out.middleCols(offset, b.cols()) = b;
    offset += b.cols();
  }
  return out;
}

Matrix stack_users(const CMatrix& h, const std::vector<int>& users) {
  CMatrix sel(h.rows(), static_cast<Index>(users.size()));
  for (std::size_t i = 0; i < users.size(); ++i) sel.col(static_cast<Index>(i)) = h.col(users[i]);
  return airlink::stack_real(sel);
}

Matrix select_columns(const Matrix& x, const std::vector<int>& cols) {
  Matrix out(x.rows(), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Index>(i)) = x.col(cols[i]);
  return out;
}

}  // namespace

numerics::SymmetricMatrix build_aggregate(const airlink::ViewSet& views, std::optional<double> ridge,
                                          int threads) {
  check_views(views);
  return numerics::SymmetricMatrix(kernels::aggregate_parallel(views.views, ridge, threads));
}

GccaSolution maxvar(const airlink::ViewSet& views, Index kc, std::optional<double> ridge) {
  check_views(views);
  const Index n = views.frame_length();
  Index min_rows = n;
  for (const auto& v : views.views) min_rows = std::min(min_rows, v.rows());
  if (kc < 1 || kc > min_rows) {
    throw Error(ErrorKind::Dimension,
                "Kc = " + std::to_string(kc) + " outside [1, " + std::to_string(min_rows) + "]");
  }

  std::vector<numerics::ProjectorFactor> factors;
  factors.reserve(views.views.size());
  for (std::size_t i = 0; i < views.views.size(); ++i) {
    const Matrix& y = views.views[i];
    factors.push_back(numerics::projector_factor(y, ridge_for(y, ridge), view_label(i)));
  }

  GccaSolution sol;
  Index width = 0;
  for (const auto& f : factors) width += f.factor.cols();

  bool dense = width >= n;
  if (!dense) {
    std::vector<Matrix> blocks;
    blocks.reserve(factors.size());
    for (const auto& f : factors) blocks.push_back(f.factor);
    const Matrix b = stack_columns(blocks, n);
    const Matrix gram = b.transpose() * b;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::InvalidInput, "maxvar: eigensolver failed");
    sol.eigenvalues = solver.eigenvalues().reverse();
    const Matrix v = solver.eigenvectors().rowwise().reverse().leftCols(kc);
    const Vector top = sol.eigenvalues.head(kc);
    if (top.minCoeff() > 1e-10) {
      sol.G = b * v * top.cwiseSqrt().cwiseInverse().asDiagonal();
    } else {
      dense = true;
    }
  }
  if (dense) {
    const Matrix a = kernels::aggregate_serial(views.views, ridge);
    const auto pairs = numerics::sym_eig(numerics::SymmetricMatrix(a), std::min(n, width));
    sol.eigenvalues = pairs.values;
    sol.G = pairs.vectors.leftCols(kc);
  }
  numerics::normalize_signs(sol.G);

  if (kc < sol.eigenvalues.size() && sol.eigenvalues(kc - 1) - sol.eigenvalues(kc) < kTieTolerance) {
    spdlog::warn("eigenvalues {} and {} of the aggregate are within {:g}; keeping Kc = {}", kc, kc + 1,
                 kTieTolerance, kc);
  }

  sol.objective = 0.0;
  for (std::size_t i = 0; i < views.views.size(); ++i) {
    const Matrix& y = views.views[i];
    Matrix q = factors[i].gram_inverse * (y * sol.G);
    sol.objective += (y.transpose() * q - sol.G).squaredNorm();
    sol.Q.push_back(std::move(q));
  }
  canonical_correlations(sol, views);
  return sol;
}

void canonical_correlations(GccaSolution& solution, const airlink::ViewSet& views) {
  const auto l = static_cast<int>(views.views.size());
  if (static_cast<int>(solution.Q.size()) != l) {
    throw Error(ErrorKind::Dimension, "solution and views disagree on the number of views");
  }
  const Index kc = solution.components();
  std::vector<Matrix> proj;
  proj.reserve(static_cast<std::size_t>(l));
  for (int v = 0; v < l; ++v) {
    Matrix p = views.views[static_cast<std::size_t>(v)].transpose() * solution.Q[static_cast<std::size_t>(v)];
    for (Index i = 0; i < kc; ++i) {
      const double norm = p.col(i).norm();
      if (!(norm > 1e-14)) {
        throw Error(ErrorKind::DegenerateComponent, "component " + std::to_string(i + 1) + " vanishes in " +
                                                        view_label(static_cast<std::size_t>(v)));
      }
      p.col(i) /= norm;
    }
    proj.push_back(std::move(p));
  }
  solution.pairs.clear();
  for (int a = 0; a < l; ++a)
    for (int b = a + 1; b < l; ++b) solution.pairs.emplace_back(a, b);
  solution.rho_pairs.resize(kc, static_cast<Index>(solution.pairs.size()));
  for (std::size_t p = 0; p < solution.pairs.size(); ++p) {
    const auto [a, b] = solution.pairs[p];
    const auto& pa = proj[static_cast<std::size_t>(a)];
    const auto& pb = proj[static_cast<std::size_t>(b)];
    for (Index i = 0; i < kc; ++i) solution.rho_pairs(i, static_cast<Index>(p)) = pa.col(i).dot(pb.col(i));
  }
  solution.rho_avg = solution.pairs.empty() ? Vector::Ones(kc) : Vector(solution.rho_pairs.rowwise().mean());
}

Index estimate_common_dim(const Vector& rho_avg, double rho_th) {
  return static_cast<Index>(std::count_if(rho_avg.begin(), rho_avg.end(), [&](double r) { return r > rho_th; }));
}

Partition partition_of(const scenario::ChannelSet& channels) {
  Partition p;
  p.private_of.resize(static_cast<std::size_t>(channels.num_bs()));
  for (const auto& u : channels.users) {
    if (u.role == scenario::Role::Edge) {
      p.common.push_back(u.user_id);
    } else {
      p.private_of.at(static_cast<std::size_t>(u.serving_bs)).push_back(u.user_id);
    }
  }
  return p;
}

IdentifiabilityReport check_identifiability(const airlink::FrameSet& frames,
                                            const scenario::ChannelSet& channels,
                                            const Partition& partition) {
  const auto l = static_cast<int>(partition.private_of.size());
  if (l != channels.num_bs()) throw Error(ErrorKind::Dimension, "partition and channels disagree on L");
  IdentifiabilityReport rep;
  rep.w_full_rank = true;
  for (int v = 0; v < l; ++v) {
    std::vector<int> users = partition.common;
    const auto& priv = partition.private_of[static_cast<std::size_t>(v)];
    users.insert(users.end(), priv.begin(), priv.end());
    const Matrix w = stack_users(channels.H[static_cast<std::size_t>(v)], users);
    const Index rank = numerics::numerical_rank(w, kRankTolerance);
    rep.w_rank.push_back(rank);
    rep.w_cols.push_back(w.cols());
    if (rank < w.cols()) rep.w_full_rank = false;
  }

  const Index n = frames.frame_length();
  const auto kc = static_cast<Index>(partition.common.size());
  const Matrix xc = select_columns(frames.X, partition.common);
  std::vector<Matrix> xp;
  std::vector<Index> offset;
  Index cols = (l - 1) * kc;
  for (int v = 0; v < l; ++v) {
    xp.push_back(select_columns(frames.X, partition.private_of[static_cast<std::size_t>(v)]));
    offset.push_back(cols);
    cols += xp.back().cols();
  }
  Matrix vmat = Matrix::Zero((l - 1) * n, cols);
  for (int r = 0; r < l - 1; ++r) {
    const Index row = r * n;
    vmat.block(row, r * kc, n, kc) = -xc;
    vmat.block(row, offset[0], n, xp[0].cols()) = xp[0];
    const auto v = static_cast<std::size_t>(r + 1);
    vmat.block(row, offset[v], n, xp[v].cols()) = -xp[v];
  }
  rep.v_cols = cols;
  rep.v_rank = cols == 0 ? 0 : numerics::numerical_rank(vmat, kRankTolerance);
  rep.v_full_rank = rep.v_rank == cols;
  return rep;
}

SnrDiagnostic eig_snr_diagnostic(const GccaSolution& solution, const scenario::ChannelSet& channels,
                                 const std::vector<int>& bs) {
  const int ks = channels.num_users();
  Vector eta(ks);
  if (bs.empty()) {
    eta = channels.eta;
  } else {
    eta.setZero();
    for (int b : bs) eta += channels.r.col(b);
  }
  SnrDiagnostic out;
  out.order.resize(static_cast<std::size_t>(ks));
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(), [&](int a, int b) { return eta(a) > eta(b); });
  const Index count = std::min<Index>(ks, solution.eigenvalues.size());
  out.eigenvalues = solution.eigenvalues.head(count);
  out.predicted.resize(count);
  for (Index i = 0; i < count; ++i) out.predicted(i) = eta(out.order[static_cast<std::size_t>(i)]);
  out.gap = (out.eigenvalues - out.predicted).cwiseAbs();
  const Index kc = solution.components();
  if (kc >= 1 && kc < solution.eigenvalues.size()) {
    out.spectral_gap = solution.eigenvalues(kc - 1) - solution.eigenvalues(kc);
  }
  return out;
}

}  // namespace edgeview::gcca
