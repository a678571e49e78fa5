#include "edgeview/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include <omp.h>

#include "edgeview/error.hpp"
#include "edgeview/numerics.hpp"

namespace edgeview::kernels {

namespace {

void check_views(std::span<const Matrix> views) {
  if (views.empty()) throw Error(ErrorKind::InvalidInput, "no views supplied");
  const Index n = views.front().cols();
  for (const auto& v : views) {
    if (v.cols() != n) throw Error(ErrorKind::Dimension, "views must share the column count");
  }
}

std::string view_label(std::size_t i) { return "view " + std::to_string(i + 1); }

}  // namespace

int default_workers() {
  if (const char* env = std::getenv("EDGEVIEW_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1, omp_get_max_threads());
}

Matrix aggregate_serial(std::span<const Matrix> views, std::optional<double> ridge) {
  check_views(views);
  const Index n = views.front().cols();
  Matrix a = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < views.size(); ++i) {
    const Matrix& y = views[i];
    const double r = ridge.value_or(numerics::default_ridge(y));
    Matrix gram = y * y.transpose();
    gram.diagonal().array() += r;
    Eigen::LDLT<Matrix> ldlt(gram);
    const Vector d = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-13 * d.cwiseAbs().maxCoeff() * gram.rows()) {
      throw Error(ErrorKind::RankDeficiency, view_label(i) + ": Gram matrix is singular");
    }
    a.noalias() += y.transpose() * ldlt.solve(y);
  }
  return 0.5 * (a + a.transpose());
}

Matrix aggregate_parallel(std::span<const Matrix> views, std::optional<double> ridge, int threads) {
  check_views(views);
  const Index n = views.front().cols();

  std::vector<Matrix> factors;
  factors.reserve(views.size());
  Index width = 0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const double r = ridge.value_or(numerics::default_ridge(views[i]));
    factors.push_back(numerics::projector_factor(views[i], r, view_label(i)).factor);
    width += factors.back().cols();
  }
  Matrix stacked(n, width);
  Index offset = 0;
  for (const auto& f : factors) {
    stacked.middleCols(offset, f.cols()) = f;
    offset += f.cols();
  }

  Matrix a(n, n);
  constexpr Index kTile = 64;
  const Index tiles = (n + kTile - 1) / kTile;
  const int workers = threads > 0 ? threads : default_workers();
  // Each tile owns a disjoint block of columns, so writes never alias.
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (Index t = 0; t < tiles; ++t) {
    const Index c0 = t * kTile;
    const Index cw = std::min(kTile, n - c0);
    a.middleCols(c0, cw).noalias() = stacked * stacked.middleRows(c0, cw).transpose();
  }
  return 0.5 * (a + a.transpose());
}

}  // namespace edgeview::kernels
