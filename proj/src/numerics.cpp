#include "edgeview/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "edgeview/error.hpp"

namespace edgeview::numerics {

namespace {

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + " contains non-finite entries");
  }
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(Matrix entries, double tolerance) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw Error(ErrorKind::InvalidInput, "symmetric matrix must be square and non-empty");
  }
  require_finite(entries_, "symmetric matrix");
  const double scale = entries_.cwiseAbs().maxCoeff();
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (asym > tolerance * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << "max |S - S^T| = " << asym << " exceeds " << tolerance << " * " << scale;
    throw Error(ErrorKind::SymmetryViolation, os.str());
  }
  entries_ = 0.5 * (entries_ + entries_.transpose()).eval();
}

void normalize_signs(Matrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index arg = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

EigenPairs sym_eig(const SymmetricMatrix& s, Index k) {
  if (k < 1 || k > s.order()) {
    throw Error(ErrorKind::InvalidInput, "sym_eig: k must lie in [1, order]");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s.entries());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidInput, "sym_eig: eigensolver failed");
  }
  // Eigen returns ascending order.
  EigenPairs out;
  out.values = solver.eigenvalues().tail(k).reverse();
  out.vectors = solver.eigenvectors().rightCols(k).rowwise().reverse();
  normalize_signs(out.vectors);
  return out;
}

double default_ridge(const Matrix& y) {
  if (y.rows() == 0) return 0.0;
  return 1e-10 * y.squaredNorm() / static_cast<double>(y.rows());
}

ProjectorFactor projector_factor(const Matrix& y, double ridge, std::string_view label) {
  if (ridge < 0.0) throw Error(ErrorKind::InvalidInput, "ridge must be non-negative");
  if (y.rows() == 0 || y.cols() == 0) throw Error(ErrorKind::InvalidInput, "empty view");
  if (y.rows() > y.cols()) {
    throw Error(ErrorKind::Dimension, std::string(label) + ": more rows than columns");
  }
  require_finite(y, label);

  Matrix gram = y * y.transpose();
  gram.diagonal().array() += ridge;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  const Vector& s = solver.eigenvalues();
  const double smax = std::max(s.maxCoeff(), 0.0);
  const double floor = 1e-13 * smax * static_cast<double>(gram.rows());
  if (smax <= 0.0 || s.minCoeff() <= floor) {
    std::ostringstream os;
    os << label << ": Gram matrix is singular (min eigenvalue " << s.minCoeff() << ", max " << smax
       << ")";
    throw Error(ErrorKind::RankDeficiency, os.str());
  }
  const Matrix& u = solver.eigenvectors();
  ProjectorFactor out;
  out.factor = y.transpose() * (u * s.cwiseSqrt().cwiseInverse().asDiagonal());
  out.gram_inverse = u * s.cwiseInverse().asDiagonal() * u.transpose();
  return out;
}

SymmetricMatrix row_space_projector(const Matrix& y, double ridge, std::string_view label) {
  const ProjectorFactor f = projector_factor(y, ridge, label);
  return SymmetricMatrix(f.factor * f.factor.transpose());
}

GeneralizedEigenPairs gen_sym_eig(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.order() != b.order()) throw Error(ErrorKind::Dimension, "gen_sym_eig: order mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> bsolve(b.entries(), Eigen::EigenvaluesOnly);
  const Vector& bv = bsolve.eigenvalues();
  const double bmax = bv.cwiseAbs().maxCoeff();
  const double bmin = bv.cwiseAbs().minCoeff();
  if (bmax == 0.0 || bmin <= 1e-12 * bmax) {
    throw Error(ErrorKind::PencilDegeneracy, "gen_sym_eig: B is singular");
  }
  if (bv.minCoeff() <= 0.0) {
    throw Error(ErrorKind::PencilDegeneracy, "gen_sym_eig: B is not positive definite");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(a.entries(), b.entries());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::PencilDegeneracy, "gen_sym_eig: factorization failed");
  }
  GeneralizedEigenPairs out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  normalize_signs(out.vectors);
  out.condition = bmax / bmin;
  return out;
}

Index numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++r;
  }
  return r;
}

Matrix orthonormal_basis(const Matrix& a) {
  if (a.cols() == 0 || a.rows() == 0) {
    throw Error(ErrorKind::InvalidInput, "orthonormal_basis: zero-column input");
  }
  require_finite(a, "orthonormal_basis input");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(0) > 0.0 && sv(i) > 1e-12 * sv(0)) ++r;
  }
  if (r == 0) throw Error(ErrorKind::InvalidInput, "orthonormal_basis: zero matrix");
  return svd.matrixU().leftCols(r);
}

std::vector<double> principal_angles(const Matrix& u, const Matrix& v) {
  if (u.cols() == 0 || v.cols() == 0) {
    throw Error(ErrorKind::InvalidInput, "principal_angles: zero-column input");
  }
  if (u.rows() != v.rows()) throw Error(ErrorKind::Dimension, "principal_angles: row mismatch");
  Matrix qu = orthonormal_basis(u);
  Matrix qv = orthonormal_basis(v);
  if (qv.cols() > qu.cols()) std::swap(qu, qv);

  // Cosines lose resolution for small angles, so those come from the sines
  // of the component of span(qv) orthogonal to span(qu).
  Eigen::BDCSVD<Matrix> cos_svd(qu.transpose() * qv);
  const Vector& cosines = cos_svd.singularValues();  // descending -> angles ascending
  const Matrix residual = qv - qu * (qu.transpose() * qv);
  Eigen::BDCSVD<Matrix> sin_svd(residual);
  Vector sines = sin_svd.singularValues().reverse();  // ascending

  const Index count = qv.cols();
  std::vector<double> angles;
  angles.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    const double s = i < sines.size() ? std::clamp(sines(i), 0.0, 1.0) : 0.0;
    const double theta = c > std::numbers::sqrt2 / 2.0 ? std::asin(s) : std::acos(c);
    angles.push_back(theta);
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

double max_principal_angle(const Matrix& u, const Matrix& v) {
  const auto angles = principal_angles(u, v);
  return angles.back();
}

}  // namespace edgeview::numerics
