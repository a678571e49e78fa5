#include "edgeview/racma.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "edgeview/error.hpp"
#include "edgeview/numerics.hpp"

namespace edgeview::racma {

namespace {

constexpr double kRankTolerance = 1e-8;
constexpr double kAngleFloor = 1e-12;

Index svec_size(Index k) { return k * (k + 1) / 2; }

Matrix sign_of(const Matrix& m) {
  return m.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
}

double off_mass(const std::vector<Matrix>& mats) {
  double off = 0.0;
  double total = 0.0;
  for (const auto& m : mats) {
    total += m.squaredNorm();
    off += m.squaredNorm() - m.diagonal().squaredNorm();
  }
  return total > 0.0 ? off / total : 0.0;
}

struct JointResult {
  Matrix rotation;
  int sweeps = 0;
  double off = 0.0;
};

// Orthogonal Jacobi joint diagonalization with 2 x 2 Givens rotations.
JointResult joint_diagonalize(std::vector<Matrix> mats, const SolveOptions& opt) {
  const Index k = mats.front().rows();
  JointResult out;
  out.rotation = Matrix::Identity(k, k);
  bool rotated = true;
  while (rotated) {
    out.off = off_mass(mats);
    if (out.off < opt.off_tolerance) return out;
    if (out.sweeps >= opt.max_sweeps) {
      std::ostringstream os;
      os << "joint diagonalization did not converge in " << opt.max_sweeps << " sweeps (off-diagonal mass "
         << out.off << ")";
      throw ConditioningError(os.str(), out.off);
    }
    ++out.sweeps;
    rotated = false;
    for (Index p = 0; p + 1 < k; ++p) {
      for (Index q = p + 1; q < k; ++q) {
        double g11 = 0.0, g12 = 0.0, g22 = 0.0;
        for (const auto& m : mats) {
          const double h1 = m(p, p) - m(q, q);
          const double h2 = m(p, q) + m(q, p);
          g11 += h1 * h1;
          g12 += h1 * h2;
          g22 += h2 * h2;
        }
        const double ton = g11 - g22;
        const double toff = 2.0 * g12;
        const double theta = 0.5 * std::atan2(toff, ton + std::hypot(ton, toff));
        if (std::abs(theta) <= kAngleFloor) continue;
        rotated = true;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (auto& m : mats) {
          const Vector rp = m.row(p);
          const Vector rq = m.row(q);
          m.row(p) = c * rp + s * rq;
          m.row(q) = -s * rp + c * rq;
          const Vector cp = m.col(p);
          const Vector cq = m.col(q);
          m.col(p) = c * cp + s * cq;
          m.col(q) = -s * cp + c * cq;
        }
        const Vector vp = out.rotation.col(p);
        const Vector vq = out.rotation.col(q);
        out.rotation.col(p) = c * vp + s * vq;
        out.rotation.col(q) = -s * vp + c * vq;
      }
    }
  }
  out.off = off_mass(mats);
  return out;
}

// Separating vectors (columns) in the whitened coordinates.
Matrix separating_vectors(const Matrix& gw, Index k, const SolveOptions& opt, int& sweeps, double& off) {
  sweeps = 0;
  off = 0.0;
  if (k == 1) {
    return Matrix::Constant(1, 1, 1.0 / std::sqrt(gw.col(0).squaredNorm() / static_cast<double>(gw.rows())));
  }
  Matrix sys = build_quadratic_system(gw);
  // The all-ones target splits into its mean (scale) and a homogeneous part;
  // the centred rows carry the homogeneous equations.
  sys.rowwise() -= sys.colwise().mean();
  Eigen::BDCSVD<Matrix> svd(sys, Eigen::ComputeThinV);
  const Matrix kernel = svd.matrixV().rightCols(k);  // smallest singular directions

  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) basis.push_back(unsvec(kernel.col(i), k));

  const Vector ident = svec(Matrix::Identity(k, k));
  const Matrix m0 = unsvec(kernel * (kernel.transpose() * ident), k);
  Eigen::LLT<Matrix> llt(m0);
  if (llt.info() != Eigen::Success) {
    throw ConditioningError("no positive definite element in the solution span", 0.0);
  }

  if (k == 2) {
    // Orthogonal complement of M0 inside the two-dimensional span.
    const Vector y0 = svec(m0).normalized();
    Vector best = Vector::Zero(svec_size(k));
    for (Index i = 0; i < k; ++i) {
      Vector r = kernel.col(i) - y0 * y0.dot(kernel.col(i));
      if (r.norm() > best.norm()) best = r;
    }
    const auto pencil = numerics::gen_sym_eig(numerics::SymmetricMatrix(unsvec(best, k), 1e-8),
                                              numerics::SymmetricMatrix(m0, 1e-8));
    return m0 * pencil.vectors;
  }

  const Matrix l0 = llt.matrixL();
  std::vector<Matrix> whitened;
  whitened.reserve(basis.size());
  for (const auto& m : basis) {
    const Matrix t = llt.matrixL().solve(m);
    Matrix w = llt.matrixL().solve(t.transpose()).transpose();
    whitened.push_back(0.5 * (w + w.transpose()));
  }
  const JointResult jr = joint_diagonalize(std::move(whitened), opt);
  sweeps = jr.sweeps;
  off = jr.off;
  return l0 * jr.rotation;
}

}  // namespace

Vector svec(const Matrix& s) {
  const Index k = s.rows();
  Vector v(svec_size(k));
  Index idx = 0;
  for (Index i = 0; i < k; ++i)
    for (Index j = i; j < k; ++j) v(idx++) = i == j ? s(i, i) : std::numbers::sqrt2 * s(i, j);
  return v;
}

Matrix unsvec(const Vector& v, Index order) {
  if (v.size() != svec_size(order)) throw Error(ErrorKind::Dimension, "unsvec: length mismatch");
  Matrix s(order, order);
  Index idx = 0;
  for (Index i = 0; i < order; ++i) {
    for (Index j = i; j < order; ++j) {
      const double e = v(idx++);
      if (i == j) {
        s(i, i) = e;
      } else {
        s(i, j) = e / std::numbers::sqrt2;
        s(j, i) = s(i, j);
      }
    }
  }
  return s;
}

Matrix build_quadratic_system(const Matrix& g) {
  const Index n = g.rows();
  const Index k = g.cols();
  if (k < 1) throw Error(ErrorKind::InvalidInput, "build_quadratic_system: K must be at least 1");
  if (n < svec_size(k)) {
    throw Error(ErrorKind::UnderdeterminedSystem, "N = " + std::to_string(n) + " is below K(K+1)/2 = " +
                                                      std::to_string(svec_size(k)));
  }
  Matrix sys(n, svec_size(k));
  for (Index r = 0; r < n; ++r) {
    Index idx = 0;
    for (Index i = 0; i < k; ++i)
      for (Index j = i; j < k; ++j)
        sys(r, idx++) = i == j ? g(r, i) * g(r, i) : std::numbers::sqrt2 * g(r, i) * g(r, j);
  }
  return sys;
}

SeparationResult solve_mixture(const Matrix& g, Index k, const SolveOptions& options) {
  if (k < 1 || g.cols() != k) {
    throw Error(ErrorKind::Dimension, "solve_mixture: G must have exactly K columns");
  }
  if (!g.allFinite()) throw Error(ErrorKind::InvalidInput, "solve_mixture: non-finite entries");
  const Index n = g.rows();
  if (n < svec_size(k)) {
    throw Error(ErrorKind::UnderdeterminedSystem, "N = " + std::to_string(n) + " is below K(K+1)/2");
  }
  Eigen::BDCSVD<Matrix> svd(g, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(0) > 0.0 && sv(i) > kRankTolerance * sv(0)) ++rank;
  if (rank < k) {
    throw Error(ErrorKind::DegenerateMixture,
                "G has numerical rank " + std::to_string(rank) + " < K = " + std::to_string(k));
  }
  const Matrix gw = svd.matrixU() * std::sqrt(static_cast<double>(n));

  SeparationResult res;
  const Matrix w = separating_vectors(gw, k, options, res.sweeps, res.off_diagonal);
  res.X_hat = sign_of(gw * w);

  for (int pass = 0; pass < options.refinement_passes; ++pass) {
    const Eigen::ColPivHouseholderQR<Matrix> qr(res.X_hat);
    if (qr.rank() < k) break;
    const Matrix f = qr.solve(gw);
    // X = Gw F^{-1}, solved as F^T X^T = Gw^T.
    const Eigen::FullPivLU<Matrix> lu(f.transpose());
    if (!lu.isInvertible()) break;
    Matrix next = sign_of(lu.solve(gw.transpose()).transpose());
    if (next == res.X_hat) break;
    res.X_hat = std::move(next);
  }

  res.F_hat = res.X_hat.colPivHouseholderQr().solve(g);
  const double gnorm = g.norm();
  res.residual = gnorm > 0.0 ? (g - res.X_hat * res.F_hat).norm() / gnorm : 0.0;
  res.assignment.assign(static_cast<std::size_t>(k), -1);
  res.confidence = Vector::Zero(k);
  return res;
}

SeparationResult match_preambles(SeparationResult result, const Matrix& preambles,
                                 const std::vector<int>& user_ids, double threshold) {
  const Index k = result.X_hat.cols();
  const Index plen = preambles.rows();
  const auto cands = static_cast<Index>(user_ids.size());
  if (preambles.cols() != cands) throw Error(ErrorKind::Dimension, "one preamble per candidate user");
  if (plen < 1 || plen > result.X_hat.rows()) throw Error(ErrorKind::Dimension, "invalid preamble length");

  Matrix corr = Matrix::Zero(k, cands);
  for (Index c = 0; c < k; ++c) {
    const auto head = result.X_hat.col(c).head(plen);
    for (Index j = 0; j < cands; ++j) {
      const double denom = head.norm() * preambles.col(j).norm();
      corr(c, j) = denom > 0.0 ? head.dot(preambles.col(j)) / denom : 0.0;
    }
  }
  result.assignment.assign(static_cast<std::size_t>(k), -1);
  result.confidence = Vector::Zero(k);
  std::vector<bool> col_used(static_cast<std::size_t>(k), false);
  std::vector<bool> cand_used(static_cast<std::size_t>(cands), false);
  for (Index step = 0; step < std::min(k, cands); ++step) {
    double best = -1.0;
    Index bc = -1, bj = -1;
    for (Index c = 0; c < k; ++c) {
      if (col_used[static_cast<std::size_t>(c)]) continue;
      for (Index j = 0; j < cands; ++j) {
        if (cand_used[static_cast<std::size_t>(j)]) continue;
        if (std::abs(corr(c, j)) > best) {
          best = std::abs(corr(c, j));
          bc = c;
          bj = j;
        }
      }
    }
    if (bc < 0 || best < threshold) break;
    col_used[static_cast<std::size_t>(bc)] = true;
    cand_used[static_cast<std::size_t>(bj)] = true;
    result.assignment[static_cast<std::size_t>(bc)] = user_ids[static_cast<std::size_t>(bj)];
    result.confidence(bc) = best;
    if (corr(bc, bj) < 0.0) {
      result.X_hat.col(bc) *= -1.0;
      result.F_hat.row(bc) *= -1.0;
    }
  }
  return result;
}

SeparationResult resolve_ambiguity(SeparationResult result, const Matrix& preambles,
                                   const std::vector<int>& user_ids, double threshold) {
  SeparationResult out = match_preambles(std::move(result), preambles, user_ids, threshold);
  std::ostringstream os;
  bool missing = false;
  for (std::size_t c = 0; c < out.assignment.size(); ++c) {
    if (out.assignment[c] < 0) {
      os << (missing ? ", " : "") << c + 1;
      missing = true;
    }
  }
  if (missing) {
    throw Error(ErrorKind::UnresolvedAmbiguity, "no preamble correlates above threshold for column(s) " + os.str());
  }
  return out;
}

}  // namespace edgeview::racma
