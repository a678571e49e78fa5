#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

EigenPairs jacobi_eig(Matrix a, double tol, int max_sweeps) {
  const Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) < tol * std::max(1.0, a.norm())) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) > a(j, j); });
  EigenPairs out{Vector(n), Matrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    out.values(i) = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

double uma_path_loss(double d2d, bool los, double fc_ghz, double h_bs, double h_ut) {
  const double d3d = std::sqrt(d2d * d2d + (h_bs - h_ut) * (h_bs - h_ut));
  const double d_bp = 4.0 * (h_bs - 1.0) * (h_ut - 1.0) * fc_ghz * 1e9 / 299792458.0;
  double pl_los;
  if (d2d <= d_bp) {
    pl_los = 28.0 + 22.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
  } else {
    pl_los = 28.0 + 40.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) -
             9.0 * std::log10(d_bp * d_bp + (h_bs - h_ut) * (h_bs - h_ut));
  }
  if (los) return pl_los;
  const double pl_nlos = 13.54 + 39.08 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) - 0.6 * (h_ut - 1.5);
  return std::max(pl_los, pl_nlos);
}

double uma_los_probability(double d2d) {
  if (d2d <= 18.0) return 1.0;
  return 18.0 / d2d + std::exp(-d2d / 63.0) * (1.0 - 18.0 / d2d);
}

Index signed_permutation_errors(const Matrix& estimate, const Matrix& truth) {
  const Index k = truth.cols();
  std::vector<Index> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  Index best = estimate.size();
  do {
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
      Index errors = 0;
      for (Index c = 0; c < k; ++c) {
        const double s = (mask >> c) & 1u ? -1.0 : 1.0;
        errors += ((s * estimate.col(perm[c])).array() != truth.col(c).array()).count();
      }
      best = std::min(best, errors);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Matrix random_signs(Index rows, Index cols, std::mt19937_64& g) {
  std::bernoulli_distribution coin(0.5);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = coin(g) ? 1.0 : -1.0;
  return m;
}

Matrix random_gaussian(Index rows, Index cols, std::mt19937_64& g) {
  std::normal_distribution<double> n01;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = n01(g);
  return m;
}

Matrix conditioned_mixing(Index k, double max_cond, std::mt19937_64& g) {
  const Matrix a = random_gaussian(k, k, g);
  const Matrix b = random_gaussian(k, k, g);
  const Matrix u = a.householderQr().householderQ();
  const Matrix v = b.householderQr().householderQ();
  std::uniform_real_distribution<double> sv(1.0, max_cond);
  Vector s(k);
  for (Index i = 0; i < k; ++i) s(i) = sv(g);
  s(0) = 1.0;
  return u * s.asDiagonal() * v.transpose();
}

Uplink synthetic_uplink(const UplinkSpec& spec, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> n01;
  Uplink out;
  out.kc = spec.kc;
  out.owner.assign(static_cast<std::size_t>(spec.kc), -1);
  for (int l = 0; l < spec.L; ++l) {
    const int count = spec.private_counts.empty() ? spec.kp : spec.private_counts[static_cast<std::size_t>(l)];
    out.owner.insert(out.owner.end(), static_cast<std::size_t>(count), l);
  }
  const auto ks = static_cast<Index>(out.owner.size());
  out.X = random_signs(spec.N, ks, g);
  const double amp = 1.0 / std::sqrt(static_cast<double>(spec.N));
  for (int l = 0; l < spec.L; ++l) {
    CMatrix h = CMatrix::Zero(spec.M, ks);
    Matrix snr = Matrix::Zero(ks, 1);
    for (Index k = 0; k < ks; ++k) {
      double db;
      bool present = true;
      if (k < spec.kc) {
        db = spec.edge_db;
      } else {
        const bool own = out.owner[static_cast<std::size_t>(k)] == l;
        db = own ? spec.own_db : spec.other_db;
        present = own || spec.cross_talk;
      }
      if (!present || !std::isfinite(db)) continue;
      const double p = std::pow(10.0, db / 10.0);
      snr(k, 0) = p;
      const double s = std::sqrt(p / (2.0 * spec.M));
      for (Index m = 0; m < spec.M; ++m) h(m, k) = edgeview::Complex(s * n01(g), s * n01(g));
    }
    CMatrix y = amp * h * out.X.transpose().cast<edgeview::Complex>();
    if (!spec.noiseless) {
      const double s = std::sqrt(1.0 / (2.0 * spec.N));
      for (Index j = 0; j < y.cols(); ++j)
        for (Index i = 0; i < y.rows(); ++i) y(i, j) += edgeview::Complex(s * n01(g), s * n01(g));
    }
    out.views.complex_views.push_back(y);
    out.views.views.push_back(edgeview::airlink::stack_real(y));
    out.H.push_back(std::move(h));
    out.snr.push_back(std::move(snr));
  }
  out.views.sigma2 = spec.noiseless ? 0.0 : 1.0;
  return out;
}

}  // namespace oracle
