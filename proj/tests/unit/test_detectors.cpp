#include <doctest.h>

#include <cmath>
#include <random>

#include "edgeview/airlink.hpp"
#include "edgeview/detectors.hpp"
#include "edgeview/error.hpp"
#include "oracles.hpp"

using namespace edgeview;

namespace {

CMatrix random_channel(Index m, Index k, std::mt19937_64& g) {
  CMatrix h(m, k);
  h.real() = oracle::random_gaussian(m, k, g);
  h.imag() = oracle::random_gaussian(m, k, g);
  return h / std::sqrt(2.0);
}

CMatrix noise(Index m, Index n, double variance, std::mt19937_64& g) {
  CMatrix e(m, n);
  e.real() = oracle::random_gaussian(m, n, g);
  e.imag() = oracle::random_gaussian(m, n, g);
  return e * std::sqrt(variance / 2.0);
}

}  // namespace

TEST_SUITE("detectors") {

TEST_CASE("Hadamard pilot book") {
  const Matrix p = detectors::pilot_codebook(256, 24);
  CHECK(p.rows() == 256);
  CHECK(p.cols() == 24);
  CHECK((p.transpose() * p - 256.0 * Matrix::Identity(24, 24)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(detectors::pilot_codebook(250, 24), Error);
  CHECK_THROWS_AS(detectors::pilot_codebook(16, 24), Error);
}

TEST_CASE("least-squares estimate is exact without noise and unbiased with it") {
  std::mt19937_64 g(1);
  const Matrix p = detectors::pilot_codebook(64, 6);
  const CMatrix h = random_channel(8, 6, g);
  const double amp = 0.125;
  const CMatrix y = amp * h * p.transpose().cast<Complex>();
  const auto est = detectors::estimate_channels_ls(y, p, amp, &h);
  CHECK((est.H_hat - h).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(est.mse.maxCoeff() < 1e-24);

  // Error variance per entry: v / (Np amp^2).
  const double v = 0.01;
  double acc = 0.0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto noisy = detectors::estimate_channels_ls(y + noise(8, 64, v, g), p, amp, &h);
    acc += noisy.mse.mean();
  }
  CHECK(acc / reps == doctest::Approx(v / (64.0 * amp * amp)).epsilon(0.05));
}

TEST_CASE("least-squares estimate refuses too many users or bad pilots") {
  Matrix p = Matrix::Ones(4, 5);
  CHECK_THROWS_AS(detectors::estimate_channels_ls(CMatrix::Zero(2, 4), p, 1.0), Error);
  p = Matrix::Ones(4, 2);
  CHECK_THROWS_AS(detectors::estimate_channels_ls(CMatrix::Zero(2, 4), p, 1.0), Error);
}

TEST_CASE("zero-forcing is exact on noiseless data with the true channel") {
  std::mt19937_64 g(2);
  for (int rep = 0; rep < 10; ++rep) {
    const CMatrix h = random_channel(12, 8, g);
    const Matrix x = oracle::random_signs(100, 8, g);
    const CMatrix y = h * x.transpose().cast<Complex>();
    const Matrix d = detectors::zf_detect(y, h);
    CHECK(detectors::bit_error_rate(d, x, 0).maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(detectors::zf_detect(CMatrix::Zero(2, 5), random_channel(2, 3, g)), Error);
}

TEST_CASE("MMSE tends to zero-forcing as the noise vanishes") {
  std::mt19937_64 g(3);
  for (int rep = 0; rep < 20; ++rep) {
    const CMatrix h = random_channel(10, 6, g);
    const Matrix x = oracle::random_signs(80, 6, g);
    const CMatrix y = h * x.transpose().cast<Complex>() + noise(10, 80, 0.3, g);
    CHECK(detectors::mmse_detect(y, h, 1e-12) == detectors::zf_detect(y, h));
  }
}

TEST_CASE("successive cancellation drains a noiseless residual") {
  std::mt19937_64 g(4);
  const CMatrix h = random_channel(10, 5, g);
  const Matrix x = oracle::random_signs(60, 5, g);
  const double amp = 0.5;
  const CMatrix y = amp * h * x.transpose().cast<Complex>();
  for (auto mode : {detectors::Equalizer::Zf, detectors::Equalizer::Mmse}) {
    const auto sic = detectors::sic_detect(y, h, 1e-9, mode, amp);
    CHECK(sic.decisions == x);
    REQUIRE(sic.energy.size() == 5);
    for (std::size_t i = 1; i < sic.energy.size(); ++i) CHECK(sic.energy[i] <= sic.energy[i - 1]);
    CHECK(sic.residual.norm() < 1e-10);
    for (std::size_t i = 1; i < sic.order.size(); ++i) {
      CHECK(h.col(sic.order[i]).norm() <= h.col(sic.order[i - 1]).norm());
    }
  }
}

TEST_CASE("single-user cancellation leaves Y minus h x^T") {
  std::mt19937_64 g(5);
  const CMatrix h = random_channel(4, 1, g);
  const Matrix x = oracle::random_signs(30, 1, g);
  const CMatrix y = h * x.transpose().cast<Complex>() + noise(4, 30, 0.01, g);
  const auto sic = detectors::sic_detect(y, h, 0.01, detectors::Equalizer::Zf);
  CHECK((sic.residual - (y - h * sic.decisions.transpose().cast<Complex>())).norm() < 1e-12);
}

TEST_CASE("bit error rate skips the preamble") {
  Matrix t = Matrix::Ones(10, 2);
  Matrix d = t;
  d(0, 0) = -1;  // inside the preamble
  d(5, 0) = -1;
  d(6, 1) = -1;
  d(7, 1) = -1;
  const Vector ber = detectors::bit_error_rate(d, t, 2);
  CHECK(ber(0) == doctest::Approx(1.0 / 8.0));
  CHECK(ber(1) == doctest::Approx(2.0 / 8.0));
  CHECK_THROWS_AS(detectors::bit_error_rate(d, t, 10), Error);
}

TEST_CASE("unmatched users score one half") {
  racma::SeparationResult sep;
  sep.X_hat = Matrix::Ones(10, 1);
  sep.assignment = {3};
  const Matrix x = Matrix::Ones(10, 5);
  const auto rep = detectors::score_separation(sep, x, 2, {3, 4});
  CHECK(rep.ber(0) == 0.0);
  CHECK(rep.ber(1) == 0.5);
}

}  // TEST_SUITE
