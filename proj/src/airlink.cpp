#include "edgeview/airlink.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "edgeview/error.hpp"

namespace edgeview::airlink {

namespace {

constexpr char kViewMagic[4] = {'E', 'D', 'G', 'V'};

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error(ErrorKind::Io, "truncated dump");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

void put_matrix(std::ostream& os, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) put_f64(os, m(i, j));
}

Matrix get_matrix(std::istream& is, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = get_f64(is);
  return m;
}

}  // namespace

ViewSet ViewSet::subset(const std::vector<int>& bs) const {
  ViewSet out;
  out.sigma2 = sigma2;
  for (int b : bs) {
    out.views.push_back(views.at(static_cast<std::size_t>(b)));
    if (!complex_views.empty()) out.complex_views.push_back(complex_views.at(static_cast<std::size_t>(b)));
  }
  return out;
}

Vector registered_preamble(std::uint64_t seed, int user_id, int length) {
  Rng rng = Rng(seed).substream(Stream::Preamble, {static_cast<std::uint64_t>(user_id)});
  Vector p(length);
  for (int i = 0; i < length; ++i) p(i) = rng.sign();
  return p;
}

FrameSet generate_frames(const scenario::ScenarioConfig& config, int num_users, const Rng& rng) {
  if (config.N <= num_users + config.preamble_len) {
    throw Error(ErrorKind::Configuration, "frame length must exceed K_s + preamble_len");
  }
  FrameSet f;
  f.preamble_len = config.preamble_len;
  f.X.resize(config.N, num_users);
  f.preambles.resize(config.preamble_len, num_users);
  Rng payload = rng.substream(Stream::Payload);
  for (int k = 0; k < num_users; ++k) {
    f.preambles.col(k) = registered_preamble(config.seed, k, config.preamble_len);
    f.X.col(k).head(config.preamble_len) = f.preambles.col(k);
    for (int n = config.preamble_len; n < config.N; ++n) f.X(n, k) = payload.sign();
  }
  return f;
}

namespace {

std::vector<int> adjacent_bs(const Matrix& alpha_row_holder, int user, int count) {
  const Index l = alpha_row_holder.cols();
  std::vector<int> order(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return alpha_row_holder(user, a) > alpha_row_holder(user, b); });
  order.resize(static_cast<std::size_t>(std::min<Index>(count, l)));
  return order;
}

}  // namespace

double calibrate_noise(const scenario::ChannelSet& channels, double target_snr_dB) {
  const auto edges = channels.edge_users();
  if (edges.empty()) throw Error(ErrorKind::Calibration, "no edge users to calibrate against");
  double total = 0.0;
  int count = 0;
  for (int u : edges) {
    for (int b : adjacent_bs(channels.alpha, u, 3)) {
      total += channels.alpha(u, b);
      ++count;
    }
  }
  const double pe = total / count;
  return pe / std::pow(10.0, target_snr_dB / 10.0);
}

double reference_edge_power(const scenario::ScenarioConfig& config, scenario::Point position) {
  const auto bs = scenario::bs_positions(config);
  std::vector<double> gains;
  for (const auto& b : bs) {
    const double d3d = std::hypot(scenario::distance(position, b), config.h_bs_m - config.h_ut_m);
    const double pl = scenario::path_loss_dB(d3d, false, config);
    gains.push_back(std::pow(10.0, (config.tx_power_dBm - pl) / 10.0));
  }
  std::sort(gains.begin(), gains.end(), std::greater<>());
  const std::size_t n = std::min<std::size_t>(3, gains.size());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += gains[i];
  return total / static_cast<double>(n);
}

double symbol_amplitude(Index frame_length) { return 1.0 / std::sqrt(static_cast<double>(frame_length)); }

CMatrix complex_noise(Index rows, Index cols, double variance, Rng& rng) {
  const double s = std::sqrt(variance / 2.0);
  CMatrix n(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      n(i, j) = Complex(s * re, s * im);
    }
  return n;
}

ViewSet synthesize_rx(const scenario::ChannelSet& channels, const FrameSet& frames, double sigma2,
                      const Rng& rng) {
  if (sigma2 < 0.0) throw Error(ErrorKind::InvalidInput, "sigma2 must be non-negative");
  if (frames.num_users() != channels.num_users()) {
    throw Error(ErrorKind::Dimension, "frame and channel user counts differ");
  }
  const Index n = frames.frame_length();
  const double amp = symbol_amplitude(n);
  ViewSet out;
  out.sigma2 = sigma2;
  const CMatrix xt = frames.X.transpose().cast<Complex>() * amp;
  for (int l = 0; l < channels.num_bs(); ++l) {
    const CMatrix& h = channels.H[static_cast<std::size_t>(l)];
    CMatrix y = h * xt;
    if (sigma2 > 0.0) {
      Rng noise = rng.substream(Stream::Noise, {static_cast<std::uint64_t>(l)});
      y += complex_noise(h.rows(), n, sigma2 / static_cast<double>(n), noise);
    }
    out.views.push_back(stack_real(y));
    out.complex_views.push_back(std::move(y));
  }
  return out;
}

Matrix stack_real(const CMatrix& y) {
  Matrix out(2 * y.rows(), y.cols());
  out.topRows(y.rows()) = y.real();
  out.bottomRows(y.rows()) = y.imag();
  return out;
}

CMatrix unstack_real(const Matrix& y) {
  if (y.rows() % 2 != 0) throw Error(ErrorKind::Dimension, "stacked matrix needs an even row count");
  const Index m = y.rows() / 2;
  CMatrix out(m, y.cols());
  out.real() = y.topRows(m);
  out.imag() = y.bottomRows(m);
  return out;
}

void write_dump(const std::filesystem::path& path, const ViewSet& views, const FrameSet* frames) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot open " + path.string());
  os.write(kViewMagic, 4);
  put_u64(os, static_cast<std::uint64_t>(views.views.size()));
  for (const auto& v : views.views) {
    put_u64(os, static_cast<std::uint64_t>(v.rows()));
    put_u64(os, static_cast<std::uint64_t>(v.cols()));
  }
  put_f64(os, views.sigma2);
  for (const auto& v : views.views) put_matrix(os, v);
  if (frames != nullptr) {
    put_u64(os, static_cast<std::uint64_t>(frames->X.rows()));
    put_u64(os, static_cast<std::uint64_t>(frames->X.cols()));
    put_u64(os, static_cast<std::uint64_t>(frames->preamble_len));
    put_matrix(os, frames->X);
  }
  if (!os) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

Dump read_dump(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kViewMagic, 4) != 0) {
    throw Error(ErrorKind::Io, path.string() + " is not a view dump");
  }
  const auto l = get_u64(is);
  if (l == 0 || l > 1024) throw Error(ErrorKind::Io, "implausible view count");
  std::vector<std::pair<Index, Index>> dims;
  for (std::uint64_t i = 0; i < l; ++i) {
    const auto r = static_cast<Index>(get_u64(is));
    const auto c = static_cast<Index>(get_u64(is));
    dims.emplace_back(r, c);
  }
  Dump d;
  d.views.sigma2 = get_f64(is);
  for (auto [r, c] : dims) {
    d.views.views.push_back(get_matrix(is, r, c));
    d.views.complex_views.push_back(unstack_real(d.views.views.back()));
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    FrameSet f;
    const auto n = static_cast<Index>(get_u64(is));
    const auto k = static_cast<Index>(get_u64(is));
    f.preamble_len = static_cast<int>(get_u64(is));
    f.X = get_matrix(is, n, k);
    f.preambles = f.X.topRows(f.preamble_len);
    d.frames = std::move(f);
  }
  return d;
}

}  // namespace edgeview::airlink
