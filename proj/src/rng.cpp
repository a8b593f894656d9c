#include "sbd/rng.hpp"

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace sbd {
namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      ctr_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

Philox4x32::result_type Philox4x32::operator()() {
  if (used_ == 4) {
    buf_ = block(ctr_, key_);
    if (++ctr_[0] == 0) ++ctr_[1];
    used_ = 0;
  }
  return buf_[used_++];
}

Rng::Rng(std::uint64_t seed, Stream stream, std::uint32_t substream)
    : eng_(seed, (static_cast<std::uint64_t>(stream) << 32) | substream) {}

double Rng::uniform() { return boost::random::uniform_01<double>()(eng_); }

double Rng::normal() { return boost::random::normal_distribution<double>(0.0, 1.0)(eng_); }

double Rng::gamma(double shape) { return boost::random::gamma_distribution<double>(shape, 1.0)(eng_); }

double Rng::inv_gamma(double shape, double scale) { return scale / gamma(shape); }

Eigen::VectorXd Rng::normal_vector(Eigen::Index n) {
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal();
  return z;
}

Eigen::MatrixXd Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = normal();
  return z;
}

ChainRng::ChainRng(std::uint64_t seed, std::uint32_t chain)
    : blur(seed, Stream::Blur, chain),
      image(seed, Stream::Image, chain),
      aux(seed, Stream::AuxData, chain),
      sigma_c(seed, Stream::SigmaC, chain),
      sigma_w(seed, Stream::SigmaW, chain),
      zeta(seed, Stream::Zeta, chain),
      hmc(seed, Stream::Hmc, chain),
      selector(seed, Stream::Selector, chain) {}

}  // namespace sbd
