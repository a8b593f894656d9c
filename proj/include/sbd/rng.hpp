#pragma once

// Counter-based random numbers. Philox4x32-10 gives every (seed, stream)
// pair an independent sequence, so each parameter block of a chain draws
// from its own stream and runs replay bit-for-bit given the seed.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <limits>

namespace sbd {

class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  Philox4x32() : Philox4x32(0, 0) {}
  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// One block of the raw bijection (exposed for known-answer tests).
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

 private:
  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> ctr_{};
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
};

enum class Stream : std::uint32_t { Blur = 1, Image, AuxData, SigmaC, SigmaW, Zeta, Hmc, Selector, Init, Sim, Test };

class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream, std::uint32_t substream = 0);

  double uniform();
  double normal();
  double gamma(double shape);
  /// Inverse gamma with shape a and scale b: density b^a/Gamma(a) x^{-a-1} e^{-b/x}.
  double inv_gamma(double shape, double scale);
  Eigen::VectorXd normal_vector(Eigen::Index n);
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

  Philox4x32& engine() { return eng_; }

 private:
  Philox4x32 eng_;
};

/// Per-chain bundle of streams, one per parameter block.
struct ChainRng {
  explicit ChainRng(std::uint64_t seed, std::uint32_t chain = 0);
  Rng blur, image, aux, sigma_c, sigma_w, zeta, hmc, selector;
};

}  // namespace sbd
