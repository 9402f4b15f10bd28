#pragma once
#include <Eigen/Core>
#include <array>
#include <cstdint>

namespace defsurv::compute {

// Counter-based stream RNG (Philox4x32-10). A draw is a pure function of
// (seed, stream_id, counter), so any stream yields the same sequence no
// matter how many other streams exist or in what order they are consumed.
// Every draw (uniform or normal) consumes exactly one counter tick.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter = 0)
      : seed_(seed), stream_id_(stream_id), counter_(counter) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }
  void set_counter(std::uint64_t c) { counter_ = c; }

  // Uniform on the open interval (0,1); advances the counter by 1.
  double uniform();
  // Standard normal (Box-Muller, cosine branch); advances the counter by 1.
  double normal();
  // n i.i.d. standard normals; advances the counter by exactly n.
  Eigen::VectorXd normal_vec(int n);
  // Uniform integer in [0, n); advances the counter by 1.
  int uniform_index(int n);

  // One Philox4x32-10 block; exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox(const std::array<std::uint32_t, 4>& ctr,
                                             const std::array<std::uint32_t, 2>& key);

 private:
  std::array<std::uint32_t, 4> next_block();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_;
};

// Purpose tags keeping independent uses of randomness on disjoint streams.
enum class StreamPurpose : std::uint64_t {
  kParamInit = 1,
  kBatch = 2,
  kReparamNoise = 3,
  kGenerator = 4,
  kPrediction = 5,
  kValidation = 6,
};

// Stream id packing: 8-bit purpose | 28-bit a | 28-bit b.
inline RngStream derive_stream(std::uint64_t seed, StreamPurpose purpose,
                               std::uint64_t a = 0, std::uint64_t b = 0) {
  const std::uint64_t id = (static_cast<std::uint64_t>(purpose) << 56) |
                           ((a & 0xFFFFFFFull) << 28) | (b & 0xFFFFFFFull);
  return RngStream(seed, id);
}

}  // namespace defsurv::compute
