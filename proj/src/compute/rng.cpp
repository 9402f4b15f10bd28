#include "defsurv/compute/rng.hpp"

#include <cmath>

#include "defsurv/errors.hpp"

namespace defsurv::compute {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double u64_to_open_unit(std::uint64_t x) {
  // 53-bit mantissa, offset by half an ulp: strictly inside (0,1).
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> RngStream::philox(const std::array<std::uint32_t, 4>& ctr,
                                               const std::array<std::uint32_t, 2>& key) {
  std::array<std::uint32_t, 4> c = ctr;
  std::array<std::uint32_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

std::array<std::uint32_t, 4> RngStream::next_block() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
      static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                            static_cast<std::uint32_t>(seed_ >> 32)};
  ++counter_;
  return philox(ctr, key);
}

double RngStream::uniform() {
  const auto r = next_block();
  const std::uint64_t x = (static_cast<std::uint64_t>(r[1]) << 32) | r[0];
  return u64_to_open_unit(x);
}

double RngStream::normal() {
  const auto r = next_block();
  const std::uint64_t x0 = (static_cast<std::uint64_t>(r[1]) << 32) | r[0];
  const std::uint64_t x1 = (static_cast<std::uint64_t>(r[3]) << 32) | r[2];
  const double u1 = u64_to_open_unit(x0);
  const double u2 = u64_to_open_unit(x1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::VectorXd RngStream::normal_vec(int n) {
  if (n < 1) throw ShapeError("normal_vec: n must be >= 1");
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = normal();
  return out;
}

int RngStream::uniform_index(int n) {
  if (n < 1) throw ShapeError("uniform_index: n must be >= 1");
  const int idx = static_cast<int>(uniform() * n);
  return idx >= n ? n - 1 : idx;
}

}  // namespace defsurv::compute
