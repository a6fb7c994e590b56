#include "mskv/rng.hpp"

#include <cmath>
#include <numbers>

namespace mskv::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t step, std::uint32_t index, std::uint32_t species,
                                   std::uint32_t stream, std::uint32_t blk) {
  // The high half of step is folded into the key so long runs never wrap.
  const auto key_lo = static_cast<std::uint32_t>(seed);
  const auto key_hi = static_cast<std::uint32_t>(seed >> 32) ^ (static_cast<std::uint32_t>(step >> 32) * kWeyl0);
  return philox4x32({static_cast<std::uint32_t>(step), index, (species << 16) | (stream & 0xFFFFu), blk},
                    {key_lo, key_hi});
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double to_open_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52; }

std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint64_t step, std::uint32_t index, std::uint32_t species,
                                   std::uint32_t stream, std::uint32_t blk) {
  const auto r = block(seed, step, index, species, stream, blk);
  const std::uint64_t b0 = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t b1 = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  return {to_open_unit(b0), to_open_unit(b1)};
}

std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t step, std::uint32_t index, std::uint32_t species,
                                  std::uint32_t stream, std::uint32_t blk) {
  const auto u = uniform_pair(seed, step, index, species, stream, blk);
  const double rad = std::sqrt(-2.0 * std::log(u[0]));
  const double ang = 2.0 * std::numbers::pi * u[1];
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

double Sequence::uniform() {
  const auto u = uniform_pair(seed_, count_ >> 1, 0, 0, stream_, 0);
  const double v = u[count_ & 1];
  ++count_;
  return v;
}

double Sequence::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(ang);
  has_spare_ = true;
  return rad * std::cos(ang);
}

}  // namespace mskv::rng
