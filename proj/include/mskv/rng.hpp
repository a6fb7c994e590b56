#pragma once

#include <array>
#include <cstdint>

namespace mskv::rng {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t& state);

/// Uniform in (0, 1) from the top 52 bits, strictly inside both ends.
double to_open_unit(std::uint64_t bits);

/// Stream tags keep independent uses of one seed apart.
enum Stream : std::uint32_t {
  kNoise = 0,
  kInit = 1,
  kAuxNoise = 2,
  kAuxInit = 3,
  kSeeds = 4,
};

/// Standard normals addressed by (seed, step, particle, species, stream,
/// block). Each block yields two values, so coordinate j of a particle is
/// element j % 2 of block j / 2. Pure function of its arguments.
std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t step, std::uint32_t index, std::uint32_t species,
                                  std::uint32_t stream, std::uint32_t block);

/// Two uniforms in (0, 1) addressed the same way.
std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint64_t step, std::uint32_t index, std::uint32_t species,
                                   std::uint32_t stream, std::uint32_t block);

/// Sequential generator over a fixed (seed, stream) for setup work.
class Sequence {
 public:
  Sequence(std::uint64_t seed, std::uint32_t stream) : seed_(seed), stream_(stream) {}
  double uniform();
  double normal();

 private:
  std::uint64_t seed_;
  std::uint32_t stream_;
  std::uint64_t count_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mskv::rng
