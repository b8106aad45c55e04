#pragma once

#include <array>
#include <cstdint>

namespace wnac {

// Stream derivation rule, version 1:
//
//   key   = splitmix64 finalizer chain over (version, seed, domain, channel)
//   state = four successive splitmix64 outputs seeded with key
//   bits  = xoshiro256++
//   N(0,1) via Box-Muller on 53-bit uniforms in (0, 1]; both outputs of a
//   pair are used, cosine branch first.
//
// Every Wiener channel of a run owns one substream identified by
// (seed, domain, channel). Changing the rule requires bumping the version.
inline constexpr std::uint64_t kStreamDerivationVersion = 1;

enum class StreamDomain : std::uint64_t {
  Aiding = 0,
  Disturbance = 1,
  Auxiliary = 2,
};

std::uint64_t splitmix64_next(std::uint64_t& state);

std::uint64_t derive_stream_key(std::uint64_t seed, StreamDomain domain, std::uint64_t channel);

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t key);

  std::uint64_t operator()();

  // Uniform double in (0, 1].
  double uniform_open_closed();

 private:
  std::array<std::uint64_t, 4> s_{};
};

// Standard normal samples from one substream.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, StreamDomain domain, std::uint64_t channel);

  double operator()();

 private:
  Xoshiro256pp engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wnac
