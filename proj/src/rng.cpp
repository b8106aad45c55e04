#include "wnac/rng.hpp"

#include <cmath>
#include <numbers>

namespace wnac {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

constexpr std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  return mix(state);
}

std::uint64_t derive_stream_key(std::uint64_t seed, StreamDomain domain, std::uint64_t channel) {
  std::uint64_t h = mix(kStreamDerivationVersion + 0x9e3779b97f4a7c15ULL);
  h = mix(h ^ seed);
  h = mix(h ^ (static_cast<std::uint64_t>(domain) + 0x632be59bd9b4e019ULL));
  h = mix(h ^ (channel + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t key) {
  std::uint64_t sm = key;
  for (auto& word : s_) word = splitmix64_next(sm);
}

std::uint64_t Xoshiro256pp::operator()() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256pp::uniform_open_closed() {
  // (k + 1) / 2^53 for k in [0, 2^53)
  return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
}

NormalStream::NormalStream(std::uint64_t seed, StreamDomain domain, std::uint64_t channel)
    : engine_(derive_stream_key(seed, domain, channel)) {}

double NormalStream::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = engine_.uniform_open_closed();
  const double u2 = engine_.uniform_open_closed();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace wnac
