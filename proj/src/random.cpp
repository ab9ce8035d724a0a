#include "samplenet/random.hpp"

#include <cmath>
#include <numbers>

namespace samplenet {
namespace {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

std::uint64_t derive_seed(const StreamKey& key) {
  std::uint64_t h = mix64(key.master_seed + kGolden);
  h = mix64(h ^ (key.replica + 2 * kGolden));
  h = mix64(h ^ ((static_cast<std::uint64_t>(key.agent) << 32) | key.round));
  h = mix64(h ^ (static_cast<std::uint64_t>(key.kind) * kGolden));
  return h;
}

SplitMix64::result_type SplitMix64::operator()() {
  state_ += kGolden;
  return mix64(state_);
}

double SplitMix64::uniform() {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double SplitMix64::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double normal_draw(const StreamKey& key) {
  SplitMix64 rng(key);
  return rng.normal();
}

}  // namespace samplenet
