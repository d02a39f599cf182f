#include "qboot/rng.hpp"

namespace qboot {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z += kGamma;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, StreamKind kind,
                          std::uint64_t i) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(kind));
  h = mix64(h ^ i);
  return h;
}

RngStream::RngStream(std::uint64_t seed, StreamKind kind, std::uint64_t i,
                     std::uint64_t j) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(kind));
  h = mix64(h ^ i);
  h = mix64(h ^ j);
  state_ = h;
}

std::uint64_t RngStream::next_u64() {
  state_ += kGamma;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_open01() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
  // Multiply-high range reduction; bias is O(n / 2^64) and irrelevant here.
  return static_cast<std::uint64_t>(
      (static_cast<__uint128_t>(next_u64()) * n) >> 64);
}

}  // namespace qboot
