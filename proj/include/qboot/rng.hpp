#pragma once

#include <cstdint>

namespace qboot {

// Labels for the independent random streams used by the resampling machinery.
// Every replicate gets its own stream keyed by (seed, kind, i, j), so results
// do not depend on evaluation order or worker count.
enum class StreamKind : std::uint64_t {
  data = 1,          // simulated data samples in coverage studies
  shared_outer = 2,  // batches shared between the first and outer levels
  first_level = 3,   // first-level resamples when batch sharing is off
  outer_level = 4,   // outer-level resamples when batch sharing is off
  inner_level = 5,   // inner-level resamples (always fresh)
  outermost = 6,     // outermost samples for bandwidth selection
  derive = 7,        // sub-seed derivation for nested runs
};

std::uint64_t mix64(std::uint64_t z);

// Derive a child seed for an independent nested run (one per replication in a
// study, one per outermost sample in bandwidth selection).
std::uint64_t derive_seed(std::uint64_t seed, StreamKind kind, std::uint64_t i);

// Counter-based generator (SplitMix64). The state walks a Weyl sequence and
// each output is a bijective mix of the counter, so creating a stream is O(1)
// and streams with distinct keys are statistically independent.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamKind kind, std::uint64_t i = 0,
            std::uint64_t j = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double next_double();

  // Uniform on (0, 1), for inverse-CDF transforms.
  double next_open01();

  // Uniform on {0, ..., n - 1}.
  std::uint64_t next_below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

}  // namespace qboot
