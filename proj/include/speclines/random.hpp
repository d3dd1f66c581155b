#pragma once

#include <cstdint>
#include <random>

#include "speclines/numerics.hpp"

namespace speclines {

/// Identifies one reproducible random stream. Two specs with the same fields
/// generate the same sequence; distinct stream indices give decorrelated
/// sequences.
struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  /// A child stream keyed by (this stream, index). Used to hand out
  /// per-replication and per-purpose streams from one master seed.
  [[nodiscard]] RngSpec derive(std::uint64_t index) const;

  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Standard normal variates by the Marsaglia polar method on a 64-bit
/// Mersenne Twister seeded from the spec.
class GaussianStream {
 public:
  explicit GaussianStream(const RngSpec& spec);

  double next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  RealVector vector(Index n);

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace speclines
