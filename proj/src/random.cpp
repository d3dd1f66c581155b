#include "speclines/random.hpp"

#include <cmath>

namespace speclines {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngSpec RngSpec::derive(std::uint64_t index) const {
  return RngSpec{splitmix64(master_seed ^ splitmix64(stream_index + 0x632BE59BD9B4E019ULL)), index};
}

GaussianStream::GaussianStream(const RngSpec& spec)
    : engine_(splitmix64(spec.master_seed) ^ splitmix64(splitmix64(spec.stream_index) + 1)) {}

double GaussianStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  cached_ = v * factor;
  has_cached_ = true;
  return u * factor;
}

RealVector GaussianStream::vector(Index n) {
  RealVector out(n);
  for (Index i = 0; i < n; ++i) out(i) = next();
  return out;
}

}  // namespace speclines
