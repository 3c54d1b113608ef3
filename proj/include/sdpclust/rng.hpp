// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SDPCLUST_RNG_HPP
#define SDPCLUST_RNG_HPP

#include <cmath>
#include <cstdint>

namespace sdpclust {

// Counter-based generator. Each stream is keyed by (seed, a, b) and
// produces values by hashing successive counters, so the output for a
// given key never depends on the order in which other streams are drawn.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0)
      : key_(mix(mix(seed ^ 0x9e3779b97f4a7c15ULL) ^ mix(a ^ 0xbf58476d1ce4e5b9ULL) ^
                 mix(b ^ 0x94d049bb133111ebULL))) {}

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform on [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (one value per pair of uniforms).
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    // Guard against log(0).
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  // Uniform integer in [0, bound) without modulo bias worth caring about
  // at the scales used here (bound << 2^64).
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Derives a child seed for structured sub-streams (per trial, per cell...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return StreamRng::mix(StreamRng::mix(seed ^ StreamRng::mix(a)) ^ StreamRng::mix(b));
}

}  // namespace sdpclust

#endif  // SDPCLUST_RNG_HPP
