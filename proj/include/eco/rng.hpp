// Copyright 2026 The ECO Authors. All Rights Reserved.
//
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

#ifndef ECO_RNG_H_
#define ECO_RNG_H_

#include <cstdint>
#include <vector>

#include "eco/common.hpp"

namespace eco {

// Deterministic splitmix64 generator. Every randomized stage of the system
// draws from this type only; std::random distributions are avoided because
// their outputs are implementation-defined and would break byte-for-byte
// reproducibility across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1): top 53 bits scaled, so results are exact doubles.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Modulo bias is irrelevant at the n used here.
  uint64_t uniform_int(uint64_t n) {
    ECO_CHECK(n > 0, "uniform_int: n must be positive");
    return next_u64() % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  template <typename T>
  const T& choice(const std::vector<T>& v) {
    ECO_CHECK(!v.empty(), "choice: empty vector");
    return v[static_cast<size_t>(uniform_int(v.size()))];
  }

  // Derives an independent stream without advancing this generator. Used to
  // give each template / epoch / dialog its own stream so insertion order
  // does not couple unrelated draws.
  Rng fork(uint64_t stream) const {
    uint64_t z = state_ ^ (0x632be59bd9b4e019ULL * (stream + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

 private:
  uint64_t state_;
};

// Stable seed mixer for naming derived streams, e.g. mix_seed(seed, epoch).
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  return z ^ (z >> 31);
}

}  // namespace eco

#endif  // ECO_RNG_H_
