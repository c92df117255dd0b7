// Copyright 2026 The tagcl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TAGCL_RNG_HPP_
#define TAGCL_RNG_HPP_

#include <cstdint>
#include <vector>

namespace tagcl {

// Deterministic pseudo-random stream. Every random draw in the library goes
// through this type so that a single 64-bit seed reproduces a run bit for bit
// on any platform; nothing here depends on std::uniform_*_distribution, whose
// output is implementation defined.
//
// The generator is splitmix64 (Steele, Lea, Flood 2014). It is equidistributed
// enough for sampling negatives, permutations and synthetic graphs, and its
// whole state is one word, which makes deriving independent substreams cheap.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], both ends inclusive. Uses rejection sampling
  // so the distribution is exact for any range width.
  int uniform_int(int lo, int hi);

  bool bernoulli(double p) { return uniform() < p; }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
      int j = uniform_int(0, i);
      std::swap(v[i], v[static_cast<std::size_t>(j)]);
    }
  }

  std::vector<int> permutation(int n);

  // Sample k distinct values from [0, n) in selection order.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::uint64_t state_;
};

// Mixes a base seed with up to two stream labels (epoch, batch index, node id,
// ...) into a fresh seed. Distinct labels give statistically independent
// streams, and the derivation is order sensitive.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace tagcl

#endif  // TAGCL_RNG_HPP_
