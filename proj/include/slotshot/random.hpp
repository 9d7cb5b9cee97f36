#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace slotshot {

// FNV-1a over bytes, finished with splitmix64.
std::uint64_t hash_string(std::string_view s);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view salt) {
  return mix_seed(seed, hash_string(salt));
}

// mt19937_64's raw output is fully specified by the standard, unlike the
// std distributions, so everything below reproduces across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). n must be > 0.
  std::uint64_t index(std::uint64_t n);

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = index(i);
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace slotshot
