#ifndef DAAS_RANDOM_HPP
#define DAAS_RANDOM_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace daas {

/**
 * Seeded generator with portable derived draws. The engine is mt19937_64,
 * whose output sequence is fixed by the standard; the uniform and shuffle
 * helpers here avoid the implementation-defined standard distributions so
 * artifacts are reproducible across standard libraries.
 */
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

private:
  std::mt19937_64 engine_;
};

/// Mixes a base seed with a stream index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

} // namespace daas

#endif
