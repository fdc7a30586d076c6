#ifndef DAAS_PARALLEL_HPP
#define DAAS_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <vector>

/**
 * Data-parallel helpers.
 *
 * Work over n items is cut into fixed-size blocks whose boundaries depend only
 * on n and the block size, never on the worker count. Partial results are
 * combined with a fixed pairwise tree over block index, so floating-point
 * reductions are bit-identical for any number of workers.
 */
namespace daas::parallel {

/// Block size used for point-indexed reductions.
inline constexpr std::size_t kReductionBlock = 256;

/// Caps the worker count for the whole process. 0 restores the default.
void set_max_workers(std::size_t workers);
std::size_t max_workers();

/// Calls fn(begin, end) for every block [begin, end) of [0, n), possibly concurrently.
void for_blocks(std::size_t n, std::size_t block,
                const std::function<void(std::size_t, std::size_t)>& fn);

/// Pairwise combine in place: parts[0] ends up holding the reduction.
template <typename T, typename Combine>
void pairwise_reduce(std::vector<T>& parts, Combine combine) {
  for (std::size_t stride = 1; stride < parts.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < parts.size(); i += 2 * stride) {
      combine(parts[i], parts[i + stride]);
    }
  }
}

/**
 * Deterministic block reduction. `leaf(begin, end, acc)` accumulates one
 * block sequentially into a default-constructed copy of `init`;
 * `combine(lhs, rhs)` folds rhs into lhs.
 */
template <typename T, typename Leaf, typename Combine>
T reduce(std::size_t n, const T& init, Leaf leaf, Combine combine,
         std::size_t block = kReductionBlock) {
  if (n == 0) {
    return init;
  }
  const std::size_t blocks = (n + block - 1) / block;
  std::vector<T> parts(blocks, init);
  for_blocks(blocks, 1, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t lo = b * block;
      const std::size_t hi = lo + block < n ? lo + block : n;
      leaf(lo, hi, parts[b]);
    }
  });
  pairwise_reduce(parts, combine);
  return std::move(parts.front());
}

/// Sum of f(i) for i in [0, n) with the fixed reduction tree.
double sum(std::size_t n, const std::function<double(std::size_t)>& f);

} // namespace daas::parallel

#endif
