#include "daas/parallel.hpp"

#include <memory>
#include <mutex>

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/partitioner.h>
#include <tbb/task_arena.h>

namespace daas::parallel {

namespace {

std::mutex g_mutex;
std::unique_ptr<tbb::global_control> g_control;
std::unique_ptr<tbb::task_arena> g_arena;
std::size_t g_workers = 0;

tbb::task_arena* current_arena() {
  std::lock_guard lock(g_mutex);
  return g_arena.get();
}

} // namespace

void set_max_workers(std::size_t workers) {
  std::lock_guard lock(g_mutex);
  g_arena.reset();
  g_control.reset();
  g_workers = workers;
  if (workers > 0) {
    // The arena pins the worker count even above the core count; the global
    // control lets the scheduler actually supply that many threads.
    g_control = std::make_unique<tbb::global_control>(
        tbb::global_control::max_allowed_parallelism, workers);
    g_arena = std::make_unique<tbb::task_arena>(static_cast<int>(workers));
  }
}

std::size_t max_workers() {
  std::lock_guard lock(g_mutex);
  if (g_workers > 0) {
    return g_workers;
  }
  return static_cast<std::size_t>(tbb::this_task_arena::max_concurrency());
}

void for_blocks(std::size_t n, std::size_t block,
                const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) {
    return;
  }
  if (block == 0) {
    block = 1;
  }
  if (n <= block) {
    fn(0, n);
    return;
  }
  // simple_partitioner splits down to the grain, so every call of fn sees a
  // range whose result does not depend on which thread runs it.
  auto body = [&] {
    tbb::parallel_for(
        tbb::blocked_range<std::size_t>(0, n, block),
        [&](const tbb::blocked_range<std::size_t>& r) { fn(r.begin(), r.end()); },
        tbb::simple_partitioner());
  };
  if (auto* arena = current_arena()) {
    arena->execute(body);
  } else {
    body();
  }
}

double sum(std::size_t n, const std::function<double(std::size_t)>& f) {
  return reduce(
      n, 0.0,
      [&](std::size_t lo, std::size_t hi, double& acc) {
        for (std::size_t i = lo; i < hi; ++i) {
          acc += f(i);
        }
      },
      [](double& lhs, const double& rhs) { lhs += rhs; });
}

} // namespace daas::parallel
