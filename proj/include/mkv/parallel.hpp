#pragma once

#include <cstddef>
#include <memory>

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace mkv {

/// Caps the worker pool while alive. Results never depend on the cap: every
/// parallel loop writes to per-index slots and reductions run in index order.
class ThreadScope {
 public:
  explicit ThreadScope(std::size_t threads);
  ~ThreadScope();
  ThreadScope(const ThreadScope&) = delete;
  ThreadScope& operator=(const ThreadScope&) = delete;

  std::size_t threads() const { return threads_; }

  /// Runs f inside an arena of exactly threads() slots, which may exceed the
  /// core count (useful for exercising nondeterministic schedules).
  template <typename F>
  auto execute(F&& f) -> decltype(f()) {
    return arena_->execute(std::forward<F>(f));
  }

 private:
  std::size_t threads_;
  std::unique_ptr<tbb::global_control> control_;
  std::unique_ptr<tbb::task_arena> arena_;
};

std::size_t hardware_threads();

template <typename Body>
void parallel_for(std::size_t n, const Body& body, std::size_t grain = 1) {
  if (n == 0) return;
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, grain),
                    [&](const tbb::blocked_range<std::size_t>& r) {
                      for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
                    });
}

}  // namespace mkv
