#include "mkv/parallel.hpp"

#include <algorithm>
#include <thread>

namespace mkv {

ThreadScope::ThreadScope(std::size_t threads)
    : threads_(std::max<std::size_t>(1, threads)),
      control_(std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                     threads_)),
      arena_(std::make_unique<tbb::task_arena>(static_cast<int>(threads_))) {}

ThreadScope::~ThreadScope() = default;

std::size_t hardware_threads() {
  return std::max<unsigned>(1u, std::thread::hardware_concurrency());
}

}  // namespace mkv
