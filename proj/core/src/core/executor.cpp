#include "uzawa/core/executor.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/info.h>
#include <tbb/task_arena.h>

#include <algorithm>

namespace uzawa {

struct Executor::Arena {
  explicit Arena(int n) : arena(n) {}
  tbb::task_arena arena;
};

Executor::Executor(std::size_t workers) : workers_(std::max<std::size_t>(1, workers)) {
  // More threads than the machine offers only makes TBB complain.
  const auto threads = std::min<std::size_t>(workers_, std::size_t(std::max(1, tbb::info::default_concurrency())));
  if (threads > 1) arena_ = std::make_unique<Arena>(static_cast<int>(threads));
}

Executor::~Executor() = default;

void Executor::for_each(std::size_t count, const std::function<void(std::size_t)>& body) const {
  if (count == 0) return;
  if (!arena_ || count == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  arena_->arena.execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, count), [&](const tbb::blocked_range<std::size_t>& r) {
      for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
    });
  });
}

}  // namespace uzawa
