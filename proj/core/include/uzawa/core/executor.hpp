#pragma once

#include <cstddef>
#include <functional>
#include <memory>

namespace uzawa {

/// Runs index loops on a bounded number of worker threads.
///
/// Work items must write to disjoint outputs; callers reduce in index order so
/// results do not depend on the worker count. With one worker the loop runs
/// inline on the calling thread.
class Executor {
 public:
  explicit Executor(std::size_t workers = 1);
  ~Executor();
  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  std::size_t workers() const noexcept { return workers_; }

  void for_each(std::size_t count, const std::function<void(std::size_t)>& body) const;

 private:
  std::size_t workers_;
  struct Arena;
  std::unique_ptr<Arena> arena_;
};

}  // namespace uzawa
