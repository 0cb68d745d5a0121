#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

namespace cpppkit {

enum class Backend { serial, openmp };

struct Execution {
  Backend backend = Backend::openmp;
  int workers = 1;
};

/// Runs fn(i) for i in [0, n). Every index must write only to its own output
/// slot and draw from its own RandomStream, so both backends produce identical
/// results. The serial loop is the reference the OpenMP path is tested against.
/// The first failing index (lowest i) has its exception rethrown.
template <class Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
  if (exec.backend == Backend::serial || exec.workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(exec.workers)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace cpppkit
