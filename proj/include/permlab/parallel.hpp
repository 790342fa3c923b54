#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace permlab {

/// Runs body(worker) for worker = 0..workers-1 on separate threads and joins.
/// The first exception thrown by any worker is rethrown on the caller.
/// Work must be partitioned statically by the body so results do not depend
/// on scheduling.
template <class Body>
void run_workers(std::size_t workers, Body body) {
  if (workers <= 1) {
    body(std::size_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      threads.emplace_back([&, w] {
        try {
          body(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace permlab
