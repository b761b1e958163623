#pragma once

#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace schottky::detail {

// Runs job(shell) for shell = 0..n_shells-1 and returns the results in shell
// order. With threads > 1 the shells are handed to workers through an atomic
// counter; each shell's computation stays sequential and self-contained, and
// both the result order and the error choice (lowest failing shell wins) are
// fixed, so outputs are identical for every thread count.
template <class Result, class ShellFn>
std::vector<Result> shell_map(int n_shells, int threads, ShellFn&& job) {
  std::vector<std::optional<Result>> slots(static_cast<std::size_t>(n_shells));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_shells));

  auto run_one = [&](int shell) {
    try {
      slots[shell].emplace(job(shell));
    } catch (...) {
      errors[shell] = std::current_exception();
    }
  };

  if (threads <= 1 || n_shells <= 1) {
    for (int shell = 0; shell < n_shells; ++shell) run_one(shell);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int shell = next.fetch_add(1, std::memory_order_relaxed);
        if (shell >= n_shells) return;
        run_one(shell);
      }
    };
    const int n_workers = std::min(threads, n_shells);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (int shell = 0; shell < n_shells; ++shell)
    if (errors[shell]) std::rethrow_exception(errors[shell]);

  std::vector<Result> results;
  results.reserve(static_cast<std::size_t>(n_shells));
  for (auto& slot : slots) results.push_back(std::move(*slot));
  return results;
}

}  // namespace schottky::detail
