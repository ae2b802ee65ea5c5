#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "loewner/verdict.hpp"

namespace loewner {

/// Worker count: LOEWNER_THREADS when set to a positive integer, else the
/// number of logical processors.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LOEWNER_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return hw;
}

/**
 * @brief Runs trials 0..count-1 and returns the verdict of the lowest failing
 * index.
 *
 * Workers skip trials above the lowest failure seen so far; every trial below
 * it is still evaluated, so the result matches sequential execution. The
 * first exception (by trial index) is rethrown.
 */
template <class Trial>
Verdict run_trials(int count, Trial&& trial, unsigned workers = worker_count()) {
  std::atomic<int> next{0};
  std::atomic<int> first_fail{count};
  std::mutex mu;
  std::optional<Witness> best;
  int best_index = count;
  std::exception_ptr error;
  int error_index = count;

  auto work = [&] {
    while (true) {
      int i = next.fetch_add(1);
      if (i >= count || i > first_fail.load()) return;
      try {
        std::optional<Witness> w = trial(i);
        if (!w) continue;
        std::lock_guard lock(mu);
        if (i < best_index) {
          best_index = i;
          best = std::move(w);
        }
        int cur = first_fail.load();
        while (i < cur && !first_fail.compare_exchange_weak(cur, i)) {
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        int cur = first_fail.load();
        while (i < cur && !first_fail.compare_exchange_weak(cur, i)) {
        }
      }
    }
  };

  unsigned n = std::min<unsigned>(std::max(1u, workers), static_cast<unsigned>(std::max(count, 1)));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  if (error && error_index <= best_index) std::rethrow_exception(error);
  Verdict v;
  if (best) {
    v.passed = false;
    v.checks_run = best_index + 1;
    v.witness = std::move(best);
  } else {
    v.checks_run = count;
  }
  return v;
}

}  // namespace loewner
