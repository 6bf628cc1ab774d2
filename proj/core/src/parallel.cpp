#include "rscorrect/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <thread>
#include <vector>

namespace rscorrect {

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) {
    n = 1;
  }
  if (const char* env = std::getenv("RSCORRECT_THREADS")) {
    int cap = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), cap);
    if (ec == std::errc() && cap > 0) {
      n = std::min(n, cap);
    }
  }
  return n;
}

void parallel_for(int begin, int end,
                  const std::function<void(int, int)>& body) {
  const int count = end - begin;
  if (count <= 0) {
    return;
  }
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    body(begin, end);
    return;
  }
  std::vector<std::jthread> threads;
  threads.reserve(workers - 1);
  const int chunk = (count + workers - 1) / workers;
  for (int w = 1; w < workers; ++w) {
    const int lo = begin + w * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo < hi) {
      threads.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
  }
  body(begin, std::min(end, begin + chunk));
}

}  // namespace rscorrect
