#include "cards/parallel.hpp"

#include <atomic>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cards::par {

namespace {
std::atomic<int> g_cap{-1};  // -1 = not initialized

int read_env_cap() {
  const char* env = std::getenv("CARDS_THREADS");
  if (env == nullptr) return 0;
  const long v = std::strtol(env, nullptr, 10);
  return v > 0 ? static_cast<int>(v) : 0;
}
}  // namespace

int thread_cap() {
  int cap = g_cap.load(std::memory_order_relaxed);
  if (cap < 0) {
    cap = read_env_cap();
    g_cap.store(cap, std::memory_order_relaxed);
  }
  return cap;
}

void set_thread_cap(int cap) { g_cap.store(cap < 0 ? 0 : cap, std::memory_order_relaxed); }

int active_threads() {
#ifdef _OPENMP
  int t = omp_get_max_threads();
#else
  int t = 1;
#endif
  const int cap = thread_cap();
  if (cap > 0 && cap < t) t = cap;
  return t > 0 ? t : 1;
}

}  // namespace cards::par
