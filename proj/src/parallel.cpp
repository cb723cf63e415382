#include "vpbwave/parallel.hpp"

#include <atomic>
#include <cstdlib>

namespace vpb {
namespace {

std::atomic<int> g_override{0};

}  // namespace

int thread_count() {
  if (const int o = g_override.load(); o > 0) return o;
  if (const char* env = std::getenv("VPBWAVE_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_thread_count(int n) { g_override.store(n > 0 ? n : 0); }

}  // namespace vpb
