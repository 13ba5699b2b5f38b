#include "freeprob/limits.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <string>

namespace freeprob {

namespace {

std::mutex limits_mutex;

EngineLimits initial_limits() {
  EngineLimits l;
  if (const char* env = std::getenv("FREEPROB_MAX_DEGREE")) {
    try {
      int d = std::stoi(env);
      if (d > 0) {
        l.max_cumulant_degree = d;
        l.max_partition_size = std::max(l.max_partition_size, 2 * d);
      }
    } catch (const std::exception&) {
      // ignored: a malformed override leaves the defaults
    }
  }
  return l;
}

EngineLimits& current() {
  static EngineLimits l = initial_limits();
  return l;
}

}  // namespace

EngineLimits engine_limits() {
  std::lock_guard lock(limits_mutex);
  return current();
}

void set_engine_limits(const EngineLimits& limits) {
  std::lock_guard lock(limits_mutex);
  current() = limits;
}

}  // namespace freeprob
