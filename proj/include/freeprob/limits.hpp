#pragma once

#include <cstddef>

namespace freeprob {

struct EngineLimits {
  int max_partition_size = 14;
  int max_cumulant_degree = 8;
  // dense word tables: total number of entries over all lengths
  std::size_t max_table_entries = std::size_t{1} << 24;
};

// FREEPROB_MAX_DEGREE, when set, replaces max_cumulant_degree and raises
// max_partition_size to at least twice that.
EngineLimits engine_limits();
void set_engine_limits(const EngineLimits& limits);

}  // namespace freeprob
