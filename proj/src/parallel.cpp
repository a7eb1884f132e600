#include "transit/parallel.hpp"

namespace transit {

double sum_serial(std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc;
}

double sum_chunked(std::span<const double> values) {
  return indexed_sum_chunked(values.size(), [&](std::size_t i) { return values[i]; });
}

}  // namespace transit
