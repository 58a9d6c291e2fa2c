#include "sensorbf/bca_types.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "sensorbf/errors.hpp"

namespace sensorbf {

std::string_view to_string(Algorithm a) {
  return a == Algorithm::Batch ? "batch" : "cyclic";
}

Algorithm parse_algorithm(std::string_view s) {
  if (s == "batch") return Algorithm::Batch;
  if (s == "cyclic") return Algorithm::Cyclic;
  throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected batch or cyclic)");
}

double IterationTrace::min_increment() const {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < mi.size(); ++j) lo = std::min(lo, mi[j] - mi[j - 1]);
  return lo;
}

}  // namespace sensorbf
