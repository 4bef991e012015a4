#include "polaron/intervals.hpp"

#include <algorithm>

namespace polaron {

void IntervalConfig::sort_by_s() {
  std::stable_sort(items.begin(), items.end(),
                   [](const WeightedInterval& a, const WeightedInterval& b) { return a.s < b.s; });
}

}  // namespace polaron
