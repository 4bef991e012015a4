#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace polaron {

// Uniform grid of path increments on [t_lo, t_hi].
struct TimeGrid {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double step = 0.0;
  int n_cells = 0;

  static TimeGrid make(double t_lo, double t_hi, double step) {
    TimeGrid g;
    g.t_lo = t_lo;
    g.t_hi = t_hi;
    g.step = step;
    if (!(step > 0.0) || !(t_hi > t_lo)) throw std::invalid_argument("TimeGrid: bad window");
    double cells = (t_hi - t_lo) / step;
    g.n_cells = static_cast<int>(std::llround(cells));
    if (std::fabs(g.n_cells * step - (t_hi - t_lo)) > 1e-12 * std::fmax(1.0, t_hi - t_lo))
      throw std::invalid_argument("TimeGrid: window is not a whole number of cells");
    return g;
  }

  double node(int i) const { return t_lo + i * step; }          // i in [0, n_cells]
  double midpoint(int i) const { return t_lo + (i + 0.5) * step; }
  double length() const { return t_hi - t_lo; }
};

// One weighted interval (s, t, u) of the point process.
struct WeightedInterval {
  double s = 0.0;
  double t = 0.0;
  double u = 0.0;
};

// Finite weighted-interval configuration in a window; the state of the
// tilted point process. Items stay sorted by s; duplicates are allowed.
struct IntervalConfig {
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::vector<WeightedInterval> items;

  void validate() const {
    if (!(t_hi > t_lo)) throw std::invalid_argument("IntervalConfig: empty window");
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& it = items[i];
      if (!(it.s >= t_lo && it.s < it.t && it.t <= t_hi))
        throw std::invalid_argument("IntervalConfig: interval outside window or s >= t at index " +
                                    std::to_string(i));
      if (!(it.u > 0.0) || !std::isfinite(it.u))
        throw std::invalid_argument("IntervalConfig: u must be positive and finite at index " +
                                    std::to_string(i));
      if (i > 0 && items[i - 1].s > it.s)
        throw std::invalid_argument("IntervalConfig: items not sorted by s");
    }
  }

  void sort_by_s();
  double window_length() const { return t_hi - t_lo; }
};

}  // namespace polaron
