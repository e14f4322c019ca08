#pragma once

#include <vector>

#include "rotkick/errors.hpp"

namespace rotkick {

// Uniform sample grid t_i = t0 + i*dt, i in [0, n).
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.01;
  int n = 0;

  double time(int i) const { return t0 + i * dt; }
  double t_end() const { return n > 0 ? time(n - 1) : t0; }

  std::vector<double> times() const {
    std::vector<double> t(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) t[static_cast<size_t>(i)] = time(i);
    return t;
  }

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("time grid spacing must be positive");
    if (n < 1) throw ConfigError("time grid must contain at least one sample");
  }

  // Grid covering [from, to] with spacing dt; includes the last point at or
  // before `to` (to + dt/2 guards against round-off at the upper edge).
  static TimeGrid span(double from, double to, double dt) {
    if (!(dt > 0.0)) throw ConfigError("time grid spacing must be positive");
    if (to < from) throw ConfigError("time grid end precedes start");
    int n = static_cast<int>((to - from) / dt + 0.5) + 1;
    while (n > 1 && from + (n - 1) * dt > to + dt * 0.5) --n;
    return TimeGrid{from, dt, n};
  }
};

}  // namespace rotkick
