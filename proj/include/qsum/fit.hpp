#pragma once

#include <vector>

namespace qsum {

// Constants with M H^N >= R_N for every N, chosen to be tight on average in log scale.
struct PowerBound {
  double M = 0.0;
  double H = 1.0;
};

// R[N] for N = 0..size-1; zero entries impose nothing. Throws BoundUnfittable on non-finite input.
PowerBound fit_power_bound(const std::vector<double>& R, double floor = 1e-300);

}  // namespace qsum
