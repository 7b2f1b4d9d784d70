#include "qsum/fit.hpp"

#include <cmath>
#include <limits>

#include "qsum/errors.hpp"

namespace qsum {

PowerBound fit_power_bound(const std::vector<double>& R, double floor) {
  std::vector<std::pair<int, double>> pts;
  for (size_t n = 0; n < R.size(); ++n) {
    if (!std::isfinite(R[n]) || R[n] < 0.0) throw BoundUnfittable("ratio R_" + std::to_string(n) + " is not finite");
    if (R[n] > 0.0) pts.emplace_back(static_cast<int>(n), std::log(R[n]));
  }
  if (pts.empty()) return {floor, 1.0};
  double nbar = 0.0;
  for (auto& p : pts) nbar += p.first;
  nbar /= pts.size();
  // minimize log M + nbar log H subject to log M + N log H >= log R_N
  auto intercept = [&](double y) {
    double x = -std::numeric_limits<double>::infinity();
    for (auto& p : pts) x = std::max(x, p.second - p.first * y);
    return x;
  };
  double best_y = 0.0, best = std::numeric_limits<double>::infinity();
  for (double y = -40.0; y <= 40.0; y += 0.005) {
    double obj = intercept(y) + nbar * y;
    if (obj < best - 1e-12) {
      best = obj;
      best_y = y;
    }
  }
  return {std::exp(intercept(best_y)), std::exp(best_y)};
}

}  // namespace qsum
